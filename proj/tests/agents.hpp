#pragma once

// Command-driven threads for deterministic message-ordering tests. An agent
// is linked to a control hub and does nothing until told:
//   say(Target, T)  send T to Target (thread(I,G) or hub(I,G)), then ack
//   quit            end the goal
// Acks go to the control hub, so the driver knows a send has completed before
// it schedules the next one.

#include "lpar/pipeline.hpp"
#include "lpar/runtime.hpp"

namespace agents {

using namespace lpar;

inline Goal agent(Runtime& rt) {
  return from_function(0, [&rt](const Bindings&) {
    for (;;) {
      Envelope e = rt.receive_any();
      if (e.payload.is_done()) continue;
      const Term& cmd = e.payload.term();
      if (cmd.is_atom("quit")) break;
      if (cmd.is_compound() && cmd.name() == "say") {
        const bool ok = send_to(rt, decode_recipient(cmd.args()[0]), cmd.args()[1]);
        rt.send_default(Term::compound("ack", {Term::atom(ok ? "true" : "false")}));
      }
    }
    return std::vector<Bindings>{};
  }, Determinism::semidet, "agent");
}

/// Drives agents from the client thread.
class Director {
 public:
  explicit Director(Runtime& rt) : rt_(rt), hub_(rt.hub()) {}
  ~Director() { rt_.stop(hub_); }
  Director(const Director&) = delete;
  Director& operator=(const Director&) = delete;

  ThreadId spawn() { return rt_.spawn_link(hub_, Term::list({}), agent(rt_)); }

  /// Makes `who` send `t` to `to` and waits until it has done so.
  bool say(ThreadId who, const Recipient& to, const Term& t) {
    rt_.send(who, Term::compound("say", {encode_recipient(to), t}));
    auto ack = rt_.hub_receive_from(hub_, who);
    return ack && ack->is_answer() && ack->term().args()[0].is_atom("true");
  }

  bool say_to_client(ThreadId who, const Term& t) { return say(who, ThreadId::client(), t); }

  HubId hub() const noexcept { return hub_; }

 private:
  Runtime& rt_;
  HubId hub_;
};

}  // namespace agents
