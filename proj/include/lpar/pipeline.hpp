#pragma once

// Pipelined execution of a dependent conjunction.
//
// One stage thread per goal, all linked to a result hub that also serves as
// the pipe's id. A stage first receives the id of its successor, then loops:
// each partial solution it receives is extended with every solution of its
// goal and forwarded; the `done` marker is forwarded and ends the stage.
// Because each stage handles its inputs in arrival order and links are FIFO,
// results leave the pipe in the same order as a sequential enumeration.
//
// Messages between stages are ordinary terms:
//   partial(S0, S1, ...)   slot values, unbound slots as variables
//   done                   end of stream
//   thread(I, G) / hub(I, G)   successor id, sent once while wiring

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "lpar/combinators.hpp"
#include "lpar/goal.hpp"
#include "lpar/runtime.hpp"
#include "lpar/term.hpp"

namespace lpar {

// ---------------------------------------------------------------------------
// Stage message encoding

inline Term end_of_stream() { return Term::atom("done"); }

inline bool is_end_of_stream(const Term& t) { return t.is_atom("done"); }

inline Term encode_partial(const Bindings& b) {
  std::vector<Term> slots;
  slots.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) slots.push_back(b[i] ? *b[i] : Term::var(i));
  return Term::compound("partial", std::move(slots));
}

inline Bindings decode_partial(const Term& t) {
  if (!t.is_compound() || t.name() != "partial") throw std::invalid_argument("not a partial solution: " + to_string(t));
  Bindings b(t.arity());
  for (std::size_t i = 0; i < t.arity(); ++i)
    if (!t.args()[i].is_var()) b.bind(i, t.args()[i]);
  return b;
}

inline Term encode_recipient(const Recipient& r) {
  return std::visit(
      [](auto id) {
        const char* tag = std::is_same_v<decltype(id), ThreadId> ? "thread" : "hub";
        return Term::compound(tag, {Term::integer(id.index), Term::integer(id.generation)});
      },
      r);
}

inline Recipient decode_recipient(const Term& t) {
  if (t.is_compound() && t.arity() == 2) {
    auto index = static_cast<std::uint32_t>(t.args()[0].int_value());
    auto gen = static_cast<std::uint32_t>(t.args()[1].int_value());
    if (t.name() == "thread") return ThreadId{index, gen};
    if (t.name() == "hub") return HubId{index, gen};
  }
  throw std::invalid_argument("not a thread or hub id: " + to_string(t));
}

inline bool send_to(Runtime& rt, const Recipient& to, const Term& t) {
  return std::visit([&](auto id) { return rt.send(id, t); }, to);
}

// ---------------------------------------------------------------------------
// Instrumentation

/// Optional per-stage event log. Link i is the link from stage i to its successor.
class PipeTrace {
 public:
  enum class Event { wired, received_partial, received_end, sent_partial, sent_end };

  struct Record {
    std::size_t stage;
    Event event;
  };

  void record(std::size_t stage, Event event) {
    std::lock_guard lock(mutex_);
    records_.push_back({stage, event});
  }

  void record_successor(std::size_t stage, Recipient successor) {
    std::lock_guard lock(mutex_);
    if (successors_.size() <= stage) successors_.resize(stage + 1);
    successors_[stage] = successor;
    records_.push_back({stage, Event::wired});
  }

  std::vector<Record> records() const {
    std::lock_guard lock(mutex_);
    return records_;
  }

  std::optional<Recipient> successor_of(std::size_t stage) const {
    std::lock_guard lock(mutex_);
    return stage < successors_.size() ? successors_[stage] : std::nullopt;
  }

  /// Events of one stage, in the order they happened.
  std::vector<Event> events_of(std::size_t stage) const {
    std::vector<Event> out;
    for (const auto& r : records())
      if (r.stage == stage) out.push_back(r.event);
    return out;
  }

  std::size_t count(std::size_t stage, Event event) const {
    std::size_t n = 0;
    for (const auto& r : records())
      if (r.stage == stage && r.event == event) ++n;
    return n;
  }

  /// Exactly one end marker was sent on the stage's outgoing link, after every partial.
  bool link_well_terminated(std::size_t stage) const {
    auto events = events_of(stage);
    std::size_t ends = 0;
    bool partial_after_end = false;
    for (auto e : events) {
      if (e == Event::sent_end) ++ends;
      if (e == Event::sent_partial && ends > 0) partial_after_end = true;
    }
    return ends == 1 && !partial_after_end;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<Record> records_;
  std::vector<std::optional<Recipient>> successors_;
};

struct PipeOptions {
  std::shared_ptr<PipeTrace> trace;
  /// Merge leading at-most-one-solution goals into the first nondeterministic
  /// stage. Such goals cannot overlap with anything, so a separate thread only
  /// adds messaging.
  bool fold_deterministic_prefix = false;
};

struct PipeHandle {
  HubId hub;
  std::size_t nvars = 0;
  std::vector<ThreadId> stages;
  bool exhausted = false;
};

/// Conj-folds the leading goals that yield at most one solution per input into
/// the first goal that may yield more.
inline std::vector<Goal> fold_deterministic_prefix(const std::vector<Goal>& goals) {
  if (goals.size() <= 1) return goals;
  std::size_t first_nondet = 0;
  while (first_nondet < goals.size() && goals[first_nondet].at_most_one()) ++first_nondet;
  if (first_nondet == 0) return goals;
  const std::size_t merged_end = std::min(first_nondet + 1, goals.size());
  std::vector<Goal> out;
  out.push_back(conj(std::vector<Goal>(goals.begin(), goals.begin() + static_cast<std::ptrdiff_t>(merged_end))));
  out.insert(out.end(), goals.begin() + static_cast<std::ptrdiff_t>(merged_end), goals.end());
  return out;
}

namespace detail {

inline void run_pipe_stage(Runtime& rt, std::size_t index, const Goal& goal, PipeTrace* trace,
                           StepContext& ctx) {
  using Event = PipeTrace::Event;
  const Recipient next = decode_recipient(rt.receive_any().payload.term());
  if (trace) trace->record_successor(index, next);
  auto forward_end = [&] {
    if (trace) trace->record(index, Event::sent_end);
    send_to(rt, next, end_of_stream());
  };
  for (;;) {
    Envelope e = rt.receive_any();
    if (e.payload.is_done()) continue;
    const Term& msg = e.payload.term();
    if (is_end_of_stream(msg)) {
      if (trace) trace->record(index, Event::received_end);
      forward_end();
      return;
    }
    if (trace) trace->record(index, Event::received_partial);
    Solutions solutions(goal, decode_partial(msg), ctx.cancel_token());
    while (auto out = solutions.next()) {
      if (trace) trace->record(index, Event::sent_partial);
      if (!send_to(rt, next, encode_partial(*out))) return;
    }
    switch (solutions.status()) {
      case SolutionsStatus::cancelled:
        throw Cancelled{};
      case SolutionsStatus::failed:
        // The stage cannot continue; close the stream so downstream stages finish.
        forward_end();
        return;
      default:
        break;
    }
  }
}

/// Body of a stage thread. It reports no solutions of its own, so the only
/// thing its spawn delivers to the hub is a done marker on exit.
inline Goal pipe_stage(Runtime& rt, std::size_t index, Goal goal, std::shared_ptr<PipeTrace> trace) {
  auto name = "pipe_stage(" + goal.name() + ")";
  return Goal(std::move(name), 0, Determinism::semidet,
              [&rt, index, goal = std::move(goal), trace = std::move(trace)](Bindings) {
                return make_cursor([&rt, index, goal, trace, ran = false](StepContext& ctx) mutable
                                   -> std::optional<Bindings> {
                  if (!ran) {
                    ran = true;
                    run_pipe_stage(rt, index, goal, trace.get(), ctx);
                  }
                  return std::nullopt;
                });
              });
}

}  // namespace detail

/// Spawns one linked stage per goal, wires each stage to its successor (the
/// last one to the hub), then primes the head with an all-unbound partial
/// solution followed by `done`. Stopping handle.hub tears the pipe down.
inline PipeHandle pipe_create(Runtime& rt, const std::vector<Goal>& conjunction, std::size_t nvars,
                              const PipeOptions& options = {}) {
  if (conjunction.empty()) throw std::invalid_argument("pipe needs at least one goal");
  const auto goals = options.fold_deterministic_prefix ? fold_deterministic_prefix(conjunction) : conjunction;
  for (const auto& g : goals) nvars = std::max(nvars, g.arity());

  PipeHandle handle{rt.hub(), nvars, {}, false};
  try {
    for (std::size_t i = 0; i < goals.size(); ++i)
      handle.stages.push_back(
          rt.spawn_link(handle.hub, Term::list({}), detail::pipe_stage(rt, i, goals[i], options.trace)));
    for (std::size_t i = 0; i < handle.stages.size(); ++i) {
      const Recipient next = i + 1 < handle.stages.size() ? Recipient{handle.stages[i + 1]} : Recipient{handle.hub};
      rt.send(handle.stages[i], encode_recipient(next));
    }
    rt.send(handle.stages.front(), encode_partial(Bindings(nvars)));
    rt.send(handle.stages.front(), end_of_stream());
  } catch (...) {
    rt.stop(handle.hub);
    throw;
  }
  return handle;
}

/// Next result of the pipe, or nullopt once `done` has come out of the last
/// stage (and on every call after that). Done markers of exiting stage
/// threads are skipped.
inline std::optional<Bindings> pipe_next(Runtime& rt, PipeHandle& handle) {
  while (!handle.exhausted) {
    auto e = rt.hub_receive_any(handle.hub);
    if (!e) break;
    if (e->payload.is_done()) continue;
    const Term& t = e->payload.term();
    if (is_end_of_stream(t)) break;
    return decode_partial(t);
  }
  handle.exhausted = true;
  return std::nullopt;
}

inline bool pipe_stop(Runtime& rt, const PipeHandle& handle) { return rt.stop(handle.hub); }

/// A running pipe and its result stream. The caller decides when to stop it;
/// stop() is also called on destruction.
class Piped {
 public:
  Piped(Runtime& rt, PipeHandle handle) : rt_(rt), handle_(std::move(handle)) {}
  Piped(const Piped&) = delete;
  Piped& operator=(const Piped&) = delete;
  ~Piped() { stop(); }

  std::optional<Bindings> next() { return pipe_next(rt_, handle_); }
  const PipeHandle& handle() const noexcept { return handle_; }

  bool stop() {
    if (stopped_) return false;
    stopped_ = true;
    return pipe_stop(rt_, handle_);
  }

 private:
  Runtime& rt_;
  PipeHandle handle_;
  bool stopped_ = false;
};

inline Piped piped(Runtime& rt, const std::vector<Goal>& conjunction, std::size_t nvars,
                   const PipeOptions& options = {}) {
  return Piped(rt, pipe_create(rt, conjunction, nvars, options));
}

/// All results of the pipelined conjunction, projected, in sequential order.
inline std::vector<Term> piped_findall(Runtime& rt, const AnswerProjection& projection,
                                       const std::vector<Goal>& conjunction, std::size_t nvars,
                                       const PipeOptions& options = {}) {
  Piped pipe(rt, pipe_create(rt, conjunction, std::max(nvars, projection.extent()), options));
  std::vector<Term> results;
  while (auto b = pipe.next()) results.push_back(instantiate(projection, *b));
  pipe.stop();
  return results;
}

/// Sequential findall over the same conjunction; the reference for piped_findall.
inline std::vector<Term> seq_findall(const AnswerProjection& projection, const std::vector<Goal>& conjunction,
                                     std::size_t nvars) {
  if (conjunction.empty()) throw std::invalid_argument("empty conjunction");
  std::vector<Term> results;
  for (const auto& b : all_solutions(conj(conjunction), Bindings(std::max(nvars, projection.extent()))))
    results.push_back(instantiate(projection, b));
  return results;
}

}  // namespace lpar
