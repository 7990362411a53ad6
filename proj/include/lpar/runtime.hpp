#pragma once

// Threads that stream solutions of a goal to a recipient, plus hubs.
//
// Every spawned goal runs on its own OS thread. Each solution is sent as an
// answer envelope to the thread's default recipient (its spawner, or the hub
// it is linked to), followed by one done envelope after the last solution.
//
// Thread ids are slots with a generation. A slot is reserved from spawn until
// stop() has been called *and* the thread has exited; only then can spawn
// reuse it. Stopping a thread is asynchronous; stopping a hub blocks until
// every linked thread has been joined.

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "lpar/goal.hpp"
#include "lpar/mailbox.hpp"
#include "lpar/term.hpp"

namespace lpar {

class ThreadLimitExhausted : public std::runtime_error {
 public:
  explicit ThreadLimitExhausted(std::size_t limit)
      : std::runtime_error("all " + std::to_string(limit) + " thread ids are in use") {}
};

class HubLimitExhausted : public std::runtime_error {
 public:
  explicit HubLimitExhausted(std::size_t limit)
      : std::runtime_error("all " + std::to_string(limit) + " hub ids are in use") {}
};

class InvalidHub : public std::invalid_argument {
 public:
  explicit InvalidHub(HubId id) : std::invalid_argument("invalid hub id " + describe(id)) {}

 private:
  static std::string describe(HubId id) {
    std::ostringstream os;
    os << id;
    return os.str();
  }
};

struct RuntimeConfig {
  std::size_t max_threads = 256;
  /// Zero means "same as max_threads".
  std::size_t max_hubs = 0;
  bool verbose = false;

  std::size_t hub_limit() const noexcept { return max_hubs ? max_hubs : max_threads; }

  /// Applies MAX_THREADS and LPAR_VERBOSE from the environment on top of `base`.
  static RuntimeConfig from_env();
  static RuntimeConfig from_env(RuntimeConfig base) {
    if (const char* v = std::getenv("MAX_THREADS"); v && *v) {
      char* end = nullptr;
      long n = std::strtol(v, &end, 10);
      if (*end != '\0' || n <= 0) throw std::invalid_argument(std::string("bad MAX_THREADS value: ") + v);
      base.max_threads = static_cast<std::size_t>(n);
    }
    if (const char* v = std::getenv("LPAR_VERBOSE"); v && *v && std::string(v) != "0") base.verbose = true;
    return base;
  }
};

inline RuntimeConfig RuntimeConfig::from_env() { return from_env(RuntimeConfig{}); }

class Runtime {
 public:
  explicit Runtime(RuntimeConfig config = {}) : config_(config) {
    if (config_.max_threads == 0) throw std::invalid_argument("max_threads must be positive");
    threads_.reserve(config_.max_threads);
    for (std::size_t i = 0; i < config_.max_threads; ++i) threads_.push_back(std::make_unique<ThreadSlot>());
    hubs_.reserve(config_.hub_limit());
    for (std::size_t i = 0; i < config_.hub_limit(); ++i) hubs_.push_back(std::make_unique<HubSlot>());
  }

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Stops every thread and joins them.
  ~Runtime() {
    std::vector<std::thread> joins;
    {
      std::lock_guard lock(mutex_);
      shutting_down_ = true;
      for (auto& s : threads_) {
        if (s->in_use) {
          s->discarded = true;
          s->stop.request_stop();
        }
        if (s->thread.joinable()) joins.push_back(std::move(s->thread));
      }
      for (auto& h : hubs_) {
        h->live = false;
        h->mailbox.close();
      }
      client_mailbox_.close();
    }
    for (auto& t : joins) t.join();
  }

  const RuntimeConfig& config() const noexcept { return config_; }

  /// Identity of the calling thread; ThreadId::client() outside spawned threads.
  ThreadId self() const noexcept {
    const Caller* c = current_;
    return (c && c->runtime == this) ? c->id : ThreadId::client();
  }

  // -------------------------------------------------------------------------
  // Threads

  /// Starts enumerating `goal` on a new thread and returns without waiting.
  /// Throws ThreadLimitExhausted when every id is reserved. Ids whose threads
  /// were stopped but are still unwinding are waited for.
  ThreadId spawn(AnswerProjection projection, Goal goal) {
    std::unique_lock lock(mutex_);
    return spawn_locked(lock, std::move(projection), std::move(goal), self(), std::nullopt);
  }

  /// Sends the(t) to `target`. False if the id is not a live thread.
  /// A stopped caller is cancelled here instead of at its next checkpoint.
  bool send(ThreadId target, const Term& t) {
    std::lock_guard lock(mutex_);
    if (caller_discarded()) throw Cancelled{};
    if (!valid_thread(target)) return false;
    mailbox_of(target).push({self(), Payload::answer(snapshot(t))});
    log(self(), "send", &t);
    return true;
  }

  bool send(HubId target, const Term& t) {
    std::lock_guard lock(mutex_);
    if (caller_discarded()) throw Cancelled{};
    if (!valid_hub(target)) return false;
    hubs_[target.index]->mailbox.push({self(), Payload::answer(snapshot(t))});
    log(self(), "send_hub", &t);
    return true;
  }

  /// Sends to the caller's default recipient. Always false for the client.
  bool send_default(const Term& t) {
    const ThreadId me = self();
    if (me.is_client()) return false;
    std::lock_guard lock(mutex_);
    const auto& slot = *threads_[me.index];
    if (slot.discarded) throw Cancelled{};
    return push_locked(slot.recipient, {me, Payload::answer(snapshot(t))});
  }

  /// Oldest envelope in the caller's mailbox; blocks while it is empty.
  Envelope receive_any() {
    auto e = caller_mailbox().take_any(caller_stop());
    if (!e) interrupted();
    return std::move(*e);
  }

  /// Oldest envelope from `sender`, leaving the others in place. nullopt if
  /// `sender` is not a valid id.
  std::optional<Payload> receive_from(ThreadId sender) {
    {
      std::lock_guard lock(mutex_);
      if (!valid_thread(sender)) return std::nullopt;
    }
    auto e = caller_mailbox().take_from(sender, caller_stop());
    if (!e) interrupted();
    return std::move(e->payload);
  }

  std::optional<Envelope> try_receive_any() { return caller_mailbox().try_take_any(); }
  std::optional<Envelope> try_receive_from(ThreadId sender) { return caller_mailbox().try_take_from(sender); }
  std::size_t mailbox_size() { return caller_mailbox().size(); }

  /// Requests cancellation of `id` and returns immediately. Envelopes from
  /// `id` still in the caller's mailbox are purged and the id becomes invalid.
  /// Threads spawned by `id` keep running.
  bool stop(ThreadId id) {
    std::lock_guard lock(mutex_);
    if (id.is_client() || !valid_thread(id)) return false;
    auto& slot = *threads_[id.index];
    slot.discarded = true;
    slot.stop.request_stop();
    if (slot.exited) release_locked(slot);
    const auto purged = caller_mailbox().purge(id);
    if (config_.verbose) log_line(self(), "stop " + id_string(id) + " purged=" + std::to_string(purged));
    return true;
  }

  // -------------------------------------------------------------------------
  // Hubs

  HubId hub() {
    std::lock_guard lock(mutex_);
    if (shutting_down_) throw std::runtime_error("runtime is shutting down");
    auto it = std::ranges::find_if(hubs_, [](const auto& h) { return !h->in_use; });
    if (it == hubs_.end()) throw HubLimitExhausted(hubs_.size());
    auto& h = **it;
    ++h.generation;
    h.in_use = true;
    h.live = true;
    h.mailbox.close();
    h.linked.clear();
    HubId id{static_cast<std::uint32_t>(it - hubs_.begin()), h.generation};
    if (config_.verbose) log_line(self(), "hub " + id_string(id));
    return id;
  }

  /// Like spawn, but the hub becomes the default recipient and the thread is
  /// joined when the hub is stopped.
  ThreadId spawn_link(HubId hub, AnswerProjection projection, Goal goal) {
    std::unique_lock lock(mutex_);
    if (!valid_hub(hub)) throw InvalidHub(hub);
    return spawn_locked(lock, std::move(projection), std::move(goal), hub, hub);
  }

  bool hub_send(HubId hub, const Term& t) { return send(hub, t); }

  /// nullopt when the hub id is invalid or the hub is stopped while waiting.
  std::optional<Envelope> hub_receive_any(HubId hub) {
    Mailbox* mailbox = nullptr;
    std::uint64_t epoch = 0;
    {
      std::lock_guard lock(mutex_);
      if (!valid_hub(hub)) return std::nullopt;
      mailbox = &hubs_[hub.index]->mailbox;
      epoch = mailbox->epoch();
    }
    auto stop = caller_stop();
    auto e = mailbox->take_any(stop, epoch);
    if (!e && stop.stop_requested()) throw Cancelled{};
    return e;
  }

  std::optional<Payload> hub_receive_from(HubId hub, ThreadId sender) {
    Mailbox* mailbox = nullptr;
    std::uint64_t epoch = 0;
    {
      std::lock_guard lock(mutex_);
      if (!valid_hub(hub) || !valid_thread(sender)) return std::nullopt;
      mailbox = &hubs_[hub.index]->mailbox;
      epoch = mailbox->epoch();
    }
    auto stop = caller_stop();
    auto e = mailbox->take_from(sender, stop, epoch);
    if (!e) {
      if (stop.stop_requested()) throw Cancelled{};
      return std::nullopt;
    }
    return std::move(e->payload);
  }

  std::optional<Envelope> hub_try_receive_any(HubId hub) {
    std::lock_guard lock(mutex_);
    if (!valid_hub(hub)) return std::nullopt;
    return hubs_[hub.index]->mailbox.try_take_any();
  }

  /// Stops every linked thread and blocks until all of them are joined. A
  /// thread linked to `hub` may not stop it (it would join itself).
  bool stop(HubId hub) {
    std::vector<std::thread> joins;
    {
      std::lock_guard lock(mutex_);
      if (!valid_hub(hub)) return false;
      const ThreadId me = self();
      if (!me.is_client() && threads_[me.index]->hub == hub) return false;
      auto& h = *hubs_[hub.index];
      h.live = false;
      h.mailbox.close();
      for (const auto& id : h.linked) {
        auto& slot = *threads_[id.index];
        if (!slot.in_use || slot.generation != id.generation) continue;
        slot.discarded = true;
        slot.stop.request_stop();
        if (slot.thread.joinable()) joins.push_back(std::move(slot.thread));
        if (slot.exited) release_locked(slot);
      }
      if (config_.verbose) log_line(me, "stop_hub " + id_string(hub) + " joining=" + std::to_string(joins.size()));
      h.linked.clear();
    }
    for (auto& t : joins) t.join();
    std::lock_guard lock(mutex_);
    hubs_[hub.index]->in_use = false;
    return true;
  }

  bool stop_hub(HubId hub) { return stop(hub); }

  // -------------------------------------------------------------------------
  // Introspection

  bool valid(ThreadId id) const {
    std::lock_guard lock(mutex_);
    return valid_thread(id);
  }

  bool valid(HubId id) const {
    std::lock_guard lock(mutex_);
    return valid_hub(id);
  }

  /// Reserved thread ids, including finished threads not yet stopped and
  /// stopped threads that are still unwinding.
  std::size_t live_threads() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::ranges::count_if(threads_, [](const auto& s) { return s->in_use; }));
  }

  /// Threads whose OS thread has not finished yet.
  std::size_t running_threads() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(
        std::ranges::count_if(threads_, [](const auto& s) { return s->in_use && !s->exited; }));
  }

  std::size_t live_hubs() const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::ranges::count_if(hubs_, [](const auto& h) { return h->in_use; }));
  }

  std::size_t hub_size(HubId hub) const {
    std::lock_guard lock(mutex_);
    if (!valid_hub(hub)) return 0;
    return hubs_[hub.index]->mailbox.size();
  }

  std::vector<ThreadId> linked_threads(HubId hub) const {
    std::lock_guard lock(mutex_);
    if (!valid_hub(hub)) return {};
    return hubs_[hub.index]->linked;
  }

  /// Waits until at most `count` thread ids are reserved, or the timeout passes.
  template <class Rep, class Period>
  bool wait_live_threads_at_most(std::size_t count, std::chrono::duration<Rep, Period> timeout) const {
    std::unique_lock lock(mutex_);
    return slot_freed_.wait_for(lock, timeout, [&] {
      return static_cast<std::size_t>(std::ranges::count_if(threads_, [](const auto& s) { return s->in_use; })) <=
             count;
    });
  }

 private:
  struct ThreadSlot {
    std::uint32_t generation = 0;
    bool in_use = false;
    bool discarded = false;
    bool exited = true;
    Mailbox mailbox;
    std::stop_source stop;
    Recipient recipient{ThreadId::client()};
    std::optional<HubId> hub;
    std::thread thread;
  };

  struct HubSlot {
    std::uint32_t generation = 0;
    bool in_use = false;
    bool live = false;
    Mailbox mailbox;
    std::vector<ThreadId> linked;
  };

  struct Caller {
    const Runtime* runtime;
    ThreadId id;
    std::stop_token stop;
    Mailbox* mailbox;
  };

  static inline thread_local const Caller* current_ = nullptr;

  const Caller* caller() const noexcept {
    const Caller* c = current_;
    return (c && c->runtime == this) ? c : nullptr;
  }

  Mailbox& caller_mailbox() noexcept {
    const Caller* c = caller();
    return c ? *c->mailbox : client_mailbox_;
  }

  std::stop_token caller_stop() const noexcept {
    const Caller* c = caller();
    return c ? c->stop : std::stop_token{};
  }

  // Spawned callers get Cancelled; the client only wakes up empty-handed at shutdown.
  [[noreturn]] void interrupted() const {
    if (caller()) throw Cancelled{};
    throw std::runtime_error("runtime shut down while receiving");
  }

  bool caller_discarded() const {
    const Caller* c = caller();
    return c && threads_[c->id.index]->discarded;
  }

  bool valid_thread(ThreadId id) const {
    if (id.is_client()) return true;
    if (id.index >= threads_.size()) return false;
    const auto& s = *threads_[id.index];
    return s.in_use && !s.discarded && s.generation == id.generation;
  }

  bool valid_hub(HubId id) const {
    if (id.index >= hubs_.size()) return false;
    const auto& h = *hubs_[id.index];
    return h.in_use && h.live && h.generation == id.generation;
  }

  Mailbox& mailbox_of(ThreadId id) { return id.is_client() ? client_mailbox_ : threads_[id.index]->mailbox; }

  bool push_locked(const Recipient& to, Envelope e) {
    return std::visit(
        [&](auto id) {
          using Id = decltype(id);
          if constexpr (std::is_same_v<Id, ThreadId>) {
            if (!valid_thread(id)) return false;
            mailbox_of(id).push(std::move(e));
          } else {
            if (!valid_hub(id)) return false;
            hubs_[id.index]->mailbox.push(std::move(e));
          }
          return true;
        },
        to);
  }

  void release_locked(ThreadSlot& slot) {
    slot.in_use = false;
    slot_freed_.notify_all();
  }

  bool has_free_slot() const {
    return std::ranges::any_of(threads_, [](const auto& s) { return !s->in_use; });
  }

  ThreadId spawn_locked(std::unique_lock<std::mutex>& lock, AnswerProjection projection, Goal goal,
                        Recipient recipient, std::optional<HubId> hub) {
    for (;;) {
      if (shutting_down_) throw std::runtime_error("runtime is shutting down");
      if (hub && !valid_hub(*hub)) throw InvalidHub(*hub);
      if (has_free_slot()) break;
      const bool draining =
          std::ranges::any_of(threads_, [](const auto& s) { return s->in_use && s->discarded; });
      if (!draining) throw ThreadLimitExhausted(threads_.size());
      auto stop = caller_stop();
      slot_freed_.wait(lock, stop, [&] { return has_free_slot() || shutting_down_; });
      if (stop.stop_requested()) throw Cancelled{};
    }
    auto it = std::ranges::find_if(threads_, [](const auto& s) { return !s->in_use; });
    auto& slot = **it;
    // The previous occupant already marked itself exited; this join only reaps it.
    if (slot.thread.joinable()) slot.thread.join();
    ++slot.generation;
    slot.in_use = true;
    slot.discarded = false;
    slot.exited = false;
    slot.mailbox.close();
    slot.stop = std::stop_source{};
    slot.recipient = recipient;
    slot.hub = hub;
    const ThreadId id{static_cast<std::uint32_t>(it - threads_.begin()), slot.generation};
    if (config_.verbose) log_line(self(), "spawn " + id_string(id) + " goal=" + goal.name());
    try {
      slot.thread = std::thread([this, id, projection = std::move(projection), goal = std::move(goal),
                                 stop = slot.stop, mailbox = &slot.mailbox]() mutable {
        run_thread(id, projection, goal, stop, mailbox);
      });
    } catch (...) {
      slot.in_use = false;
      slot.exited = true;
      throw;
    }
    if (hub) hubs_[hub->index]->linked.push_back(id);
    return id;
  }

  void run_thread(ThreadId id, const AnswerProjection& projection, const Goal& goal, std::stop_source stop,
                  Mailbox* mailbox) {
    const Caller me{this, id, stop.get_token(), mailbox};
    current_ = &me;
    {
      Solutions solutions(goal, Bindings(std::max(goal.arity(), projection.extent())), CancelToken(stop));
      while (auto b = solutions.next()) deliver(id, Payload::answer(instantiate(projection, *b)));
      if (solutions.status() == SolutionsStatus::failed && config_.verbose)
        log_line(id, "engine_failure " + solutions.error());
      if (solutions.status() != SolutionsStatus::cancelled) deliver(id, Payload::done());
    }
    current_ = nullptr;
    std::lock_guard lock(mutex_);
    auto& slot = *threads_[id.index];
    slot.exited = true;
    if (slot.discarded) release_locked(slot);
    if (config_.verbose) log_line(id, "exit");
  }

  void deliver(ThreadId from, Payload payload) {
    std::lock_guard lock(mutex_);
    const auto& slot = *threads_[from.index];
    if (slot.discarded) return;
    if (config_.verbose) {
      if (payload.is_answer())
        log(from, "answer", &payload.term());
      else
        log(from, "done", nullptr);
    }
    push_locked(slot.recipient, {from, std::move(payload)});
  }

  static std::string id_string(auto id) {
    std::ostringstream os;
    os << id;
    return os.str();
  }

  void log(ThreadId who, std::string_view event, const Term* t) const {
    if (!config_.verbose) return;
    std::string line(event);
    if (t) line += " term=" + to_string(*t);
    log_line(who, line);
  }

  static void log_line(ThreadId who, const std::string& line) {
    static std::mutex log_mutex;
    std::lock_guard lock(log_mutex);
    std::clog << "lpar tid=" << who << ' ' << line << '\n';
  }

  RuntimeConfig config_;
  mutable std::mutex mutex_;
  mutable std::condition_variable_any slot_freed_;
  std::vector<std::unique_ptr<ThreadSlot>> threads_;
  std::vector<std::unique_ptr<HubSlot>> hubs_;
  Mailbox client_mailbox_;
  bool shutting_down_ = false;
};

}  // namespace lpar
