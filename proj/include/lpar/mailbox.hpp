#pragma once

// Identifiers, envelopes and the blocking selective-receive queue shared by
// thread inboxes and hubs.

#include <algorithm>
#include <compare>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <stop_token>
#include <utility>
#include <variant>

#include "lpar/term.hpp"

namespace lpar {

/// Thread identifier. The generation changes every time a slot is reused, so
/// a discarded id never matches a later thread in the same slot.
struct ThreadId {
  std::uint32_t index = 0;
  std::uint32_t generation = 0;

  /// The embedding program's own mailbox.
  static constexpr ThreadId client() noexcept { return {std::numeric_limits<std::uint32_t>::max(), 0}; }
  constexpr bool is_client() const noexcept { return index == client().index; }

  friend constexpr auto operator<=>(const ThreadId&, const ThreadId&) = default;
};

struct HubId {
  std::uint32_t index = 0;
  std::uint32_t generation = 0;

  friend constexpr auto operator<=>(const HubId&, const HubId&) = default;
};

inline std::ostream& operator<<(std::ostream& os, ThreadId id) {
  if (id.is_client()) return os << "client";
  return os << 't' << id.index << '.' << id.generation;
}

inline std::ostream& operator<<(std::ostream& os, HubId id) {
  return os << 'h' << id.index << '.' << id.generation;
}

/// Where a thread's implicit sends go.
using Recipient = std::variant<ThreadId, HubId>;

/// Either an answer, wrapping a copied term, or the end-of-solutions marker.
class Payload {
 public:
  static Payload answer(Term t) { return Payload(std::move(t)); }
  static Payload done() { return Payload(std::nullopt); }

  bool is_done() const noexcept { return !term_; }
  bool is_answer() const noexcept { return term_.has_value(); }

  const Term& term() const {
    if (!term_) throw std::logic_error("done marker carries no term");
    return *term_;
  }

  friend bool operator==(const Payload&, const Payload&) = default;

 private:
  explicit Payload(std::optional<Term> t) : term_(std::move(t)) {}
  std::optional<Term> term_;
};

inline std::ostream& operator<<(std::ostream& os, const Payload& p) {
  if (p.is_done()) return os << "no";
  return os << "the(" << p.term() << ')';
}

struct Envelope {
  ThreadId sender;
  Payload payload;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Multi-producer FIFO with blocking any-sender and selective receive.
///
/// Blocking takes return nullopt when the stop token fires or when the mailbox
/// is closed after the caller observed `epoch`. close() bumps the epoch, so a
/// waiter that validated an older incarnation never picks up messages of a
/// reopened one.
class Mailbox {
 public:
  void push(Envelope e) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(e));
    }
    cv_.notify_all();
  }

  std::optional<Envelope> take_any(std::stop_token stop = {}) { return take_any(stop, epoch()); }

  std::optional<Envelope> take_any(std::stop_token stop, std::uint64_t epoch) {
    return take_if(stop, epoch, [](const Envelope&) { return true; });
  }

  std::optional<Envelope> take_from(ThreadId sender, std::stop_token stop = {}) {
    return take_from(sender, stop, epoch());
  }

  std::optional<Envelope> take_from(ThreadId sender, std::stop_token stop, std::uint64_t epoch) {
    return take_if(stop, epoch, [sender](const Envelope& e) { return e.sender == sender; });
  }

  std::optional<Envelope> try_take_any() {
    std::lock_guard lock(mutex_);
    return extract([](const Envelope&) { return true; });
  }

  std::optional<Envelope> try_take_from(ThreadId sender) {
    std::lock_guard lock(mutex_);
    return extract([sender](const Envelope& e) { return e.sender == sender; });
  }

  /// Drops every envelope from `sender`; returns how many were removed.
  std::size_t purge(ThreadId sender) {
    std::lock_guard lock(mutex_);
    return std::erase_if(queue_, [sender](const Envelope& e) { return e.sender == sender; });
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return queue_.size();
  }

  std::uint64_t epoch() const {
    std::lock_guard lock(mutex_);
    return epoch_;
  }

  /// Wakes all waiters, drops queued envelopes and invalidates the current epoch.
  void close() {
    {
      std::lock_guard lock(mutex_);
      ++epoch_;
      queue_.clear();
    }
    cv_.notify_all();
  }

 private:
  template <class Match>
  std::optional<Envelope> extract(Match match) {
    auto it = std::ranges::find_if(queue_, match);
    if (it == queue_.end()) return std::nullopt;
    Envelope e = std::move(*it);
    queue_.erase(it);
    return e;
  }

  template <class Match>
  std::optional<Envelope> take_if(std::stop_token stop, std::uint64_t epoch, Match match) {
    std::unique_lock lock(mutex_);
    std::optional<Envelope> found;
    cv_.wait(lock, stop, [&] {
      if (epoch_ != epoch) return true;
      found = extract(match);
      return found.has_value();
    });
    return found;
  }

  mutable std::mutex mutex_;
  std::condition_variable_any cv_;
  std::deque<Envelope> queue_;
  std::uint64_t epoch_ = 0;
};

}  // namespace lpar
