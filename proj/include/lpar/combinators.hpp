#pragma once

// Competitive or-parallelism and independent and-parallelism, built only from
// spawn/spawn_link, receive and stop.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lpar/runtime.hpp"

namespace lpar {

/// Stops a hub when it goes out of scope.
class ScopedHub {
 public:
  explicit ScopedHub(Runtime& rt) : rt_(rt), id_(rt.hub()) {}
  ScopedHub(const ScopedHub&) = delete;
  ScopedHub& operator=(const ScopedHub&) = delete;
  ~ScopedHub() { release(); }

  HubId id() const noexcept { return id_; }

  void release() {
    if (active_) rt_.stop(id_);
    active_ = false;
  }

 private:
  Runtime& rt_;
  HubId id_;
  bool active_ = true;
};

/// Stops a set of threads when it goes out of scope.
class ScopedThreads {
 public:
  explicit ScopedThreads(Runtime& rt) : rt_(rt) {}
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;
  ~ScopedThreads() { release(); }

  void add(ThreadId id) { ids_.push_back(id); }
  const std::vector<ThreadId>& ids() const noexcept { return ids_; }

  void release() {
    for (auto id : ids_) rt_.stop(id);
    ids_.clear();
  }

 private:
  Runtime& rt_;
  std::vector<ThreadId> ids_;
};

/// Races the goals and returns the first answer to arrive, or nullopt when
/// every goal finishes without one. All competitors are stopped and joined
/// before returning.
inline std::optional<Term> first_solution(Runtime& rt, const AnswerProjection& projection,
                                          const std::vector<Goal>& goals) {
  if (goals.empty()) throw std::invalid_argument("first_solution needs at least one goal");
  ScopedHub hub(rt);
  for (const auto& g : goals) rt.spawn_link(hub.id(), projection, g);
  std::optional<Term> result;
  for (std::size_t finished = 0; finished < goals.size();) {
    auto e = rt.hub_receive_any(hub.id());
    if (!e) break;
    if (e->payload.is_done()) {
      ++finished;
      continue;
    }
    result = e->payload.term();
    break;
  }
  hub.release();
  return result;
}

/// Runs independent goals concurrently and returns the first answer of each,
/// positionally. nullopt as soon as one goal finishes without an answer.
/// Every spawned thread is stopped before returning.
inline std::optional<std::vector<Term>> concurrent_and(Runtime& rt, const std::vector<AnswerProjection>& projections,
                                                       const std::vector<Goal>& goals) {
  if (projections.size() != goals.size()) throw std::invalid_argument("one projection per goal required");
  ScopedThreads threads(rt);
  for (std::size_t i = 0; i < goals.size(); ++i) threads.add(rt.spawn(projections[i], goals[i]));
  std::vector<Term> answers;
  answers.reserve(goals.size());
  for (auto id : threads.ids()) {
    auto p = rt.receive_from(id);
    if (!p || p->is_done()) return std::nullopt;
    answers.push_back(p->term());
  }
  return answers;
}

}  // namespace lpar
