#pragma once

// Water jugs puzzle: fill, empty or pour between jugs until one holds the
// target amount. Three searches over the same move generator: breadth first,
// depth first and hill climbing.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lpar/goal.hpp"

namespace lpar::jugs {

enum class MoveKind : std::uint8_t { fill, empty, pour };

struct Move {
  MoveKind kind;
  std::size_t from;
  std::size_t to;  // pour only

  friend bool operator==(const Move&, const Move&) = default;
};

using State = std::vector<int>;

struct Puzzle {
  std::vector<int> capacities;
  int target;
};

inline void validate(const Puzzle& p) {
  if (p.capacities.empty()) throw std::invalid_argument("no jugs");
  std::uint64_t space = 1;
  for (int c : p.capacities) {
    if (c <= 0) throw std::invalid_argument("jug capacities must be positive");
    space *= static_cast<std::uint64_t>(c) + 1;
    if (space > (std::uint64_t{1} << 40)) throw std::invalid_argument("jug state space too large");
  }
}

/// Applies a move. Returns false when the move names a jug that does not exist.
inline bool apply(const std::vector<int>& caps, State& s, const Move& m) {
  if (m.from >= caps.size()) return false;
  switch (m.kind) {
    case MoveKind::fill:
      s[m.from] = caps[m.from];
      return true;
    case MoveKind::empty:
      s[m.from] = 0;
      return true;
    case MoveKind::pour: {
      if (m.to >= caps.size() || m.to == m.from) return false;
      int amount = std::min(s[m.from], caps[m.to] - s[m.to]);
      s[m.from] -= amount;
      s[m.to] += amount;
      return true;
    }
  }
  return false;
}

/// Moves that change the state, in fixed generation order: fills, empties, pours.
inline std::vector<Move> moves_from(const std::vector<int>& caps, const State& s) {
  std::vector<Move> out;
  const auto n = caps.size();
  for (std::size_t i = 0; i < n; ++i)
    if (s[i] < caps[i]) out.push_back({MoveKind::fill, i, 0});
  for (std::size_t i = 0; i < n; ++i)
    if (s[i] > 0) out.push_back({MoveKind::empty, i, 0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && s[i] > 0 && s[j] < caps[j]) out.push_back({MoveKind::pour, i, j});
  return out;
}

inline bool solved(const State& s, int target) { return std::ranges::find(s, target) != s.end(); }

/// Remaining distance to the target amount: the closest jug's gap.
inline int distance(const State& s, int target) {
  int best = std::abs(s.front() - target);
  for (int c : s) best = std::min(best, std::abs(c - target));
  return best;
}

namespace detail {
inline std::uint64_t encode(const std::vector<int>& caps, const State& s) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < caps.size(); ++i) key = key * (static_cast<std::uint64_t>(caps[i]) + 1) + s[i];
  return key;
}

// Depth-first over children ordered by `order`; shared by DF and HC.
template <class Order>
std::optional<std::vector<Move>> depth_first(const Puzzle& p, StepContext& ctx, Order order) {
  struct Frame {
    State state;
    std::vector<Move> children;
    std::size_t next = 0;
  };
  State start(p.capacities.size(), 0);
  if (solved(start, p.target)) return std::vector<Move>{};
  std::unordered_set<std::uint64_t> visited{encode(p.capacities, start)};
  std::vector<Frame> stack;
  std::vector<Move> path;
  auto push = [&](State s) {
    auto children = moves_from(p.capacities, s);
    order(s, children);
    stack.push_back({std::move(s), std::move(children), 0});
  };
  push(start);
  while (!stack.empty()) {
    ctx.tick();
    auto& top = stack.back();
    if (top.next == top.children.size()) {
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    Move m = top.children[top.next++];
    State s = top.state;
    apply(p.capacities, s, m);
    if (!visited.insert(encode(p.capacities, s)).second) continue;
    path.push_back(m);
    if (solved(s, p.target)) return path;
    push(std::move(s));
  }
  return std::nullopt;
}
}  // namespace detail

/// Shortest plan, or nullopt when the target is unreachable.
inline std::optional<std::vector<Move>> breadth_first(const Puzzle& p, StepContext& ctx) {
  validate(p);
  State start(p.capacities.size(), 0);
  if (solved(start, p.target)) return std::vector<Move>{};
  struct Parent {
    std::uint64_t key;
    Move move;
  };
  std::unordered_map<std::uint64_t, std::optional<Parent>> parents;
  const auto start_key = detail::encode(p.capacities, start);
  parents.emplace(start_key, std::nullopt);
  std::deque<State> queue{start};
  while (!queue.empty()) {
    State s = std::move(queue.front());
    queue.pop_front();
    const auto key = detail::encode(p.capacities, s);
    for (const auto& m : moves_from(p.capacities, s)) {
      ctx.tick();
      State t = s;
      apply(p.capacities, t, m);
      const auto tkey = detail::encode(p.capacities, t);
      if (!parents.emplace(tkey, Parent{key, m}).second) continue;
      if (solved(t, p.target)) {
        std::vector<Move> plan;
        for (auto k = tkey; parents.at(k); k = parents.at(k)->key) plan.push_back(parents.at(k)->move);
        std::ranges::reverse(plan);
        return plan;
      }
      queue.push_back(std::move(t));
    }
  }
  return std::nullopt;
}

/// Depth first in move-generation order, pruned by a visited set, no depth bound.
inline std::optional<std::vector<Move>> depth_first(const Puzzle& p, StepContext& ctx) {
  validate(p);
  return detail::depth_first(p, ctx, [](const State&, std::vector<Move>&) {});
}

/// Depth first, always trying the child closest to the target first; ties keep
/// move-generation order.
inline std::optional<std::vector<Move>> hill_climbing(const Puzzle& p, StepContext& ctx) {
  validate(p);
  return detail::depth_first(p, ctx, [&p](const State& s, std::vector<Move>& children) {
    std::vector<std::pair<int, Move>> scored;
    scored.reserve(children.size());
    for (const auto& m : children) {
      State t = s;
      apply(p.capacities, t, m);
      scored.emplace_back(distance(t, p.target), m);
    }
    std::ranges::stable_sort(scored, {}, &std::pair<int, Move>::first);
    for (std::size_t i = 0; i < children.size(); ++i) children[i] = scored[i].second;
  });
}

/// Final state after replaying a plan from empty jugs; nullopt if a move is malformed.
inline std::optional<State> replay(const std::vector<int>& caps, const std::vector<Move>& plan) {
  State s(caps.size(), 0);
  for (const auto& m : plan)
    if (!apply(caps, s, m)) return std::nullopt;
  return s;
}

inline bool plan_reaches(const Puzzle& p, const std::vector<Move>& plan) {
  auto s = replay(p.capacities, plan);
  return s && solved(*s, p.target);
}

// Term encoding: fill(I), empty(I), pour(I, J).

inline Term move_term(const Move& m) {
  auto idx = [](std::size_t i) { return Term::integer(static_cast<std::int64_t>(i)); };
  switch (m.kind) {
    case MoveKind::fill:
      return Term::compound("fill", {idx(m.from)});
    case MoveKind::empty:
      return Term::compound("empty", {idx(m.from)});
    case MoveKind::pour:
      return Term::compound("pour", {idx(m.from), idx(m.to)});
  }
  throw std::logic_error("bad move kind");
}

inline Term plan_term(const std::vector<Move>& plan) {
  std::vector<Term> moves;
  moves.reserve(plan.size());
  for (const auto& m : plan) moves.push_back(move_term(m));
  return Term::list(std::move(moves));
}

inline std::vector<Move> plan_from_term(const Term& t) {
  if (!t.is_list()) throw std::invalid_argument("plan must be a list: " + to_string(t));
  std::vector<Move> plan;
  for (const auto& m : t.args()) {
    if (!m.is_compound()) throw std::invalid_argument("bad move: " + to_string(m));
    auto at = [&](std::size_t i) { return static_cast<std::size_t>(m.args()[i].int_value()); };
    if (m.name() == "fill" && m.arity() == 1)
      plan.push_back({MoveKind::fill, at(0), 0});
    else if (m.name() == "empty" && m.arity() == 1)
      plan.push_back({MoveKind::empty, at(0), 0});
    else if (m.name() == "pour" && m.arity() == 2)
      plan.push_back({MoveKind::pour, at(0), at(1)});
    else
      throw std::invalid_argument("bad move: " + to_string(m));
  }
  return plan;
}

namespace detail {
template <class Search>
Goal search_goal(std::string name, std::size_t slot, Puzzle p, Search search) {
  validate(p);
  return from_function(
      slot + 1,
      [slot, p = std::move(p), search](const Bindings& in, StepContext& ctx) {
        std::vector<Bindings> out;
        if (auto plan = search(p, ctx))
          if (auto b = in.extended(slot, plan_term(*plan))) out.push_back(std::move(*b));
        return out;
      },
      Determinism::semidet, std::move(name));
}
}  // namespace detail

}  // namespace lpar::jugs

namespace lpar {

/// Binds `slot` to the breadth-first plan as a list of fill/empty/pour terms.
inline Goal jug_search_bf(std::size_t slot, std::vector<int> capacities, int target) {
  return jugs::detail::search_goal("jug_search_bf", slot, {std::move(capacities), target},
                                   [](const jugs::Puzzle& p, StepContext& c) { return jugs::breadth_first(p, c); });
}

inline Goal jug_search_df(std::size_t slot, std::vector<int> capacities, int target) {
  return jugs::detail::search_goal("jug_search_df", slot, {std::move(capacities), target},
                                   [](const jugs::Puzzle& p, StepContext& c) { return jugs::depth_first(p, c); });
}

inline Goal jug_search_hc(std::size_t slot, std::vector<int> capacities, int target) {
  return jugs::detail::search_goal("jug_search_hc", slot, {std::move(capacities), target},
                                   [](const jugs::Puzzle& p, StepContext& c) { return jugs::hill_climbing(p, c); });
}

}  // namespace lpar
