#include <gtest/gtest.h>

#include <map>
#include <queue>

#include "lpar/jugs.hpp"
#include "oracles.hpp"

using namespace lpar;

namespace {

// Shortest plan length over two jugs, by level-order search on (a, b) pairs.
int shortest_two_jug(int a, int b, int target) {
  std::map<std::pair<int, int>, int> dist{{{0, 0}, 0}};
  std::queue<std::pair<int, int>> q;
  q.push({0, 0});
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    const int d = dist[{x, y}];
    if (x == target || y == target) return d;
    const int p1 = std::min(x, b - y);
    const int p2 = std::min(y, a - x);
    for (auto n : std::vector<std::pair<int, int>>{{a, y}, {x, b}, {0, y}, {x, 0}, {x - p1, y + p1}, {x + p2, y - p2}})
      if (!dist.contains(n)) {
        dist[n] = d + 1;
        q.push(n);
      }
  }
  return -1;
}

std::optional<Term> first_plan(const Goal& g) {
  auto sols = all_solutions(g, Bindings(1));
  if (sols.empty()) return std::nullopt;
  return sols.front().value(0);
}

}  // namespace

TEST(Jugs, MoveGenerationOrderSkipsNoOps) {
  auto moves = jugs::moves_from({5, 9}, {0, 0});
  ASSERT_EQ(moves.size(), 2u);
  EXPECT_EQ(moves[0], (jugs::Move{jugs::MoveKind::fill, 0, 0}));
  EXPECT_EQ(moves[1], (jugs::Move{jugs::MoveKind::fill, 1, 0}));
  moves = jugs::moves_from({5, 9}, {5, 3});
  ASSERT_EQ(moves.size(), 4u);
  EXPECT_EQ(moves[0].kind, jugs::MoveKind::fill);
  EXPECT_EQ(moves[1].kind, jugs::MoveKind::empty);
  EXPECT_EQ(moves[3], (jugs::Move{jugs::MoveKind::pour, 0, 1}));
}

TEST(Jugs, DistanceHeuristic) {
  EXPECT_EQ(jugs::distance({5, 3}, 4), 1);
  EXPECT_EQ(jugs::distance({0, 9}, 4), 4);
}

TEST(Jugs, AllSolversProduceReplayablePlans) {
  for (int target = 0; target <= 10; ++target) {
    const bool reachable = oracle::two_jug_reachable(5, 9, target);
    for (const auto& g : {jug_search_bf(0, {5, 9}, target), jug_search_df(0, {5, 9}, target),
                          jug_search_hc(0, {5, 9}, target)}) {
      auto plan = first_plan(g);
      ASSERT_EQ(plan.has_value(), reachable) << g.name() << " target " << target;
      if (plan) {
        EXPECT_TRUE(oracle::plan_valid({5, 9}, target, *plan)) << g.name() << " " << to_string(*plan);
      }
    }
  }
}

TEST(Jugs, BreadthFirstIsShortest) {
  for (auto [a, b] : std::vector<std::pair<int, int>>{{5, 9}, {3, 5}, {4, 7}, {2, 6}}) {
    for (int target = 1; target <= b; ++target) {
      const int expected = shortest_two_jug(a, b, target);
      auto plan = first_plan(jug_search_bf(0, {a, b}, target));
      if (expected < 0) {
        EXPECT_FALSE(plan);
        continue;
      }
      ASSERT_TRUE(plan);
      EXPECT_EQ(static_cast<int>(plan->arity()), expected) << a << "/" << b << " -> " << target;
    }
  }
}

TEST(Jugs, UnreachableTargets) {
  EXPECT_FALSE(first_plan(jug_search_df(0, {2, 6}, 3)));
  EXPECT_FALSE(first_plan(jug_search_hc(0, {5, 9}, 10)));
  EXPECT_FALSE(first_plan(jug_search_bf(0, {4, 6}, 5)));
}

TEST(Jugs, ThreeJugs) {
  const std::vector<int> caps{3, 5, 8};
  for (int target = 1; target <= 8; ++target)
    for (const auto& g : {jug_search_bf(0, caps, target), jug_search_df(0, caps, target),
                          jug_search_hc(0, caps, target)}) {
      auto plan = first_plan(g);
      ASSERT_TRUE(plan);
      EXPECT_TRUE(oracle::plan_valid(caps, target, *plan));
    }
}

TEST(Jugs, PlanTermRoundTrip) {
  std::vector<jugs::Move> plan{{jugs::MoveKind::fill, 1, 0}, {jugs::MoveKind::pour, 1, 0}, {jugs::MoveKind::empty, 0, 0}};
  const Term t = jugs::plan_term(plan);
  EXPECT_EQ(to_string(t), "[fill(1),pour(1, 0),empty(0)]");
  EXPECT_EQ(jugs::plan_from_term(t), plan);
}

TEST(Jugs, InvalidConfiguration) {
  EXPECT_THROW(jug_search_bf(0, {}, 1), std::invalid_argument);
  EXPECT_THROW(jug_search_bf(0, {5, 0}, 1), std::invalid_argument);
}
