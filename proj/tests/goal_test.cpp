#include <gtest/gtest.h>

#include <random>

#include "lpar/goal.hpp"
#include "lpar/workloads.hpp"
#include "oracles.hpp"

using namespace lpar;

namespace {

std::vector<std::int64_t> slot_values(const std::vector<Bindings>& sols, std::size_t slot) {
  std::vector<std::int64_t> out;
  for (const auto& b : sols) out.push_back(b.value(slot).int_value());
  return out;
}

Term ints(std::initializer_list<std::int64_t> xs) { return oracle::int_list(xs); }

}  // namespace

TEST(Member, EnumeratesInListOrder) {
  auto sols = all_solutions(member(0, ints({1, 2, 3})));
  EXPECT_EQ(slot_values(sols, 0), (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(Member, BoundSlotActsAsMembershipTest) {
  Bindings in(1);
  in.bind(0, Term::integer(2));
  EXPECT_EQ(all_solutions(member(0, ints({1, 2, 3, 2})), in).size(), 2u);
  in = Bindings(1);
  in.bind(0, Term::integer(7));
  EXPECT_TRUE(all_solutions(member(0, ints({1, 2})), in).empty());
}

TEST(Conj, SharedVariableIntersection) {
  auto sols = all_solutions(conj(member(0, ints({1, 2})), member(0, ints({2, 3}))));
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_EQ(sols[0].value(0), Term::integer(2));
}

TEST(Conj, NestedOrder) {
  auto sols = all_solutions(conj(member(0, ints({1, 2})), member(1, Term::list({Term::atom("a")}))));
  ASSERT_EQ(sols.size(), 2u);
  EXPECT_EQ(sols[0].value(0), Term::integer(1));
  EXPECT_EQ(sols[0].value(1), Term::atom("a"));
  EXPECT_EQ(sols[1].value(0), Term::integer(2));
  EXPECT_EQ(sols[1].value(1), Term::atom("a"));
}

TEST(Conj, LeftFailure) {
  EXPECT_TRUE(all_solutions(conj(fail_goal(), member(0, ints({1, 2, 3})))).empty());
  EXPECT_TRUE(all_solutions(conj(fail_goal(), between(0, 0, std::nullopt))).empty());
}

TEST(Conj, RandomChainsMatchNestedLoops) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const std::size_t nvars = 1 + rng() % 3;
    auto chain = oracle::random_chain(rng, 1, 5, nvars);
    const auto expected = oracle::chain_solutions(chain, nvars);
    const auto got = all_solutions(conj(oracle::chain_goals(chain)), Bindings(nvars));
    ASSERT_EQ(got.size(), expected.size()) << "case " << i;
    for (std::size_t k = 0; k < got.size(); ++k)
      for (std::size_t s = 0; s < nvars; ++s) {
        ASSERT_EQ(got[k].bound(s), expected[k][s].has_value());
        if (expected[k][s]) {
          ASSERT_EQ(got[k].value(s), Term::integer(*expected[k][s]));
        }
      }
  }
}

TEST(Disj, Basic) {
  EXPECT_EQ(slot_values(all_solutions(disj(member(0, ints({1})), member(0, ints({2})))), 0),
            (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(slot_values(all_solutions(disj(fail_goal(), member(0, ints({9})))), 0),
            (std::vector<std::int64_t>{9}));
}

TEST(Disj, RandomPairsConcatenate) {
  std::mt19937 rng(77);
  for (int i = 0; i < 200; ++i) {
    auto a = oracle::random_chain(rng, 1, 3, 2);
    auto b = oracle::random_chain(rng, 1, 3, 2);
    auto expected = oracle::chain_solutions(a, 2);
    for (auto& s : oracle::chain_solutions(b, 2)) expected.push_back(s);
    const auto got = all_solutions(disj(conj(oracle::chain_goals(a)), conj(oracle::chain_goals(b))), Bindings(2));
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t k = 0; k < got.size(); ++k)
      ASSERT_EQ(oracle::solution_term(expected[k]), instantiate(oracle::chain_pattern(2), got[k]));
  }
}

TEST(Solutions, DeterministicReplay) {
  std::mt19937 rng(8);
  for (int i = 0; i < 50; ++i) {
    auto g = conj(oracle::chain_goals(oracle::random_chain(rng, 2, 4, 2)));
    EXPECT_EQ(all_solutions(g, Bindings(2)), all_solutions(g, Bindings(2)));
  }
}

TEST(Solutions, OutputsExtendInput) {
  std::mt19937 rng(9);
  for (int i = 0; i < 100; ++i) {
    auto g = conj(oracle::chain_goals(oracle::random_chain(rng, 1, 4, 3)));
    Bindings in(3);
    in.bind(rng() % 3, Term::integer(rng() % 10));
    for (const auto& out : all_solutions(g, in)) ASSERT_TRUE(in.extended_by(out));
  }
}

TEST(Solutions, CancelStopsInfiniteGeneratorWithinInterval) {
  CancelToken token;
  Solutions sols(between(0, 1, std::nullopt), Bindings(1), token);
  std::size_t yields = 0;
  while (sols.next()) {
    if (++yields == 5) token.request();
    ASSERT_LE(yields, 5 + StepContext::checkpoint_interval);
  }
  EXPECT_LE(yields, 5 + StepContext::checkpoint_interval);
  EXPECT_EQ(sols.status(), SolutionsStatus::cancelled);
  EXPECT_FALSE(sols.next());
}

TEST(Solutions, CancelReachesLongDeterministicWork) {
  CancelToken token;
  token.request();
  Solutions sols(fib_naive(0, 40), Bindings(1), token);
  EXPECT_FALSE(sols.next());
  EXPECT_EQ(sols.status(), SolutionsStatus::cancelled);
}

TEST(Solutions, CheckpointInsideSingleSolution) {
  CancelToken token;
  std::uint64_t seen = 0;
  auto g = from_function(1, [&](const Bindings& in, StepContext& ctx) {
    for (;;) {
      ctx.tick();
      if (++seen == 100) token.request();
    }
    return std::vector<Bindings>{in};
  });
  Solutions sols(g, Bindings(1), token);
  EXPECT_FALSE(sols.next());
  EXPECT_EQ(sols.status(), SolutionsStatus::cancelled);
  EXPECT_LE(seen, 100 + StepContext::checkpoint_interval);
}

TEST(Solutions, EngineFailureIsDistinctFromExhaustion) {
  auto boom = from_function(1, [](const Bindings&) -> std::vector<Bindings> { throw std::runtime_error("boom"); });
  Solutions sols(boom, Bindings(1));
  EXPECT_FALSE(sols.next());
  EXPECT_EQ(sols.status(), SolutionsStatus::failed);
  EXPECT_EQ(sols.error(), "boom");
  EXPECT_THROW(all_solutions(boom), std::runtime_error);

  Solutions empty(fail_goal(), Bindings(0));
  EXPECT_FALSE(empty.next());
  EXPECT_EQ(empty.status(), SolutionsStatus::exhausted);
}

TEST(Solutions, FunctionGoalMayNotRebindInput) {
  auto bad = from_function(1, [](const Bindings&) {
    Bindings b(1);
    b.bind(0, Term::integer(2));
    return std::vector<Bindings>{b};
  });
  Bindings in(1);
  in.bind(0, Term::integer(1));
  Solutions sols(bad, in);
  EXPECT_FALSE(sols.next());
  EXPECT_EQ(sols.status(), SolutionsStatus::failed);
}

TEST(Builtins, Between) {
  EXPECT_EQ(slot_values(all_solutions(between(0, 3, 6)), 0), (std::vector<std::int64_t>{3, 4, 5, 6}));
  EXPECT_TRUE(all_solutions(between(0, 3, 2)).empty());
  Bindings in(1);
  in.bind(0, Term::integer(5));
  EXPECT_EQ(all_solutions(between(0, 1, std::nullopt), in).size(), 1u);
}

TEST(Builtins, SucceedWith) {
  auto sols = all_solutions(succeed_with(1, Term::atom("ok")));
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_FALSE(sols[0].bound(0));
  EXPECT_EQ(sols[0].value(1), Term::atom("ok"));
  EXPECT_TRUE(succeed_with(0, Term::atom("ok")).at_most_one());
}

TEST(Builtins, FibMatchesRecursion) {
  for (int n = 0; n <= 20; ++n) {
    auto sols = all_solutions(fib_naive(0, n));
    ASSERT_EQ(sols.size(), 1u);
    EXPECT_EQ(sols[0].value(0).int_value(), oracle::fib(n));
  }
}

TEST(Builtins, HanoiMoveCount) {
  auto sols = all_solutions(hanoi_moves(0, 3));
  ASSERT_EQ(sols.size(), 1u);
  EXPECT_EQ(hanoi_tally_from(sols[0].value(0)).moves, 7u);
  EXPECT_EQ(hanoi_tally_from(all_solutions(hanoi_moves(0, 10))[0].value(0)).moves, 1023u);
}

TEST(Goal, DeterminismComposition) {
  EXPECT_TRUE(conj(succeed_with(0, Term::integer(1)), fail_goal()).at_most_one());
  EXPECT_FALSE(conj(succeed_with(0, Term::integer(1)), member(1, ints({1}))).at_most_one());
  EXPECT_FALSE(disj(fail_goal(), fail_goal()).at_most_one());
  EXPECT_EQ(conj(member(3, ints({1})), member(0, ints({1}))).arity(), 4u);
}
