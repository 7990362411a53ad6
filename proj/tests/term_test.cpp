#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "lpar/term.hpp"
#include "oracles.hpp"

using lpar::AnswerProjection;
using lpar::Bindings;
using lpar::Term;

namespace {

Bindings ints(std::initializer_list<std::int64_t> xs) {
  Bindings b(xs.size());
  std::size_t i = 0;
  for (auto x : xs) b.bind(i++, Term::integer(x));
  return b;
}

}  // namespace

TEST(Term, RendersPrologStyle) {
  auto t = Term::compound("f", {Term::atom("a"), Term::list({Term::integer(1), Term::integer(2)}), Term::var(0)});
  EXPECT_EQ(lpar::to_string(t), "f(a, [1,2], _G0)");
  EXPECT_EQ(lpar::to_string(Term::list({})), "[]");
  EXPECT_EQ(lpar::to_string(Term::integer(-3)), "-3");
}

TEST(Term, StructuralEquality) {
  auto a = Term::compound("p", {Term::integer(1), Term::atom("x")});
  auto b = Term::compound("p", {Term::integer(1), Term::atom("x")});
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.shares_node_with(b));
  EXPECT_FALSE(a == Term::compound("p", {Term::integer(1), Term::atom("y")}));
  EXPECT_FALSE(a == Term::compound("q", {Term::integer(1), Term::atom("x")}));
  EXPECT_FALSE(Term::list({Term::atom("x")}) == Term::compound("x", {}));
  EXPECT_FALSE(Term::atom("1") == Term::integer(1));
  EXPECT_FALSE(Term::var(1) == Term::integer(1));
}

TEST(Term, GroundSizeDepth) {
  auto t = Term::compound("f", {Term::var(2), Term::list({Term::integer(1)})});
  EXPECT_FALSE(t.is_ground());
  EXPECT_TRUE(Term::list({Term::integer(1)}).is_ground());
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(t.depth(), 3u);
  EXPECT_EQ(Term::atom("x").depth(), 1u);
}

TEST(Instantiate, SingleSlot) {
  EXPECT_EQ(lpar::instantiate(Term::var(0), ints({2})), Term::integer(2));
}

TEST(Instantiate, DirectSubstitution) {
  Bindings b(2);
  b.bind(0, Term::integer(1));
  b.bind(1, Term::atom("a"));
  auto pattern = Term::compound("pair", {Term::var(0), Term::var(1)});
  EXPECT_EQ(lpar::instantiate(pattern, b), Term::compound("pair", {Term::integer(1), Term::atom("a")}));
}

TEST(Instantiate, LastSlotMatchesNaiveSubstituter) {
  const auto b = ints({5, 6, 7, 8});
  const Term expected = oracle::substitute(Term::var(3), {Term::integer(5), Term::integer(6), Term::integer(7),
                                                          Term::integer(8)});
  EXPECT_EQ(expected, Term::integer(8));
  EXPECT_EQ(lpar::instantiate(Term::var(3), b), expected);
}

TEST(Instantiate, UnboundSlotsStayVariables) {
  Bindings b(2);
  b.bind(1, Term::atom("z"));
  EXPECT_EQ(lpar::instantiate(Term::compound("g", {Term::var(0), Term::var(1)}), b),
            Term::compound("g", {Term::var(0), Term::atom("z")}));
}

TEST(Instantiate, OutOfRangeIsAnError) {
  EXPECT_THROW(lpar::instantiate(Term::var(3), ints({1, 2})), std::out_of_range);
}

TEST(Instantiate, RandomTermsAgreeWithOracleAndCompose) {
  std::mt19937 rng(17);
  for (int i = 0; i < 500; ++i) {
    const std::size_t nvars = 1 + rng() % 4;
    const Term pattern = oracle::random_term(rng, 4, nvars);
    std::vector<std::optional<Term>> slots(nvars);
    Bindings b(nvars);
    for (std::size_t s = 0; s < nvars; ++s) {
      if (rng() % 3 == 0) continue;
      auto v = oracle::random_term(rng, 2, 0);
      slots[s] = v;
      b.bind(s, v);
    }
    const Term got = lpar::instantiate(pattern, b);
    ASSERT_EQ(got, oracle::substitute(pattern, slots)) << lpar::to_string(pattern);
    if (pattern.is_compound()) {
      std::vector<Term> args;
      for (const auto& a : pattern.args()) args.push_back(lpar::instantiate(a, b));
      ASSERT_EQ(got, Term::compound(pattern.name(), args));
    }
  }
}

TEST(Snapshot, Leaves) {
  EXPECT_EQ(lpar::snapshot(Term::atom("x")), Term::atom("x"));
  auto l = Term::list({Term::integer(1), Term::integer(2)});
  EXPECT_EQ(lpar::snapshot(l), Term::list({Term::integer(1), Term::integer(2)}));
}

TEST(Snapshot, IndependentOfSenderBuilderState) {
  std::mt19937 rng(3);
  std::vector<Term> builder;
  std::size_t nodes = 0;
  while (nodes < 1000) {
    builder.push_back(oracle::random_term(rng, 3, 0));
    nodes += builder.back().size();
  }
  const Term original = Term::list(builder);
  ASSERT_GE(original.size(), 1000u);
  const Term copy = lpar::snapshot(original);
  const std::string rendered = lpar::to_string(copy);
  // The sender keeps editing the vector it built the term from.
  for (auto& t : builder) t = Term::atom("changed");
  builder.push_back(Term::integer(0));
  builder.clear();
  EXPECT_EQ(copy, original);
  EXPECT_EQ(lpar::to_string(copy), rendered);
}

TEST(Snapshot, EqualToSourceOverRandomTrees) {
  std::mt19937 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto t = oracle::random_term(rng, 5, 3);
    EXPECT_EQ(lpar::snapshot(t), t);
  }
}

TEST(TermVariables, Basic) {
  EXPECT_EQ(lpar::term_variables(Term::compound("g", {Term::var(0), Term::var(1)})),
            (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(lpar::term_variables(Term::integer(7)).empty());
}

TEST(TermVariables, FirstOccurrenceOrder) {
  auto t = Term::compound("f", {Term::var(1), Term::compound("g", {Term::var(0), Term::var(1)})});
  const std::vector<std::size_t> expected = oracle::variables_dfs(t);
  EXPECT_EQ(expected, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(lpar::term_variables(t), expected);
}

TEST(TermVariables, RandomTermsMatchDfsAndAreDistinct) {
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto t = oracle::random_term(rng, 5, 6);
    auto vars = lpar::term_variables(t);
    ASSERT_EQ(vars, oracle::variables_dfs(t));
    std::sort(vars.begin(), vars.end());
    ASSERT_EQ(std::adjacent_find(vars.begin(), vars.end()), vars.end());
  }
}

TEST(Bindings, SingleAssignment) {
  Bindings b(2);
  EXPECT_TRUE(b.bind(0, Term::integer(1)));
  EXPECT_TRUE(b.bind(0, Term::integer(1)));
  EXPECT_FALSE(b.bind(0, Term::integer(2)));
  EXPECT_EQ(b.value(0), Term::integer(1));
  EXPECT_THROW(b.bind(1, Term::var(0)), std::invalid_argument);
  EXPECT_THROW(b.value(1), std::logic_error);
}

TEST(Bindings, ExtendedChecksBeforeCopying) {
  Bindings b(2);
  b.bind(0, Term::integer(4));
  EXPECT_FALSE(b.extended(0, Term::integer(5)));
  auto e = b.extended(1, Term::atom("k"));
  ASSERT_TRUE(e);
  EXPECT_TRUE(b.extended_by(*e));
  EXPECT_FALSE(e->extended_by(b));
}

TEST(Symbols, ConcurrentInterningIsConsistent) {
  std::vector<std::thread> threads;
  std::vector<std::vector<Term>> made(4);
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([t, &made] {
      for (int i = 0; i < 500; ++i) made[t].push_back(Term::atom("sym" + std::to_string(i)));
    });
  for (auto& th : threads) th.join();
  for (int i = 0; i < 500; ++i)
    for (int t = 1; t < 4; ++t) EXPECT_EQ(made[0][i], made[t][i]);
  EXPECT_EQ(made[2][42].name(), "sym42");
}
