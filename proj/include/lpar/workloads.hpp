#pragma once

// Deterministic CPU-bound goals used by the and-parallel benchmarks.

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "lpar/goal.hpp"

namespace lpar {

/// Move tally of a Towers of Hanoi run. The digest is a sum over moves, so
/// tallies of independent sub-towers combine by addition.
struct HanoiTally {
  std::uint64_t moves = 0;
  std::uint64_t digest = 0;

  HanoiTally& operator+=(const HanoiTally& o) {
    moves += o.moves;
    digest += o.digest;
    return *this;
  }
  friend bool operator==(const HanoiTally&, const HanoiTally&) = default;
};

inline std::uint64_t hanoi_move_code(int from, int to) {
  return static_cast<std::uint64_t>(from * 3 + to + 1);
}

inline void solve_hanoi(int rings, int from, int to, int via, HanoiTally& tally, StepContext& ctx) {
  if (rings <= 0) return;
  solve_hanoi(rings - 1, from, via, to, tally, ctx);
  ctx.tick();
  ++tally.moves;
  tally.digest += hanoi_move_code(from, to);
  solve_hanoi(rings - 1, via, to, from, tally, ctx);
}

inline Term hanoi_tally_term(const HanoiTally& t) {
  return Term::compound("moves", {Term::integer(static_cast<std::int64_t>(t.moves)),
                                  Term::integer(static_cast<std::int64_t>(t.digest))});
}

inline HanoiTally hanoi_tally_from(const Term& t) {
  if (!t.is_compound() || t.name() != "moves" || t.arity() != 2)
    throw std::invalid_argument("not a moves/2 term: " + to_string(t));
  return {static_cast<std::uint64_t>(t.args()[0].int_value()),
          static_cast<std::uint64_t>(t.args()[1].int_value())};
}

/// Solves the tower recursively, binding `slot` to moves(Count, Digest).
inline Goal hanoi_moves(std::size_t slot, int rings, int from = 0, int to = 2, int via = 1) {
  if (rings < 0) throw std::invalid_argument("rings must be non-negative");
  return from_function(
      slot + 1,
      [=](const Bindings& in, StepContext& ctx) {
        HanoiTally tally;
        solve_hanoi(rings, from, to, via, tally, ctx);
        std::vector<Bindings> out;
        if (auto b = in.extended(slot, hanoi_tally_term(tally))) out.push_back(std::move(*b));
        return out;
      },
      Determinism::semidet, "hanoi_moves");
}

inline std::int64_t naive_fib(std::int64_t n, StepContext& ctx) {
  ctx.tick();
  if (n < 2) return n;
  return naive_fib(n - 1, ctx) + naive_fib(n - 2, ctx);
}

/// Doubly recursive Fibonacci, binding `slot` to fib(n). fib(0) = 0, fib(1) = 1.
inline Goal fib_naive(std::size_t slot, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("fib of a negative number");
  return from_function(
      slot + 1,
      [=](const Bindings& in, StepContext& ctx) {
        std::vector<Bindings> out;
        if (auto b = in.extended(slot, Term::integer(naive_fib(n, ctx)))) out.push_back(std::move(*b));
        return out;
      },
      Determinism::semidet, "fib_naive");
}

}  // namespace lpar
