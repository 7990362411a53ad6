#pragma once

// Benchmark drivers: Towers of Hanoi (independent and-parallelism), water
// jugs (competitive or-parallelism) and set intersection (pipelines).
//
// Every configuration is checked for correctness before its timing is kept;
// a wrong answer raises CorrectnessError instead of producing a row.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lpar/combinators.hpp"
#include "lpar/jugs.hpp"
#include "lpar/pipeline.hpp"
#include "lpar/workloads.hpp"

namespace lpar::bench {

class CorrectnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RatioKind { speedup, slowdown };

inline const char* to_string(RatioKind k) { return k == RatioKind::speedup ? "speedup" : "slowdown"; }

struct BenchResult {
  std::string benchmark;
  std::string params;  // key=value pairs joined by ';'
  std::string config;
  std::size_t threads = 1;
  std::size_t iterations = 0;
  double seconds = 0;  // mean wall time per iteration
  double median_seconds = 0;
  double reference_seconds = 0;
  RatioKind ratio_kind = RatioKind::speedup;
  double ratio = 1;
  std::string status = "ok";
};

inline double ratio_of(RatioKind kind, double seconds, double reference) {
  if (seconds <= 0 || reference <= 0) return 0;
  return kind == RatioKind::speedup ? reference / seconds : seconds / reference;
}

struct Timing {
  std::vector<double> samples;

  double mean() const {
    if (samples.empty()) return 0;
    return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  }

  double median() const {
    if (samples.empty()) return 0;
    auto s = samples;
    std::ranges::sort(s);
    const auto n = s.size();
    return n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2;
  }
};

/// Runs `fn` back to back `iterations` times on the monotonic clock.
inline Timing time_iterations(std::size_t iterations, const std::function<void()>& fn) {
  Timing t;
  t.samples.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    t.samples.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return t;
}

// ---------------------------------------------------------------------------
// Towers of Hanoi

struct HanoiTask {
  int rings;
  int from;
  int to;
  int via;
};

struct HanoiSplit {
  std::vector<HanoiTask> tasks;
  HanoiTally driver;  // moves made while unrolling, outside any task
};

/// Unrolls the top of the recursion until there are `parts` independent
/// sub-towers (or no task can be split further). The largest task is split
/// first, so sizes stay within one ring of each other.
inline HanoiSplit split_hanoi(int rings, std::size_t parts) {
  HanoiSplit split;
  split.tasks.push_back({rings, 0, 2, 1});
  while (split.tasks.size() < parts) {
    auto it = std::ranges::max_element(split.tasks, {}, &HanoiTask::rings);
    if (it->rings <= 1) break;
    const HanoiTask t = *it;
    *it = {t.rings - 1, t.from, t.via, t.to};
    split.tasks.insert(it + 1, {t.rings - 1, t.via, t.to, t.from});
    split.driver.moves += 1;
    split.driver.digest += hanoi_move_code(t.from, t.to);
  }
  return split;
}

inline HanoiTally hanoi_reference(int rings) {
  HanoiTally tally;
  StepContext ctx;
  solve_hanoi(rings, 0, 2, 1, tally, ctx);
  return tally;
}

/// One parallel Hanoi solve using `threads` sub-towers; returns the combined tally.
inline HanoiTally solve_hanoi_parallel(Runtime& rt, int rings, std::size_t threads) {
  const auto split = split_hanoi(rings, threads);
  std::vector<AnswerProjection> projections;
  std::vector<Goal> goals;
  for (const auto& t : split.tasks) {
    projections.emplace_back(Term::var(0));
    goals.push_back(hanoi_moves(0, t.rings, t.from, t.to, t.via));
  }
  auto answers = concurrent_and(rt, projections, goals);
  if (!answers) throw CorrectnessError("hanoi sub-tower produced no answer");
  HanoiTally total = split.driver;
  for (const auto& a : *answers) total += hanoi_tally_from(a);
  return total;
}

inline std::vector<BenchResult> bench_hanoi(Runtime& rt, int rings, std::vector<std::size_t> thread_counts,
                                            std::size_t iterations) {
  if (rings < 1) throw std::invalid_argument("rings must be at least 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (std::ranges::find(thread_counts, std::size_t{1}) == thread_counts.end())
    thread_counts.insert(thread_counts.begin(), 1);
  const HanoiTally expected = hanoi_reference(rings);
  if (expected.moves != (std::uint64_t{1} << rings) - 1) throw CorrectnessError("hanoi reference move count wrong");

  std::vector<BenchResult> rows;
  double single = 0;
  for (auto threads : thread_counts) {
    if (threads < 1) throw std::invalid_argument("thread counts must be positive");
    auto timing = time_iterations(iterations, [&] {
      if (solve_hanoi_parallel(rt, rings, threads) != expected)
        throw CorrectnessError("hanoi with " + std::to_string(threads) + " threads: wrong tally");
    });
    BenchResult r;
    r.benchmark = "hanoi";
    r.params = "rings=" + std::to_string(rings);
    r.config = "parallel";
    r.threads = threads;
    r.iterations = iterations;
    r.seconds = timing.mean();
    r.median_seconds = timing.median();
    if (threads == 1) single = r.seconds;
    rows.push_back(r);
  }
  for (auto& r : rows) {
    r.reference_seconds = single;
    r.ratio_kind = RatioKind::speedup;
    r.ratio = ratio_of(r.ratio_kind, r.seconds, single);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Water jugs

inline std::vector<Goal> jug_solvers(const std::vector<int>& capacities, int target) {
  return {jug_search_hc(0, capacities, target), jug_search_df(0, capacities, target),
          jug_search_bf(0, capacities, target)};
}

inline const std::vector<std::string>& jug_solver_names() {
  static const std::vector<std::string> names{"HC", "DF", "BF"};
  return names;
}

/// First plan of a single solver, run on the calling thread.
inline std::optional<std::vector<jugs::Move>> solve_jugs_single(const Goal& solver) {
  Solutions s(solver, Bindings(1));
  auto b = s.next();
  if (s.status() == SolutionsStatus::failed) throw std::runtime_error(s.error());
  if (!b) return std::nullopt;
  return jugs::plan_from_term(b->value(0));
}

inline std::optional<std::vector<jugs::Move>> solve_jugs_competitive(Runtime& rt, const std::vector<Goal>& solvers) {
  auto t = first_solution(rt, Term::var(0), solvers);
  if (!t) return std::nullopt;
  return jugs::plan_from_term(*t);
}

inline std::vector<BenchResult> bench_jugs(Runtime& rt, const std::vector<int>& capacities,
                                           const std::vector<int>& targets, std::size_t iterations) {
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  jugs::validate({capacities, 0});
  std::string caps;
  for (int c : capacities) caps += (caps.empty() ? "" : "/") + std::to_string(c);

  std::vector<BenchResult> rows;
  for (int target : targets) {
    const jugs::Puzzle puzzle{capacities, target};
    const auto solvers = jug_solvers(capacities, target);
    std::vector<BenchResult> group;
    std::optional<bool> reachable;

    auto check = [&](const std::string& who, const std::optional<std::vector<jugs::Move>>& plan) {
      if (plan && !jugs::plan_reaches(puzzle, *plan))
        throw CorrectnessError(who + " returned an invalid plan for target " + std::to_string(target));
      if (!reachable) reachable = plan.has_value();
      if (*reachable != plan.has_value())
        throw CorrectnessError("solvers disagree on whether target " + std::to_string(target) + " is reachable");
    };

    auto add_row = [&](const std::string& config, std::size_t threads, const Timing& t) {
      BenchResult r;
      r.benchmark = "jugs";
      r.params = "jugs=" + caps + ";target=" + std::to_string(target);
      r.config = config;
      r.threads = threads;
      r.iterations = iterations;
      r.seconds = t.mean();
      r.median_seconds = t.median();
      r.ratio_kind = RatioKind::slowdown;
      group.push_back(r);
    };

    for (std::size_t i = 0; i < solvers.size(); ++i) {
      const auto& name = jug_solver_names()[i];
      add_row(name, 1, time_iterations(iterations, [&] { check(name, solve_jugs_single(solvers[i])); }));
    }
    add_row("COP", solvers.size(),
            time_iterations(iterations, [&] { check("COP", solve_jugs_competitive(rt, solvers)); }));

    double fastest = group.front().seconds;
    for (std::size_t i = 0; i < solvers.size(); ++i) fastest = std::min(fastest, group[i].seconds);
    for (auto& r : group) {
      r.reference_seconds = fastest;
      r.ratio = ratio_of(r.ratio_kind, r.seconds, fastest);
      if (!reachable.value_or(false)) r.status = "unsolved";
      rows.push_back(r);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Set intersection

enum class IntersectCase { best, worst };

inline const char* to_string(IntersectCase c) { return c == IntersectCase::best ? "best" : "worst"; }

/// Best case: every list is 0..size-1. Worst case: list i holds i*size..i*size+size-1.
inline std::vector<Term> intersection_lists(std::size_t sets, std::size_t size, IntersectCase c) {
  std::vector<Term> lists;
  for (std::size_t i = 0; i < sets; ++i) {
    const std::int64_t base = c == IntersectCase::best ? 0 : static_cast<std::int64_t>(i * size);
    std::vector<Term> elems;
    elems.reserve(size);
    for (std::size_t k = 0; k < size; ++k) elems.push_back(Term::integer(base + static_cast<std::int64_t>(k)));
    lists.push_back(Term::list(std::move(elems)));
  }
  return lists;
}

/// member(X, L1), member(X, L2), ..., member(X, Ln) with X in slot 0.
inline std::vector<Goal> intersection_goals(const std::vector<Term>& lists) {
  std::vector<Goal> goals;
  for (const auto& l : lists) goals.push_back(member(0, l));
  return goals;
}

/// Elements of the first list present in every other list, in first-list order.
inline std::vector<Term> intersection_expected(const std::vector<Term>& lists) {
  std::vector<Term> out;
  if (lists.empty()) return out;
  std::vector<std::set<std::int64_t>> others;
  for (std::size_t i = 1; i < lists.size(); ++i) {
    std::set<std::int64_t> s;
    for (const auto& e : lists[i].args()) s.insert(e.int_value());
    others.push_back(std::move(s));
  }
  for (const auto& e : lists.front().args())
    if (std::ranges::all_of(others, [&](const auto& s) { return s.contains(e.int_value()); })) out.push_back(e);
  return out;
}

inline std::vector<BenchResult> bench_intersection(Runtime& rt, const std::vector<std::size_t>& set_counts,
                                                   std::size_t set_size, IntersectCase which,
                                                   std::size_t iterations) {
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  std::vector<BenchResult> rows;
  for (auto sets : set_counts) {
    if (sets < 1) throw std::invalid_argument("set counts must be positive");
    const auto lists = intersection_lists(sets, set_size, which);
    const auto goals = intersection_goals(lists);
    const auto expected = intersection_expected(lists);
    const AnswerProjection x(Term::var(0));

    auto seq = time_iterations(iterations, [&] {
      if (seq_findall(x, goals, 1) != expected) throw CorrectnessError("findall gave a wrong intersection");
    });
    auto piped = time_iterations(iterations, [&] {
      if (piped_findall(rt, x, goals, 1) != expected)
        throw CorrectnessError("piped_findall gave a wrong intersection");
    });

    const std::string params =
        "sets=" + std::to_string(sets) + ";size=" + std::to_string(set_size) + ";case=" + to_string(which);
    for (auto [config, threads, timing] :
         {std::tuple{"seq", std::size_t{1}, &seq}, std::tuple{"piped", sets, &piped}}) {
      BenchResult r;
      r.benchmark = "intersect";
      r.params = params;
      r.config = config;
      r.threads = threads;
      r.iterations = iterations;
      r.seconds = timing->mean();
      r.median_seconds = timing->median();
      r.reference_seconds = seq.mean();
      r.ratio_kind = RatioKind::speedup;
      r.ratio = ratio_of(r.ratio_kind, r.seconds, r.reference_seconds);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace lpar::bench
