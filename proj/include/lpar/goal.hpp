#pragma once

// Resumable nondeterministic goals.
//
// A Goal is an immutable description; open() starts one enumeration over a
// given input and returns a Cursor that produces extended Bindings one at a
// time in backtracking order. Long-running cursors call StepContext::tick(),
// which polls the cancel token every checkpoint_interval steps.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

#include "lpar/term.hpp"

namespace lpar {

/// Shared stop flag. Once requested it stays requested.
class CancelToken {
 public:
  CancelToken() = default;
  explicit CancelToken(std::stop_source source) : source_(std::move(source)) {}

  void request() noexcept { source_.request_stop(); }
  bool requested() const noexcept { return source_.stop_requested(); }
  std::stop_token token() const noexcept { return source_.get_token(); }

 private:
  std::stop_source source_;
};

/// Thrown from a checkpoint once cancellation is requested. Deliberately not a
/// std::exception so that goal code catching std::exception does not swallow it.
struct Cancelled {};

class StepContext {
 public:
  static constexpr std::uint64_t checkpoint_interval = 1024;

  explicit StepContext(CancelToken token = {}) : token_(std::move(token)) {}

  void tick() {
    if (++steps_ % checkpoint_interval == 0) checkpoint();
  }

  void checkpoint() const {
    if (token_.requested()) throw Cancelled{};
  }

  const CancelToken& cancel_token() const noexcept { return token_; }
  std::uint64_t steps() const noexcept { return steps_; }

 private:
  CancelToken token_;
  std::uint64_t steps_ = 0;
};

class Cursor {
 public:
  virtual ~Cursor() = default;
  virtual std::optional<Bindings> next(StepContext& ctx) = 0;
};

namespace detail {
template <class F>
class LambdaCursor final : public Cursor {
 public:
  explicit LambdaCursor(F f) : f_(std::move(f)) {}
  std::optional<Bindings> next(StepContext& ctx) override { return f_(ctx); }

 private:
  F f_;
};
}  // namespace detail

template <class F>
std::unique_ptr<Cursor> make_cursor(F f) {
  return std::make_unique<detail::LambdaCursor<F>>(std::move(f));
}

/// Upper bound on solutions per input. Used only for pipeline prefix folding.
enum class Determinism : std::uint8_t { det, semidet, nondet };

inline Determinism combine_conj(Determinism a, Determinism b) {
  if (a == Determinism::nondet || b == Determinism::nondet) return Determinism::nondet;
  if (a == Determinism::semidet || b == Determinism::semidet) return Determinism::semidet;
  return Determinism::det;
}

class Goal {
 public:
  using Opener = std::function<std::unique_ptr<Cursor>(Bindings)>;

  Goal(std::string name, std::size_t arity, Determinism determinism, Opener open)
      : name_(std::make_shared<const std::string>(std::move(name))),
        arity_(arity),
        determinism_(determinism),
        open_(std::make_shared<const Opener>(std::move(open))) {}

  const std::string& name() const noexcept { return *name_; }
  /// Number of variable slots the goal reads or writes.
  std::size_t arity() const noexcept { return arity_; }
  Determinism determinism() const noexcept { return determinism_; }
  bool at_most_one() const noexcept { return determinism_ != Determinism::nondet; }

  std::unique_ptr<Cursor> open(Bindings input) const {
    if (input.size() < arity_) input.resize(arity_);
    return (*open_)(std::move(input));
  }

 private:
  std::shared_ptr<const std::string> name_;
  std::size_t arity_;
  Determinism determinism_;
  std::shared_ptr<const Opener> open_;
};

enum class SolutionsStatus { active, exhausted, cancelled, failed };

/// Lazy solution sequence of a goal. The cancel token is checked before every
/// solution; a cancelled or failed run ends the sequence and records why.
class Solutions {
 public:
  Solutions(const Goal& goal, Bindings input, CancelToken token = {})
      : ctx_(std::move(token)), cursor_(goal.open(std::move(input))) {}

  std::optional<Bindings> next() {
    if (status_ != SolutionsStatus::active) return std::nullopt;
    try {
      ctx_.checkpoint();
      auto b = cursor_->next(ctx_);
      if (!b) finish(SolutionsStatus::exhausted);
      return b;
    } catch (const Cancelled&) {
      finish(SolutionsStatus::cancelled);
    } catch (const std::exception& e) {
      error_ = e.what();
      finish(SolutionsStatus::failed);
    } catch (...) {
      error_ = "unknown exception";
      finish(SolutionsStatus::failed);
    }
    return std::nullopt;
  }

  SolutionsStatus status() const noexcept { return status_; }
  const std::string& error() const noexcept { return error_; }
  std::uint64_t steps() const noexcept { return ctx_.steps(); }

 private:
  void finish(SolutionsStatus s) {
    status_ = s;
    cursor_.reset();
  }

  StepContext ctx_;
  std::unique_ptr<Cursor> cursor_;
  SolutionsStatus status_ = SolutionsStatus::active;
  std::string error_;
};

/// Runs a finite goal to completion. Engine failures are rethrown.
inline std::vector<Bindings> all_solutions(const Goal& goal, Bindings input = {},
                                           CancelToken token = {}) {
  std::vector<Bindings> out;
  Solutions sols(goal, std::move(input), std::move(token));
  while (auto b = sols.next()) out.push_back(std::move(*b));
  if (sols.status() == SolutionsStatus::failed) throw std::runtime_error(sols.error());
  return out;
}

// ---------------------------------------------------------------------------
// Built-in goals

inline Goal fail_goal() {
  return Goal("fail", 0, Determinism::semidet,
              [](Bindings) { return make_cursor([](StepContext&) { return std::optional<Bindings>{}; }); });
}

/// Binds `slot` to `value` (or checks it, when already bound). At most one solution.
inline Goal succeed_with(std::size_t slot, Term value) {
  if (!value.is_ground()) throw std::invalid_argument("succeed_with needs a ground value");
  return Goal("succeed_with", slot + 1, Determinism::semidet,
              [slot, value = std::move(value)](Bindings in) {
                return make_cursor([slot, value, in = std::move(in), done = false](StepContext& ctx) mutable
                                   -> std::optional<Bindings> {
                  if (done) return std::nullopt;
                  done = true;
                  ctx.tick();
                  return in.extended(slot, value);
                });
              });
}

/// member(slot, list): one solution per list element equal to (or bindable to) the slot.
inline Goal member(std::size_t slot, Term list) {
  if (!list.is_list()) throw std::invalid_argument("member needs a list term");
  if (!list.is_ground()) throw std::invalid_argument("member needs a ground list");
  return Goal("member", slot + 1, Determinism::nondet, [slot, list = std::move(list)](Bindings in) {
    return make_cursor([slot, list, in = std::move(in), i = std::size_t{0}](StepContext& ctx) mutable
                       -> std::optional<Bindings> {
      auto elems = list.args();
      const auto& current = in[slot];
      while (i < elems.size()) {
        ctx.tick();
        const Term& e = elems[i++];
        if (current) {
          if (*current == e) return in;
        } else {
          Bindings out = in;
          out.bind(slot, e);
          return out;
        }
      }
      return std::nullopt;
    });
  });
}

/// between(slot, lo, hi) over integers; an absent `hi` never ends.
inline Goal between(std::size_t slot, std::int64_t lo, std::optional<std::int64_t> hi) {
  return Goal("between", slot + 1, Determinism::nondet, [slot, lo, hi](Bindings in) {
    return make_cursor([slot, lo, hi, in = std::move(in), next = lo, done = false](StepContext& ctx) mutable
                       -> std::optional<Bindings> {
      if (done) return std::nullopt;
      if (const auto& cur = in[slot]) {
        done = true;
        ctx.tick();
        if (!cur->is_integer()) return std::nullopt;
        auto v = cur->int_value();
        if (v >= lo && (!hi || v <= *hi)) return in;
        return std::nullopt;
      }
      ctx.tick();
      if (hi && next > *hi) {
        done = true;
        return std::nullopt;
      }
      Bindings out = in;
      out.bind(slot, Term::integer(next));
      if (next == std::numeric_limits<std::int64_t>::max())
        done = true;
      else
        ++next;
      return out;
    });
  });
}

namespace detail {
inline std::unique_ptr<Cursor> conj_cursor(Goal first, Goal second, Bindings in) {
  return make_cursor([second = std::move(second), outer = first.open(std::move(in)),
                      inner = std::unique_ptr<Cursor>{}](StepContext& ctx) mutable -> std::optional<Bindings> {
    for (;;) {
      if (inner) {
        if (auto b = inner->next(ctx)) return b;
        inner.reset();
      }
      auto mid = outer->next(ctx);
      if (!mid) return std::nullopt;
      inner = second.open(std::move(*mid));
    }
  });
}
}  // namespace detail

/// Sequential conjunction: for each solution of `first`, all solutions of `second` under it.
inline Goal conj(Goal first, Goal second) {
  auto arity = std::max(first.arity(), second.arity());
  auto det = combine_conj(first.determinism(), second.determinism());
  auto name = "(" + first.name() + ", " + second.name() + ")";
  return Goal(std::move(name), arity, det, [first = std::move(first), second = std::move(second)](Bindings in) {
    return detail::conj_cursor(first, second, std::move(in));
  });
}

/// All solutions of `first`, then all solutions of `second`.
inline Goal disj(Goal first, Goal second) {
  auto arity = std::max(first.arity(), second.arity());
  auto name = "(" + first.name() + "; " + second.name() + ")";
  return Goal(std::move(name), arity, Determinism::nondet,
              [first = std::move(first), second = std::move(second)](Bindings in) {
                return make_cursor([second, in, cur = first.open(in), on_second = false](StepContext& ctx) mutable
                                   -> std::optional<Bindings> {
                  if (auto b = cur->next(ctx)) return b;
                  if (on_second) return std::nullopt;
                  on_second = true;
                  cur = second.open(in);
                  return cur->next(ctx);
                });
              });
}

/// Right fold of conj over a non-empty list, matching Prolog's `(A, (B, C))`.
inline Goal conj(const std::vector<Goal>& goals) {
  if (goals.empty()) throw std::invalid_argument("empty conjunction");
  Goal acc = goals.back();
  for (auto it = goals.rbegin() + 1; it != goals.rend(); ++it) acc = conj(*it, acc);
  return acc;
}

inline Goal disj(const std::vector<Goal>& goals) {
  if (goals.empty()) return fail_goal();
  Goal acc = goals.back();
  for (auto it = goals.rbegin() + 1; it != goals.rend(); ++it) acc = disj(*it, acc);
  return acc;
}

/// Goal from a closure returning all solutions for an input. The closure may
/// take a StepContext& to tick during long computations. Every returned
/// Bindings must extend the input; violations are reported as engine failures.
template <class F>
  requires std::invocable<F&, const Bindings&> || std::invocable<F&, const Bindings&, StepContext&>
Goal from_function(std::size_t arity, F fn, Determinism determinism = Determinism::nondet,
                   std::string name = "function") {
  auto shared = std::make_shared<F>(std::move(fn));
  return Goal(std::move(name), arity, determinism, [shared](Bindings in) {
    return make_cursor([shared, in = std::move(in), results = std::optional<std::vector<Bindings>>{},
                        i = std::size_t{0}](StepContext& ctx) mutable -> std::optional<Bindings> {
      if (!results) {
        if constexpr (std::invocable<F&, const Bindings&, StepContext&>)
          results = (*shared)(std::as_const(in), ctx);
        else
          results = (*shared)(std::as_const(in));
      }
      if (i >= results->size()) return std::nullopt;
      ctx.tick();
      Bindings out = std::move((*results)[i++]);
      if (out.size() < in.size()) out.resize(in.size());
      if (!in.extended_by(out)) throw std::logic_error("function goal overwrote a bound slot");
      return out;
    });
  });
}

}  // namespace lpar
