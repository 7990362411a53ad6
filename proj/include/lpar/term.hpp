#pragma once

// Immutable ground-value terms, variable bindings and answer projections.
//
// A Term is a small handle: atoms, integers and variables are stored inline,
// lists and compounds share an immutable node. Because nothing reachable from a
// Term can change after construction, handing the same handle to another
// thread is indistinguishable from handing it a deep copy.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lpar {

/// Process-wide atom table. Interned names are never removed, so the
/// references handed out by name() stay valid for the life of the process.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = ids_.find(name); it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
  }

  const std::string& name(std::uint32_t id) const {
    std::shared_lock lock(mutex_);
    return names_.at(id);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return names_.size();
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  mutable std::shared_mutex mutex_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
};

inline SymbolTable& symbols() {
  static SymbolTable table;
  return table;
}

enum class TermKind : std::uint8_t { atom, integer, var, list, compound };

class Term {
 public:
  static Term atom(std::string_view name) {
    return Term(TermKind::atom, symbols().intern(name), nullptr);
  }
  static Term integer(std::int64_t value) { return Term(TermKind::integer, value, nullptr); }
  static Term var(std::size_t index) {
    return Term(TermKind::var, static_cast<std::int64_t>(index), nullptr);
  }
  static Term list(std::vector<Term> elements) {
    return Term(TermKind::list, 0, make_node(0, std::move(elements)));
  }
  static Term compound(std::string_view functor, std::vector<Term> args) {
    return Term(TermKind::compound, 0, make_node(symbols().intern(functor), std::move(args)));
  }

  TermKind kind() const noexcept { return kind_; }
  bool is_atom() const noexcept { return kind_ == TermKind::atom; }
  bool is_integer() const noexcept { return kind_ == TermKind::integer; }
  bool is_var() const noexcept { return kind_ == TermKind::var; }
  bool is_list() const noexcept { return kind_ == TermKind::list; }
  bool is_compound() const noexcept { return kind_ == TermKind::compound; }

  /// Atom name or compound functor.
  const std::string& name() const {
    if (kind_ == TermKind::atom) return symbols().name(static_cast<std::uint32_t>(value_));
    if (kind_ == TermKind::compound) return symbols().name(node_->functor);
    throw std::logic_error("term has no name");
  }

  bool is_atom(std::string_view name) const {
    return kind_ == TermKind::atom && symbols().name(static_cast<std::uint32_t>(value_)) == name;
  }

  std::int64_t int_value() const {
    if (kind_ != TermKind::integer) throw std::logic_error("term is not an integer");
    return value_;
  }

  std::size_t var_index() const {
    if (kind_ != TermKind::var) throw std::logic_error("term is not a variable");
    return static_cast<std::size_t>(value_);
  }

  /// List elements or compound arguments; empty for leaves.
  std::span<const Term> args() const noexcept {
    if (!node_) return {};
    return node_->args;
  }

  std::size_t arity() const noexcept { return node_ ? node_->args.size() : 0; }

  bool is_ground() const noexcept {
    if (kind_ == TermKind::var) return false;
    return !node_ || node_->ground;
  }

  /// Node count of the tree.
  std::size_t size() const noexcept { return node_ ? node_->size : 1; }

  std::size_t depth() const noexcept { return node_ ? node_->depth : 1; }

  /// True when both handles share the same node; a cheap pre-check for ==.
  bool shares_node_with(const Term& other) const noexcept {
    return node_ && node_ == other.node_;
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case TermKind::atom:
      case TermKind::integer:
      case TermKind::var:
        return a.value_ == b.value_;
      case TermKind::list:
      case TermKind::compound:
        if (a.node_ == b.node_) return true;
        if (a.node_->functor != b.node_->functor || a.node_->size != b.node_->size) return false;
        return std::ranges::equal(a.node_->args, b.node_->args);
    }
    return false;
  }

 private:
  struct Node {
    std::uint32_t functor;
    std::vector<Term> args;
    std::size_t size;
    std::size_t depth;
    bool ground;
  };

  Term(TermKind kind, std::int64_t value, std::shared_ptr<const Node> node)
      : kind_(kind), value_(value), node_(std::move(node)) {}

  static std::shared_ptr<const Node> make_node(std::uint32_t functor, std::vector<Term> args) {
    std::size_t size = 1;
    std::size_t depth = 0;
    bool ground = true;
    for (const auto& a : args) {
      size += a.size();
      depth = std::max(depth, a.depth());
      ground = ground && a.is_ground();
    }
    return std::make_shared<const Node>(Node{functor, std::move(args), size, depth + 1, ground});
  }

  TermKind kind_;
  std::int64_t value_;
  std::shared_ptr<const Node> node_;
};

inline void write_term(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case TermKind::atom:
      os << t.name();
      return;
    case TermKind::integer:
      os << t.int_value();
      return;
    case TermKind::var:
      os << "_G" << t.var_index();
      return;
    case TermKind::list: {
      os << '[';
      bool first = true;
      for (const auto& e : t.args()) {
        if (!first) os << ',';
        first = false;
        write_term(os, e);
      }
      os << ']';
      return;
    }
    case TermKind::compound: {
      os << t.name() << '(';
      bool first = true;
      for (const auto& a : t.args()) {
        if (!first) os << ", ";
        first = false;
        write_term(os, a);
      }
      os << ')';
      return;
    }
  }
}

inline std::ostream& operator<<(std::ostream& os, const Term& t) {
  write_term(os, t);
  return os;
}

inline std::string to_string(const Term& t) {
  std::ostringstream os;
  write_term(os, t);
  return os.str();
}

/// Copy-on-send. Terms are immutable, so sharing the nodes gives the receiver
/// a value that nothing on the sender side can alter.
inline Term snapshot(const Term& t) { return t; }

/// Distinct variable indices in depth-first, left-to-right first-occurrence order.
inline std::vector<std::size_t> term_variables(const Term& t) {
  std::vector<std::size_t> out;
  auto visit = [&out](const auto& self, const Term& node) -> void {
    if (node.is_var()) {
      if (std::ranges::find(out, node.var_index()) == out.end()) out.push_back(node.var_index());
      return;
    }
    if (node.is_ground()) return;
    for (const auto& a : node.args()) self(self, a);
  };
  visit(visit, t);
  return out;
}

/// Largest variable index in t plus one; zero for ground terms.
inline std::size_t var_extent(const Term& t) {
  std::size_t extent = 0;
  for (auto i : term_variables(t)) extent = std::max(extent, i + 1);
  return extent;
}

/// Slot vector of one (partial) solution. Slot i holds the value of variable i.
/// Values are ground; a slot bound once keeps that value for the solution.
class Bindings {
 public:
  Bindings() = default;
  explicit Bindings(std::size_t slots) : slots_(slots) {}

  std::size_t size() const noexcept { return slots_.size(); }
  bool bound(std::size_t slot) const { return slots_.at(slot).has_value(); }
  const std::optional<Term>& operator[](std::size_t slot) const { return slots_.at(slot); }

  const Term& value(std::size_t slot) const {
    const auto& s = slots_.at(slot);
    if (!s) throw std::logic_error("slot " + std::to_string(slot) + " is unbound");
    return *s;
  }

  /// Binds an unbound slot, or checks an already bound one for equality.
  /// Returns false on conflict and leaves the bindings untouched.
  bool bind(std::size_t slot, Term value) {
    if (!value.is_ground()) throw std::invalid_argument("slot values must be ground terms");
    auto& s = slots_.at(slot);
    if (s) return *s == value;
    s = std::move(value);
    return true;
  }

  /// Copy with `slot` bound to `value`, or nullopt on conflict. Checks before copying.
  std::optional<Bindings> extended(std::size_t slot, const Term& value) const {
    const auto& s = slots_.at(slot);
    if (s) {
      if (*s == value) return *this;
      return std::nullopt;
    }
    Bindings out = *this;
    out.bind(slot, value);
    return out;
  }

  /// Every slot bound here is bound to an equal value in `other`.
  bool extended_by(const Bindings& other) const {
    if (other.size() < size()) return false;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i] && (!other.slots_[i] || !(*slots_[i] == *other.slots_[i]))) return false;
    }
    return true;
  }

  void resize(std::size_t slots) { slots_.resize(slots); }

  friend bool operator==(const Bindings&, const Bindings&) = default;

 private:
  std::vector<std::optional<Term>> slots_;
};

inline std::ostream& operator<<(std::ostream& os, const Bindings& b) {
  os << '[';
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) os << ", ";
    os << "_G" << i << '=';
    if (b[i])
      os << *b[i];
    else
      os << '_';
  }
  return os << ']';
}

/// Which parts of a solution get reported: a term over the goal's variable slots.
class AnswerProjection {
 public:
  AnswerProjection(Term pattern) : pattern_(std::move(pattern)), extent_(var_extent(pattern_)) {}  // NOLINT

  const Term& pattern() const noexcept { return pattern_; }
  /// Minimum Bindings length the pattern can be instantiated against.
  std::size_t extent() const noexcept { return extent_; }

 private:
  Term pattern_;
  std::size_t extent_;
};

namespace detail {
inline Term instantiate_node(const Term& t, const Bindings& b) {
  switch (t.kind()) {
    case TermKind::var: {
      const auto& slot = b[t.var_index()];
      return slot ? *slot : t;
    }
    case TermKind::list:
    case TermKind::compound: {
      if (t.is_ground()) return t;
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const auto& a : t.args()) args.push_back(instantiate_node(a, b));
      return t.is_list() ? Term::list(std::move(args)) : Term::compound(t.name(), std::move(args));
    }
    default:
      return t;
  }
}
}  // namespace detail

/// Substitutes bound slots into the pattern; unbound slots stay variables.
inline Term instantiate(const AnswerProjection& projection, const Bindings& bindings) {
  if (projection.extent() > bindings.size()) {
    throw std::out_of_range("projection refers to slot " + std::to_string(projection.extent() - 1) +
                            " but bindings have " + std::to_string(bindings.size()) + " slots");
  }
  return detail::instantiate_node(projection.pattern(), bindings);
}

}  // namespace lpar
