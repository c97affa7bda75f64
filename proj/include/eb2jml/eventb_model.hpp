#pragma once

// Abstract syntax for the supported Event-B machine subset, plus the static
// checks (scoping, typing, priming) that decide whether a machine is
// well-formed.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace eb2jml {

/// Location of a node in the source text. Byte offsets are half-open;
/// line and column are 1-based. A default span (line 0) means "synthesised".
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 0;
  int column = 0;

  bool operator==(const SourceSpan&) const = default;
};

}  // namespace eb2jml

namespace eb2jml::eventb {

/// Identifier occurrence. `primed` marks the after-value v' of a variable.
struct Ident {
  std::string name;
  bool primed = false;

  std::string to_string() const { return primed ? name + "'" : name; }
  auto operator<=>(const Ident&) const = default;
};

/// Types of the subset. Relations are sets of pairs; `relation(a, b)` is
/// shorthand for `set_of(pair(a, b))`. `Wildcard` only arises while checking
/// the empty set and never appears in a declared type.
class EbType {
 public:
  enum class Kind { Integer, Carrier, Set, Pair, Wildcard };

  static EbType integer();
  static EbType carrier(std::string set_name);
  static EbType set_of(EbType element);
  static EbType pair(EbType first, EbType second);
  static EbType relation(EbType domain, EbType range);
  static EbType wildcard();

  Kind kind() const { return kind_; }
  const std::string& carrier_name() const { return carrier_; }
  const EbType& element() const { return args_.at(0); }
  const EbType& first() const { return args_.at(0); }
  const EbType& second() const { return args_.at(1); }

  bool is_scalar() const { return kind_ == Kind::Integer || kind_ == Kind::Carrier; }
  bool is_set() const { return kind_ == Kind::Set; }
  bool is_relation() const { return kind_ == Kind::Set && element().kind_ == Kind::Pair; }
  bool is_concrete() const;

  /// Surface syntax, e.g. `INT`, `POW(PERSON)`, `CONTENTS <-> PERSON`.
  std::string to_string() const;

  bool operator==(const EbType&) const = default;

 private:
  Kind kind_ = Kind::Integer;
  std::string carrier_;
  std::vector<EbType> args_;
};

/// Structural compatibility where Wildcard matches anything.
bool compatible(const EbType& a, const EbType& b);
/// Most specific type compatible with both; requires compatible(a, b).
EbType unify(const EbType& a, const EbType& b);

enum class ExprKind {
  IntLit,
  Ident,
  IntSet,     // INT
  NatSet,     // NAT
  EmptySet,   // {}
  SetEnum,    // {E, ...}
  Union,      // \/
  Inter,      // /\ (intersection)
  Diff,       // \ (difference)
  DomSub,     // <<|
  DomRes,     // <|
  Cross,      // **
  Maplet,     // |->
  Add,
  Sub,
  Mul,
  Image,      // r[S]
  Apply,      // f(x)
  Dom,
  Ran,
  // Sets of relations; only legal as the right operand of membership.
  Relation,            // <->
  TotalRelation,       // <<->
  SurjectiveRelation,  // <->>
  TotalSurjRelation,   // <<->>
  PartialFunction,     // +->
  TotalFunction,       // -->
  TotalSurjection,     // ->>
};

bool is_relation_set_kind(ExprKind kind);

struct Expression;
using ExprPtr = std::shared_ptr<const Expression>;

struct Expression {
  ExprKind kind = ExprKind::IntLit;
  std::int64_t value = 0;  // IntLit
  std::string name;        // Ident
  bool primed = false;     // Ident
  std::vector<ExprPtr> operands;
  SourceSpan span;
};

ExprPtr make_int(std::int64_t value, SourceSpan span = {});
ExprPtr make_ident(std::string name, bool primed = false, SourceSpan span = {});
ExprPtr make_nullary(ExprKind kind, SourceSpan span = {});
ExprPtr make_unary(ExprKind kind, ExprPtr operand, SourceSpan span = {});
ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
ExprPtr make_set(std::vector<ExprPtr> items, SourceSpan span = {});

enum class PredKind { True, False, Eq, Neq, In, Subset, Lt, Le, And, Or, Not };

bool is_comparison(PredKind kind);

struct Predicate;
using PredPtr = std::shared_ptr<const Predicate>;

struct Predicate {
  PredKind kind = PredKind::True;
  std::vector<ExprPtr> terms;      // comparisons: [lhs, rhs]
  std::vector<PredPtr> operands;   // And/Or: [lhs, rhs]; Not: [p]
  SourceSpan span;
};

PredPtr make_truth(bool value, SourceSpan span = {});
PredPtr make_compare(PredKind kind, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
PredPtr make_and(PredPtr lhs, PredPtr rhs, SourceSpan span = {});
PredPtr make_or(PredPtr lhs, PredPtr rhs, SourceSpan span = {});
PredPtr make_not(PredPtr operand, SourceSpan span = {});
/// Left-nested conjunction; `true` for an empty list.
PredPtr conjoin(std::span<const PredPtr> preds);

/// Splits nested conjunctions into their leaves, left to right.
std::vector<PredPtr> conjuncts(const PredPtr& pred);

// Structural equality; spans are ignored.
bool operator==(const Expression& a, const Expression& b);
bool operator==(const Predicate& a, const Predicate& b);
bool same(const ExprPtr& a, const ExprPtr& b);
bool same(const PredPtr& a, const PredPtr& b);

struct LabeledPredicate {
  std::string label;
  PredPtr predicate;
  SourceSpan span;

  bool operator==(const LabeledPredicate& o) const {
    return label == o.label && same(predicate, o.predicate);
  }
};

/// `label: target := rhs` or `label: target :| before_after`.
struct Action {
  enum class Kind { Deterministic, Nondeterministic };

  std::string label;
  std::string target;
  Kind kind = Kind::Deterministic;
  ExprPtr rhs;            // Deterministic
  PredPtr before_after;   // Nondeterministic
  SourceSpan span;

  bool operator==(const Action& o) const {
    return label == o.label && target == o.target && kind == o.kind && same(rhs, o.rhs) &&
           same(before_after, o.before_after);
  }
};

struct Parameter {
  std::string name;
  EbType type;
  SourceSpan span;

  bool operator==(const Parameter& o) const { return name == o.name && type == o.type; }
};

struct Event {
  std::string name;
  std::vector<Parameter> params;
  std::vector<LabeledPredicate> guards;
  std::vector<Action> actions;
  SourceSpan span;

  bool operator==(const Event& o) const {
    return name == o.name && params == o.params && guards == o.guards && actions == o.actions;
  }
};

struct Variable {
  std::string name;
  std::optional<EbType> type;  // inferred from the invariants
  SourceSpan span;

  bool operator==(const Variable& o) const { return name == o.name && type == o.type; }
};

struct CarrierSet {
  std::string name;
  SourceSpan span;

  bool operator==(const CarrierSet& o) const { return name == o.name; }
};

struct Machine {
  std::string name;
  std::optional<std::string> seen_context;
  std::vector<CarrierSet> carrier_sets;
  std::vector<Variable> variables;
  std::vector<LabeledPredicate> invariants;
  std::vector<Action> initialisation;
  std::vector<Event> events;
  SourceSpan span;

  const Variable* find_variable(const std::string& name) const;
  const Event* find_event(const std::string& name) const;
  bool is_carrier(const std::string& name) const;
  /// Conjunction of all invariants in label order.
  PredPtr invariant() const;

  bool operator==(const Machine& o) const;
};

// ---------------------------------------------------------------------------
// Typing

/// Name-to-type environment for one checking context.
class TypeScope {
 public:
  TypeScope() = default;
  /// Carrier sets and typed variables of `machine`.
  explicit TypeScope(const Machine& machine);
  /// Machine scope extended with the parameters of `event`.
  TypeScope(const Machine& machine, const Event& event);

  void declare(const std::string& name, EbType type);
  void declare_carrier(const std::string& name);
  /// Primed lookups resolve to the unprimed variable's type when it is a
  /// machine variable.
  std::optional<EbType> lookup(const Ident& id) const;
  bool is_carrier(const std::string& name) const { return carriers_.contains(name); }

 private:
  std::map<std::string, EbType> names_;
  std::set<std::string> carriers_;
  std::set<std::string> variables_;
};

/// Type of `expr`, or nullopt if it is ill-typed in `scope`.
std::optional<EbType> type_of(const Expression& expr, const TypeScope& scope);

/// Fills in each untyped variable from the first invariant conjunct of the
/// form `v : S`, `v <: S` or `v = E` whose right side is typeable.
void infer_variable_types(Machine& machine);

// ---------------------------------------------------------------------------
// Static checks

struct Diagnostic {
  enum class Kind { Scoping, Duplicate, Typing, Priming, Initialisation, NameClash, Unsupported };

  Kind kind;
  SourceSpan span;
  std::string message;

  std::string to_string() const;
  bool operator==(const Diagnostic&) const = default;
};

/// Every well-formedness violation, ordered by source position.
std::vector<Diagnostic> well_formedness_check(const Machine& machine);

/// Variables assigned by `actions`, without duplicates, in first-assignment
/// order (the order the JML assignable clause lists them).
std::vector<std::string> mod_set(std::span<const Action> actions);

std::set<Ident> free_identifiers(const Expression& expr);
std::set<Ident> free_identifiers(const Predicate& pred);

}  // namespace eb2jml::eventb
