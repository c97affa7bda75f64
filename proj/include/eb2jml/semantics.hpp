#pragma once

// Finite-universe semantics for both languages: values, states, expression
// evaluation, and the transition relations of Event-B events and of the
// translated JML methods.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eb2jml/eventb_model.hpp"
#include "eb2jml/jml_model.hpp"

namespace eb2jml::sem {

class Value {
 public:
  enum class Kind { Int, Elem, Bool, Pair, Set };

  Value() = default;
  static Value integer(std::int64_t v);
  /// Element `index` (0-based) of carrier set `carrier`.
  static Value elem(std::string carrier, std::int64_t index);
  static Value boolean(bool b);
  static Value pair(Value first, Value second);
  /// Sorts and removes duplicates.
  static Value set(std::vector<Value> items);

  Kind kind() const { return kind_; }
  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& carrier() const { return carrier_; }
  std::int64_t index() const { return num_; }
  const Value& first() const;
  const Value& second() const;
  /// Sorted, duplicate-free members of a set.
  const std::vector<Value>& items() const;
  bool contains(const Value& v) const;
  bool is_scalar() const { return kind_ == Kind::Int || kind_ == Kind::Elem; }

  /// `3`, `PERSON1`, `true`, `(a |-> b)`, `{a, b}`.
  std::string to_string() const;

  std::strong_ordering operator<=>(const Value& o) const;
  bool operator==(const Value& o) const { return (*this <=> o) == 0; }

 private:
  Kind kind_ = Kind::Int;
  std::int64_t num_ = 0;
  std::string carrier_;
  std::shared_ptr<const std::vector<Value>> items_;
};

/// Machine-variable valuation.
using State = std::map<std::string, Value>;
/// Parameters, quantified variables and primed identifiers (key `v'`).
using Env = std::map<std::string, Value>;

std::string to_string(const State& s);

/// Evaluation failed, e.g. application of a relation outside its domain.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration would exceed the configured ceiling.
class ResourceLimit : public std::runtime_error {
 public:
  ResourceLimit(const std::string& what, std::uint64_t count, std::uint64_t ceiling);
  std::uint64_t count() const { return count_; }
  std::uint64_t ceiling() const { return ceiling_; }

 private:
  std::uint64_t count_;
  std::uint64_t ceiling_;
};

struct Universe {
  std::int64_t int_lo = 0;
  std::int64_t int_hi = 1;
  std::map<std::string, int> carriers;  // name -> cardinality
  std::optional<std::size_t> max_set_card;
  std::uint64_t ceiling = 1'000'000;

  /// Copy with every carrier of `m` present, missing ones at `default_size`.
  Universe for_machine(const eventb::Machine& m, int default_size = 2) const;

  std::vector<Value> ints() const;
  std::vector<Value> carrier_elements(const std::string& name) const;
  bool is_carrier(const std::string& name) const { return carriers.contains(name); }

  /// Finite interpretation of an Event-B type.
  std::vector<Value> domain(const eventb::EbType& t) const;
  /// Finite interpretation of a JML type. `Integer` is erased: it covers the
  /// integer range and every carrier element.
  std::vector<Value> jml_domain(const jml::JmlType& t) const;

  /// `ints [lo..hi], PERSON=2, ...`
  std::string describe() const;
};

using StateId = std::uint32_t;
using Relation = std::set<std::pair<StateId, StateId>>;

struct StateSpace {
  std::vector<std::pair<std::string, eventb::EbType>> vars;
  std::vector<State> states;
  std::map<State, StateId> index;

  std::optional<StateId> find(const State& s) const;
  std::size_t size() const { return states.size(); }
};

/// Every type-respecting total assignment, in lexicographic order of the
/// variables' value lists. Throws ResourceLimit above `u.ceiling`.
StateSpace enumerate_states(const std::vector<std::pair<std::string, eventb::EbType>>& vars,
                            const Universe& u);
StateSpace enumerate_states(const eventb::Machine& m, const Universe& u);

// ---------------------------------------------------------------------------
// Event-B

Value eval_expr(const eventb::Expression& e, const State& state, const Env& env,
                const Universe& u);
bool eb_pred_holds(const eventb::Predicate& p, const State& state, const Env& env,
                   const Universe& u);

struct EbOptions {
  /// Adds inv(a) & inv(b) to the stuttering disjunct (sensitivity variant).
  bool stutter_requires_invariant = false;
};

/// Counters shared by the relation builders.
struct EvalStats {
  std::uint64_t eval_errors = 0;
  std::uint64_t pairs_examined = 0;

  EvalStats& operator+=(const EvalStats& o) {
    eval_errors += o.eval_errors;
    pairs_examined += o.pairs_examined;
    return *this;
  }
};

/// Event-B view of one event, with its parameter domains precomputed.
class EbEvent {
 public:
  EbEvent(const eventb::Event& e, eventb::PredPtr invariant, const StateSpace& space,
          const Universe& u, EbOptions opts = {});

  /// Successor ids of `a`, sorted.
  std::vector<StateId> successors(StateId a, EvalStats* stats = nullptr) const;
  bool contains(StateId a, StateId b) const;
  /// Why (a, b) is or is not in the relation.
  std::string explain(StateId a, StateId b) const;
  bool invariant_holds(StateId s) const;
  /// Parameter valuations satisfying the guards at `a`.
  std::vector<Env> enabled(StateId a, EvalStats* stats = nullptr) const;

 private:
  std::vector<State> posts(const State& a, const Env& params, EvalStats* stats) const;

  const eventb::Event& event_;
  eventb::PredPtr inv_;
  const StateSpace& space_;
  const Universe& u_;
  EbOptions opts_;
  std::vector<std::vector<Value>> param_domains_;
  std::vector<Env> valuations_;
};

std::vector<Env> valuations(const std::vector<std::string>& names,
                            const std::vector<std::vector<Value>>& domains);

Relation eb_event_rel(const eventb::Event& e, const eventb::Predicate& inv,
                      const StateSpace& space, const Universe& u, EbOptions opts = {},
                      unsigned workers = 1, EvalStats* stats = nullptr);
/// A `begin ... end` substitution: no parameters, guard `true`.
Relation eb_assg_rel(std::span<const eventb::Action> actions, const eventb::Predicate& inv,
                     const StateSpace& space, const Universe& u);
std::set<StateId> eb_init_states(std::span<const eventb::Action> actions,
                                 const eventb::Predicate& inv, const StateSpace& space,
                                 const Universe& u);

// ---------------------------------------------------------------------------
// JML

/// Resolves `guard_e()` calls by the guard method's `\result <==> body`.
using GuardTable = std::map<std::string, jml::JmlPredPtr>;
GuardTable guard_table(const jml::JmlClass& cls);

Value eval_expr(const jml::JmlExpr& e, const State& pre, const State& post, const Env& env,
                const Universe& u);
bool jml_pred_holds(const jml::JmlPredicate& p, const State& pre, const State& post,
                    const Env& env, const Universe& u, const GuardTable* guards = nullptr);
/// Truth of the guard method's body at `s`.
bool jml_guard_holds(const jml::JmlMethodSpec& guard, const State& s, const Universe& u);

/// JML view of one run method.
class JmlMethod {
 public:
  JmlMethod(const jml::JmlMethodSpec& run, jml::JmlPredPtr invariant, GuardTable guards,
            const StateSpace& space, const Universe& u);

  std::vector<StateId> successors(StateId a, EvalStats* stats = nullptr) const;
  bool contains(StateId a, StateId b) const;
  std::string explain(StateId a, StateId b) const;
  bool invariant_holds(StateId s) const;

 private:
  struct CaseResult {
    bool requires_holds = false;
    bool ensures_holds = false;
    std::vector<std::string> frame_violations;
  };
  CaseResult evaluate(const jml::SpecCase& c, const State& a, const State& b,
                      EvalStats* stats) const;
  bool holds(const jml::JmlPredicate& p, const State& a, const State& b,
             EvalStats* stats) const;

  const jml::JmlMethodSpec& run_;
  jml::JmlPredPtr inv_;
  GuardTable guards_;
  const StateSpace& space_;
  const Universe& u_;
  std::vector<bool> inv_cache_;
  std::vector<StateId> inv_states_;
};

Relation jml_method_rel(const jml::JmlMethodSpec& run, const jml::JmlPredicate& inv,
                        const jml::JmlMethodSpec& guard, const StateSpace& space,
                        const Universe& u, unsigned workers = 1, EvalStats* stats = nullptr);
std::set<StateId> jml_initially_states(const jml::JmlPredicate& initially,
                                       const jml::JmlPredicate& inv, const StateSpace& space,
                                       const Universe& u);

}  // namespace eb2jml::sem
