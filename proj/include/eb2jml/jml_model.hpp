#pragma once

// Abstract syntax of the generated JML specifications and the printer for
// the abstract Java class that carries them.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eb2jml::jml {

class JmlType {
 public:
  enum class Kind { Integer, BSet, BRelation, Pair };

  static JmlType integer();
  static JmlType bset(JmlType element);
  static JmlType brelation(JmlType domain, JmlType range);
  static JmlType pair(JmlType first, JmlType second);

  Kind kind() const { return kind_; }
  const std::vector<JmlType>& args() const { return args_; }
  bool is_primitive() const { return kind_ == Kind::Integer; }

  /// Java spelling: `Integer`, `BSet<Integer>`, `BRelation<Integer,Integer>`,
  /// `JMLEqualsEqualsPair<Integer,Integer>`.
  std::string to_string() const;

  bool operator==(const JmlType&) const = default;

 private:
  Kind kind_ = Kind::Integer;
  std::vector<JmlType> args_;
};

enum class ExprKind {
  IntLit,
  Ident,        // model field, bound variable or primed bound variable
  BuiltinSet,   // Utils.INT / Utils.NAT
  Old,          // \old(e)
  NewSet,       // new BSet<T>(items...)
  NewRelation,  // new BRelation<A,B>(pairs...)
  NewPair,      // new JMLEqualsEqualsPair<A,B>(l,r)
  Call,         // receiver.method(args...)
  StaticCall,   // Utils.cross(a, b)
  Add,
  Sub,
  Mul,
};

struct JmlExpr;
using JmlExprPtr = std::shared_ptr<const JmlExpr>;

struct JmlExpr {
  ExprKind kind = ExprKind::IntLit;
  std::int64_t value = 0;
  std::string name;     // Ident name, method name, static function or builtin set
  bool primed = false;
  JmlType type;         // New* constructors
  std::vector<JmlExprPtr> operands;  // Call: receiver first
};

JmlExprPtr int_lit(std::int64_t value);
JmlExprPtr ident(std::string name, bool primed = false);
JmlExprPtr builtin_set(std::string name);
JmlExprPtr old_expr(JmlExprPtr inner);
JmlExprPtr new_set(JmlType element, std::vector<JmlExprPtr> items);
JmlExprPtr new_relation(JmlType domain, JmlType range, std::vector<JmlExprPtr> pairs);
JmlExprPtr new_pair(JmlType first, JmlType second, JmlExprPtr lhs, JmlExprPtr rhs);
JmlExprPtr call(JmlExprPtr receiver, std::string method, std::vector<JmlExprPtr> args = {});
JmlExprPtr static_call(std::string function, std::vector<JmlExprPtr> args);
JmlExprPtr arith(ExprKind op, JmlExprPtr lhs, JmlExprPtr rhs);

enum class PredKind {
  True,
  False,
  And,        // n-ary
  Or,         // n-ary
  Not,
  Old,        // \old(p)
  Exists,     // (\exists T x; p)
  Becomes,    // v == v'  /  v.equals(v')
  Group,      // (p): explicit parentheses, no semantic effect
  GuardCall,  // guard_evt()
  ResultIff,  // \result <==> p
  Compare,    // primitive ==, !=, <, <=
  Test,       // boolean-valued method call such as s.has(x)
};

enum class CompareOp { Eq, Neq, Lt, Le };

struct JmlPredicate;
using JmlPredPtr = std::shared_ptr<const JmlPredicate>;

struct JmlPredicate {
  PredKind kind = PredKind::True;
  CompareOp op = CompareOp::Eq;
  std::string name;         // Exists: bound variable; Becomes: v; GuardCall: method
  std::string after_name;   // Becomes: v'
  bool primitive = false;   // Becomes: render with ==
  JmlType bound_type;       // Exists
  std::vector<JmlPredPtr> operands;
  std::vector<JmlExprPtr> terms;
};

JmlPredPtr truth(bool value);
/// Flattens nested conjunctions; an empty list yields `true`.
JmlPredPtr conj(std::vector<JmlPredPtr> preds);
JmlPredPtr disj(std::vector<JmlPredPtr> preds);
JmlPredPtr negate(JmlPredPtr p);
JmlPredPtr old_pred(JmlPredPtr p);
JmlPredPtr exists(std::string bound, JmlType type, JmlPredPtr body);
JmlPredPtr becomes(std::string var, std::string after, bool primitive);
JmlPredPtr group(JmlPredPtr p);
JmlPredPtr guard_call(std::string method);
JmlPredPtr result_iff(JmlPredPtr body);
JmlPredPtr compare(CompareOp op, JmlExprPtr lhs, JmlExprPtr rhs);
JmlPredPtr test(JmlExprPtr boolean_call);

bool contains_old(const JmlPredicate& p);

struct AssignableClause {
  enum class Kind { Nothing, Everything, Vars };

  Kind kind = Kind::Nothing;
  std::vector<std::string> vars;  // Vars: non-empty, in assignment order

  static AssignableClause nothing() { return {}; }
  static AssignableClause everything() { return {Kind::Everything, {}}; }
  static AssignableClause of(std::vector<std::string> vars);

  bool permits(const std::string& var) const;
  bool operator==(const AssignableClause&) const = default;
};

struct SpecCase {
  JmlPredPtr requires_clause;
  AssignableClause assignable;
  JmlPredPtr ensures;
};

struct JmlMethodSpec {
  enum class Kind { GuardQuery, Run };

  std::string name;
  Kind kind = Kind::Run;
  SpecCase normal;
  std::optional<SpecCase> exceptional;  // Run only
};

struct ModelField {
  std::string name;
  JmlType type;
  bool carrier = false;  // fixed universe from a carrier set
};

struct JmlClass {
  std::string name;
  std::vector<ModelField> model_fields;
  JmlPredPtr class_invariant;
  JmlPredPtr initially;
  std::vector<JmlMethodSpec> methods;

  const JmlMethodSpec* find_method(std::string_view name) const;
};

std::string render_expr(const JmlExpr& e);
std::string render_predicate(const JmlPredicate& p);

/// Java source for the abstract class: import header, model fields,
/// invariant, initially, then one guard/run method pair per event.
/// LF line endings; equal classes give byte-identical output.
std::string render_class(const JmlClass& cls);

/// Token stream of `text` joined by single spaces, with comment markers
/// removed and doubly-parenthesised groups collapsed. Used to compare
/// generated text against hand-formatted reference output.
std::string normalize_jml(std::string_view text);

}  // namespace eb2jml::jml
