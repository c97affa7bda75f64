#include "eb2jml/translator.hpp"

#include "eb2jml/eventb_parser.hpp"

#include <algorithm>

namespace eb2jml {

using eventb::EbType;
using eventb::ExprKind;
using eventb::Expression;
using eventb::PredKind;
using eventb::Predicate;
using eventb::TypeScope;

TranslationError::TranslationError(SourceSpan span, const std::string& message)
    : std::runtime_error(span.line > 0 ? std::to_string(span.line) + ":" +
                                             std::to_string(span.column) + ": " + message
                                       : message),
      span_(span) {}

std::string guard_method_name(const std::string& event) { return "guard_" + event; }
std::string run_method_name(const std::string& event) { return "run_" + event; }

jml::JmlType jml_type_of(const EbType& t) {
  switch (t.kind()) {
    case EbType::Kind::Integer:
    case EbType::Kind::Carrier:
    case EbType::Kind::Wildcard:
      return jml::JmlType::integer();
    case EbType::Kind::Pair:
      return jml::JmlType::pair(jml_type_of(t.first()), jml_type_of(t.second()));
    case EbType::Kind::Set:
      if (t.element().kind() == EbType::Kind::Pair)
        return jml::JmlType::brelation(jml_type_of(t.element().first()),
                                       jml_type_of(t.element().second()));
      return jml::JmlType::bset(jml_type_of(t.element()));
  }
  return jml::JmlType::integer();
}

namespace {

class ExprTranslator {
 public:
  explicit ExprTranslator(const TypeScope& scope) : scope_(scope) {}

  std::optional<EbType> type(const Expression& e) const { return eventb::type_of(e, scope_); }

  bool scalar(const Expression& e) const {
    auto t = type(e);
    return t && t->is_scalar();
  }

  jml::JmlExprPtr expr(const Expression& e, const std::optional<EbType>& hint = std::nullopt) {
    switch (e.kind) {
      case ExprKind::IntLit:
        return jml::int_lit(e.value);
      case ExprKind::Ident:
        return jml::ident(e.name, e.primed);
      case ExprKind::IntSet:
        return jml::builtin_set("INT");
      case ExprKind::NatSet:
        return jml::builtin_set("NAT");
      case ExprKind::EmptySet:
        return empty_set(hint ? *hint : type(e).value_or(EbType::set_of(EbType::wildcard())));
      case ExprKind::SetEnum:
        return set_enum(e, hint);
      case ExprKind::Union:
        return set_op(e, "union");
      case ExprKind::Inter:
        return set_op(e, "intersection");
      case ExprKind::Diff:
        return set_op(e, "difference");
      case ExprKind::DomSub:
        // S <<| r  ->  r.domainSubtraction(S)
        return jml::call(expr(*e.operands[1]), "domainSubtraction", {expr(*e.operands[0])});
      case ExprKind::DomRes:
        return jml::call(expr(*e.operands[1]), "domainRestriction", {expr(*e.operands[0])});
      case ExprKind::Cross:
        return jml::static_call("Utils.cross", {expr(*e.operands[0]), expr(*e.operands[1])});
      case ExprKind::Maplet: {
        auto t = type(e);
        auto first = t && t->kind() == EbType::Kind::Pair ? jml_type_of(t->first())
                                                          : jml::JmlType::integer();
        auto second = t && t->kind() == EbType::Kind::Pair ? jml_type_of(t->second())
                                                           : jml::JmlType::integer();
        return jml::new_pair(first, second, expr(*e.operands[0]), expr(*e.operands[1]));
      }
      case ExprKind::Add:
        return jml::arith(jml::ExprKind::Add, expr(*e.operands[0]), expr(*e.operands[1]));
      case ExprKind::Sub:
        return jml::arith(jml::ExprKind::Sub, expr(*e.operands[0]), expr(*e.operands[1]));
      case ExprKind::Mul:
        return jml::arith(jml::ExprKind::Mul, expr(*e.operands[0]), expr(*e.operands[1]));
      case ExprKind::Image:
        return jml::call(expr(*e.operands[0]), "image", {expr(*e.operands[1])});
      case ExprKind::Apply:
        return jml::call(expr(*e.operands[0]), "apply", {expr(*e.operands[1])});
      case ExprKind::Dom:
        return jml::call(expr(*e.operands[0]), "domain");
      case ExprKind::Ran:
        return jml::call(expr(*e.operands[0]), "range");
      default:
        throw TranslationError(e.span, "relation-set constructor '" +
                                           eventb::render_expression(e) +
                                           "' is only supported as the right side of ':'");
    }
  }

 private:
  jml::JmlExprPtr empty_set(const EbType& t) {
    EbType elem = t.is_set() ? t.element() : EbType::wildcard();
    if (elem.kind() == EbType::Kind::Pair)
      return jml::new_relation(jml_type_of(elem.first()), jml_type_of(elem.second()), {});
    return jml::new_set(jml_type_of(elem), {});
  }

  jml::JmlExprPtr set_enum(const Expression& e, const std::optional<EbType>& hint) {
    EbType t = type(e).value_or(hint.value_or(EbType::set_of(EbType::wildcard())));
    std::vector<jml::JmlExprPtr> items;
    for (const auto& o : e.operands) items.push_back(expr(*o));
    const EbType& elem = t.element();
    if (elem.kind() == EbType::Kind::Pair)
      return jml::new_relation(jml_type_of(elem.first()), jml_type_of(elem.second()),
                               std::move(items));
    return jml::new_set(jml_type_of(elem), std::move(items));
  }

  jml::JmlExprPtr set_op(const Expression& e, const char* method) {
    const Expression& l = *e.operands[0];
    const Expression& r = *e.operands[1];
    return jml::call(expr(l, type(r)), method, {expr(r, type(l))});
  }

  const TypeScope& scope_;
};

jml::JmlExprPtr method(jml::JmlExprPtr receiver, const char* name, jml::JmlExprPtr arg) {
  return jml::call(std::move(receiver), name, {std::move(arg)});
}

jml::JmlPredPtr relation_membership(ExprTranslator& tr, const Expression& r,
                                    const Expression& set) {
  auto rel = tr.expr(r);
  auto dom = jml::call(rel, "domain");
  auto ran = jml::call(rel, "range");
  auto a = tr.expr(*set.operands[0]);
  auto b = tr.expr(*set.operands[1]);
  auto dom_eq = jml::test(method(dom, "equals", a));
  auto dom_sub = jml::test(method(dom, "isSubset", a));
  auto ran_eq = jml::test(method(ran, "equals", b));
  auto ran_sub = jml::test(method(ran, "isSubset", b));
  auto fn = jml::test(jml::call(rel, "isaFunction"));
  switch (set.kind) {
    case ExprKind::Relation:
      return jml::conj({dom_sub, ran_sub});
    case ExprKind::TotalRelation:
      return jml::conj({dom_eq, ran_sub});
    case ExprKind::SurjectiveRelation:
      return jml::conj({dom_sub, ran_eq});
    case ExprKind::TotalSurjRelation:
      return jml::conj({dom_eq, ran_eq});
    case ExprKind::PartialFunction:
      return jml::conj({fn, dom_sub, ran_sub});
    case ExprKind::TotalFunction:
      return jml::conj({fn, dom_eq, ran_sub});
    case ExprKind::TotalSurjection:
      return jml::conj({fn, dom_eq, ran_eq});
    default:
      break;
  }
  throw TranslationError(set.span, "not a relation-set constructor");
}

jml::JmlPredPtr equality(ExprTranslator& tr, const Expression& l, const Expression& r) {
  if (r.kind == ExprKind::EmptySet) return jml::test(jml::call(tr.expr(l), "isEmpty"));
  if (l.kind == ExprKind::EmptySet) return jml::test(jml::call(tr.expr(r), "isEmpty"));
  if (tr.scalar(l) || tr.scalar(r))
    return jml::compare(jml::CompareOp::Eq, tr.expr(l), tr.expr(r));
  return jml::test(method(tr.expr(l, tr.type(r)), "equals", tr.expr(r, tr.type(l))));
}

jml::JmlPredPtr pred(ExprTranslator& tr, const Predicate& p) {
  switch (p.kind) {
    case PredKind::True:
      return jml::truth(true);
    case PredKind::False:
      return jml::truth(false);
    case PredKind::And:
      return jml::conj({pred(tr, *p.operands[0]), pred(tr, *p.operands[1])});
    case PredKind::Or:
      return jml::disj({pred(tr, *p.operands[0]), pred(tr, *p.operands[1])});
    case PredKind::Not:
      return jml::negate(pred(tr, *p.operands[0]));
    case PredKind::In: {
      const Expression& x = *p.terms[0];
      const Expression& s = *p.terms[1];
      if (eventb::is_relation_set_kind(s.kind)) return relation_membership(tr, x, s);
      return jml::test(method(tr.expr(s), "has", tr.expr(x)));
    }
    case PredKind::Subset: {
      const Expression& a = *p.terms[0];
      const Expression& b = *p.terms[1];
      return jml::test(method(tr.expr(a, tr.type(b)), "isSubset", tr.expr(b, tr.type(a))));
    }
    case PredKind::Eq:
      return equality(tr, *p.terms[0], *p.terms[1]);
    case PredKind::Neq: {
      const Expression& l = *p.terms[0];
      const Expression& r = *p.terms[1];
      if (l.kind != ExprKind::EmptySet && r.kind != ExprKind::EmptySet &&
          (tr.scalar(l) || tr.scalar(r)))
        return jml::compare(jml::CompareOp::Neq, tr.expr(l), tr.expr(r));
      return jml::negate(equality(tr, l, r));
    }
    case PredKind::Lt:
      return jml::compare(jml::CompareOp::Lt, tr.expr(*p.terms[0]), tr.expr(*p.terms[1]));
    case PredKind::Le:
      return jml::compare(jml::CompareOp::Le, tr.expr(*p.terms[0]), tr.expr(*p.terms[1]));
  }
  throw TranslationError(p.span, "unsupported predicate");
}

EbType target_type(const eventb::Action& a, const TypeScope& scope) {
  auto t = scope.lookup(eventb::Ident{a.target, false});
  if (!t) throw TranslationError(a.span, "action target '" + a.target + "' has no type");
  return *t;
}

jml::JmlPredPtr nondeterministic(const eventb::Action& a, const TypeScope& scope, bool pre) {
  EbType t = target_type(a, scope);
  ExprTranslator tr(scope);
  auto body = pred(tr, *a.before_after);
  if (pre) body = jml::old_pred(body);
  return jml::exists(a.target + "'", jml_type_of(t),
                     jml::conj({body, jml::becomes(a.target, a.target + "'", t.is_scalar())}));
}

jml::JmlPredPtr exists_chain(const std::vector<eventb::Parameter>& params, jml::JmlPredPtr body) {
  for (auto it = params.rbegin(); it != params.rend(); ++it)
    body = jml::exists(it->name, jml_type_of(it->type), body);
  return body;
}

}  // namespace

jml::JmlExprPtr translate_expression(const Expression& e, const TypeScope& scope) {
  ExprTranslator tr(scope);
  return tr.expr(e);
}

jml::JmlPredPtr translate_predicate(const Predicate& p, const TypeScope& scope, StateMode mode) {
  ExprTranslator tr(scope);
  auto out = pred(tr, p);
  return mode == StateMode::Pre ? jml::old_pred(out) : out;
}

jml::JmlPredPtr translate_action(const eventb::Action& a, const TypeScope& scope) {
  if (a.kind == eventb::Action::Kind::Nondeterministic) return nondeterministic(a, scope, true);
  EbType t = target_type(a, scope);
  ExprTranslator tr(scope);
  auto rhs = jml::old_expr(tr.expr(*a.rhs, t));
  if (t.is_scalar()) return jml::compare(jml::CompareOp::Eq, jml::ident(a.target), rhs);
  return jml::test(method(jml::ident(a.target), "equals", rhs));
}

jml::JmlPredPtr translate_actions(std::span<const eventb::Action> actions,
                                  const TypeScope& scope) {
  std::vector<jml::JmlPredPtr> parts;
  for (const auto& a : actions) parts.push_back(translate_action(a, scope));
  return jml::conj(std::move(parts));
}

MethodPair translate_event(const eventb::Event& e, const eventb::Machine& m) {
  TypeScope scope(m, e);
  ExprTranslator tr(scope);
  std::vector<jml::JmlPredPtr> guards;
  for (const auto& g : e.guards) guards.push_back(pred(tr, *g.predicate));
  auto g = jml::conj(std::move(guards));

  MethodPair out;
  out.guard.name = guard_method_name(e.name);
  out.guard.kind = jml::JmlMethodSpec::Kind::GuardQuery;
  auto guard_body = !e.params.empty() && g->kind == jml::PredKind::And ? jml::group(g) : g;
  out.guard.normal.assignable = jml::AssignableClause::nothing();
  out.guard.normal.ensures = jml::result_iff(exists_chain(e.params, guard_body));

  out.run.name = run_method_name(e.name);
  out.run.kind = jml::JmlMethodSpec::Kind::Run;
  out.run.normal.requires_clause = jml::guard_call(out.guard.name);
  out.run.normal.assignable = jml::AssignableClause::of(eventb::mod_set(e.actions));
  out.run.normal.ensures =
      exists_chain(e.params, jml::conj({jml::old_pred(g), translate_actions(e.actions, scope)}));
  jml::SpecCase otherwise;
  otherwise.requires_clause = jml::negate(jml::guard_call(out.guard.name));
  otherwise.assignable = jml::AssignableClause::nothing();
  otherwise.ensures = jml::truth(true);
  out.run.exceptional = otherwise;
  return out;
}

jml::JmlPredPtr translate_invariants(const eventb::Machine& m) {
  TypeScope scope(m);
  ExprTranslator tr(scope);
  std::vector<jml::JmlPredPtr> parts;
  for (const auto& inv : m.invariants) parts.push_back(pred(tr, *inv.predicate));
  return jml::conj(std::move(parts));
}

jml::JmlPredPtr translate_initialisation(const eventb::Machine& m) {
  TypeScope scope(m);
  ExprTranslator tr(scope);
  std::vector<jml::JmlPredPtr> parts;
  for (const auto& a : m.initialisation) {
    auto reads = a.kind == eventb::Action::Kind::Deterministic
                     ? eventb::free_identifiers(*a.rhs)
                     : eventb::free_identifiers(*a.before_after);
    for (const auto& id : reads) {
      if (!id.primed && m.find_variable(id.name))
        throw TranslationError(a.span, "initialisation action " + a.label + " reads variable '" +
                                           id.name + "', but initialisation has no pre-state");
    }
    if (a.kind == eventb::Action::Kind::Nondeterministic) {
      parts.push_back(nondeterministic(a, scope, false));
      continue;
    }
    EbType t = target_type(a, scope);
    if (a.rhs->kind == ExprKind::EmptySet) {
      parts.push_back(jml::test(jml::call(jml::ident(a.target), "isEmpty")));
    } else if (t.is_scalar()) {
      parts.push_back(jml::compare(jml::CompareOp::Eq, jml::ident(a.target), tr.expr(*a.rhs, t)));
    } else {
      parts.push_back(jml::test(method(jml::ident(a.target), "equals", tr.expr(*a.rhs, t))));
    }
  }
  return jml::conj(std::move(parts));
}

TranslationUnit translate_machine(const eventb::Machine& m) {
  auto diags = eventb::well_formedness_check(m);
  if (!diags.empty())
    throw TranslationError(diags.front().span, "machine is not well-formed: " + diags.front().message);

  TranslationUnit unit;
  unit.source = m;
  jml::JmlClass& cls = unit.result;
  cls.name = m.name;

  std::vector<std::string> carriers;
  for (const auto& c : m.carrier_sets) carriers.push_back(c.name);
  std::sort(carriers.begin(), carriers.end());
  for (const auto& c : carriers)
    cls.model_fields.push_back({c, jml::JmlType::bset(jml::JmlType::integer()), true});
  std::vector<const eventb::Variable*> vars;
  for (const auto& v : m.variables) vars.push_back(&v);
  std::sort(vars.begin(), vars.end(), [](auto* a, auto* b) { return a->name < b->name; });
  for (const auto* v : vars) cls.model_fields.push_back({v->name, jml_type_of(*v->type), false});

  cls.class_invariant = translate_invariants(m);
  for (std::size_t i = 0; i < m.invariants.size(); ++i)
    unit.trace.push_back({m.invariants[i].label, "invariant[" + std::to_string(i) + "]"});

  cls.initially = translate_initialisation(m);
  for (std::size_t i = 0; i < m.initialisation.size(); ++i)
    unit.trace.push_back({"initialisation." + m.initialisation[i].label,
                          "initially[" + std::to_string(i) + "]"});

  for (const auto& e : m.events) {
    auto pair = translate_event(e, m);
    for (const auto& g : e.guards) {
      unit.trace.push_back({e.name + "." + g.label, pair.guard.name + ".ensures"});
      unit.trace.push_back({e.name + "." + g.label, pair.run.name + ".ensures"});
    }
    for (const auto& a : e.actions)
      unit.trace.push_back({e.name + "." + a.label, pair.run.name + ".ensures"});
    cls.methods.push_back(std::move(pair.guard));
    cls.methods.push_back(std::move(pair.run));
  }
  return unit;
}

}  // namespace eb2jml
