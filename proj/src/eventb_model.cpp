#include "eb2jml/eventb_model.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace eb2jml::eventb {

// ---------------------------------------------------------------------------
// EbType

EbType EbType::integer() { return EbType{}; }

EbType EbType::carrier(std::string set_name) {
  EbType t;
  t.kind_ = Kind::Carrier;
  t.carrier_ = std::move(set_name);
  return t;
}

EbType EbType::set_of(EbType element) {
  EbType t;
  t.kind_ = Kind::Set;
  t.args_.push_back(std::move(element));
  return t;
}

EbType EbType::pair(EbType first, EbType second) {
  EbType t;
  t.kind_ = Kind::Pair;
  t.args_.push_back(std::move(first));
  t.args_.push_back(std::move(second));
  return t;
}

EbType EbType::relation(EbType domain, EbType range) {
  return set_of(pair(std::move(domain), std::move(range)));
}

EbType EbType::wildcard() {
  EbType t;
  t.kind_ = Kind::Wildcard;
  return t;
}

bool EbType::is_concrete() const {
  if (kind_ == Kind::Wildcard) return false;
  return std::ranges::all_of(args_, [](const EbType& a) { return a.is_concrete(); });
}

std::string EbType::to_string() const {
  switch (kind_) {
    case Kind::Integer:
      return "INT";
    case Kind::Carrier:
      return carrier_;
    case Kind::Wildcard:
      return "?";
    case Kind::Pair:
      return first().to_string() + " ** " + second().to_string();
    case Kind::Set:
      if (element().kind_ == Kind::Pair)
        return element().first().to_string() + " <-> " + element().second().to_string();
      return "POW(" + element().to_string() + ")";
  }
  return "?";
}

bool compatible(const EbType& a, const EbType& b) {
  using K = EbType::Kind;
  if (a.kind() == K::Wildcard || b.kind() == K::Wildcard) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case K::Integer:
      return true;
    case K::Carrier:
      return a.carrier_name() == b.carrier_name();
    case K::Set:
      return compatible(a.element(), b.element());
    case K::Pair:
      return compatible(a.first(), b.first()) && compatible(a.second(), b.second());
    case K::Wildcard:
      return true;
  }
  return false;
}

EbType unify(const EbType& a, const EbType& b) {
  using K = EbType::Kind;
  if (a.kind() == K::Wildcard) return b;
  if (b.kind() == K::Wildcard) return a;
  switch (a.kind()) {
    case K::Set:
      return EbType::set_of(unify(a.element(), b.element()));
    case K::Pair:
      return EbType::pair(unify(a.first(), b.first()), unify(a.second(), b.second()));
    default:
      return a;
  }
}

bool is_relation_set_kind(ExprKind kind) {
  switch (kind) {
    case ExprKind::Relation:
    case ExprKind::TotalRelation:
    case ExprKind::SurjectiveRelation:
    case ExprKind::TotalSurjRelation:
    case ExprKind::PartialFunction:
    case ExprKind::TotalFunction:
    case ExprKind::TotalSurjection:
      return true;
    default:
      return false;
  }
}

bool is_comparison(PredKind kind) {
  switch (kind) {
    case PredKind::Eq:
    case PredKind::Neq:
    case PredKind::In:
    case PredKind::Subset:
    case PredKind::Lt:
    case PredKind::Le:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Construction

ExprPtr make_int(std::int64_t value, SourceSpan span) {
  auto e = std::make_shared<Expression>();
  e->kind = ExprKind::IntLit;
  e->value = value;
  e->span = span;
  return e;
}

ExprPtr make_ident(std::string name, bool primed, SourceSpan span) {
  auto e = std::make_shared<Expression>();
  e->kind = ExprKind::Ident;
  e->name = std::move(name);
  e->primed = primed;
  e->span = span;
  return e;
}

ExprPtr make_nullary(ExprKind kind, SourceSpan span) {
  auto e = std::make_shared<Expression>();
  e->kind = kind;
  e->span = span;
  return e;
}

ExprPtr make_unary(ExprKind kind, ExprPtr operand, SourceSpan span) {
  auto e = std::make_shared<Expression>();
  e->kind = kind;
  e->operands.push_back(std::move(operand));
  e->span = span;
  return e;
}

ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  auto e = std::make_shared<Expression>();
  e->kind = kind;
  e->operands.push_back(std::move(lhs));
  e->operands.push_back(std::move(rhs));
  e->span = span;
  return e;
}

ExprPtr make_set(std::vector<ExprPtr> items, SourceSpan span) {
  auto e = std::make_shared<Expression>();
  e->kind = items.empty() ? ExprKind::EmptySet : ExprKind::SetEnum;
  e->operands = std::move(items);
  e->span = span;
  return e;
}

PredPtr make_truth(bool value, SourceSpan span) {
  auto p = std::make_shared<Predicate>();
  p->kind = value ? PredKind::True : PredKind::False;
  p->span = span;
  return p;
}

PredPtr make_compare(PredKind kind, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  auto p = std::make_shared<Predicate>();
  p->kind = kind;
  p->terms.push_back(std::move(lhs));
  p->terms.push_back(std::move(rhs));
  p->span = span;
  return p;
}

namespace {

PredPtr make_connective(PredKind kind, std::vector<PredPtr> operands, SourceSpan span) {
  auto p = std::make_shared<Predicate>();
  p->kind = kind;
  p->operands = std::move(operands);
  p->span = span;
  return p;
}

}  // namespace

PredPtr make_and(PredPtr lhs, PredPtr rhs, SourceSpan span) {
  return make_connective(PredKind::And, {std::move(lhs), std::move(rhs)}, span);
}

PredPtr make_or(PredPtr lhs, PredPtr rhs, SourceSpan span) {
  return make_connective(PredKind::Or, {std::move(lhs), std::move(rhs)}, span);
}

PredPtr make_not(PredPtr operand, SourceSpan span) {
  return make_connective(PredKind::Not, {std::move(operand)}, span);
}

PredPtr conjoin(std::span<const PredPtr> preds) {
  if (preds.empty()) return make_truth(true);
  PredPtr acc = preds.front();
  for (const auto& p : preds.subspan(1)) acc = make_and(acc, p);
  return acc;
}

std::vector<PredPtr> conjuncts(const PredPtr& pred) {
  std::vector<PredPtr> out;
  std::function<void(const PredPtr&)> walk = [&](const PredPtr& p) {
    if (p->kind == PredKind::And) {
      walk(p->operands[0]);
      walk(p->operands[1]);
    } else {
      out.push_back(p);
    }
  };
  walk(pred);
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool same(const PredPtr& a, const PredPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.kind != b.kind || a.value != b.value || a.name != b.name || a.primed != b.primed ||
      a.operands.size() != b.operands.size())
    return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!same(a.operands[i], b.operands[i])) return false;
  return true;
}

bool operator==(const Predicate& a, const Predicate& b) {
  if (a.kind != b.kind || a.terms.size() != b.terms.size() ||
      a.operands.size() != b.operands.size())
    return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (!same(a.terms[i], b.terms[i])) return false;
  for (std::size_t i = 0; i < a.operands.size(); ++i)
    if (!same(a.operands[i], b.operands[i])) return false;
  return true;
}

bool Machine::operator==(const Machine& o) const {
  return name == o.name && seen_context == o.seen_context && carrier_sets == o.carrier_sets &&
         variables == o.variables && invariants == o.invariants &&
         initialisation == o.initialisation && events == o.events;
}

const Variable* Machine::find_variable(const std::string& n) const {
  auto it = std::ranges::find(variables, n, &Variable::name);
  return it == variables.end() ? nullptr : &*it;
}

const Event* Machine::find_event(const std::string& n) const {
  auto it = std::ranges::find(events, n, &Event::name);
  return it == events.end() ? nullptr : &*it;
}

bool Machine::is_carrier(const std::string& n) const {
  return std::ranges::find(carrier_sets, n, &CarrierSet::name) != carrier_sets.end();
}

PredPtr Machine::invariant() const {
  std::vector<PredPtr> preds;
  for (const auto& inv : invariants) preds.push_back(inv.predicate);
  return conjoin(preds);
}

// ---------------------------------------------------------------------------
// Typing

TypeScope::TypeScope(const Machine& machine) {
  for (const auto& s : machine.carrier_sets) declare_carrier(s.name);
  for (const auto& v : machine.variables) {
    if (v.type) declare(v.name, *v.type);
    variables_.insert(v.name);
  }
}

TypeScope::TypeScope(const Machine& machine, const Event& event) : TypeScope(machine) {
  for (const auto& p : event.params) declare(p.name, p.type);
}

void TypeScope::declare(const std::string& name, EbType type) {
  names_.insert_or_assign(name, std::move(type));
}

void TypeScope::declare_carrier(const std::string& name) {
  carriers_.insert(name);
  names_.insert_or_assign(name, EbType::set_of(EbType::carrier(name)));
}

std::optional<EbType> TypeScope::lookup(const Ident& id) const {
  if (id.primed && !variables_.contains(id.name)) return std::nullopt;
  auto it = names_.find(id.name);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct RelationParts {
  EbType domain;
  EbType range;
};

std::optional<RelationParts> as_relation(const EbType& t) {
  if (!t.is_set()) return std::nullopt;
  const EbType& e = t.element();
  if (e.kind() == EbType::Kind::Pair) return RelationParts{e.first(), e.second()};
  if (e.kind() == EbType::Kind::Wildcard)
    return RelationParts{EbType::wildcard(), EbType::wildcard()};
  return std::nullopt;
}

std::string kind_name(ExprKind kind) {
  switch (kind) {
    case ExprKind::Union: return "union";
    case ExprKind::Inter: return "intersection";
    case ExprKind::Diff: return "difference";
    case ExprKind::DomSub: return "domain subtraction";
    case ExprKind::DomRes: return "domain restriction";
    case ExprKind::Cross: return "cartesian product";
    case ExprKind::Maplet: return "maplet";
    case ExprKind::Add: return "addition";
    case ExprKind::Sub: return "subtraction";
    case ExprKind::Mul: return "multiplication";
    case ExprKind::Image: return "relational image";
    case ExprKind::Apply: return "function application";
    case ExprKind::Dom: return "dom";
    case ExprKind::Ran: return "ran";
    default: return "relation constructor";
  }
}

// Where primed identifiers may occur while checking a given node.
struct PrimePolicy {
  bool allow_any_variable = false;     // free_identifiers-style scans
  std::optional<std::string> own;      // the one prime a before-after predicate may use
  std::string context;                 // used in messages
};

class Checker {
 public:
  Checker(const TypeScope& scope, std::vector<Diagnostic>* sink, PrimePolicy policy = {})
      : scope_(scope), sink_(sink), policy_(std::move(policy)) {}

  std::optional<EbType> expr(const Expression& e, bool membership_rhs = false) {
    using K = ExprKind;
    auto sub = [&](std::size_t i) { return expr(*e.operands[i]); };
    switch (e.kind) {
      case K::IntLit:
        return EbType::integer();
      case K::Ident:
        return ident(e);
      case K::IntSet:
      case K::NatSet:
        return EbType::set_of(EbType::integer());
      case K::EmptySet:
        return EbType::set_of(EbType::wildcard());
      case K::SetEnum: {
        std::optional<EbType> elem = EbType::wildcard();
        for (const auto& item : e.operands) {
          auto t = expr(*item);
          if (!t) return std::nullopt;
          if (!compatible(*elem, *t)) {
            report(Diagnostic::Kind::Typing, item->span,
                   "set enumeration mixes " + elem->to_string() + " and " + t->to_string());
            return std::nullopt;
          }
          elem = unify(*elem, *t);
        }
        return EbType::set_of(*elem);
      }
      case K::Union:
      case K::Inter:
      case K::Diff: {
        auto l = sub(0), r = sub(1);
        if (!l || !r) return std::nullopt;
        if (!l->is_set() || !r->is_set() || !compatible(*l, *r)) {
          mismatch(e, *l, *r);
          return std::nullopt;
        }
        return unify(*l, *r);
      }
      case K::DomSub:
      case K::DomRes: {
        auto s = sub(0), r = sub(1);
        if (!s || !r) return std::nullopt;
        auto rel = as_relation(*r);
        if (!s->is_set() || !rel || !compatible(s->element(), rel->domain)) {
          mismatch(e, *s, *r);
          return std::nullopt;
        }
        return EbType::relation(unify(s->element(), rel->domain), rel->range);
      }
      case K::Cross: {
        auto a = sub(0), b = sub(1);
        if (!a || !b) return std::nullopt;
        if (!a->is_set() || !b->is_set()) {
          mismatch(e, *a, *b);
          return std::nullopt;
        }
        if (!scalar_or_wild(a->element()) || !scalar_or_wild(b->element())) {
          report(Diagnostic::Kind::Unsupported, e.span, "relations of relations are not supported");
          return std::nullopt;
        }
        return EbType::relation(a->element(), b->element());
      }
      case K::Maplet: {
        auto a = sub(0), b = sub(1);
        if (!a || !b) return std::nullopt;
        if (!scalar_or_wild(*a) || !scalar_or_wild(*b)) {
          report(Diagnostic::Kind::Unsupported, e.span, "maplet components must be scalars");
          return std::nullopt;
        }
        return EbType::pair(*a, *b);
      }
      case K::Add:
      case K::Sub:
      case K::Mul: {
        auto a = sub(0), b = sub(1);
        if (!a || !b) return std::nullopt;
        if (!compatible(*a, EbType::integer()) || !compatible(*b, EbType::integer())) {
          mismatch(e, *a, *b);
          return std::nullopt;
        }
        return EbType::integer();
      }
      case K::Image: {
        auto r = sub(0), s = sub(1);
        if (!r || !s) return std::nullopt;
        auto rel = as_relation(*r);
        if (!rel || !s->is_set() || !compatible(rel->domain, s->element())) {
          mismatch(e, *r, *s);
          return std::nullopt;
        }
        return EbType::set_of(rel->range);
      }
      case K::Apply: {
        auto f = sub(0), x = sub(1);
        if (!f || !x) return std::nullopt;
        auto rel = as_relation(*f);
        if (!rel || !compatible(rel->domain, *x)) {
          mismatch(e, *f, *x);
          return std::nullopt;
        }
        return rel->range;
      }
      case K::Dom:
      case K::Ran: {
        auto r = sub(0);
        if (!r) return std::nullopt;
        auto rel = as_relation(*r);
        if (!rel) {
          report(Diagnostic::Kind::Typing, e.span,
                 kind_name(e.kind) + " expects a relation, found " + r->to_string());
          return std::nullopt;
        }
        return EbType::set_of(e.kind == K::Dom ? rel->domain : rel->range);
      }
      default: {
        if (!membership_rhs) {
          report(Diagnostic::Kind::Unsupported, e.span,
                 "relation constructors may only appear on the right of ':'");
          return std::nullopt;
        }
        auto a = sub(0), b = sub(1);
        if (!a || !b) return std::nullopt;
        if (!a->is_set() || !b->is_set()) {
          mismatch(e, *a, *b);
          return std::nullopt;
        }
        if (!scalar_or_wild(a->element()) || !scalar_or_wild(b->element())) {
          report(Diagnostic::Kind::Unsupported, e.span, "relations of relations are not supported");
          return std::nullopt;
        }
        return EbType::set_of(EbType::relation(a->element(), b->element()));
      }
    }
  }

  bool pred(const Predicate& p) {
    using K = PredKind;
    switch (p.kind) {
      case K::True:
      case K::False:
        return true;
      case K::And:
      case K::Or: {
        bool l = pred(*p.operands[0]);
        bool r = pred(*p.operands[1]);
        return l && r;
      }
      case K::Not:
        return pred(*p.operands[0]);
      case K::In: {
        auto x = expr(*p.terms[0]);
        auto s = expr(*p.terms[1], /*membership_rhs=*/true);
        if (!x || !s) return false;
        if (!s->is_set() || !compatible(*x, s->element())) {
          report(Diagnostic::Kind::Typing, p.span,
                 "membership of " + x->to_string() + " in " + s->to_string());
          return false;
        }
        return true;
      }
      case K::Subset:
      case K::Eq:
      case K::Neq: {
        auto a = expr(*p.terms[0]);
        auto b = expr(*p.terms[1]);
        if (!a || !b) return false;
        if (!compatible(*a, *b) || (p.kind == K::Subset && !a->is_set())) {
          report(Diagnostic::Kind::Typing, p.span,
                 "cannot compare " + a->to_string() + " with " + b->to_string());
          return false;
        }
        return true;
      }
      case K::Lt:
      case K::Le: {
        auto a = expr(*p.terms[0]);
        auto b = expr(*p.terms[1]);
        if (!a || !b) return false;
        if (!compatible(*a, EbType::integer()) || !compatible(*b, EbType::integer())) {
          report(Diagnostic::Kind::Typing, p.span, "integer comparison of non-integers");
          return false;
        }
        return true;
      }
    }
    return false;
  }

 private:
  std::optional<EbType> ident(const Expression& e) {
    Ident id{e.name, e.primed};
    if (e.primed && !policy_.allow_any_variable) {
      if (!policy_.own) {
        report(Diagnostic::Kind::Priming, e.span,
               "primed identifier " + id.to_string() + " not allowed in " + policy_.context);
        return std::nullopt;
      }
      if (*policy_.own != e.name) {
        report(Diagnostic::Kind::Priming, e.span,
               "before-after predicate of " + *policy_.own + " may not mention " + id.to_string());
        return std::nullopt;
      }
    }
    auto t = scope_.lookup(id);
    if (!t) {
      if (e.primed)
        report(Diagnostic::Kind::Priming, e.span,
               "only machine variables can be primed: " + id.to_string());
      else
        report(Diagnostic::Kind::Scoping, e.span, "undeclared identifier '" + e.name + "'");
    }
    return t;
  }

  static bool scalar_or_wild(const EbType& t) {
    return t.is_scalar() || t.kind() == EbType::Kind::Wildcard;
  }

  void mismatch(const Expression& e, const EbType& a, const EbType& b) {
    report(Diagnostic::Kind::Typing, e.span,
           kind_name(e.kind) + " applied to " + a.to_string() + " and " + b.to_string());
  }

  void report(Diagnostic::Kind kind, SourceSpan span, std::string message) {
    if (sink_) sink_->push_back({kind, span, std::move(message)});
  }

  const TypeScope& scope_;
  std::vector<Diagnostic>* sink_;
  PrimePolicy policy_;
};

}  // namespace

std::optional<EbType> type_of(const Expression& expr, const TypeScope& scope) {
  Checker checker(scope, nullptr, PrimePolicy{.allow_any_variable = true});
  return checker.expr(expr, /*membership_rhs=*/true);
}

void infer_variable_types(Machine& machine) {
  bool progress = true;
  while (progress) {
    progress = false;
    TypeScope scope(machine);
    for (const auto& inv : machine.invariants) {
      for (const auto& c : conjuncts(inv.predicate)) {
        if (c->kind != PredKind::In && c->kind != PredKind::Subset && c->kind != PredKind::Eq)
          continue;
        const Expression& lhs = *c->terms[0];
        if (lhs.kind != ExprKind::Ident || lhs.primed) continue;
        auto it = std::ranges::find(machine.variables, lhs.name, &Variable::name);
        if (it == machine.variables.end() || it->type) continue;
        auto rhs = type_of(*c->terms[1], scope);
        if (!rhs) continue;
        std::optional<EbType> candidate;
        if (c->kind == PredKind::In) {
          if (rhs->is_set()) candidate = rhs->element();
        } else {
          candidate = rhs;
        }
        if (candidate && candidate->is_concrete()) {
          it->type = *candidate;
          scope.declare(it->name, *candidate);
          progress = true;
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Well-formedness

std::string Diagnostic::to_string() const {
  std::string out;
  if (span.line > 0) out = std::to_string(span.line) + ":" + std::to_string(span.column) + ": ";
  return out + message;
}

namespace {

template <typename T, typename Key>
void report_duplicates(const std::vector<T>& items, Key key, const std::string& what,
                       std::vector<Diagnostic>& out) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    const std::string& k = std::invoke(key, item);
    if (!seen.insert(k).second)
      out.push_back({Diagnostic::Kind::Duplicate, item.span, "duplicate " + what + " '" + k + "'"});
  }
}

void check_action(const Machine& machine, const TypeScope& scope, const Action& action,
                  bool initialisation, std::vector<Diagnostic>& out) {
  const Variable* var = machine.find_variable(action.target);
  if (!var) {
    if (scope.lookup(Ident{action.target}))
      out.push_back({Diagnostic::Kind::Scoping, action.span,
                     "action target '" + action.target + "' is not a machine variable"});
    else
      out.push_back({Diagnostic::Kind::Scoping, action.span,
                     "undeclared identifier '" + action.target + "'"});
    return;
  }

  std::string ctx = initialisation ? "the initialisation" : "an action";
  if (action.kind == Action::Kind::Deterministic) {
    Checker checker(scope, &out, PrimePolicy{.context = "the right-hand side of :="});
    auto t = checker.expr(*action.rhs);
    if (t && var->type && !compatible(*t, *var->type))
      out.push_back({Diagnostic::Kind::Typing, action.span,
                     "cannot assign " + t->to_string() + " to " + action.target + " of type " +
                         var->type->to_string()});
    if (initialisation) {
      for (const auto& id : free_identifiers(*action.rhs))
        if (machine.find_variable(id.name))
          out.push_back({Diagnostic::Kind::Initialisation, action.span,
                         "initialisation may not read variable '" + id.name + "'"});
    }
  } else {
    Checker checker(scope, &out, PrimePolicy{.own = action.target, .context = ctx});
    checker.pred(*action.before_after);
    if (initialisation) {
      for (const auto& id : free_identifiers(*action.before_after))
        if (!id.primed && machine.find_variable(id.name))
          out.push_back({Diagnostic::Kind::Initialisation, action.span,
                         "initialisation may not read variable '" + id.name + "'"});
    }
  }
}

void check_pair_components(const EbType& t, const SourceSpan& span, const std::string& who,
                           std::vector<Diagnostic>& out) {
  if (t.kind() == EbType::Kind::Pair) {
    if (!t.first().is_scalar() || !t.second().is_scalar())
      out.push_back({Diagnostic::Kind::Unsupported, span,
                     "relations of relations are not supported (" + who + ")"});
    return;
  }
  if (t.is_set()) check_pair_components(t.element(), span, who, out);
}

}  // namespace

std::vector<Diagnostic> well_formedness_check(const Machine& machine) {
  std::vector<Diagnostic> out;

  report_duplicates(machine.carrier_sets, &CarrierSet::name, "carrier set", out);
  report_duplicates(machine.variables, &Variable::name, "variable", out);
  report_duplicates(machine.invariants, &LabeledPredicate::label, "invariant label", out);
  report_duplicates(machine.initialisation, &Action::label, "action label", out);
  report_duplicates(machine.events, &Event::name, "event", out);

  for (const auto& v : machine.variables) {
    if (machine.is_carrier(v.name))
      out.push_back({Diagnostic::Kind::NameClash, v.span,
                     "'" + v.name + "' is both a carrier set and a variable"});
    if (!v.type)
      out.push_back({Diagnostic::Kind::Typing, v.span,
                     "cannot infer the type of variable '" + v.name +
                         "'; add an invariant of the form " + v.name + " : S"});
    else
      check_pair_components(*v.type, v.span, v.name, out);
  }

  TypeScope machine_scope(machine);
  for (const auto& inv : machine.invariants) {
    Checker checker(machine_scope, &out, PrimePolicy{.context = "an invariant"});
    checker.pred(*inv.predicate);
  }

  std::map<std::string, int> init_count;
  for (const auto& a : machine.initialisation) {
    check_action(machine, machine_scope, a, /*initialisation=*/true, out);
    ++init_count[a.target];
  }
  for (const auto& v : machine.variables) {
    auto it = init_count.find(v.name);
    int n = it == init_count.end() ? 0 : it->second;
    if (n != 1)
      out.push_back({Diagnostic::Kind::Initialisation, v.span,
                     "initialisation assigns '" + v.name + "' " + std::to_string(n) +
                         " times; expected exactly once"});
  }

  for (const auto& e : machine.events) {
    report_duplicates(e.params, &Parameter::name, "parameter", out);
    report_duplicates(e.guards, &LabeledPredicate::label, "guard label", out);
    report_duplicates(e.actions, &Action::label, "action label", out);
    for (const auto& p : e.params) {
      if (machine.find_variable(p.name) || machine.is_carrier(p.name))
        out.push_back({Diagnostic::Kind::NameClash, p.span,
                       "parameter '" + p.name + "' shadows a variable or carrier set"});
      if (p.type.kind() == EbType::Kind::Carrier && !machine.is_carrier(p.type.carrier_name()))
        out.push_back({Diagnostic::Kind::Scoping, p.span,
                       "unknown carrier set '" + p.type.carrier_name() + "'"});
      check_pair_components(p.type, p.span, p.name, out);
    }

    TypeScope scope(machine, e);
    for (const auto& g : e.guards) {
      Checker checker(scope, &out, PrimePolicy{.context = "a guard"});
      checker.pred(*g.predicate);
    }
    std::set<std::string> targets;
    for (const auto& a : e.actions) {
      if (!targets.insert(a.target).second)
        out.push_back({Diagnostic::Kind::Duplicate, a.span,
                       "variable '" + a.target + "' is assigned twice in event " + e.name});
      check_action(machine, scope, a, /*initialisation=*/false, out);
    }
  }

  std::ranges::stable_sort(out, {}, [](const Diagnostic& d) { return d.span.begin; });
  return out;
}

std::vector<std::string> mod_set(std::span<const Action> actions) {
  std::vector<std::string> out;
  for (const auto& a : actions)
    if (std::ranges::find(out, a.target) == out.end()) out.push_back(a.target);
  return out;
}

namespace {

void collect(const Expression& e, std::set<Ident>& out) {
  if (e.kind == ExprKind::Ident) out.insert(Ident{e.name, e.primed});
  for (const auto& op : e.operands) collect(*op, out);
}

void collect(const Predicate& p, std::set<Ident>& out) {
  for (const auto& t : p.terms) collect(*t, out);
  for (const auto& op : p.operands) collect(*op, out);
}

}  // namespace

std::set<Ident> free_identifiers(const Expression& expr) {
  std::set<Ident> out;
  collect(expr, out);
  return out;
}

std::set<Ident> free_identifiers(const Predicate& pred) {
  std::set<Ident> out;
  collect(pred, out);
  return out;
}

}  // namespace eb2jml::eventb
