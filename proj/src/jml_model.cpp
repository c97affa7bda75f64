#include "eb2jml/jml_model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace eb2jml::jml {

JmlType JmlType::integer() { return JmlType{}; }

JmlType JmlType::bset(JmlType element) {
  JmlType t;
  t.kind_ = Kind::BSet;
  t.args_ = {std::move(element)};
  return t;
}

JmlType JmlType::brelation(JmlType domain, JmlType range) {
  JmlType t;
  t.kind_ = Kind::BRelation;
  t.args_ = {std::move(domain), std::move(range)};
  return t;
}

JmlType JmlType::pair(JmlType first, JmlType second) {
  JmlType t;
  t.kind_ = Kind::Pair;
  t.args_ = {std::move(first), std::move(second)};
  return t;
}

std::string JmlType::to_string() const {
  switch (kind_) {
    case Kind::Integer:
      return "Integer";
    case Kind::BSet:
      return "BSet<" + args_[0].to_string() + ">";
    case Kind::BRelation:
      return "BRelation<" + args_[0].to_string() + "," + args_[1].to_string() + ">";
    case Kind::Pair:
      return "JMLEqualsEqualsPair<" + args_[0].to_string() + "," + args_[1].to_string() + ">";
  }
  return "?";
}

namespace {

JmlExprPtr make_expr(ExprKind kind, std::vector<JmlExprPtr> operands) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = kind;
  e->operands = std::move(operands);
  return e;
}

std::shared_ptr<JmlPredicate> make_pred(PredKind kind) {
  auto p = std::make_shared<JmlPredicate>();
  p->kind = kind;
  return p;
}

}  // namespace

JmlExprPtr int_lit(std::int64_t value) {
  auto e = std::make_shared<JmlExpr>();
  e->value = value;
  return e;
}

JmlExprPtr ident(std::string name, bool primed) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = ExprKind::Ident;
  e->name = std::move(name);
  e->primed = primed;
  return e;
}

JmlExprPtr builtin_set(std::string name) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = ExprKind::BuiltinSet;
  e->name = std::move(name);
  return e;
}

JmlExprPtr old_expr(JmlExprPtr inner) { return make_expr(ExprKind::Old, {std::move(inner)}); }

JmlExprPtr new_set(JmlType element, std::vector<JmlExprPtr> items) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = ExprKind::NewSet;
  e->type = JmlType::bset(std::move(element));
  e->operands = std::move(items);
  return e;
}

JmlExprPtr new_relation(JmlType domain, JmlType range, std::vector<JmlExprPtr> pairs) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = ExprKind::NewRelation;
  e->type = JmlType::brelation(std::move(domain), std::move(range));
  e->operands = std::move(pairs);
  return e;
}

JmlExprPtr new_pair(JmlType first, JmlType second, JmlExprPtr lhs, JmlExprPtr rhs) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = ExprKind::NewPair;
  e->type = JmlType::pair(std::move(first), std::move(second));
  e->operands = {std::move(lhs), std::move(rhs)};
  return e;
}

JmlExprPtr call(JmlExprPtr receiver, std::string method, std::vector<JmlExprPtr> args) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = ExprKind::Call;
  e->name = std::move(method);
  e->operands.push_back(std::move(receiver));
  for (auto& a : args) e->operands.push_back(std::move(a));
  return e;
}

JmlExprPtr static_call(std::string function, std::vector<JmlExprPtr> args) {
  auto e = std::make_shared<JmlExpr>();
  e->kind = ExprKind::StaticCall;
  e->name = std::move(function);
  e->operands = std::move(args);
  return e;
}

JmlExprPtr arith(ExprKind op, JmlExprPtr lhs, JmlExprPtr rhs) {
  return make_expr(op, {std::move(lhs), std::move(rhs)});
}

JmlPredPtr truth(bool value) { return make_pred(value ? PredKind::True : PredKind::False); }

JmlPredPtr conj(std::vector<JmlPredPtr> preds) {
  std::vector<JmlPredPtr> flat;
  for (auto& p : preds) {
    if (p->kind == PredKind::And)
      flat.insert(flat.end(), p->operands.begin(), p->operands.end());
    else
      flat.push_back(std::move(p));
  }
  if (flat.empty()) return truth(true);
  if (flat.size() == 1) return flat.front();
  auto p = make_pred(PredKind::And);
  p->operands = std::move(flat);
  return p;
}

JmlPredPtr disj(std::vector<JmlPredPtr> preds) {
  if (preds.empty()) return truth(false);
  if (preds.size() == 1) return preds.front();
  auto p = make_pred(PredKind::Or);
  p->operands = std::move(preds);
  return p;
}

JmlPredPtr negate(JmlPredPtr inner) {
  auto p = make_pred(PredKind::Not);
  p->operands = {std::move(inner)};
  return p;
}

JmlPredPtr old_pred(JmlPredPtr inner) {
  if (contains_old(*inner)) throw std::invalid_argument("\\old may not nest");
  auto p = make_pred(PredKind::Old);
  p->operands = {std::move(inner)};
  return p;
}

JmlPredPtr exists(std::string bound, JmlType type, JmlPredPtr body) {
  auto p = make_pred(PredKind::Exists);
  p->name = std::move(bound);
  p->bound_type = std::move(type);
  p->operands = {std::move(body)};
  return p;
}

JmlPredPtr becomes(std::string var, std::string after, bool primitive) {
  if (var == after) throw std::invalid_argument("becomes needs two distinct identifiers");
  auto p = make_pred(PredKind::Becomes);
  p->name = std::move(var);
  p->after_name = std::move(after);
  p->primitive = primitive;
  return p;
}

JmlPredPtr group(JmlPredPtr inner) {
  auto p = make_pred(PredKind::Group);
  p->operands = {std::move(inner)};
  return p;
}

JmlPredPtr guard_call(std::string method) {
  auto p = make_pred(PredKind::GuardCall);
  p->name = std::move(method);
  return p;
}

JmlPredPtr result_iff(JmlPredPtr body) {
  auto p = make_pred(PredKind::ResultIff);
  p->operands = {std::move(body)};
  return p;
}

JmlPredPtr compare(CompareOp op, JmlExprPtr lhs, JmlExprPtr rhs) {
  auto p = make_pred(PredKind::Compare);
  p->op = op;
  p->terms = {std::move(lhs), std::move(rhs)};
  return p;
}

JmlPredPtr test(JmlExprPtr boolean_call) {
  auto p = make_pred(PredKind::Test);
  p->terms = {std::move(boolean_call)};
  return p;
}

namespace {

bool expr_contains_old(const JmlExpr& e) {
  if (e.kind == ExprKind::Old) return true;
  return std::any_of(e.operands.begin(), e.operands.end(),
                     [](const JmlExprPtr& o) { return expr_contains_old(*o); });
}

}  // namespace

bool contains_old(const JmlPredicate& p) {
  if (p.kind == PredKind::Old) return true;
  for (const auto& o : p.operands)
    if (contains_old(*o)) return true;
  for (const auto& t : p.terms)
    if (expr_contains_old(*t)) return true;
  return false;
}

AssignableClause AssignableClause::of(std::vector<std::string> vars) {
  if (vars.empty()) return nothing();
  return {Kind::Vars, std::move(vars)};
}

bool AssignableClause::permits(const std::string& var) const {
  switch (kind) {
    case Kind::Nothing:
      return false;
    case Kind::Everything:
      return true;
    case Kind::Vars:
      return std::find(vars.begin(), vars.end(), var) != vars.end();
  }
  return false;
}

const JmlMethodSpec* JmlClass::find_method(std::string_view name) const {
  for (const auto& m : methods)
    if (m.name == name) return &m;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

enum ExprLevel : int { kAdditive = 1, kMultiplicative = 2, kPrimaryExpr = 3 };

int level_of(const JmlExpr& e) {
  switch (e.kind) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return kAdditive;
    case ExprKind::Mul:
      return kMultiplicative;
    default:
      return kPrimaryExpr;
  }
}

void expr(std::ostream& os, const JmlExpr& e);

void expr_operand(std::ostream& os, const JmlExpr& e, int min_level) {
  bool parens = level_of(e) < min_level;
  if (parens) os << '(';
  expr(os, e);
  if (parens) os << ')';
}

void args(std::ostream& os, const std::vector<JmlExprPtr>& list, std::size_t from,
          const char* sep) {
  os << '(';
  for (std::size_t i = from; i < list.size(); ++i) {
    if (i > from) os << sep;
    expr(os, *list[i]);
  }
  os << ')';
}

void expr(std::ostream& os, const JmlExpr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
      os << e.value;
      return;
    case ExprKind::Ident:
      os << e.name << (e.primed ? "'" : "");
      return;
    case ExprKind::BuiltinSet:
      os << "Utils." << e.name;
      return;
    case ExprKind::Old:
      os << "\\old(";
      expr(os, *e.operands[0]);
      os << ')';
      return;
    case ExprKind::NewSet:
    case ExprKind::NewRelation:
      os << "new " << e.type.to_string();
      args(os, e.operands, 0, ", ");
      return;
    case ExprKind::NewPair:
      os << "new " << e.type.to_string();
      args(os, e.operands, 0, ",");
      return;
    case ExprKind::Call:
      expr_operand(os, *e.operands[0], kPrimaryExpr);
      os << '.' << e.name;
      args(os, e.operands, 1, ", ");
      return;
    case ExprKind::StaticCall:
      os << e.name;
      args(os, e.operands, 0, ", ");
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      int level = level_of(e);
      expr_operand(os, *e.operands[0], level);
      os << (e.kind == ExprKind::Add ? " + " : e.kind == ExprKind::Sub ? " - " : " * ");
      expr_operand(os, *e.operands[1], level + 1);
      return;
    }
  }
}

enum PredLevel : int { kIff = 0, kOr = 1, kAnd = 2, kCompare = 3, kNot = 4, kPrimary = 5 };

int level_of(const JmlPredicate& p) {
  switch (p.kind) {
    case PredKind::ResultIff:
      return kIff;
    case PredKind::Or:
      return kOr;
    case PredKind::And:
      return kAnd;
    case PredKind::Compare:
      return kCompare;
    case PredKind::Becomes:
      return p.primitive ? kCompare : kPrimary;
    case PredKind::Not:
      return kNot;
    default:
      return kPrimary;
  }
}

void pred(std::ostream& os, const JmlPredicate& p);

void pred_operand(std::ostream& os, const JmlPredicate& p, int min_level) {
  bool parens = level_of(p) < min_level;
  if (parens) os << '(';
  pred(os, p);
  if (parens) os << ')';
}

const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return " == ";
    case CompareOp::Neq: return " != ";
    case CompareOp::Lt: return " < ";
    case CompareOp::Le: return " <= ";
  }
  return " ? ";
}

void pred(std::ostream& os, const JmlPredicate& p) {
  switch (p.kind) {
    case PredKind::True:
      os << "true";
      return;
    case PredKind::False:
      os << "false";
      return;
    case PredKind::And:
    case PredKind::Or: {
      int level = level_of(p);
      for (std::size_t i = 0; i < p.operands.size(); ++i) {
        if (i) os << (p.kind == PredKind::And ? " && " : " || ");
        pred_operand(os, *p.operands[i], level + 1);
      }
      return;
    }
    case PredKind::Not:
      os << '!';
      pred_operand(os, *p.operands[0], kNot);
      return;
    case PredKind::Old:
      os << "\\old(";
      pred(os, *p.operands[0]);
      os << ')';
      return;
    case PredKind::Exists:
      os << "(\\exists " << p.bound_type.to_string() << ' ' << p.name << "; ";
      pred(os, *p.operands[0]);
      os << ')';
      return;
    case PredKind::Becomes:
      if (p.primitive)
        os << p.name << " == " << p.after_name;
      else
        os << p.name << ".equals(" << p.after_name << ')';
      return;
    case PredKind::Group:
      os << '(';
      pred(os, *p.operands[0]);
      os << ')';
      return;
    case PredKind::GuardCall:
      os << p.name << "()";
      return;
    case PredKind::ResultIff:
      os << "\\result <==> ";
      pred_operand(os, *p.operands[0], kOr);
      return;
    case PredKind::Compare:
      expr(os, *p.terms[0]);
      os << op_text(p.op);
      expr(os, *p.terms[1]);
      return;
    case PredKind::Test:
      expr(os, *p.terms[0]);
      return;
  }
}

// Top-level conjunction laid out one conjunct per line.
void conjunct_lines(std::ostream& os, const JmlPredicate& p) {
  if (p.kind != PredKind::And) {
    os << "      " << render_predicate(p);
    return;
  }
  for (std::size_t i = 0; i < p.operands.size(); ++i) {
    if (i) os << "\n   && ";
    else os << "      ";
    pred_operand(os, *p.operands[i], kAnd + 1);
  }
}

std::string assignable_text(const AssignableClause& a) {
  switch (a.kind) {
    case AssignableClause::Kind::Nothing:
      return "\\nothing";
    case AssignableClause::Kind::Everything:
      return "\\everything";
    case AssignableClause::Kind::Vars:
      break;
  }
  std::string out;
  for (std::size_t i = 0; i < a.vars.size(); ++i) out += (i ? ", " : "") + a.vars[i];
  return out;
}

void spec_case(std::ostream& os, const SpecCase& c, bool first) {
  std::vector<std::string> clauses;
  if (c.requires_clause) clauses.push_back("requires " + render_predicate(*c.requires_clause) + ";");
  clauses.push_back("assignable " + assignable_text(c.assignable) + ";");
  clauses.push_back("ensures " + (c.ensures ? render_predicate(*c.ensures) : "true") + ";");
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) os << '\n';
    os << (i == 0 && first ? "/*@ " : "    ") << clauses[i];
  }
}

}  // namespace

std::string render_expr(const JmlExpr& e) {
  std::ostringstream os;
  expr(os, e);
  return os.str();
}

std::string render_predicate(const JmlPredicate& p) {
  std::ostringstream os;
  pred(os, p);
  return os.str();
}

std::string render_class(const JmlClass& cls) {
  std::ostringstream os;
  os << "import poporo.models.JML.*;\n"
     << "import org.jmlspecs.models.JMLEqualsEqualsPair;\n\n"
     << "public abstract class " << cls.name << " {\n";

  std::vector<const ModelField*> vars;
  for (const auto& f : cls.model_fields) {
    if (f.carrier)
      os << "/*@ public model " << f.type.to_string() << ' ' << f.name << "; */\n";
    else
      vars.push_back(&f);
  }
  if (!vars.empty()) {
    os << '\n';
    for (std::size_t i = 0; i < vars.size(); ++i) {
      os << (i ? "    " : "/*@ ") << "public model " << vars[i]->type.to_string() << ' '
         << vars[i]->name << ';';
      os << (i + 1 == vars.size() ? " */\n" : "\n");
    }
  }

  os << "/*@ public invariant\n";
  conjunct_lines(os, cls.class_invariant ? *cls.class_invariant : *truth(true));
  os << "; */\n\n";
  os << "/*@ initially\n";
  conjunct_lines(os, cls.initially ? *cls.initially : *truth(true));
  os << " ; */\n";

  for (const auto& m : cls.methods) {
    os << "\n\n";
    spec_case(os, m.normal, true);
    if (m.kind == JmlMethodSpec::Kind::GuardQuery) {
      os << " */\npublic abstract boolean " << m.name << "();\n";
      continue;
    }
    if (m.exceptional) {
      os << "\nalso\n";
      spec_case(os, *m.exceptional, false);
    }
    os << " */\n    public abstract void " << m.name << "();\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Normalisation

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::vector<std::string> tokenize(std::string_view s) {
  static const char* const kOps[] = {"<=!=>", "<==>", "==>", "<==", "==", "!=", "<=", ">=",
                                     "&&", "||"};
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (s.substr(i, 3) == "/*@" || s.substr(i, 3) == "//@") {
      i += 3;
      continue;
    }
    if (s.substr(i, 2) == "*/" || s.substr(i, 2) == "/*" || s.substr(i, 2) == "//") {
      i += 2;
      continue;
    }
    if (c == '@') {  // JML margin marker
      ++i;
      continue;
    }
    if (ident_start(c) || (c == '\\' && i + 1 < s.size() && ident_start(s[i + 1]))) {
      std::size_t j = i + 1;
      while (j < s.size() && ident_char(s[j])) ++j;
      if (c != '\\' && j < s.size() && s[j] == '\'') ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j;
      continue;
    }
    bool matched = false;
    for (const char* op : kOps) {
      std::string_view o(op);
      if (s.substr(i, o.size()) == o) {
        out.emplace_back(o);
        i += o.size();
        matched = true;
        break;
      }
    }
    if (!matched) out.emplace_back(1, s[i++]);
  }
  return out;
}

// Removes the outer pair of every `( ( ... ) )` whose inner group spans the
// whole outer group. Returns true if anything was removed.
bool collapse_parens(std::vector<std::string>& toks) {
  std::vector<std::ptrdiff_t> match(toks.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] == "(") {
      stack.push_back(i);
    } else if (toks[i] == ")" && !stack.empty()) {
      match[stack.back()] = static_cast<std::ptrdiff_t>(i);
      stack.pop_back();
    }
  }
  std::vector<bool> drop(toks.size(), false);
  bool changed = false;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (match[i] < 0 || match[i + 1] < 0) continue;
    if (match[i + 1] == match[i] - 1) {
      drop[i] = drop[static_cast<std::size_t>(match[i])] = true;
      changed = true;
    }
  }
  if (!changed) return false;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(toks[i]));
  toks = std::move(kept);
  return true;
}

}  // namespace

std::string normalize_jml(std::string_view text) {
  auto toks = tokenize(text);
  while (collapse_parens(toks)) {
  }
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace eb2jml::jml
