#include <sstream>

#include "eb2jml/eventb_parser.hpp"

namespace eb2jml::eventb {

namespace {

// Binding strength, loosest first. Must mirror the parser's precedence.
enum Level : int {
  kMaplet = 1,
  kRelationSet = 2,
  kSetOp = 3,
  kAdditive = 4,
  kMultiplicative = 5,
  kPostfix = 6,
  kPrimary = 7,
};

int level_of(const Expression& e) {
  switch (e.kind) {
    case ExprKind::Maplet:
      return kMaplet;
    case ExprKind::Union:
    case ExprKind::Inter:
    case ExprKind::Diff:
    case ExprKind::DomSub:
    case ExprKind::DomRes:
    case ExprKind::Cross:
      return kSetOp;
    case ExprKind::Add:
    case ExprKind::Sub:
      return kAdditive;
    case ExprKind::Mul:
      return kMultiplicative;
    case ExprKind::Apply:
    case ExprKind::Image:
      return kPostfix;
    default:
      return is_relation_set_kind(e.kind) ? kRelationSet : kPrimary;
  }
}

const char* symbol_of(ExprKind kind) {
  switch (kind) {
    case ExprKind::Union: return "\\/";
    case ExprKind::Inter: return "/\\";
    case ExprKind::Diff: return "\\";
    case ExprKind::DomSub: return "<<|";
    case ExprKind::DomRes: return "<|";
    case ExprKind::Cross: return "**";
    case ExprKind::Maplet: return "|->";
    case ExprKind::Add: return "+";
    case ExprKind::Sub: return "-";
    case ExprKind::Mul: return "*";
    case ExprKind::Relation: return "<->";
    case ExprKind::TotalRelation: return "<<->";
    case ExprKind::SurjectiveRelation: return "<->>";
    case ExprKind::TotalSurjRelation: return "<<->>";
    case ExprKind::PartialFunction: return "+->";
    case ExprKind::TotalFunction: return "-->";
    case ExprKind::TotalSurjection: return "->>";
    default: return "?";
  }
}

void expr(std::ostream& os, const Expression& e, int min_level);

void operand(std::ostream& os, const Expression& e, int min_level) {
  bool parens = level_of(e) < min_level;
  if (parens) os << '(';
  expr(os, e, parens ? 0 : min_level);
  if (parens) os << ')';
}

void expr(std::ostream& os, const Expression& e, int /*min_level*/) {
  switch (e.kind) {
    case ExprKind::IntLit:
      os << e.value;
      return;
    case ExprKind::Ident:
      os << e.name << (e.primed ? "'" : "");
      return;
    case ExprKind::IntSet:
      os << "INT";
      return;
    case ExprKind::NatSet:
      os << "NAT";
      return;
    case ExprKind::EmptySet:
      os << "{}";
      return;
    case ExprKind::SetEnum: {
      os << '{';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) os << ", ";
        operand(os, *e.operands[i], 0);
      }
      os << '}';
      return;
    }
    case ExprKind::Dom:
    case ExprKind::Ran:
      os << (e.kind == ExprKind::Dom ? "dom(" : "ran(");
      operand(os, *e.operands[0], 0);
      os << ')';
      return;
    case ExprKind::Apply:
    case ExprKind::Image:
      operand(os, *e.operands[0], kPostfix);
      os << (e.kind == ExprKind::Apply ? '(' : '[');
      operand(os, *e.operands[1], 0);
      os << (e.kind == ExprKind::Apply ? ')' : ']');
      return;
    default: {
      int level = level_of(e);
      bool left_assoc = level == kSetOp || level == kAdditive || level == kMultiplicative;
      operand(os, *e.operands[0], left_assoc ? level : level + 1);
      os << ' ' << symbol_of(e.kind) << ' ';
      operand(os, *e.operands[1], level + 1);
      return;
    }
  }
}

enum PredLevel : int { kOr = 1, kAnd = 2, kNot = 3, kAtom = 4 };

int level_of(const Predicate& p) {
  switch (p.kind) {
    case PredKind::Or: return kOr;
    case PredKind::And: return kAnd;
    case PredKind::Not: return kNot;
    default: return kAtom;
  }
}

void pred(std::ostream& os, const Predicate& p);

void pred_operand(std::ostream& os, const Predicate& p, int min_level) {
  bool parens = level_of(p) < min_level;
  if (parens) os << '(';
  pred(os, p);
  if (parens) os << ')';
}

void pred(std::ostream& os, const Predicate& p) {
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
      pred_operand(os, *p.operands[0], level);
      os << (p.kind == PredKind::And ? " & " : " or ");
      pred_operand(os, *p.operands[1], level + 1);
      return;
    }
    case PredKind::Not:
      os << "not ";
      pred_operand(os, *p.operands[0], kNot);
      return;
    default: {
      const char* op = p.kind == PredKind::Eq       ? "="
                       : p.kind == PredKind::Neq    ? "/="
                       : p.kind == PredKind::In     ? ":"
                       : p.kind == PredKind::Subset ? "<:"
                       : p.kind == PredKind::Lt     ? "<"
                                                    : "<=";
      operand(os, *p.terms[0], 0);
      os << ' ' << op << ' ';
      operand(os, *p.terms[1], 0);
      return;
    }
  }
}

void action(std::ostream& os, const Action& a, const std::string& indent) {
  os << indent << a.label << ": " << a.target;
  if (a.kind == Action::Kind::Deterministic)
    os << " := " << render_expression(*a.rhs);
  else
    os << " :| " << render_predicate(*a.before_after);
  os << '\n';
}

void labeled(std::ostream& os, const LabeledPredicate& lp, const std::string& indent) {
  os << indent << lp.label << ": " << render_predicate(*lp.predicate) << '\n';
}

}  // namespace

std::string render_expression(const Expression& e) {
  std::ostringstream os;
  expr(os, e, 0);
  return os.str();
}

std::string render_predicate(const Predicate& p) {
  std::ostringstream os;
  pred(os, p);
  return os.str();
}

std::string render_machine(const Machine& m) {
  std::ostringstream os;
  os << "machine " << m.name;
  if (m.seen_context) os << " sees " << *m.seen_context;
  os << '\n';
  if (!m.carrier_sets.empty()) {
    os << "  sets";
    for (const auto& s : m.carrier_sets) os << ' ' << s.name;
    os << '\n';
  }
  if (!m.variables.empty()) {
    os << "  variables";
    for (const auto& v : m.variables) os << ' ' << v.name;
    os << '\n';
  }
  if (!m.invariants.empty()) {
    os << "  invariants\n";
    for (const auto& inv : m.invariants) labeled(os, inv, "    ");
  }
  os << "  events\n";
  os << "    initialisation\n      begin\n";
  for (const auto& a : m.initialisation) action(os, a, "        ");
  os << "      end\n";
  for (const auto& e : m.events) {
    os << "    " << e.name << '\n';
    if (!e.params.empty()) {
      os << "      any ";
      for (std::size_t i = 0; i < e.params.size(); ++i) {
        if (i) os << ", ";
        os << e.params[i].name << " : " << e.params[i].type.to_string();
      }
      os << '\n';
      if (!e.guards.empty()) os << "      where\n";
    } else if (!e.guards.empty()) {
      os << "      when\n";
    } else {
      os << "      begin\n";
    }
    for (const auto& g : e.guards) labeled(os, g, "        ");
    if (!e.params.empty() || !e.guards.empty()) os << "      then\n";
    for (const auto& a : e.actions) action(os, a, "        ");
    os << "      end\n";
  }
  os << "end\n";
  return os.str();
}

}  // namespace eb2jml::eventb
