#include "eb2jml/eventb_parser.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <set>
#include <utility>
#include <vector>

namespace eb2jml::eventb {

ParseError::ParseError(SourceSpan span, std::string expected, std::string found,
                       bool out_of_subset)
    : std::runtime_error(format(span, expected, found, out_of_subset)),
      span_(span),
      expected_(std::move(expected)),
      found_(std::move(found)),
      out_of_subset_(out_of_subset) {}

std::string ParseError::format(const SourceSpan& span, const std::string& expected,
                               const std::string& found, bool out_of_subset) {
  std::string where = std::to_string(span.line) + ":" + std::to_string(span.column) + ": ";
  if (out_of_subset)
    return where + "out-of-subset construct '" + found + "' (" + expected + ")";
  return where + "expected " + expected + ", found " + found;
}

namespace {

enum class TokKind { Ident, Int, Keyword, Symbol, OutOfSubset, Invalid, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  bool primed = false;  // Ident immediately followed by '
  SourceSpan span;
};

const std::set<std::string, std::less<>> kKeywords = {
    "machine", "sees", "sets", "variables", "invariants", "events", "initialisation",
    "begin",   "when", "any",  "where",     "then",       "end",    "or",
    "not",     "true", "false", "dom",      "ran",        "INT",    "NAT",
    "POW",     "invariant"};

const std::set<std::string, std::less<>> kOutOfSubset = {
    "refines", "extends",  "context", "constants", "axioms",      "theorems", "theorem",
    "variant", "witness",  "with",    "convergent", "anticipated", "ordinary", "status"};

// Longest match first.
constexpr std::array<std::string_view, 34> kSymbols = {
    "<<->>", "<<->", "<->>", "<->", "->>", "-->", "+->", "|->", "<<|", "<|", "<:", "<=",
    ":=",    ":|",   "\\/",  "/\\", "/=",  "**",  "\\",  ":",   "=",   "<",  "+",  "-",
    "*",     "(",    ")",    "[",   "]",   "{",   "}",   ",",   "&",   "'"};

// Mathematical glyphs accepted as spellings of the ASCII tokens.
struct Alias {
  std::string_view glyph;
  std::string_view ascii;
  TokKind kind;
};
constexpr std::array<Alias, 22> kAliases = {{
    {"\u2208", ":", TokKind::Symbol},      {"\u2286", "<:", TokKind::Symbol},
    {"\u222A", "\\/", TokKind::Symbol},   {"\u2229", "/\\", TokKind::Symbol},
    {"\u2216", "\\", TokKind::Symbol},    {"\u2A64", "<<|", TokKind::Symbol},
    {"\u25C1", "<|", TokKind::Symbol},     {"\u00D7", "**", TokKind::Symbol},
    {"\u21A6", "|->", TokKind::Symbol},    {"\u2194", "<->", TokKind::Symbol},
    {"\u21F8", "+->", TokKind::Symbol},    {"\u2192", "-->", TokKind::Symbol},
    {"\u21A0", "->>", TokKind::Symbol},    {"\u2260", "/=", TokKind::Symbol},
    {"\u2264", "<=", TokKind::Symbol},     {"\u2227", "&", TokKind::Symbol},
    {"\u2254", ":=", TokKind::Symbol},     {":\u2223", ":|", TokKind::Symbol},
    {"\u2228", "or", TokKind::Keyword},    {"\u00AC", "not", TokKind::Keyword},
    {"\u2124", "INT", TokKind::Keyword},   {"\u2115", "NAT", TokKind::Keyword},
}};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t = next();
      out.push_back(t);
      if (t.kind == TokKind::End) break;
    }
    return out;
  }

 private:
  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
      ++col_;  // columns count code points
    }
    ++pos_;
  }

  Token next() {
    Token t;
    t.span = {pos_, pos_, line_, col_};
    if (pos_ >= text_.size()) {
      t.kind = TokKind::End;
      t.text = "end of input";
      return t;
    }
    char c = text_[pos_];
    std::size_t start = pos_;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
      t.text = std::string(text_.substr(start, pos_ - start));
      if (kKeywords.contains(t.text)) {
        t.kind = TokKind::Keyword;
      } else if (kOutOfSubset.contains(t.text)) {
        t.kind = TokKind::OutOfSubset;
      } else {
        t.kind = TokKind::Ident;
        if (pos_ < text_.size() && text_[pos_] == '\'') {
          advance();
          t.primed = true;
        } else if (text_.substr(pos_).starts_with("\u2032")) {
          for (int i = 0; i < 3; ++i) advance();
          t.primed = true;
        }
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        advance();
      t.kind = TokKind::Int;
      t.text = std::string(text_.substr(start, pos_ - start));
    } else {
      t.kind = TokKind::Invalid;
      for (const auto& a : kAliases) {
        if (text_.substr(pos_).starts_with(a.glyph)) {
          for (std::size_t i = 0; i < a.glyph.size(); ++i) advance();
          t.kind = a.kind;
          t.text = std::string(a.ascii);
          break;
        }
      }
      for (auto sym : kSymbols) {
        if (t.kind != TokKind::Invalid) break;
        if (text_.substr(pos_).starts_with(sym)) {
          for (std::size_t i = 0; i < sym.size(); ++i) advance();
          t.kind = TokKind::Symbol;
          t.text = std::string(sym);
          break;
        }
      }
      if (t.kind == TokKind::Invalid) {
        // Swallow one UTF-8 code point so the message shows the whole glyph.
        advance();
        while (pos_ < text_.size() && (static_cast<unsigned char>(text_[pos_]) & 0xC0) == 0x80)
          advance();
        t.text = std::string(text_.substr(start, pos_ - start));
      }
    }
    t.span.end = pos_;
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokKind::End:
      return "end of input";
    case TokKind::Invalid:
      return "invalid character '" + t.text + "'";
    default:
      return "'" + t.text + (t.primed ? "'" : "") + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

  Machine machine() {
    Machine m;
    const Token& first = peek();
    expect_keyword("machine");
    m.name = expect_ident("machine name").text;
    if (accept_keyword("sees")) m.seen_context = expect_ident("context name").text;
    if (accept_keyword("sets")) {
      do {
        const Token& t = expect_ident("carrier set name");
        m.carrier_sets.push_back({t.text, t.span});
      } while (peek().kind == TokKind::Ident);
    }
    if (accept_keyword("variables")) {
      do {
        const Token& t = expect_ident("variable name");
        m.variables.push_back({t.text, std::nullopt, t.span});
      } while (peek().kind == TokKind::Ident);
    }
    if (accept_keyword("invariants") || accept_keyword("invariant")) {
      while (at_label()) m.invariants.push_back(labeled_predicate());
    }
    expect_keyword("events");
    bool have_init = false;
    while (!is_keyword("end")) {
      if (is_keyword("initialisation")) {
        const Token& t = take();
        if (have_init) throw ParseError(t.span, "a single initialisation", "a second one");
        have_init = true;
        expect_keyword("begin");
        while (at_label()) m.initialisation.push_back(action());
        expect_keyword("end");
      } else if (peek().kind == TokKind::Ident) {
        m.events.push_back(event());
      } else {
        fail("an event name, initialisation or end");
      }
    }
    if (!have_init) fail("initialisation event before end of machine");
    expect_keyword("end");
    expect_end();
    m.span = join(first.span, previous().span);
    infer_variable_types(m);
    return m;
  }

  PredPtr whole_predicate() {
    auto p = predicate();
    expect_end();
    return p;
  }

  ExprPtr whole_expression() {
    auto e = expression();
    expect_end();
    return e;
  }

  EbType whole_type() {
    auto t = type();
    expect_end();
    return t;
  }

 private:
  // -- token plumbing ------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    const Token& t = tokens_[i];
    if (ahead == 0 && t.kind == TokKind::OutOfSubset)
      throw ParseError(t.span, "not supported by eb2jml", t.text, /*out_of_subset=*/true);
    return t;
  }

  const Token& take() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  const Token& previous() const { return tokens_[pos_ == 0 ? 0 : pos_ - 1]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw ParseError(t.span, expected, describe(t));
  }

  bool is_keyword(std::string_view kw) const {
    const Token& t = peek();
    return t.kind == TokKind::Keyword && t.text == kw;
  }

  bool is_symbol(std::string_view sym) const {
    const Token& t = peek();
    return t.kind == TokKind::Symbol && t.text == sym;
  }

  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(kw)) return false;
    take();
    return true;
  }

  bool accept_symbol(std::string_view sym) {
    if (!is_symbol(sym)) return false;
    take();
    return true;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("keyword " + std::string(kw));
  }

  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) fail("'" + std::string(sym) + "'");
  }

  const Token& expect_ident(const std::string& what) {
    if (peek().kind != TokKind::Ident || peek().primed) fail(what);
    return take();
  }

  void expect_end() {
    if (peek().kind != TokKind::End) fail("end of input");
  }

  bool at_label() const {
    return peek().kind == TokKind::Ident && !peek().primed &&
           tokens_[std::min(pos_ + 1, tokens_.size() - 1)].kind == TokKind::Symbol &&
           tokens_[std::min(pos_ + 1, tokens_.size() - 1)].text == ":";
  }

  static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    return {a.begin, b.end, a.line, a.column};
  }

  SourceSpan from(const SourceSpan& start) const { return join(start, previous().span); }

  // -- machine structure ---------------------------------------------------

  LabeledPredicate labeled_predicate() {
    const Token& label = take();
    expect_symbol(":");
    auto p = predicate();
    return {label.text, p, from(label.span)};
  }

  Action action() {
    Action a;
    const Token& label = take();
    a.label = label.text;
    expect_symbol(":");
    a.target = expect_ident("assigned variable").text;
    if (accept_symbol(":=")) {
      a.kind = Action::Kind::Deterministic;
      a.rhs = expression();
    } else if (accept_symbol(":|")) {
      a.kind = Action::Kind::Nondeterministic;
      a.before_after = predicate();
    } else {
      fail("':=' or ':|'");
    }
    a.span = from(label.span);
    return a;
  }

  Event event() {
    Event e;
    const Token& name = take();
    e.name = name.text;
    if (accept_keyword("any")) {
      do {
        const Token& p = expect_ident("parameter name");
        expect_symbol(":");
        EbType t = type();
        e.params.push_back({p.text, t, from(p.span)});
      } while (accept_symbol(","));
      if (accept_keyword("where")) {
        while (at_label()) e.guards.push_back(labeled_predicate());
      }
      expect_keyword("then");
    } else if (accept_keyword("when")) {
      while (at_label()) e.guards.push_back(labeled_predicate());
      expect_keyword("then");
    } else {
      if (!accept_keyword("begin")) fail("keyword any, when or begin");
    }
    while (at_label()) e.actions.push_back(action());
    expect_keyword("end");
    e.span = from(name.span);
    return e;
  }

  // -- types ---------------------------------------------------------------

  EbType type() {
    EbType t = type_product();
    if (accept_symbol("<->")) return EbType::relation(t, type_product());
    return t;
  }

  EbType type_product() {
    EbType t = type_atom();
    while (accept_symbol("**")) t = EbType::pair(t, type_atom());
    return t;
  }

  EbType type_atom() {
    if (accept_keyword("INT")) return EbType::integer();
    if (accept_keyword("POW")) {
      expect_symbol("(");
      EbType t = type();
      expect_symbol(")");
      return EbType::set_of(t);
    }
    if (accept_symbol("(")) {
      EbType t = type();
      expect_symbol(")");
      return t;
    }
    return EbType::carrier(expect_ident("a type").text);
  }

  // -- predicates ----------------------------------------------------------

  PredPtr predicate() {
    SourceSpan start = peek().span;
    auto lhs = conjunction();
    while (accept_keyword("or")) lhs = make_or(lhs, conjunction(), from(start));
    return lhs;
  }

  PredPtr conjunction() {
    SourceSpan start = peek().span;
    auto lhs = negation();
    while (accept_symbol("&")) lhs = make_and(lhs, negation(), from(start));
    return lhs;
  }

  PredPtr negation() {
    SourceSpan start = peek().span;
    if (accept_keyword("not")) return make_not(negation(), from(start));
    return atom();
  }

  static bool is_comparison_symbol(const Token& t) {
    static const std::set<std::string, std::less<>> ops = {"=", "/=", ":", "<:", "<", "<="};
    return t.kind == TokKind::Symbol && ops.contains(t.text);
  }

  PredPtr atom() {
    SourceSpan start = peek().span;
    if (accept_keyword("true")) return make_truth(true, from(start));
    if (accept_keyword("false")) return make_truth(false, from(start));
    if (is_symbol("(")) {
      // Either a parenthesised predicate or a comparison whose left operand
      // starts with '('. Try the predicate first and fall back.
      std::size_t saved = pos_;
      try {
        take();
        auto p = predicate();
        expect_symbol(")");
        if (!continues_expression(peek())) return p;
      } catch (const ParseError& pred_error) {
        pos_ = saved;
        try {
          return comparison();
        } catch (const ParseError& cmp_error) {
          if (cmp_error.span().begin >= pred_error.span().begin) throw;
          throw pred_error;
        }
      }
      pos_ = saved;
    }
    return comparison();
  }

  static bool continues_expression(const Token& t) {
    if (is_comparison_symbol(t)) return true;
    static const std::set<std::string, std::less<>> ops = {
        "\\/", "/\\", "\\", "<<|", "<|", "**", "+", "-", "*", "|->", "(", "[",
        "<->", "<<->", "<->>", "<<->>", "+->", "-->", "->>"};
    return t.kind == TokKind::Symbol && ops.contains(t.text);
  }

  PredPtr comparison() {
    SourceSpan start = peek().span;
    auto lhs = expression();
    const Token& op = peek();
    if (!is_comparison_symbol(op)) fail("a comparison operator (=, /=, :, <:, <, <=)");
    take();
    PredKind kind = op.text == "="    ? PredKind::Eq
                    : op.text == "/=" ? PredKind::Neq
                    : op.text == ":"  ? PredKind::In
                    : op.text == "<:" ? PredKind::Subset
                    : op.text == "<"  ? PredKind::Lt
                                      : PredKind::Le;
    auto rhs = expression();
    return make_compare(kind, lhs, rhs, from(start));
  }

  // -- expressions ---------------------------------------------------------

  ExprPtr expression() {
    SourceSpan start = peek().span;
    auto lhs = relation_set();
    if (accept_symbol("|->")) return make_binary(ExprKind::Maplet, lhs, relation_set(), from(start));
    return lhs;
  }

  ExprPtr relation_set() {
    static const std::array<std::pair<std::string_view, ExprKind>, 7> ops = {{
        {"<->", ExprKind::Relation},
        {"<<->", ExprKind::TotalRelation},
        {"<->>", ExprKind::SurjectiveRelation},
        {"<<->>", ExprKind::TotalSurjRelation},
        {"+->", ExprKind::PartialFunction},
        {"-->", ExprKind::TotalFunction},
        {"->>", ExprKind::TotalSurjection},
    }};
    SourceSpan start = peek().span;
    auto lhs = set_expression();
    for (const auto& [sym, kind] : ops)
      if (accept_symbol(sym)) return make_binary(kind, lhs, set_expression(), from(start));
    return lhs;
  }

  ExprPtr set_expression() {
    static const std::array<std::pair<std::string_view, ExprKind>, 6> ops = {{
        {"\\/", ExprKind::Union},
        {"/\\", ExprKind::Inter},
        {"\\", ExprKind::Diff},
        {"<<|", ExprKind::DomSub},
        {"<|", ExprKind::DomRes},
        {"**", ExprKind::Cross},
    }};
    SourceSpan start = peek().span;
    auto lhs = additive();
    for (;;) {
      bool matched = false;
      for (const auto& [sym, kind] : ops) {
        if (accept_symbol(sym)) {
          lhs = make_binary(kind, lhs, additive(), from(start));
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  ExprPtr additive() {
    SourceSpan start = peek().span;
    auto lhs = multiplicative();
    for (;;) {
      if (accept_symbol("+"))
        lhs = make_binary(ExprKind::Add, lhs, multiplicative(), from(start));
      else if (accept_symbol("-"))
        lhs = make_binary(ExprKind::Sub, lhs, multiplicative(), from(start));
      else
        return lhs;
    }
  }

  ExprPtr multiplicative() {
    SourceSpan start = peek().span;
    auto lhs = postfix();
    while (accept_symbol("*")) lhs = make_binary(ExprKind::Mul, lhs, postfix(), from(start));
    return lhs;
  }

  ExprPtr postfix() {
    SourceSpan start = peek().span;
    auto e = primary();
    for (;;) {
      if (accept_symbol("(")) {
        auto arg = expression();
        expect_symbol(")");
        e = make_binary(ExprKind::Apply, e, arg, from(start));
      } else if (accept_symbol("[")) {
        auto arg = expression();
        expect_symbol("]");
        e = make_binary(ExprKind::Image, e, arg, from(start));
      } else {
        return e;
      }
    }
  }

  ExprPtr integer(bool negative, const SourceSpan& start) {
    const Token& t = take();
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{}) throw ParseError(t.span, "an integer that fits in 64 bits", t.text);
    return make_int(negative ? -value : value, from(start));
  }

  ExprPtr primary() {
    const Token& t = peek();
    SourceSpan start = t.span;
    switch (t.kind) {
      case TokKind::Int:
        return integer(false, start);
      case TokKind::Ident:
        take();
        return make_ident(t.text, t.primed, from(start));
      case TokKind::Keyword:
        if (t.text == "INT" || t.text == "NAT") {
          take();
          return make_nullary(t.text == "INT" ? ExprKind::IntSet : ExprKind::NatSet, from(start));
        }
        if (t.text == "dom" || t.text == "ran") {
          take();
          expect_symbol("(");
          auto arg = expression();
          expect_symbol(")");
          return make_unary(t.text == "dom" ? ExprKind::Dom : ExprKind::Ran, arg, from(start));
        }
        break;
      case TokKind::Symbol:
        if (t.text == "-" && peek(1).kind == TokKind::Int) {
          take();
          return integer(true, start);
        }
        if (t.text == "(") {
          take();
          auto e = expression();
          expect_symbol(")");
          return e;
        }
        if (t.text == "{") {
          take();
          std::vector<ExprPtr> items;
          if (!is_symbol("}")) {
            do {
              items.push_back(expression());
            } while (accept_symbol(","));
          }
          expect_symbol("}");
          return make_set(std::move(items), from(start));
        }
        break;
      default:
        break;
    }
    fail("an expression");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Machine parse_machine(std::string_view text) { return Parser(text).machine(); }

PredPtr parse_predicate(std::string_view text) { return Parser(text).whole_predicate(); }

ExprPtr parse_expression(std::string_view text) { return Parser(text).whole_expression(); }

EbType parse_type(std::string_view text) { return Parser(text).whole_type(); }

}  // namespace eb2jml::eventb
