#include <doctest.h>

#include "eb2jml/eventb_parser.hpp"
#include "eb2jml/jml_model.hpp"
#include "eb2jml/translator.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace eb2jml;
using namespace eb2jml::jml;

namespace {

JmlClass translated(const std::string& file) {
  return translate_machine(eventb::parse_machine(testing::read_text(testing::source_path("machines/" + file))))
      .result;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("guard method line of the refined machine") {
  auto text = render_class(translated("ref1_permissions.ebm"));
  CHECK(text.find("public abstract boolean guard_edit_owned();") != std::string::npos);
  CHECK(text.find("assignable contents, pages, owner, viewp, editp;") != std::string::npos);
}

TEST_CASE("constant invariant and empty assignable") {
  JmlClass cls;
  cls.name = "C";
  cls.class_invariant = truth(true);
  cls.initially = truth(true);
  JmlMethodSpec run;
  run.name = "run_e";
  run.kind = JmlMethodSpec::Kind::Run;
  run.normal = {guard_call("guard_e"), AssignableClause::nothing(), truth(true)};
  run.exceptional = SpecCase{negate(guard_call("guard_e")), AssignableClause::nothing(), truth(true)};
  cls.methods.push_back(run);
  auto text = render_class(cls);
  CHECK(normalize_jml(text).find("public invariant true ;") != std::string::npos);
  CHECK(text.find("assignable \\nothing;") != std::string::npos);
  CHECK(count(text, "also") == 1);
}

TEST_CASE("expression and predicate rendering") {
  auto owner = ident("owner");
  auto c1 = ident("c1");
  CHECK(render_expr(*call(owner, "apply", {c1})) == "owner.apply(c1)");
  CHECK(render_expr(*new_pair(JmlType::integer(), JmlType::integer(), c1, c1)) ==
        "new JMLEqualsEqualsPair<Integer,Integer>(c1,c1)");
  CHECK(render_expr(*new_set(JmlType::integer(), {c1})) == "new BSet<Integer>(c1)");
  CHECK(render_expr(*arith(ExprKind::Mul, arith(ExprKind::Add, c1, int_lit(1)), int_lit(2))) ==
        "(c1 + 1) * 2");
  CHECK(render_expr(*arith(ExprKind::Sub, c1, arith(ExprKind::Sub, c1, int_lit(1)))) ==
        "c1 - (c1 - 1)");

  auto v = ident("v");
  auto eq = compare(CompareOp::Eq, v, int_lit(1));
  CHECK(render_predicate(*old_pred(eq)) == "\\old(v == 1)");
  CHECK(render_predicate(*negate(eq)) == "!(v == 1)");
  CHECK(render_predicate(*disj({eq, conj({eq, eq})})) == "v == 1 || v == 1 && v == 1");
  CHECK(render_predicate(*conj({disj({eq, eq}), eq})) == "(v == 1 || v == 1) && v == 1");
  CHECK(render_predicate(*exists("x", JmlType::integer(), eq)) == "(\\exists Integer x; v == 1)");
  CHECK(render_predicate(*result_iff(eq)) == "\\result <==> v == 1");
  CHECK(render_predicate(*conj({})) == "true");
}

TEST_CASE("no nested old and distinct becomes identifiers") {
  auto v = ident("v");
  auto p = old_pred(compare(CompareOp::Eq, v, int_lit(0)));
  CHECK_THROWS(old_pred(p));
  CHECK_THROWS(becomes("v", "v", true));
  CHECK(render_predicate(*becomes("v", "v'", true)) == "v == v'");
  CHECK(contains_old(*conj({truth(true), p})));
  CHECK_FALSE(contains_old(*truth(true)));
}

TEST_CASE("normalize_jml") {
  CHECK(normalize_jml("a  &&\n b") == "a && b");
  CHECK(normalize_jml("") == "");
  CHECK(normalize_jml("/*@ requires ((x)); */") == "requires ( x ) ;");
  CHECK(normalize_jml("(((a && b)))") == "( a && b )");
  CHECK(normalize_jml("//@ ensures \\old(v)==1;") == "ensures \\old ( v ) == 1 ;");
  CHECK(normalize_jml("f((a), b)") == "f ( ( a ) , b )");
  CHECK(normalize_jml("x <==> y") == "x <==> y");

  auto text = render_class(translated("ref1_permissions.ebm"));
  auto once = normalize_jml(text);
  CHECK(normalize_jml(once) == once);
}

TEST_CASE("rendering is deterministic and run methods have one also") {
  testing::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    auto m = testing::random_machine(rng);
    auto a = translate_machine(m).result;
    auto b = translate_machine(m).result;
    auto ta = render_class(a);
    CHECK(ta == render_class(b));
    CHECK(normalize_jml(normalize_jml(ta)) == normalize_jml(ta));
    for (const auto& method : a.methods) {
      JmlClass single;
      single.name = "X";
      single.class_invariant = truth(true);
      single.initially = truth(true);
      single.methods = {method};
      auto text = render_class(single);
      CHECK(count(text, "\nalso\n") == (method.kind == JmlMethodSpec::Kind::Run ? 1u : 0u));
    }
  }
}

TEST_CASE("types") {
  CHECK(JmlType::integer().to_string() == "Integer");
  CHECK(JmlType::bset(JmlType::integer()).to_string() == "BSet<Integer>");
  CHECK(JmlType::brelation(JmlType::integer(), JmlType::integer()).to_string() == "BRelation<Integer,Integer>");
  CHECK(JmlType::pair(JmlType::integer(), JmlType::integer()).to_string() == "JMLEqualsEqualsPair<Integer,Integer>");
}

TEST_CASE("assignable clauses") {
  CHECK(AssignableClause::nothing().permits("v") == false);
  CHECK(AssignableClause::of({"v", "w"}).permits("w"));
  CHECK_FALSE(AssignableClause::of({"v"}).permits("w"));
  CHECK(AssignableClause::everything().permits("w"));
}
