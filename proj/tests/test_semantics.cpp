#include <doctest.h>

#include "eb2jml/eventb_parser.hpp"
#include "eb2jml/semantics.hpp"
#include "eb2jml/translator.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace eb2jml;
using namespace eb2jml::sem;
using eventb::EbType;

namespace {

Value I(std::int64_t v) { return Value::integer(v); }
Value P(Value a, Value b) { return Value::pair(std::move(a), std::move(b)); }
Value S(std::vector<Value> items) { return Value::set(std::move(items)); }

Universe ints(std::int64_t lo, std::int64_t hi) {
  Universe u;
  u.int_lo = lo;
  u.int_hi = hi;
  return u;
}

// A one-variable machine `v : INT` with extra invariant text and events.
eventb::Machine single(const std::string& inv, const std::string& events,
                       const std::string& init = "act1: v := 0") {
  std::string text = "machine m\n  variables v\n  invariants\n    inv1: v : INT\n";
  if (!inv.empty()) text += "    inv2: " + inv + "\n";
  text += "  events\n    initialisation\n      begin\n        " + init + "\n      end\n" + events + "end\n";
  return eventb::parse_machine(text);
}

std::set<std::pair<std::int64_t, std::int64_t>> ints_of(const Relation& r, const StateSpace& s) {
  std::set<std::pair<std::int64_t, std::int64_t>> out;
  for (auto [a, b] : r) out.insert({s.states[a].at("v").as_int(), s.states[b].at("v").as_int()});
  return out;
}

using IntRel = std::set<std::pair<std::int64_t, std::int64_t>>;

Relation event_rel(const eventb::Machine& m, const StateSpace& space, const Universe& u,
                   unsigned workers = 1) {
  return eb_event_rel(m.events.at(0), *m.invariant(), space, u, {}, workers);
}

Relation run_rel(const TranslationUnit& unit, const std::string& event, const StateSpace& space,
                 const Universe& u, unsigned workers = 1) {
  const auto& cls = unit.result;
  return jml_method_rel(*cls.find_method(run_method_name(event)), *cls.class_invariant,
                        *cls.find_method(guard_method_name(event)), space, u, workers);
}

}  // namespace

TEST_CASE("values") {
  CHECK(S({I(2), I(1), I(2)}).items().size() == 2);
  CHECK(S({I(2), I(1)}).to_string() == "{1, 2}");
  CHECK(Value::elem("PERSON", 0).to_string() == "PERSON1");
  CHECK(P(I(1), I(2)).to_string() == "(1 |-> 2)");
  CHECK(S({}).to_string() == "{}");
  CHECK(I(1) < I(2));
  CHECK(S({I(1)}) == S({I(1), I(1)}));
  CHECK(to_string(State{{"v", I(1)}, {"s", S({})}}) == "{s = {}, v = 1}");
}

TEST_CASE("Event-B expressions") {
  Universe u = ints(0, 3);
  auto eval = [&](const std::string& text, const State& s, const Env& env = {}) {
    return eval_expr(*eventb::parse_expression(text), s, env, u);
  };
  State s{{"pages", S({P(I(1), I(1)), P(I(1), I(2))})}, {"owner", S({P(I(5), I(7))})}};
  CHECK(eval("pages[{c1}]", s, {{"c1", I(1)}}) == S({I(1), I(2)}));
  CHECK(eval("{1} <<| {1 |-> 2, 3 |-> 4}", {}) == S({P(I(3), I(4))}));
  CHECK(eval("{1} <| {1 |-> 2, 3 |-> 4}", {}) == S({P(I(1), I(2))}));
  CHECK(eval("owner(c1)", s, {{"c1", I(5)}}) == I(7));
  CHECK_THROWS_AS(eval("owner(c1)", s, {{"c1", I(1)}}), EvalError);
  CHECK_THROWS_AS(eval("pages(c1)", s, {{"c1", I(1)}}), EvalError);
  CHECK(eval("dom(pages) \\/ ran(owner)", s) == S({I(1), I(7)}));
  CHECK(eval("{1, 2} ** {3}", {}) == S({P(I(1), I(3)), P(I(2), I(3))}));
  CHECK(eval("(1 + 2) * 3 - 4", {}) == I(5));
  CHECK(eval("{1, 2} \\ {2} /\\ {1}", {}) == S({I(1)}));
}

TEST_CASE("Event-B predicates") {
  Universe u = ints(0, 1);
  u.carriers = {{"PERSON", 2}};
  auto holds = [&](const std::string& text, const State& s, const Env& env = {}) {
    return eb_pred_holds(*eventb::parse_predicate(text), s, env, u);
  };
  Value p1 = Value::elem("PERSON", 0), p2 = Value::elem("PERSON", 1);
  CHECK(holds("v = 0", {{"v", I(0)}}));
  CHECK(holds("p1 : PERSON \\ persons", {{"persons", S({p1})}}, {{"p1", p2}}));
  CHECK_FALSE(holds("owner <: pages", {{"owner", S({P(I(1), I(1))})}, {"pages", S({})}}));
  // INT and NAT are decided arithmetically, not by the finite range.
  CHECK(holds("5 : INT", {}));
  CHECK(holds("5 : NAT", {}));
  CHECK_FALSE(holds("-1 : NAT", {}));
  CHECK(holds("r : PERSON +-> PERSON", {{"r", S({P(p1, p2)})}}));
  CHECK_FALSE(holds("r : PERSON --> PERSON", {{"r", S({P(p1, p2)})}}));
  CHECK_FALSE(holds("r : PERSON +-> PERSON", {{"r", S({P(p1, p2), P(p1, p1)})}}));
  CHECK(holds("r : PERSON <<->> PERSON", {{"r", S({P(p1, p2), P(p2, p1)})}}));
  CHECK_FALSE(holds("r : PERSON <->> PERSON", {{"r", S({P(p1, p2)})}}));
  CHECK(holds("r : PERSON ->> {x}", {{"r", S({P(p1, p2), P(p2, p2)})}}, {{"x", p2}}));
}

TEST_CASE("state enumeration") {
  Universe u = ints(0, 1);
  u.carriers = {{"P", 2}};
  CHECK(enumerate_states({{"v", EbType::integer()}}, u).size() == 2);
  CHECK(enumerate_states({{"s", EbType::set_of(EbType::carrier("P"))}}, u).size() == 4);
  CHECK(enumerate_states({{"r", EbType::relation(EbType::carrier("P"), EbType::carrier("P"))}}, u)
            .size() == 16);
  auto space = enumerate_states({{"v", EbType::integer()}, {"w", EbType::integer()}}, u);
  CHECK(space.size() == 4);
  for (StateId i = 0; i < space.size(); ++i) CHECK(space.find(space.states[i]) == i);

  u.ceiling = 15;
  CHECK_THROWS_AS(
      enumerate_states({{"r", EbType::relation(EbType::carrier("P"), EbType::carrier("P"))}}, u),
      ResourceLimit);
}

TEST_CASE("event relations") {
  Universe u = ints(0, 1);
  SUBCASE("guarded assignment") {
    auto m = single("", "    e\n      when\n        grd1: v = 0\n      then\n        act1: v := 1\n      end\n");
    auto space = enumerate_states(m, u);
    CHECK(ints_of(event_rel(m, space, u), space) == IntRel{{0, 1}, {1, 1}});
  }
  SUBCASE("guard false everywhere stutters") {
    auto m = single("", "    e\n      when\n        grd1: false\n      then\n        act1: v := 1\n      end\n");
    auto space = enumerate_states(m, u);
    CHECK(ints_of(event_rel(m, space, u), space) == IntRel{{0, 0}, {1, 1}});
  }
  SUBCASE("nondeterministic choice") {
    auto m = single("", "    e\n      begin\n        act1: v :| v' = 0 or v' = 1\n      end\n");
    auto space = enumerate_states(m, u);
    CHECK(ints_of(event_rel(m, space, u), space) == IntRel{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  }
}

TEST_CASE("assignment relations") {
  Universe u = ints(0, 1);
  auto rel = [&](const std::string& inv, const std::string& act) {
    auto m = single(inv, "    e\n      begin\n        act1: " + act + "\n      end\n");
    auto space = enumerate_states(m, u);
    return ints_of(eb_assg_rel(m.events[0].actions, *m.invariant(), space, u), space);
  };
  CHECK(rel("", "v :| v' = v") == IntRel{{0, 0}, {1, 1}});
  CHECK(rel("", "v := 1") == IntRel{{0, 1}, {1, 1}});
  CHECK(rel("v = 0", "v := 1").empty());
}

TEST_CASE("initial states") {
  Universe u = ints(0, 1);
  auto init = [&](const std::string& inv, const std::string& act) {
    auto m = single(inv, "", act);
    auto space = enumerate_states(m, u);
    std::set<std::int64_t> out;
    for (auto id : eb_init_states(m.initialisation, *m.invariant(), space, u))
      out.insert(space.states[id].at("v").as_int());
    return out;
  };
  CHECK(init("", "act1: v := 0") == std::set<std::int64_t>{0});
  CHECK(init("v = 1", "act1: v :| v' = 0 or v' = 1") == std::set<std::int64_t>{1});
  CHECK(init("v /= v", "act1: v := 0").empty());
}

TEST_CASE("JML predicates") {
  Universe u = ints(0, 3);
  using namespace eb2jml::jml;
  auto v = ident("v");
  auto eq1 = compare(CompareOp::Eq, v, int_lit(1));
  CHECK(jml_pred_holds(*old_pred(eq1), {{"v", I(1)}}, {{"v", I(0)}}, {}, u));
  CHECK_FALSE(jml_pred_holds(*eq1, {{"v", I(1)}}, {{"v", I(0)}}, {}, u));
  CHECK(jml_pred_holds(*becomes("v", "v'", true), {}, {{"v", I(3)}}, {{"v'", I(3)}}, u));
  CHECK_FALSE(jml_pred_holds(*becomes("v", "v'", true), {}, {{"v", I(2)}}, {{"v'", I(3)}}, u));
  CHECK(jml_pred_holds(*exists("x", JmlType::integer(), compare(CompareOp::Eq, ident("x"), int_lit(2))),
                       {}, {}, {}, u));
  CHECK_FALSE(jml_pred_holds(
      *exists("x", JmlType::integer(), compare(CompareOp::Eq, ident("x"), int_lit(4))), {}, {}, {}, u));
  auto s = ident("s");
  CHECK(jml_pred_holds(*test(call(s, "isEmpty")), {}, {{"s", S({})}}, {}, u));
  CHECK(jml_pred_holds(*test(call(s, "has", {int_lit(2)})), {}, {{"s", S({I(2)})}}, {}, u));
  CHECK(jml_pred_holds(
      *test(call(call(s, "union", {new_set(JmlType::integer(), {int_lit(1)})}), "equals",
                 {new_set(JmlType::integer(), {int_lit(1), int_lit(2)})})),
      {}, {{"s", S({I(2)})}}, {}, u));
}

TEST_CASE("translated method relations") {
  Universe u = ints(0, 1);
  auto m = single("", "    e\n      when\n        grd1: v = 0\n      then\n        act1: v := 1\n      end\n");
  auto unit = translate_machine(m);
  auto space = enumerate_states(m, u);
  CHECK(ints_of(run_rel(unit, "e", space, u), space) == IntRel{{0, 1}, {1, 1}});

  SUBCASE("both requires false leaves only the invariant") {
    auto& run = unit.result.methods[1];
    run.normal.requires_clause = jml::truth(false);
    run.exceptional->requires_clause = jml::truth(false);
    CHECK(ints_of(run_rel(unit, "e", space, u), space) == IntRel{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  }
  SUBCASE("unsatisfiable case-1 ensures removes the enabled pre-state") {
    unit.result.methods[1].normal.ensures = jml::truth(false);
    CHECK(ints_of(run_rel(unit, "e", space, u), space) == IntRel{{1, 1}});
  }
}

TEST_CASE("initially states") {
  Universe u = ints(0, 1);
  u.carriers = {{"P", 2}};
  auto m = eventb::parse_machine(
      "machine m sets P variables s invariants i1: s <: P events initialisation begin a1: s := {} "
      "end end");
  auto unit = translate_machine(m);
  auto space = enumerate_states(m, u);
  auto states = jml_initially_states(*unit.result.initially, *unit.result.class_invariant, space, u);
  REQUIRE(states.size() == 1);
  CHECK(space.states[*states.begin()].at("s") == S({}));
  CHECK(jml_initially_states(*jml::truth(false), *unit.result.class_invariant, space, u).empty());

  auto refined = eventb::parse_machine(
      testing::read_text(testing::source_path("machines/ref1_permissions.ebm")));
  Universe tiny = ints(0, 0);
  tiny.carriers = {{"PERSON", 1}, {"CONTENTS", 1}};
  auto rspace = enumerate_states(refined, tiny);
  auto runit = translate_machine(refined);
  auto rstates = jml_initially_states(*runit.result.initially, *runit.result.class_invariant, rspace, tiny);
  REQUIRE(rstates.size() == 1);
  for (const auto& [name, value] : rspace.states[*rstates.begin()]) CHECK(value == S({}));
}

TEST_CASE("deterministic and nondeterministic forms agree") {
  testing::Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    testing::IntEventCase c = testing::random_int_event(rng);
    std::string e = c.rhs.text();
    if (e.find('x') != std::string::npos) continue;
    Universe u = ints(-1, 2);
    auto det = single("", "    e\n      begin\n        act1: v := " + e + "\n      end\n");
    auto nondet = single("", "    e\n      begin\n        act1: v :| v' = " + e + "\n      end\n");
    auto space = enumerate_states(det, u);
    CHECK(eb_assg_rel(det.events[0].actions, *det.invariant(), space, u) ==
          eb_assg_rel(nondet.events[0].actions, *nondet.invariant(), space, u));
  }
}

TEST_CASE("random events: stuttering, frames, old neutrality, workers") {
  testing::Rng rng(52);
  for (int i = 0; i < 100; ++i) {
    testing::IntEventCase c = testing::random_int_event(rng);
    auto m = eventb::parse_machine(c.machine_text());
    Universe u = ints(0, 2);
    auto space = enumerate_states(m, u);
    const auto& e = m.events[0];
    auto rel = event_rel(m, space, u);
    EbEvent eb(e, m.invariant(), space, u);

    for (StateId a = 0; a < space.size(); ++a) {
      if (eb.enabled(a).empty() && eb.invariant_holds(a)) CHECK(rel.contains({a, a}));
    }

    auto unit = translate_machine(m);
    auto jrel = run_rel(unit, "e", space, u);
    const auto& guard = *unit.result.find_method(guard_method_name("e"));
    for (auto [a, b] : jrel) {
      if (!jml_guard_holds(guard, space.states[a], u)) CHECK(a == b);
      CHECK(rel.contains({a, b}));
    }

    // With equal pre- and post-state, \old changes nothing.
    auto body = guard.normal.ensures->operands.at(0);
    for (const auto& s : space.states) {
      CHECK(jml_pred_holds(*body, s, s, {}, u) == jml_pred_holds(*jml::old_pred(body), s, s, {}, u));
      CHECK(jml_pred_holds(*unit.result.class_invariant, s, s, {}, u) ==
            jml_pred_holds(*jml::old_pred(unit.result.class_invariant), s, s, {}, u));
    }

    CHECK(event_rel(m, space, u, 3) == rel);
    CHECK(run_rel(unit, "e", space, u, 3) == jrel);
  }
}

TEST_CASE("simultaneous swap") {
  auto m = eventb::parse_machine(testing::read_text(testing::source_path("machines/swap.ebm")));
  Universe u = ints(0, 2);
  auto space = enumerate_states(m, u);
  auto rel = eb_assg_rel(m.find_event("swap")->actions, *m.invariant(), space, u);
  CHECK(rel.size() == 9);
  for (auto [a, b] : rel) {
    CHECK(space.states[b].at("x") == space.states[a].at("y"));
    CHECK(space.states[b].at("y") == space.states[a].at("x"));
  }
}

TEST_CASE("jml method relation respects the ceiling") {
  auto m = eventb::parse_machine(testing::read_text(testing::source_path("machines/social.ebm")));
  Universe u = ints(0, 1);
  u.carriers = {{"PERSON", 2}, {"CONTENTS", 2}};
  auto space = enumerate_states(m, u);
  auto unit = translate_machine(m);
  u.ceiling = 100;
  CHECK_THROWS_AS(run_rel(unit, "create_account", space, u), ResourceLimit);
}
