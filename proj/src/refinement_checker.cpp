#include "eb2jml/refinement_checker.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace eb2jml {

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::ResourceLimit: return "RESOURCE_LIMIT";
  }
  return "?";
}

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::DropOld: return "drop_old";
    case Mutation::WidenEnsuresTrue: return "widen_ensures_true";
    case Mutation::ShrinkAssignable: return "shrink_assignable";
    case Mutation::NegateGuardLink: return "negate_guard_link";
  }
  return "?";
}

std::optional<Mutation> mutation_from_string(const std::string& name) {
  for (auto m : {Mutation::DropOld, Mutation::WidenEnsuresTrue, Mutation::ShrinkAssignable,
                 Mutation::NegateGuardLink})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PreStateResult {
  sem::StateId a = 0;
  std::vector<sem::StateId> missing;        // in JML, not in Event-B
  std::vector<sem::StateId> missing_inv;    // same, stutter branch with invariant
  std::size_t jml = 0;
  std::size_t eb = 0;
  bool equal = true;
};

Verdict limit_verdict(std::string name, const sem::ResourceLimit& e, Clock::time_point t0) {
  Verdict v;
  v.name = std::move(name);
  v.status = Status::ResourceLimit;
  v.message = e.what();
  v.seconds = since(t0);
  return v;
}

Verdict event_verdict(const TranslationUnit& unit, const eventb::Event& e,
                      const sem::StateSpace& space, const sem::Universe& u,
                      const CheckOptions& opts) {
  auto t0 = Clock::now();
  const jml::JmlMethodSpec* run = unit.result.find_method(run_method_name(e.name));
  if (!run) throw std::invalid_argument("translation has no method " + run_method_name(e.name));

  auto eb_inv = unit.source.invariant();
  sem::EbEvent eb(e, eb_inv, space, u);
  sem::EbEvent eb_stutter(e, eb_inv, space, u, sem::EbOptions{true});
  sem::JmlMethod jm(*run, unit.result.class_invariant, sem::guard_table(unit.result), space, u);

  unsigned workers = std::max(1u, opts.workers);
  std::vector<std::vector<PreStateResult>> parts(workers);
  std::vector<sem::EvalStats> stats(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < space.size(); i += workers) {
        auto a = static_cast<sem::StateId>(i);
        bool jinv = jm.invariant_holds(a);
        bool einv = eb.invariant_holds(a);
        if (!jinv && !einv) continue;
        PreStateResult r;
        r.a = a;
        auto js = jm.successors(a, &stats[w]);
        auto es = eb.successors(a, &stats[w]);
        auto es_inv = eb_stutter.successors(a, nullptr);
        std::set_difference(js.begin(), js.end(), es.begin(), es.end(),
                            std::back_inserter(r.missing));
        std::set_difference(js.begin(), js.end(), es_inv.begin(), es_inv.end(),
                            std::back_inserter(r.missing_inv));
        r.jml = js.size();
        r.eb = einv ? es.size() : 0;
        r.equal = js == (einv ? es : std::vector<sem::StateId>{});
        parts[w].push_back(std::move(r));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::vector<PreStateResult> results;
  for (auto& p : parts)
    for (auto& r : p) results.push_back(std::move(r));
  std::sort(results.begin(), results.end(),
            [](const PreStateResult& x, const PreStateResult& y) { return x.a < y.a; });

  Verdict v;
  v.name = e.name;
  v.bisimulation = true;
  bool fail_inv = false;
  for (const auto& r : results) {
    v.jml_pairs += r.jml;
    v.eb_pairs += r.eb;
    v.bisimulation = v.bisimulation && r.equal;
    fail_inv = fail_inv || !r.missing_inv.empty();
    for (auto b : r.missing) {
      v.status = Status::Fail;
      if (v.witnesses.size() >= opts.witness_cap) continue;
      Counterexample c;
      c.event = e.name;
      c.pre = space.states[r.a];
      c.post = space.states[b];
      c.jml_side = jm.explain(r.a, b);
      c.eb_side = eb.explain(r.a, b);
      v.witnesses.push_back(std::move(c));
    }
  }
  for (const auto& s : stats) {
    v.checked_pairs += s.pairs_examined;
    v.eval_errors += s.eval_errors;
  }
  v.stutter_with_invariant = fail_inv ? Status::Fail : Status::Pass;
  v.seconds = since(t0);
  return v;
}

Verdict init_verdict(const TranslationUnit& unit, const sem::StateSpace& space,
                     const sem::Universe& u, const CheckOptions& opts) {
  auto t0 = Clock::now();
  auto eb_inv = unit.source.invariant();
  auto jml_states = sem::jml_initially_states(*unit.result.initially,
                                              *unit.result.class_invariant, space, u);
  auto eb_states = sem::eb_init_states(unit.source.initialisation, *eb_inv, space, u);
  Verdict v;
  v.name = "initialisation";
  v.checked_pairs = space.size();
  v.jml_pairs = jml_states.size();
  v.eb_pairs = eb_states.size();
  v.bisimulation = jml_states == eb_states;
  for (auto s : jml_states) {
    if (eb_states.contains(s)) continue;
    v.status = Status::Fail;
    if (v.witnesses.size() >= opts.witness_cap) continue;
    Counterexample c;
    c.event = "initialisation";
    c.pre = space.states[s];
    c.jml_side = "initially and the class invariant hold in this state";
    c.eb_side = sem::eb_pred_holds(*eb_inv, space.states[s], {}, u)
                    ? "the initialisation actions cannot produce this state"
                    : "the machine invariant fails in this state";
    v.witnesses.push_back(std::move(c));
  }
  v.stutter_with_invariant = v.status;
  v.seconds = since(t0);
  return v;
}

sem::StateSpace space_for(const TranslationUnit& unit, const sem::Universe& u) {
  return sem::enumerate_states(unit.source, u);
}

}  // namespace

Verdict check_event(const TranslationUnit& unit, const std::string& event,
                    const sem::Universe& u0, const CheckOptions& opts) {
  auto t0 = Clock::now();
  const eventb::Event* e = unit.source.find_event(event);
  if (!e) throw std::invalid_argument("no event named " + event);
  sem::Universe u = u0.for_machine(unit.source);
  try {
    auto space = space_for(unit, u);
    return event_verdict(unit, *e, space, u, opts);
  } catch (const sem::ResourceLimit& err) {
    return limit_verdict(event, err, t0);
  }
}

Verdict check_event(const eventb::Event& e, const eventb::Machine& m, const sem::Universe& u,
                    const CheckOptions& opts) {
  return check_event(translate_machine(m), e.name, u, opts);
}

Verdict check_init(const TranslationUnit& unit, const sem::Universe& u0,
                   const CheckOptions& opts) {
  auto t0 = Clock::now();
  sem::Universe u = u0.for_machine(unit.source);
  try {
    auto space = space_for(unit, u);
    return init_verdict(unit, space, u, opts);
  } catch (const sem::ResourceLimit& err) {
    return limit_verdict("initialisation", err, t0);
  }
}

Verdict check_init(const eventb::Machine& m, const sem::Universe& u, const CheckOptions& opts) {
  return check_init(translate_machine(m), u, opts);
}

Report check_translation(const TranslationUnit& unit, const sem::Universe& u0,
                         const CheckOptions& opts) {
  auto t0 = Clock::now();
  Report report;
  report.machine = unit.source.name;
  report.universe = u0.for_machine(unit.source);
  const sem::Universe& u = report.universe;

  std::optional<sem::StateSpace> space;
  std::string space_error;
  try {
    space = space_for(unit, u);
  } catch (const sem::ResourceLimit& err) {
    space_error = err.what();
  }
  auto run = [&](const std::string& name, auto&& fn) {
    auto t1 = Clock::now();
    if (!space) {
      Verdict v;
      v.name = name;
      v.status = Status::ResourceLimit;
      v.message = space_error;
      report.verdicts.push_back(std::move(v));
      return;
    }
    try {
      report.verdicts.push_back(fn());
    } catch (const sem::ResourceLimit& err) {
      report.verdicts.push_back(limit_verdict(name, err, t1));
    }
  };
  run("initialisation", [&] { return init_verdict(unit, *space, u, opts); });
  for (const auto& e : unit.source.events)
    run(e.name, [&] { return event_verdict(unit, e, *space, u, opts); });

  bool any_fail = false, any_limit = false;
  for (const auto& v : report.verdicts) {
    any_fail = any_fail || v.status == Status::Fail;
    any_limit = any_limit || v.status == Status::ResourceLimit;
  }
  report.overall = any_fail ? Status::Fail : any_limit ? Status::ResourceLimit : Status::Pass;
  report.seconds = since(t0);
  return report;
}

Report check_machine(const eventb::Machine& m, const sem::Universe& u, const CheckOptions& opts) {
  return check_translation(translate_machine(m), u, opts);
}

const Verdict* Report::find(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

namespace {

std::string sensitivity(const Report& r) {
  std::vector<std::string> changed;
  for (const auto& v : r.verdicts)
    if (v.stutter_with_invariant && v.status != Status::ResourceLimit &&
        *v.stutter_with_invariant != v.status)
      changed.push_back(v.name);
  if (changed.empty())
    return "requiring the invariant in the stuttering branch changes no verdict";
  std::string out = "requiring the invariant in the stuttering branch changes the verdict of";
  for (const auto& n : changed) out += " " + n;
  return out;
}

nlohmann::json state_json(const sem::State& s) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : s) out[k] = v.to_string();
  return out;
}

}  // namespace

std::string Report::to_text() const {
  std::ostringstream os;
  os << "machine " << machine << "\n";
  os << "universe: " << universe.describe() << "\n";
  for (const auto& v : verdicts) {
    os << v.name << ": " << to_string(v.status);
    if (v.status == Status::ResourceLimit) {
      os << " (" << v.message << ")\n";
      continue;
    }
    const char* unit = v.name == "initialisation" ? "states" : "pairs";
    os << " (jml " << unit << " " << v.jml_pairs << ", event-b " << unit << " " << v.eb_pairs
       << ", checked " << v.checked_pairs << ", bisimulation " << (v.bisimulation ? "yes" : "no");
    if (v.eval_errors) os << ", evaluation errors " << v.eval_errors;
    os << ")\n";
    for (std::size_t i = 0; i < v.witnesses.size(); ++i) {
      const auto& w = v.witnesses[i];
      os << "  witness " << i + 1 << ": pre " << sem::to_string(w.pre);
      if (w.post) os << " post " << sem::to_string(*w.post);
      os << "\n    jml:    " << w.jml_side << "\n    event-b: " << w.eb_side << "\n";
    }
  }
  os << "note: " << sensitivity(*this) << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", seconds);
  os << "time: " << buf << "s\n";
  os << "overall: " << to_string(overall) << "\n";
  return os.str();
}

std::string Report::to_json() const {
  nlohmann::json j;
  j["machine"] = machine;
  nlohmann::json uj;
  uj["int_range"] = {universe.int_lo, universe.int_hi};
  uj["carriers"] = universe.carriers;
  uj["ceiling"] = universe.ceiling;
  if (universe.max_set_card) uj["max_set_card"] = *universe.max_set_card;
  j["universe"] = uj;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : verdicts) {
    nlohmann::json vj;
    vj["name"] = v.name;
    vj["status"] = to_string(v.status);
    vj["checked_pairs"] = v.checked_pairs;
    vj["jml_size"] = v.jml_pairs;
    vj["eventb_size"] = v.eb_pairs;
    vj["bisimulation"] = v.bisimulation;
    vj["eval_errors"] = v.eval_errors;
    vj["seconds"] = v.seconds;
    if (v.stutter_with_invariant) vj["stutter_with_invariant"] = to_string(*v.stutter_with_invariant);
    if (!v.message.empty()) vj["message"] = v.message;
    vj["witnesses"] = nlohmann::json::array();
    for (const auto& w : v.witnesses) {
      nlohmann::json wj;
      wj["pre"] = state_json(w.pre);
      if (w.post) wj["post"] = state_json(*w.post);
      wj["jml_side"] = w.jml_side;
      wj["eventb_side"] = w.eb_side;
      vj["witnesses"].push_back(wj);
    }
    j["verdicts"].push_back(vj);
  }
  j["note"] = sensitivity(*this);
  j["seconds"] = seconds;
  j["overall"] = to_string(overall);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Mutations

namespace {

// Replaces every conjunct that mentions \old with `true`, looking through
// conjunctions, groups and existential quantifiers.
jml::JmlPredPtr drop_old(const jml::JmlPredPtr& p, bool& changed) {
  switch (p->kind) {
    case jml::PredKind::And: {
      std::vector<jml::JmlPredPtr> parts;
      for (const auto& o : p->operands) parts.push_back(drop_old(o, changed));
      auto out = std::make_shared<jml::JmlPredicate>(*p);
      out->operands = std::move(parts);
      return out;
    }
    case jml::PredKind::Exists:
    case jml::PredKind::Group: {
      auto out = std::make_shared<jml::JmlPredicate>(*p);
      out->operands = {drop_old(p->operands[0], changed)};
      return out;
    }
    default:
      if (jml::contains_old(*p)) {
        changed = true;
        return jml::truth(true);
      }
      return p;
  }
}

}  // namespace

TranslationUnit mutate_translation(const TranslationUnit& unit, Mutation mutation,
                                   const std::string& event) {
  TranslationUnit out = unit;
  bool changed = false;
  for (const auto& e : unit.source.events) {
    if (!event.empty() && e.name != event) continue;
    auto it = std::find_if(out.result.methods.begin(), out.result.methods.end(),
                           [&](const auto& m) { return m.name == run_method_name(e.name); });
    if (it == out.result.methods.end()) continue;
    jml::JmlMethodSpec& run = *it;
    switch (mutation) {
      case Mutation::WidenEnsuresTrue:
        if (run.normal.ensures->kind != jml::PredKind::True) changed = true;
        run.normal.ensures = jml::truth(true);
        break;
      case Mutation::DropOld:
        run.normal.ensures = drop_old(run.normal.ensures, changed);
        break;
      case Mutation::ShrinkAssignable:
        if (run.normal.assignable.kind != jml::AssignableClause::Kind::Nothing) changed = true;
        run.normal.assignable = jml::AssignableClause::nothing();
        break;
      case Mutation::NegateGuardLink:
        if (run.exceptional) {
          std::swap(run.normal.requires_clause, run.exceptional->requires_clause);
          changed = true;
        }
        break;
    }
  }
  if (!event.empty() && !unit.source.find_event(event))
    throw MutationError("no event named " + event);
  if (!changed)
    throw MutationError(std::string(to_string(mutation)) + " does not change any run method" +
                        (event.empty() ? "" : " of " + event));
  return out;
}

}  // namespace eb2jml
