#include "eb2jml/semantics.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

namespace eb2jml::sem {

using eventb::EbType;

// ---------------------------------------------------------------------------
// Values

Value Value::integer(std::int64_t v) {
  Value out;
  out.num_ = v;
  return out;
}

Value Value::elem(std::string carrier, std::int64_t index) {
  Value out;
  out.kind_ = Kind::Elem;
  out.carrier_ = std::move(carrier);
  out.num_ = index;
  return out;
}

Value Value::boolean(bool b) {
  Value out;
  out.kind_ = Kind::Bool;
  out.num_ = b ? 1 : 0;
  return out;
}

Value Value::pair(Value first, Value second) {
  Value out;
  out.kind_ = Kind::Pair;
  out.items_ = std::make_shared<const std::vector<Value>>(
      std::vector<Value>{std::move(first), std::move(second)});
  return out;
}

Value Value::set(std::vector<Value> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  Value out;
  out.kind_ = Kind::Set;
  out.items_ = std::make_shared<const std::vector<Value>>(std::move(items));
  return out;
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) throw EvalError("expected an integer, found " + to_string());
  return num_;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw EvalError("expected a boolean, found " + to_string());
  return num_ != 0;
}

const Value& Value::first() const {
  if (kind_ != Kind::Pair) throw EvalError("expected a pair, found " + to_string());
  return (*items_)[0];
}

const Value& Value::second() const {
  if (kind_ != Kind::Pair) throw EvalError("expected a pair, found " + to_string());
  return (*items_)[1];
}

const std::vector<Value>& Value::items() const {
  if (kind_ != Kind::Set) throw EvalError("expected a set, found " + to_string());
  return *items_;
}

bool Value::contains(const Value& v) const {
  const auto& xs = items();
  return std::binary_search(xs.begin(), xs.end(), v);
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Int:
      return std::to_string(num_);
    case Kind::Elem:
      return carrier_ + std::to_string(num_ + 1);
    case Kind::Bool:
      return num_ ? "true" : "false";
    case Kind::Pair:
      return "(" + (*items_)[0].to_string() + " |-> " + (*items_)[1].to_string() + ")";
    case Kind::Set: {
      std::string out = "{";
      for (std::size_t i = 0; i < items_->size(); ++i) {
        if (i) out += ", ";
        out += (*items_)[i].to_string();
      }
      return out + "}";
    }
  }
  return "?";
}

std::strong_ordering Value::operator<=>(const Value& o) const {
  if (kind_ != o.kind_) return kind_ <=> o.kind_;
  switch (kind_) {
    case Kind::Int:
    case Kind::Bool:
      return num_ <=> o.num_;
    case Kind::Elem:
      if (auto c = carrier_ <=> o.carrier_; c != 0) return c;
      return num_ <=> o.num_;
    case Kind::Pair:
    case Kind::Set:
      if (items_ == o.items_) return std::strong_ordering::equal;
      return std::lexicographical_compare_three_way(items_->begin(), items_->end(),
                                                    o.items_->begin(), o.items_->end());
  }
  return std::strong_ordering::equal;
}

std::string to_string(const State& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (!first) out += ", ";
    first = false;
    out += k + " = " + v.to_string();
  }
  return out + "}";
}

ResourceLimit::ResourceLimit(const std::string& what, std::uint64_t count, std::uint64_t ceiling)
    : std::runtime_error(what + ": " + std::to_string(count) + " exceeds the ceiling of " +
                         std::to_string(ceiling)),
      count_(count),
      ceiling_(ceiling) {}

// ---------------------------------------------------------------------------
// Universe

namespace {

// Saturating product so huge spaces are reported instead of overflowing.
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) return UINT64_MAX;
  return out;
}

std::uint64_t binomial_sum(std::size_t n, std::size_t k) {
  std::uint64_t total = 0, c = 1;
  for (std::size_t i = 0; i <= std::min(n, k); ++i) {
    total += c;
    c = sat_mul(c, n - i) / (i + 1);
  }
  return total;
}

std::vector<Value> powerset(const std::vector<Value>& base, const Universe& u,
                            const std::string& what) {
  std::size_t n = base.size();
  std::uint64_t count = n >= 63 ? UINT64_MAX : (std::uint64_t{1} << n);
  if (u.max_set_card) count = std::min(count, binomial_sum(n, *u.max_set_card));
  if (count > u.ceiling) throw ResourceLimit("domain of " + what, count, u.ceiling);
  std::vector<Value> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (u.max_set_card && static_cast<std::size_t>(__builtin_popcountll(mask)) > *u.max_set_card)
      continue;
    std::vector<Value> items;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) items.push_back(base[i]);
    out.push_back(Value::set(std::move(items)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Value> product(const std::vector<Value>& a, const std::vector<Value>& b,
                           const Universe& u) {
  std::uint64_t count = sat_mul(a.size(), b.size());
  if (count > u.ceiling) throw ResourceLimit("pair domain", count, u.ceiling);
  std::vector<Value> out;
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(Value::pair(x, y));
  return out;
}

}  // namespace

Universe Universe::for_machine(const eventb::Machine& m, int default_size) const {
  Universe out = *this;
  for (const auto& c : m.carrier_sets) out.carriers.emplace(c.name, default_size);
  return out;
}

std::vector<Value> Universe::ints() const {
  std::vector<Value> out;
  for (std::int64_t i = int_lo; i <= int_hi; ++i) out.push_back(Value::integer(i));
  return out;
}

std::vector<Value> Universe::carrier_elements(const std::string& name) const {
  auto it = carriers.find(name);
  if (it == carriers.end()) throw EvalError("no cardinality given for carrier set " + name);
  std::vector<Value> out;
  for (int i = 0; i < it->second; ++i) out.push_back(Value::elem(name, i));
  return out;
}

std::vector<Value> Universe::domain(const EbType& t) const {
  switch (t.kind()) {
    case EbType::Kind::Integer:
      return ints();
    case EbType::Kind::Carrier:
      return carrier_elements(t.carrier_name());
    case EbType::Kind::Pair:
      return product(domain(t.first()), domain(t.second()), *this);
    case EbType::Kind::Set:
      return powerset(domain(t.element()), *this, t.to_string());
    case EbType::Kind::Wildcard:
      break;
  }
  throw EvalError("type " + t.to_string() + " has no finite interpretation");
}

std::vector<Value> Universe::jml_domain(const jml::JmlType& t) const {
  switch (t.kind()) {
    case jml::JmlType::Kind::Integer: {
      auto out = ints();
      for (const auto& [name, size] : carriers) {
        auto xs = carrier_elements(name);
        out.insert(out.end(), xs.begin(), xs.end());
      }
      return out;
    }
    case jml::JmlType::Kind::Pair:
      return product(jml_domain(t.args()[0]), jml_domain(t.args()[1]), *this);
    case jml::JmlType::Kind::BSet:
      return powerset(jml_domain(t.args()[0]), *this, t.to_string());
    case jml::JmlType::Kind::BRelation:
      return powerset(product(jml_domain(t.args()[0]), jml_domain(t.args()[1]), *this), *this,
                      t.to_string());
  }
  return {};
}

std::string Universe::describe() const {
  std::ostringstream os;
  os << "ints [" << int_lo << ".." << int_hi << "]";
  for (const auto& [name, size] : carriers) os << ", " << name << "=" << size;
  if (max_set_card) os << ", max set size " << *max_set_card;
  os << ", ceiling " << ceiling;
  return os.str();
}

std::optional<StateId> StateSpace::find(const State& s) const {
  auto it = index.find(s);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

StateSpace enumerate_states(const std::vector<std::pair<std::string, EbType>>& vars,
                            const Universe& u) {
  StateSpace space;
  space.vars = vars;
  std::vector<std::vector<Value>> domains;
  std::uint64_t count = 1;
  for (const auto& [name, type] : vars) {
    domains.push_back(u.domain(type));
    count = sat_mul(count, domains.back().size());
    if (count > u.ceiling) throw ResourceLimit("state space", count, u.ceiling);
  }
  if (count == 0) return space;
  std::vector<std::size_t> digit(vars.size(), 0);
  for (std::uint64_t n = 0; n < count; ++n) {
    State s;
    for (std::size_t i = 0; i < vars.size(); ++i) s.emplace(vars[i].first, domains[i][digit[i]]);
    space.index.emplace(s, static_cast<StateId>(space.states.size()));
    space.states.push_back(std::move(s));
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++digit[i] < domains[i].size()) break;
      digit[i] = 0;
    }
  }
  return space;
}

StateSpace enumerate_states(const eventb::Machine& m, const Universe& u) {
  std::vector<std::pair<std::string, EbType>> vars;
  for (const auto& v : m.variables) {
    if (!v.type) throw EvalError("variable " + v.name + " has no type");
    vars.emplace_back(v.name, *v.type);
  }
  return enumerate_states(vars, u);
}

// ---------------------------------------------------------------------------
// Shared set algebra

namespace {

Value set_union(const Value& a, const Value& b) {
  std::vector<Value> out = a.items();
  out.insert(out.end(), b.items().begin(), b.items().end());
  return Value::set(std::move(out));
}

Value set_inter(const Value& a, const Value& b) {
  std::vector<Value> out;
  for (const auto& x : a.items())
    if (b.contains(x)) out.push_back(x);
  return Value::set(std::move(out));
}

Value set_diff(const Value& a, const Value& b) {
  std::vector<Value> out;
  for (const auto& x : a.items())
    if (!b.contains(x)) out.push_back(x);
  return Value::set(std::move(out));
}

bool subset(const Value& a, const Value& b) {
  const auto& xs = a.items();
  return std::all_of(xs.begin(), xs.end(), [&](const Value& x) { return b.contains(x); });
}

Value dom_filter(const Value& s, const Value& r, bool keep_members) {
  std::vector<Value> out;
  for (const auto& p : r.items())
    if (s.contains(p.first()) == keep_members) out.push_back(p);
  return Value::set(std::move(out));
}

Value cross(const Value& a, const Value& b) {
  std::vector<Value> out;
  for (const auto& x : a.items())
    for (const auto& y : b.items()) out.push_back(Value::pair(x, y));
  return Value::set(std::move(out));
}

Value image(const Value& r, const Value& s) {
  std::vector<Value> out;
  for (const auto& p : r.items())
    if (s.contains(p.first())) out.push_back(p.second());
  return Value::set(std::move(out));
}

Value apply(const Value& f, const Value& x) {
  const Value* found = nullptr;
  for (const auto& p : f.items()) {
    if (p.first() == x) {
      if (found) throw EvalError("apply undefined: relation is not functional at " + x.to_string());
      found = &p.second();
    }
  }
  if (!found) throw EvalError("apply undefined: " + x.to_string() + " is outside the domain");
  return *found;
}

Value dom(const Value& r) {
  std::vector<Value> out;
  for (const auto& p : r.items()) out.push_back(p.first());
  return Value::set(std::move(out));
}

Value ran(const Value& r) {
  std::vector<Value> out;
  for (const auto& p : r.items()) out.push_back(p.second());
  return Value::set(std::move(out));
}

bool is_function(const Value& r) {
  const auto& xs = r.items();
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i].first() == xs[i - 1].first()) return false;  // pairs sorted by first
  return true;
}

std::int64_t arith(char op, std::int64_t a, std::int64_t b) {
  std::int64_t out;
  bool overflow = op == '+'   ? __builtin_add_overflow(a, b, &out)
                  : op == '-' ? __builtin_sub_overflow(a, b, &out)
                              : __builtin_mul_overflow(a, b, &out);
  if (overflow) throw EvalError("integer overflow");
  return out;
}

Value nat_set(const Universe& u) {
  std::vector<Value> out;
  for (std::int64_t i = std::max<std::int64_t>(0, u.int_lo); i <= u.int_hi; ++i)
    out.push_back(Value::integer(i));
  return Value::set(std::move(out));
}

// Membership in INT / NAT is decided arithmetically, not through the
// (range-limited) finite set.
std::optional<bool> builtin_member(bool is_int_set, bool is_nat_set, const Value& x) {
  if (!is_int_set && !is_nat_set) return std::nullopt;
  if (x.kind() != Value::Kind::Int) return false;
  return is_int_set || x.as_int() >= 0;
}

const Value* lookup(const std::string& key, const Env& env) {
  auto it = env.find(key);
  return it == env.end() ? nullptr : &it->second;
}

Value lookup_ident(const std::string& name, bool primed, const State& state, const Env& env,
                   const Universe& u) {
  if (primed) {
    if (const Value* v = lookup(name + "'", env)) return *v;
    throw EvalError("unbound identifier " + name + "'");
  }
  if (const Value* v = lookup(name, env)) return *v;
  if (auto it = state.find(name); it != state.end()) return it->second;
  if (u.is_carrier(name)) return Value::set(u.carrier_elements(name));
  throw EvalError("unbound identifier " + name);
}

}  // namespace

// ---------------------------------------------------------------------------
// Event-B evaluation

Value eval_expr(const eventb::Expression& e, const State& state, const Env& env,
                const Universe& u) {
  using K = eventb::ExprKind;
  auto sub = [&](std::size_t i) { return eval_expr(*e.operands[i], state, env, u); };
  switch (e.kind) {
    case K::IntLit:
      return Value::integer(e.value);
    case K::Ident:
      return lookup_ident(e.name, e.primed, state, env, u);
    case K::IntSet:
      return Value::set(u.ints());
    case K::NatSet:
      return nat_set(u);
    case K::EmptySet:
      return Value::set({});
    case K::SetEnum: {
      std::vector<Value> items;
      for (std::size_t i = 0; i < e.operands.size(); ++i) items.push_back(sub(i));
      return Value::set(std::move(items));
    }
    case K::Union:
      return set_union(sub(0), sub(1));
    case K::Inter:
      return set_inter(sub(0), sub(1));
    case K::Diff:
      return set_diff(sub(0), sub(1));
    case K::DomSub:
      return dom_filter(sub(0), sub(1), false);
    case K::DomRes:
      return dom_filter(sub(0), sub(1), true);
    case K::Cross:
      return cross(sub(0), sub(1));
    case K::Maplet:
      return Value::pair(sub(0), sub(1));
    case K::Add:
      return Value::integer(arith('+', sub(0).as_int(), sub(1).as_int()));
    case K::Sub:
      return Value::integer(arith('-', sub(0).as_int(), sub(1).as_int()));
    case K::Mul:
      return Value::integer(arith('*', sub(0).as_int(), sub(1).as_int()));
    case K::Image:
      return image(sub(0), sub(1));
    case K::Apply:
      return apply(sub(0), sub(1));
    case K::Dom:
      return dom(sub(0));
    case K::Ran:
      return ran(sub(0));
    default:
      throw EvalError("relation-set constructor used as a value");
  }
}

namespace {

bool relation_member(const Value& r, eventb::ExprKind kind, const Value& a, const Value& b) {
  using K = eventb::ExprKind;
  bool dom_eq = dom(r) == a, dom_sub = subset(dom(r), a);
  bool ran_eq = ran(r) == b, ran_sub = subset(ran(r), b);
  switch (kind) {
    case K::Relation: return dom_sub && ran_sub;
    case K::TotalRelation: return dom_eq && ran_sub;
    case K::SurjectiveRelation: return dom_sub && ran_eq;
    case K::TotalSurjRelation: return dom_eq && ran_eq;
    case K::PartialFunction: return is_function(r) && dom_sub && ran_sub;
    case K::TotalFunction: return is_function(r) && dom_eq && ran_sub;
    case K::TotalSurjection: return is_function(r) && dom_eq && ran_eq;
    default: break;
  }
  throw EvalError("not a relation-set constructor");
}

}  // namespace

bool eb_pred_holds(const eventb::Predicate& p, const State& state, const Env& env,
                   const Universe& u) {
  using K = eventb::PredKind;
  auto term = [&](std::size_t i) { return eval_expr(*p.terms[i], state, env, u); };
  auto sub = [&](std::size_t i) { return eb_pred_holds(*p.operands[i], state, env, u); };
  switch (p.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::And:
      return sub(0) && sub(1);
    case K::Or:
      return sub(0) || sub(1);
    case K::Not:
      return !sub(0);
    case K::Eq:
      return term(0) == term(1);
    case K::Neq:
      return term(0) != term(1);
    case K::Lt:
      return term(0).as_int() < term(1).as_int();
    case K::Le:
      return term(0).as_int() <= term(1).as_int();
    case K::In: {
      const auto& s = *p.terms[1];
      Value x = term(0);
      if (eventb::is_relation_set_kind(s.kind)) {
        return relation_member(x, s.kind, eval_expr(*s.operands[0], state, env, u),
                               eval_expr(*s.operands[1], state, env, u));
      }
      if (auto b = builtin_member(s.kind == eventb::ExprKind::IntSet,
                                  s.kind == eventb::ExprKind::NatSet, x))
        return *b;
      return term(1).contains(x);
    }
    case K::Subset: {
      const auto& s = *p.terms[1];
      Value a = term(0);
      if (s.kind == eventb::ExprKind::IntSet || s.kind == eventb::ExprKind::NatSet) {
        const auto& xs = a.items();
        return std::all_of(xs.begin(), xs.end(), [&](const Value& x) {
          return *builtin_member(s.kind == eventb::ExprKind::IntSet, true, x);
        });
      }
      return subset(a, term(1));
    }
  }
  return false;
}

std::vector<Env> valuations(const std::vector<std::string>& names,
                            const std::vector<std::vector<Value>>& domains) {
  std::vector<Env> out{Env{}};
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<Env> next;
    for (const auto& env : out) {
      for (const auto& v : domains[i]) {
        Env e = env;
        e[names[i]] = v;
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

bool safe_holds(const eventb::Predicate& p, const State& s, const Env& env, const Universe& u,
                EvalStats* stats) {
  try {
    return eb_pred_holds(p, s, env, u);
  } catch (const EvalError&) {
    if (stats) ++stats->eval_errors;
    return false;
  }
}

const EbType& var_type(const StateSpace& space, const std::string& name) {
  for (const auto& [v, t] : space.vars)
    if (v == name) return t;
  throw EvalError("unknown variable " + name);
}

// Candidate after-values for each action, combined into post-states.
std::vector<State> action_posts(std::span<const eventb::Action> actions, const State& base,
                                const State& reads, const Env& params, const StateSpace& space,
                                const Universe& u, EvalStats* stats) {
  std::vector<State> out{base};
  for (const auto& a : actions) {
    std::vector<Value> options;
    if (a.kind == eventb::Action::Kind::Deterministic) {
      try {
        options.push_back(eval_expr(*a.rhs, reads, params, u));
      } catch (const EvalError&) {
        if (stats) ++stats->eval_errors;
      }
    } else {
      for (const auto& v : u.domain(var_type(space, a.target))) {
        Env env = params;
        env[a.target + "'"] = v;
        if (safe_holds(*a.before_after, reads, env, u, stats)) options.push_back(v);
      }
    }
    std::vector<State> next;
    for (const auto& s : out) {
      for (const auto& v : options) {
        State t = s;
        t[a.target] = v;
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

template <typename Fn>
Relation build_relation(std::size_t n, unsigned workers, EvalStats* stats, Fn successors) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n ? n : 1)));
  std::vector<std::vector<std::pair<StateId, StateId>>> parts(workers);
  std::vector<EvalStats> part_stats(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t a = w; a < n; a += workers)
        for (StateId b : successors(static_cast<StateId>(a), &part_stats[w]))
          parts[w].emplace_back(static_cast<StateId>(a), b);
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
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Relation out;
  for (unsigned w = 0; w < workers; ++w) {
    out.insert(parts[w].begin(), parts[w].end());
    if (stats) *stats += part_stats[w];
  }
  return out;
}

}  // namespace

EbEvent::EbEvent(const eventb::Event& e, eventb::PredPtr invariant, const StateSpace& space,
                 const Universe& u, EbOptions opts)
    : event_(e), inv_(std::move(invariant)), space_(space), u_(u), opts_(opts) {
  std::uint64_t count = 1;
  for (const auto& p : e.params) {
    param_domains_.push_back(u.domain(p.type));
    count = sat_mul(count, param_domains_.back().size());
  }
  if (count > u.ceiling) throw ResourceLimit("parameter valuations of " + e.name, count, u.ceiling);
  std::vector<std::string> names;
  for (const auto& p : e.params) names.push_back(p.name);
  valuations_ = valuations(names, param_domains_);
}

bool EbEvent::invariant_holds(StateId s) const {
  return safe_holds(*inv_, space_.states[s], {}, u_, nullptr);
}

std::vector<Env> EbEvent::enabled(StateId a, EvalStats* stats) const {
  std::vector<Env> out;
  for (const auto& env : valuations_) {
    bool ok = true;
    for (const auto& g : event_.guards) {
      if (!safe_holds(*g.predicate, space_.states[a], env, u_, stats)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(env);
  }
  return out;
}

std::vector<State> EbEvent::posts(const State& a, const Env& params, EvalStats* stats) const {
  return action_posts(event_.actions, a, a, params, space_, u_, stats);
}

std::vector<StateId> EbEvent::successors(StateId a, EvalStats* stats) const {
  auto on = enabled(a, stats);
  if (stats) stats->pairs_examined += 1;
  if (on.empty()) {
    if (opts_.stutter_requires_invariant && !invariant_holds(a)) return {};
    return {a};
  }
  if (!invariant_holds(a)) return {};
  std::vector<StateId> out;
  for (const auto& env : on) {
    for (const auto& b : posts(space_.states[a], env, stats)) {
      auto id = space_.find(b);
      if (id && invariant_holds(*id)) out.push_back(*id);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool EbEvent::contains(StateId a, StateId b) const {
  auto succ = successors(a);
  return std::binary_search(succ.begin(), succ.end(), b);
}

std::string EbEvent::explain(StateId a, StateId b) const {
  std::ostringstream os;
  auto on = enabled(a);
  bool member = contains(a, b);
  if (on.empty()) {
    os << "no parameter valuation satisfies the guards of " << event_.name
       << " at the pre-state, so only the stuttering pair (pre, pre) is allowed";
    if (a != b) os << "; post differs from pre";
    return os.str();
  }
  os << "guards of " << event_.name << " hold for " << on.size() << " parameter valuation(s)";
  if (!invariant_holds(a)) {
    os << ", but the invariant fails at the pre-state";
    return os.str();
  }
  if (!invariant_holds(b)) {
    os << ", but the invariant fails at the post-state";
    return os.str();
  }
  if (member) {
    os << "; some valuation produces the post-state";
  } else {
    os << "; none of their action outcomes produces the post-state";
  }
  return os.str();
}

Relation eb_event_rel(const eventb::Event& e, const eventb::Predicate& inv,
                      const StateSpace& space, const Universe& u, EbOptions opts,
                      unsigned workers, EvalStats* stats) {
  EbEvent ev(e, std::make_shared<eventb::Predicate>(inv), space, u, opts);
  return build_relation(space.size(), workers, stats,
                        [&](StateId a, EvalStats* s) { return ev.successors(a, s); });
}

Relation eb_assg_rel(std::span<const eventb::Action> actions, const eventb::Predicate& inv,
                     const StateSpace& space, const Universe& u) {
  eventb::Event e;
  e.name = "begin";
  e.actions.assign(actions.begin(), actions.end());
  return eb_event_rel(e, inv, space, u);
}

std::set<StateId> eb_init_states(std::span<const eventb::Action> actions,
                                 const eventb::Predicate& inv, const StateSpace& space,
                                 const Universe& u) {
  std::set<StateId> out;
  for (const auto& b : action_posts(actions, State{}, State{}, Env{}, space, u, nullptr)) {
    auto id = space.find(b);
    if (id && safe_holds(inv, space.states[*id], {}, u, nullptr)) out.insert(*id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JML evaluation

namespace {

struct JmlContext {
  const State& pre;
  const State& post;
  const Universe& u;
  const GuardTable* guards;
};

bool jml_holds(const jml::JmlPredicate& p, const State& cur, const Env& env,
               const JmlContext& ctx);

bool is_builtin(const jml::JmlExpr& e, const char* name) {
  return e.kind == jml::ExprKind::BuiltinSet && e.name == name;
}

Value jml_eval(const jml::JmlExpr& e, const State& cur, const Env& env, const JmlContext& ctx) {
  using K = jml::ExprKind;
  auto sub = [&](std::size_t i) { return jml_eval(*e.operands[i], cur, env, ctx); };
  switch (e.kind) {
    case K::IntLit:
      return Value::integer(e.value);
    case K::Ident:
      return lookup_ident(e.name, e.primed, cur, env, ctx.u);
    case K::BuiltinSet:
      return e.name == "NAT" ? nat_set(ctx.u) : Value::set(ctx.u.ints());
    case K::Old:
      return jml_eval(*e.operands[0], ctx.pre, env, ctx);
    case K::NewSet:
    case K::NewRelation: {
      std::vector<Value> items;
      for (std::size_t i = 0; i < e.operands.size(); ++i) items.push_back(sub(i));
      return Value::set(std::move(items));
    }
    case K::NewPair:
      return Value::pair(sub(0), sub(1));
    case K::StaticCall:
      if (e.name == "Utils.cross") return cross(sub(0), sub(1));
      throw EvalError("unknown function " + e.name);
    case K::Add:
      return Value::integer(arith('+', sub(0).as_int(), sub(1).as_int()));
    case K::Sub:
      return Value::integer(arith('-', sub(0).as_int(), sub(1).as_int()));
    case K::Mul:
      return Value::integer(arith('*', sub(0).as_int(), sub(1).as_int()));
    case K::Call:
      break;
  }
  const std::string& m = e.name;
  const jml::JmlExpr& recv = *e.operands[0];
  if (m == "has" && (is_builtin(recv, "INT") || is_builtin(recv, "NAT")))
    return Value::boolean(*builtin_member(recv.name == "INT", recv.name == "NAT", sub(1)));
  Value r = sub(0);
  if (m == "domain") return dom(r);
  if (m == "range") return ran(r);
  if (m == "isEmpty") return Value::boolean(r.items().empty());
  if (m == "isaFunction") return Value::boolean(is_function(r));
  if (e.operands.size() != 2) throw EvalError("bad arity for method " + m);
  Value x = sub(1);
  if (m == "has") return Value::boolean(r.contains(x));
  if (m == "isSubset") {
    if (is_builtin(*e.operands[1], "INT") || is_builtin(*e.operands[1], "NAT")) {
      const auto& xs = r.items();
      bool nat = e.operands[1]->name == "NAT";
      return Value::boolean(std::all_of(xs.begin(), xs.end(), [&](const Value& v) {
        return *builtin_member(!nat, nat, v);
      }));
    }
    return Value::boolean(subset(r, x));
  }
  if (m == "equals") return Value::boolean(r == x);
  if (m == "union") return set_union(r, x);
  if (m == "intersection") return set_inter(r, x);
  if (m == "difference") return set_diff(r, x);
  if (m == "domainSubtraction") return dom_filter(x, r, false);
  if (m == "domainRestriction") return dom_filter(x, r, true);
  if (m == "image") return image(r, x);
  if (m == "apply") return apply(r, x);
  throw EvalError("unknown method " + m);
}

// For `(\exists T v'; ... && v == v' ...)` the witness is forced to post(v).
std::optional<Value> forced_witness(const jml::JmlPredicate& p, const State& post) {
  const std::string& bound = p.name;
  auto check = [&](const jml::JmlPredicate& q) -> std::optional<Value> {
    if (q.kind == jml::PredKind::Becomes && q.after_name == bound) {
      auto it = post.find(q.name);
      if (it != post.end()) return it->second;
    }
    return std::nullopt;
  };
  const auto& body = *p.operands[0];
  if (auto v = check(body)) return v;
  if (body.kind == jml::PredKind::And)
    for (const auto& c : body.operands)
      if (auto v = check(*c)) return v;
  return std::nullopt;
}

bool jml_holds(const jml::JmlPredicate& p, const State& cur, const Env& env,
               const JmlContext& ctx) {
  using K = jml::PredKind;
  switch (p.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::And:
      for (const auto& o : p.operands)
        if (!jml_holds(*o, cur, env, ctx)) return false;
      return true;
    case K::Or:
      for (const auto& o : p.operands)
        if (jml_holds(*o, cur, env, ctx)) return true;
      return false;
    case K::Not:
      return !jml_holds(*p.operands[0], cur, env, ctx);
    case K::Group:
      return jml_holds(*p.operands[0], cur, env, ctx);
    case K::Old: {
      JmlContext at_pre{ctx.pre, ctx.pre, ctx.u, ctx.guards};
      return jml_holds(*p.operands[0], ctx.pre, env, at_pre);
    }
    case K::Exists: {
      if (auto w = forced_witness(p, ctx.post)) {
        Env e = env;
        e[p.name] = *w;
        return jml_holds(*p.operands[0], cur, e, ctx);
      }
      for (const auto& v : ctx.u.jml_domain(p.bound_type)) {
        Env e = env;
        e[p.name] = v;
        try {
          if (jml_holds(*p.operands[0], cur, e, ctx)) return true;
        } catch (const EvalError&) {
          // an undefined term makes this witness fail, not the whole quantifier
        }
      }
      return false;
    }
    case K::Becomes: {
      auto it = ctx.post.find(p.name);
      const Value* after = lookup(p.after_name, env);
      if (it == ctx.post.end() || !after) throw EvalError("unbound identifier in " + p.name);
      return it->second == *after;
    }
    case K::GuardCall: {
      if (!ctx.guards) throw EvalError("no guard table for " + p.name + "()");
      auto it = ctx.guards->find(p.name);
      if (it == ctx.guards->end()) throw EvalError("unknown guard method " + p.name);
      JmlContext at_pre{ctx.pre, ctx.pre, ctx.u, ctx.guards};
      return jml_holds(*it->second, ctx.pre, Env{}, at_pre);
    }
    case K::ResultIff:
      throw EvalError("\\result outside a guard method");
    case K::Compare: {
      Value l = jml_eval(*p.terms[0], cur, env, ctx);
      Value r = jml_eval(*p.terms[1], cur, env, ctx);
      switch (p.op) {
        case jml::CompareOp::Eq: return l == r;
        case jml::CompareOp::Neq: return l != r;
        case jml::CompareOp::Lt: return l.as_int() < r.as_int();
        case jml::CompareOp::Le: return l.as_int() <= r.as_int();
      }
      return false;
    }
    case K::Test:
      return jml_eval(*p.terms[0], cur, env, ctx).as_bool();
  }
  return false;
}

}  // namespace

GuardTable guard_table(const jml::JmlClass& cls) {
  GuardTable out;
  for (const auto& m : cls.methods) {
    if (m.kind != jml::JmlMethodSpec::Kind::GuardQuery) continue;
    const auto& ens = m.normal.ensures;
    if (ens && ens->kind == jml::PredKind::ResultIff) out[m.name] = ens->operands[0];
  }
  return out;
}

Value eval_expr(const jml::JmlExpr& e, const State& pre, const State& post, const Env& env,
                const Universe& u) {
  JmlContext ctx{pre, post, u, nullptr};
  return jml_eval(e, post, env, ctx);
}

bool jml_pred_holds(const jml::JmlPredicate& p, const State& pre, const State& post,
                    const Env& env, const Universe& u, const GuardTable* guards) {
  JmlContext ctx{pre, post, u, guards};
  return jml_holds(p, post, env, ctx);
}

bool jml_guard_holds(const jml::JmlMethodSpec& guard, const State& s, const Universe& u) {
  const auto& ens = guard.normal.ensures;
  if (!ens || ens->kind != jml::PredKind::ResultIff)
    throw EvalError(guard.name + " is not a guard query");
  try {
    return jml_pred_holds(*ens->operands[0], s, s, {}, u);
  } catch (const EvalError&) {
    return false;
  }
}

JmlMethod::JmlMethod(const jml::JmlMethodSpec& run, jml::JmlPredPtr invariant, GuardTable guards,
                     const StateSpace& space, const Universe& u)
    : run_(run), inv_(std::move(invariant)), guards_(std::move(guards)), space_(space), u_(u) {
  inv_cache_.resize(space.size());
  for (StateId s = 0; s < space.size(); ++s) {
    inv_cache_[s] = holds(*inv_, space.states[s], space.states[s], nullptr);
    if (inv_cache_[s]) inv_states_.push_back(s);
  }
  std::uint64_t pairs = sat_mul(inv_states_.size(), inv_states_.size());
  if (pairs > u.ceiling) throw ResourceLimit("candidate pairs of " + run.name, pairs, u.ceiling);
}

bool JmlMethod::invariant_holds(StateId s) const { return inv_cache_[s]; }

bool JmlMethod::holds(const jml::JmlPredicate& p, const State& a, const State& b,
                      EvalStats* stats) const {
  try {
    return jml_pred_holds(p, a, b, {}, u_, &guards_);
  } catch (const EvalError&) {
    if (stats) ++stats->eval_errors;
    return false;
  }
}

JmlMethod::CaseResult JmlMethod::evaluate(const jml::SpecCase& c, const State& a, const State& b,
                                          EvalStats* stats) const {
  CaseResult out;
  out.requires_holds = !c.requires_clause || holds(*c.requires_clause, a, a, stats);
  if (!out.requires_holds) return out;
  for (const auto& [v, t] : space_.vars)
    if (!c.assignable.permits(v) && a.at(v) != b.at(v)) out.frame_violations.push_back(v);
  out.ensures_holds = !c.ensures || holds(*c.ensures, a, b, stats);
  return out;
}

std::vector<StateId> JmlMethod::successors(StateId a, EvalStats* stats) const {
  if (!inv_cache_[a]) return {};
  const State& pre = space_.states[a];
  std::vector<const jml::SpecCase*> active;
  for (const jml::SpecCase* c : {&run_.normal, run_.exceptional ? &*run_.exceptional : nullptr}) {
    if (c && (!c->requires_clause || holds(*c->requires_clause, pre, pre, stats)))
      active.push_back(c);
  }
  std::vector<StateId> out;
  for (StateId b : inv_states_) {
    if (stats) stats->pairs_examined += 1;
    const State& post = space_.states[b];
    bool ok = true;
    for (const auto* c : active) {
      for (const auto& [v, t] : space_.vars) {
        if (!c->assignable.permits(v) && pre.at(v) != post.at(v)) {
          ok = false;
          break;
        }
      }
      if (!ok || (c->ensures && !holds(*c->ensures, pre, post, stats))) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(b);
  }
  return out;
}

bool JmlMethod::contains(StateId a, StateId b) const {
  if (!inv_cache_[a] || !inv_cache_[b]) return false;
  const State& pre = space_.states[a];
  const State& post = space_.states[b];
  for (const jml::SpecCase* c : {&run_.normal, run_.exceptional ? &*run_.exceptional : nullptr}) {
    if (!c) continue;
    auto r = evaluate(*c, pre, post, nullptr);
    if (r.requires_holds && (!r.ensures_holds || !r.frame_violations.empty())) return false;
  }
  return true;
}

std::string JmlMethod::explain(StateId a, StateId b) const {
  std::ostringstream os;
  if (!inv_cache_[a] || !inv_cache_[b]) {
    os << "the class invariant fails at the " << (!inv_cache_[a] ? "pre" : "post") << "-state";
    return os.str();
  }
  os << "invariant holds at pre and post";
  const State& pre = space_.states[a];
  const State& post = space_.states[b];
  int n = 0;
  for (const jml::SpecCase* c : {&run_.normal, run_.exceptional ? &*run_.exceptional : nullptr}) {
    ++n;
    if (!c) continue;
    auto r = evaluate(*c, pre, post, nullptr);
    os << "; case " << n << ": requires " << (r.requires_holds ? "true" : "false");
    if (!r.requires_holds) continue;
    os << ", ensures " << (r.ensures_holds ? "true" : "false");
    if (r.frame_violations.empty()) {
      os << ", frame respected";
    } else {
      os << ", frame violated on";
      for (const auto& v : r.frame_violations) os << ' ' << v;
    }
  }
  return os.str();
}

Relation jml_method_rel(const jml::JmlMethodSpec& run, const jml::JmlPredicate& inv,
                        const jml::JmlMethodSpec& guard, const StateSpace& space,
                        const Universe& u, unsigned workers, EvalStats* stats) {
  GuardTable guards;
  if (guard.normal.ensures && guard.normal.ensures->kind == jml::PredKind::ResultIff)
    guards[guard.name] = guard.normal.ensures->operands[0];
  JmlMethod m(run, std::make_shared<jml::JmlPredicate>(inv), std::move(guards), space, u);
  return build_relation(space.size(), workers, stats,
                        [&](StateId a, EvalStats* s) { return m.successors(a, s); });
}

std::set<StateId> jml_initially_states(const jml::JmlPredicate& initially,
                                       const jml::JmlPredicate& inv, const StateSpace& space,
                                       const Universe& u) {
  std::set<StateId> out;
  for (StateId s = 0; s < space.size(); ++s) {
    const State& b = space.states[s];
    try {
      if (jml_pred_holds(inv, b, b, {}, u) && jml_pred_holds(initially, b, b, {}, u))
        out.insert(s);
    } catch (const EvalError&) {
    }
  }
  return out;
}

}  // namespace eb2jml::sem
