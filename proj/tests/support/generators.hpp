#pragma once

// Random inputs for the property tests.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>

#include "eb2jml/eventb_model.hpp"

namespace eb2jml::testing {

using Rng = std::mt19937_64;

/// A random well-formed machine built directly as a syntax tree. Variable
/// types are filled in as the parser's inference would.
eventb::Machine random_machine(Rng& rng);

// Integer terms and predicates over one variable `v`, its after-value `v'`
// and one parameter `x`, each with its own evaluator so that tests can
// compare the library against a semantics written independently of it.

struct Term {
  enum Kind { Lit, V, VPrime, X, Add, Sub, Mul } kind = Lit;
  std::int64_t lit = 0;
  std::shared_ptr<const Term> lhs, rhs;

  std::int64_t eval(std::int64_t v, std::int64_t vp, std::int64_t x) const;
  std::string text() const;
};

struct Formula {
  enum Kind { True, False, Eq, Neq, Lt, Le, And, Or, Not } kind = True;
  std::shared_ptr<const Term> a, b;
  std::shared_ptr<const Formula> p, q;

  bool eval(std::int64_t v, std::int64_t vp, std::int64_t x) const;
  std::string text() const;
};

struct IntEventCase {
  bool has_param = false;      // `any x : INT where G then ...`
  bool deterministic = true;   // v := E, otherwise v :| P
  Formula invariant;           // over v only; conjoined with `v : INT`
  Formula guard;               // over v and x
  Term rhs;                    // deterministic action, over v and x
  Formula before_after;        // nondeterministic action, over v, v' and x

  /// Complete machine text with one event named `e`.
  std::string machine_text() const;
};

IntEventCase random_int_event(Rng& rng);

}  // namespace eb2jml::testing
