#pragma once

// Exhaustive check, over a finite universe, that every transition allowed by
// a translated JML method is a transition of its source Event-B event.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eb2jml/eventb_model.hpp"
#include "eb2jml/semantics.hpp"
#include "eb2jml/translator.hpp"

namespace eb2jml {

enum class Status { Pass, Fail, ResourceLimit };

const char* to_string(Status s);

struct Counterexample {
  std::string event;
  sem::State pre;
  std::optional<sem::State> post;  // absent for initialisation witnesses
  std::string jml_side;
  std::string eb_side;
};

struct Verdict {
  std::string name;  // event name, or "initialisation"
  Status status = Status::Pass;
  std::uint64_t checked_pairs = 0;
  std::uint64_t jml_pairs = 0;  // |JML relation| (states for initialisation)
  std::uint64_t eb_pairs = 0;   // |Event-B relation| restricted to invariant pre-states
  std::vector<Counterexample> witnesses;
  /// JML relation equals the Event-B relation on invariant pre-states.
  bool bisimulation = false;
  /// Verdict when the stuttering branch also requires the invariant.
  std::optional<Status> stutter_with_invariant;
  std::uint64_t eval_errors = 0;
  std::string message;  // RESOURCE_LIMIT detail
  double seconds = 0;
};

struct Report {
  std::string machine;
  sem::Universe universe;
  std::vector<Verdict> verdicts;  // initialisation first, then events in source order
  Status overall = Status::Pass;
  double seconds = 0;

  const Verdict* find(const std::string& name) const;
  /// One block per verdict.
  std::string to_text() const;
  /// Key/value tree (JSON).
  std::string to_json() const;
};

struct CheckOptions {
  std::size_t witness_cap = 5;
  unsigned workers = 1;
};

/// Checks the event named `event` of `unit.source` against the run method of
/// `unit.result` (which may be a mutated translation).
Verdict check_event(const TranslationUnit& unit, const std::string& event,
                    const sem::Universe& u, const CheckOptions& opts = {});
Verdict check_event(const eventb::Event& e, const eventb::Machine& m, const sem::Universe& u,
                    const CheckOptions& opts = {});
Verdict check_init(const TranslationUnit& unit, const sem::Universe& u,
                   const CheckOptions& opts = {});
Verdict check_init(const eventb::Machine& m, const sem::Universe& u,
                   const CheckOptions& opts = {});
Report check_translation(const TranslationUnit& unit, const sem::Universe& u,
                         const CheckOptions& opts = {});
Report check_machine(const eventb::Machine& m, const sem::Universe& u,
                     const CheckOptions& opts = {});

enum class Mutation { DropOld, WidenEnsuresTrue, ShrinkAssignable, NegateGuardLink };

const char* to_string(Mutation m);
std::optional<Mutation> mutation_from_string(const std::string& name);

class MutationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies `mutation` to the run method of `event`, or of every event when
/// `event` is empty. Throws MutationError when nothing could be changed.
TranslationUnit mutate_translation(const TranslationUnit& unit, Mutation mutation,
                                   const std::string& event = {});

}  // namespace eb2jml
