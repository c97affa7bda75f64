#pragma once

// EB2Jml: Event-B machine -> JML-annotated abstract Java class.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eb2jml/eventb_model.hpp"
#include "eb2jml/jml_model.hpp"

namespace eb2jml {

class TranslationError : public std::runtime_error {
 public:
  TranslationError(SourceSpan span, const std::string& message);
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

struct TraceEntry {
  std::string source;    // e.g. "inv3", "edit_owned.grd2", "initialisation.act1"
  std::string fragment;  // e.g. "invariant[2]", "guard_edit_owned", "run_edit_owned.ensures"
};

struct TranslationUnit {
  eventb::Machine source;
  jml::JmlClass result;
  std::vector<TraceEntry> trace;
};

/// Pre-state mode wraps the result in \old; post-state mode leaves it bare.
enum class StateMode { Pre, Post };

jml::JmlType jml_type_of(const eventb::EbType& t);

/// `scope` supplies operand types: scalar equality renders as `==`, other
/// equality as `.equals`, and `{}` needs an element type.
jml::JmlPredPtr translate_predicate(const eventb::Predicate& p, const eventb::TypeScope& scope,
                                    StateMode mode = StateMode::Post);
jml::JmlExprPtr translate_expression(const eventb::Expression& e, const eventb::TypeScope& scope);

jml::JmlPredPtr translate_action(const eventb::Action& a, const eventb::TypeScope& scope);
jml::JmlPredPtr translate_actions(std::span<const eventb::Action> actions,
                                  const eventb::TypeScope& scope);

struct MethodPair {
  jml::JmlMethodSpec guard;
  jml::JmlMethodSpec run;
};

MethodPair translate_event(const eventb::Event& e, const eventb::Machine& m);
jml::JmlPredPtr translate_invariants(const eventb::Machine& m);
/// Throws TranslationError when an action reads the (nonexistent) pre-state.
jml::JmlPredPtr translate_initialisation(const eventb::Machine& m);

std::string guard_method_name(const std::string& event);
std::string run_method_name(const std::string& event);

/// Requires a well-formed machine; throws TranslationError otherwise.
TranslationUnit translate_machine(const eventb::Machine& m);

}  // namespace eb2jml
