#pragma once

// Recursive-descent parser and canonical renderer for the textual Event-B
// subset (`.ebm` files). The grammar is documented in docs/grammar.md.

#include <stdexcept>
#include <string>
#include <string_view>

#include "eb2jml/eventb_model.hpp"

namespace eb2jml::eventb {

/// First point at which the input could not be parsed. `what()` is built
/// from the fields alone, so two errors with equal fields print identically.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, std::string expected, std::string found, bool out_of_subset = false);

  const SourceSpan& span() const { return span_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }
  /// True when the input uses Event-B syntax outside the supported subset
  /// (`refines`, `extends`, contexts, witnesses, ...).
  bool out_of_subset() const { return out_of_subset_; }

  static std::string format(const SourceSpan& span, const std::string& expected,
                            const std::string& found, bool out_of_subset);

 private:
  SourceSpan span_;
  std::string expected_;
  std::string found_;
  bool out_of_subset_;
};

/// Parses a whole machine and infers variable types from its invariants.
/// Throws ParseError; never aborts on malformed input.
Machine parse_machine(std::string_view text);
PredPtr parse_predicate(std::string_view text);
ExprPtr parse_expression(std::string_view text);
EbType parse_type(std::string_view text);

/// Canonical text with a fixed two-space indent; parse_machine of the result
/// is structurally equal to `machine`.
std::string render_machine(const Machine& machine);
std::string render_predicate(const Predicate& pred);
std::string render_expression(const Expression& expr);

}  // namespace eb2jml::eventb
