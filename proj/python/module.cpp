#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eb2jml/cli.hpp"
#include "eb2jml/eventb_parser.hpp"
#include "eb2jml/jml_model.hpp"
#include "eb2jml/refinement_checker.hpp"
#include "eb2jml/translator.hpp"

namespace py = pybind11;
using namespace eb2jml;

namespace {

eventb::Machine load(const std::string& text) {
  auto m = eventb::parse_machine(text);
  auto diags = eventb::well_formedness_check(m);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags)
      msg += std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
             d.message + "\n";
    throw TranslationError({}, msg);
  }
  return m;
}

std::string check(const std::string& text, std::int64_t lo, std::int64_t hi,
                  const std::map<std::string, int>& carriers, std::uint64_t ceiling,
                  std::size_t witnesses, const std::string& mutation, const std::string& event) {
  auto m = load(text);
  sem::Universe u;
  u.int_lo = lo;
  u.int_hi = hi;
  u.carriers = carriers;
  u.ceiling = ceiling;
  CheckOptions opts;
  opts.witness_cap = witnesses;
  auto unit = translate_machine(m);
  if (!mutation.empty()) {
    auto mu = mutation_from_string(mutation);
    if (!mu) throw py::value_error("unknown mutation '" + mutation + "'");
    unit = mutate_translation(unit, *mu, event);
  }
  return check_translation(unit, u, opts).to_json();
}

}  // namespace

PYBIND11_MODULE(_eb2jml, m) {
  m.doc() = "Event-B to JML translation and finite refinement checking";

  py::register_exception<eventb::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TranslationError>(m, "TranslationError", PyExc_ValueError);
  py::register_exception<MutationError>(m, "MutationError", PyExc_ValueError);

  m.def("parse", [](const std::string& text) { return eventb::render_machine(load(text)); },
        py::arg("text"), "Canonical rendering of a well-formed machine.");
  m.def("translate",
        [](const std::string& text) { return jml::render_class(translate_machine(load(text)).result); },
        py::arg("text"), "JML-annotated abstract Java class for a machine.");
  m.def("trace",
        [](const std::string& text) {
          std::vector<std::pair<std::string, std::string>> out;
          for (const auto& t : translate_machine(load(text)).trace) out.emplace_back(t.source, t.fragment);
          return out;
        },
        py::arg("text"));
  m.def("normalize_jml", &jml::normalize_jml, py::arg("text"));
  m.def("check_json", &check, py::arg("text"), py::arg("int_lo") = 0, py::arg("int_hi") = 1,
        py::arg("carriers") = std::map<std::string, int>{}, py::arg("ceiling") = 1'000'000,
        py::arg("witnesses") = 5, py::arg("mutation") = "", py::arg("event") = "",
        py::call_guard<py::gil_scoped_release>());
  m.def("main",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line; returns (exit code, stdout, stderr).");
}
