#include "eb2jml/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "eb2jml/eventb_parser.hpp"
#include "eb2jml/jml_model.hpp"
#include "eb2jml/refinement_checker.hpp"
#include "eb2jml/translator.hpp"

namespace eb2jml::cli {
namespace {

struct Config {
  std::string input;
  std::string int_range = "0..1";
  std::vector<std::string> carriers;
  std::optional<std::uint64_t> ceiling;
  std::size_t witnesses = 5;
  unsigned workers = 1;
  std::string format = "text";
  std::string out_path;
};

// Thrown for any condition that maps to exit code 2.
struct InputFailure {
  std::string message;
};

std::int64_t parse_int(std::string_view s, const std::string& what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InputFailure{"invalid " + what + ": '" + std::string(s) + "'"};
  return v;
}

sem::Universe make_universe(const Config& c) {
  sem::Universe u;
  auto dots = c.int_range.find("..");
  if (dots == std::string::npos)
    throw InputFailure{"invalid --int-range '" + c.int_range + "', expected LO..HI"};
  u.int_lo = parse_int(std::string_view(c.int_range).substr(0, dots), "--int-range bound");
  u.int_hi = parse_int(std::string_view(c.int_range).substr(dots + 2), "--int-range bound");
  if (u.int_lo > u.int_hi) throw InputFailure{"empty --int-range '" + c.int_range + "'"};

  for (const auto& spec : c.carriers) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InputFailure{"invalid --carrier '" + spec + "', expected NAME=N"};
    auto n = parse_int(std::string_view(spec).substr(eq + 1), "carrier size");
    if (n < 1) throw InputFailure{"carrier size must be at least 1 in '" + spec + "'"};
    u.carriers[spec.substr(0, eq)] = static_cast<int>(n);
  }

  if (c.ceiling) {
    u.ceiling = *c.ceiling;
  } else if (const char* env = std::getenv("EB2JML_CEILING"); env && *env) {
    auto n = parse_int(env, "EB2JML_CEILING");
    if (n < 1) throw InputFailure{"EB2JML_CEILING must be at least 1"};
    u.ceiling = static_cast<std::uint64_t>(n);
  }
  if (u.ceiling < 1) throw InputFailure{"--ceiling must be at least 1"};
  return u;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFailure{path + ": cannot open file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses and checks well-formedness; every diagnostic goes to `err`.
eventb::Machine load(const std::string& path, std::ostream& err) {
  std::string text = read_file(path);
  eventb::Machine m;
  try {
    m = eventb::parse_machine(text);
  } catch (const eventb::ParseError& e) {
    throw InputFailure{path + ":" + e.what()};
  }
  auto diags = eventb::well_formedness_check(m);
  if (!diags.empty()) {
    for (const auto& d : diags)
      err << path << ":" << d.span.line << ":" << d.span.column << ": " << d.message << "\n";
    throw InputFailure{path + ": " + std::to_string(diags.size()) +
                       " well-formedness error(s)"};
  }
  return m;
}

void write_artifact(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputFailure{path + ": cannot write file"};
  f << text;
  if (!f) throw InputFailure{path + ": write failed"};
}

int cmd_translate(const Config& c, std::ostream& out, std::ostream& err) {
  auto m = load(c.input, err);
  TranslationUnit unit;
  try {
    unit = translate_machine(m);
  } catch (const TranslationError& e) {
    throw InputFailure{c.input + ":" + e.what()};
  }
  std::string path = c.out_path.empty() ? unit.result.name + ".java" : c.out_path;
  write_artifact(path, jml::render_class(unit.result));

  out << "wrote " << path << " (class " << unit.result.name << ", "
      << unit.result.methods.size() << " methods)\n";
  for (const auto& t : unit.trace) out << "  " << t.source << " -> " << t.fragment << "\n";
  return Ok;
}

int cmd_check(const Config& c, std::ostream& out, std::ostream& err) {
  auto u = make_universe(c);
  auto m = load(c.input, err);
  CheckOptions opts;
  opts.witness_cap = c.witnesses;
  opts.workers = std::max(1u, c.workers);
  Report report;
  try {
    report = check_machine(m, u, opts);
  } catch (const TranslationError& e) {
    throw InputFailure{c.input + ":" + e.what()};
  }
  std::string text = c.format == "tree" ? report.to_json() : report.to_text();
  if (c.out_path.empty())
    out << text;
  else
    write_artifact(c.out_path, text);

  for (const auto& v : report.verdicts)
    if (v.status == Status::ResourceLimit) err << v.name << ": " << v.message << "\n";
  switch (report.overall) {
    case Status::Pass:
      return Ok;
    case Status::Fail:
      return CheckFailed;
    case Status::ResourceLimit:
      return LimitReached;
  }
  return InputError;
}

int cmd_parse(const Config& c, std::ostream& out, std::ostream& err) {
  auto m = load(c.input, err);
  std::string text = eventb::render_machine(m);
  if (c.out_path.empty())
    out << text;
  else
    write_artifact(c.out_path, text);
  return Ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Event-B to JML translator and finite refinement checker", "eb2jml"};
  app.require_subcommand(1);

  auto* translate = app.add_subcommand("translate", "Translate a machine to a JML-annotated class");
  translate->add_option("input", c.input, "Machine file (.ebm)")->required();
  translate->add_option("-o,--out", c.out_path, "Output path (default <MachineName>.java)");

  auto* check = app.add_subcommand("check", "Check the translation exhaustively on a finite universe");
  check->add_option("input", c.input, "Machine file (.ebm)")->required();
  check->add_option("--int-range", c.int_range, "Integer range LO..HI")->capture_default_str();
  check->add_option("--carrier", c.carriers, "Carrier size NAME=N (repeatable)");
  check->add_option("--ceiling", c.ceiling, "Maximum number of enumerated states or pairs");
  check->add_option("--witnesses", c.witnesses, "Witnesses reported per verdict")
      ->capture_default_str();
  check->add_option("--workers", c.workers, "Worker threads")->capture_default_str();
  check->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"text", "tree"}))
      ->capture_default_str();
  check->add_option("-o,--out", c.out_path, "Write the report here instead of standard output");

  auto* parse = app.add_subcommand("parse", "Parse a machine and print its canonical form");
  parse->add_option("input", c.input, "Machine file (.ebm)")->required();
  parse->add_option("-o,--out", c.out_path, "Output path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "eb2jml: " << e.what() << "\n";
    return InputError;
  }

  try {
    if (translate->parsed()) return cmd_translate(c, out, err);
    if (check->parsed()) return cmd_check(c, out, err);
    return cmd_parse(c, out, err);
  } catch (const InputFailure& f) {
    err << f.message << "\n";
  } catch (const std::exception& e) {
    err << "eb2jml: " << e.what() << "\n";
  }
  return InputError;
}

}  // namespace eb2jml::cli
