#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "eb2jml/cli.hpp"
#include "eb2jml/eventb_parser.hpp"
#include "eb2jml/jml_model.hpp"
#include "eb2jml/translator.hpp"
#include "support/oracle.hpp"

namespace fs = std::filesystem;
using namespace eb2jml;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string machine_path(const std::string& name) {
  return testing::source_path("machines/" + name);
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  Scratch() {
    static int n = 0;
    dir = fs::temp_directory_path() /
          ("eb2jml_cli_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string file(const std::string& name, const std::string& text) const {
    auto p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

// Runs the installed binary through the shell, returning its exit status.
int run_binary(const std::string& args, std::string* out = nullptr) {
  std::string cmd = std::string(EB2JML_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string text;
  std::array<char, 4096> buf;
  while (auto n = std::fread(buf.data(), 1, buf.size(), p)) text.append(buf.data(), n);
  int status = ::pclose(p);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("translate writes the class and a trace summary") {
  Scratch s;
  auto out_path = s.path("ref1_permissions.java");
  auto r = run({"translate", machine_path("social.ebm"), "-o", out_path});
  REQUIRE(r.code == cli::Ok);
  CHECK(r.err.empty());
  CHECK(r.out.starts_with("wrote " + out_path));
  CHECK(r.out.find(" -> ") != std::string::npos);

  auto written = testing::read_text(out_path);
  auto m = eventb::parse_machine(testing::read_text(machine_path("social.ebm")));
  CHECK(written == jml::render_class(translate_machine(m).result));
  CHECK(written.find("public abstract boolean guard_edit_owned();") != std::string::npos);
}

TEST_CASE("translate of the refined machine contains the golden fragments") {
  Scratch s;
  auto out_path = s.path("out.java");
  REQUIRE(run({"translate", machine_path("ref1_permissions.ebm"), "--out", out_path}).code ==
          cli::Ok);
  auto norm = jml::normalize_jml(testing::read_text(out_path));
  for (const char* fragment :
       {"public abstract boolean guard_edit_owned();", "assignable contents, pages, owner, viewp, editp;"}) {
    CAPTURE(fragment);
    CHECK(norm.find(jml::normalize_jml(fragment)) != std::string::npos);
  }
}

TEST_CASE("translate defaults to <MachineName>.java in the working directory") {
  Scratch s;
  auto cwd = fs::current_path();
  fs::current_path(s.dir);
  auto r = run({"translate", machine_path("counter.ebm")});
  fs::current_path(cwd);
  CHECK(r.code == cli::Ok);
  CHECK(fs::exists(s.dir / "counter.java"));
}

TEST_CASE("translating twice is byte-identical") {
  Scratch s;
  for (const char* name : {"counter.ebm", "social.ebm", "ref1_permissions.ebm", "swap.ebm"}) {
    CAPTURE(name);
    auto a = s.path("a.java"), b = s.path("b.java");
    REQUIRE(run({"translate", machine_path(name), "-o", a}).code == cli::Ok);
    REQUIRE(run({"translate", machine_path(name), "-o", b}).code == cli::Ok);
    CHECK(testing::read_text(a) == testing::read_text(b));
  }
}

TEST_CASE("input errors exit 2 with diagnostics on the error stream") {
  Scratch s;
  SUBCASE("missing file names the path") {
    auto missing = s.path("nope.ebm");
    for (const char* cmd : {"translate", "check", "parse"}) {
      auto r = run({cmd, missing});
      CHECK(r.code == cli::InputError);
      CHECK(r.out.empty());
      CHECK(r.err.find(missing) != std::string::npos);
    }
  }
  SUBCASE("refines is out of subset") {
    auto p = s.file("r.ebm", "machine m refines a\n  variables v\nend\n");
    auto r = run({"translate", p});
    CHECK(r.code == cli::InputError);
    CHECK(r.err.find("refines") != std::string::npos);
    CHECK_FALSE(fs::exists(s.dir / "m.java"));
  }
  SUBCASE("empty file") {
    auto r = run({"parse", s.file("empty.ebm", "")});
    CHECK(r.code == cli::InputError);
    CHECK(r.err.find("expected keyword machine") != std::string::npos);
  }
  SUBCASE("syntax error on line 7") {
    auto p = s.file("bad.ebm",
                    "machine m\n"
                    "  variables v\n"
                    "  invariants\n"
                    "    inv1: v : INT\n"
                    "  events\n"
                    "    initialisation\n"
                    "      begin act1: v := := 0 end\n"
                    "end\n");
    auto r = run({"parse", p});
    CHECK(r.code == cli::InputError);
    CHECK(r.err.find(p + ":7:") != std::string::npos);
  }
  SUBCASE("well-formedness errors carry positions") {
    auto p = s.file("wf.ebm",
                    "machine m\n"
                    "  variables v\n"
                    "  invariants\n"
                    "    inv1: v : INT\n"
                    "  events\n"
                    "    initialisation\n"
                    "      begin act1: v := w end\n"
                    "end\n");
    auto r = run({"check", p});
    CHECK(r.code == cli::InputError);
    CHECK(r.err.find(p + ":7:") != std::string::npos);
  }
}

TEST_CASE("check exit codes") {
  CHECK(run({"check", machine_path("counter.ebm"), "--int-range", "0..1"}).code == cli::Ok);
  CHECK(run({"check", machine_path("social.ebm"), "--carrier", "PERSON=2", "--carrier",
             "CONTENTS=2"})
            .code == cli::Ok);

  auto limited = run({"check", machine_path("social.ebm"), "--carrier", "PERSON=2", "--carrier",
                      "CONTENTS=2", "--ceiling", "10"});
  CHECK(limited.code == cli::LimitReached);
  CHECK_FALSE(limited.out.empty());  // partial report
  CHECK_FALSE(limited.err.empty());
}

TEST_CASE("check rejects malformed universes") {
  auto counter = machine_path("counter.ebm");
  for (std::vector<std::string> extra : std::vector<std::vector<std::string>>{
           {"--int-range", "3..1"},
           {"--int-range", "0-1"},
           {"--carrier", "PERSON"},
           {"--carrier", "PERSON=0"},
           {"--ceiling", "0"},
           {"--format", "xml"},
           {"--bogus"}}) {
    std::vector<std::string> args{"check", counter};
    args.insert(args.end(), extra.begin(), extra.end());
    CAPTURE(extra[0]);
    CHECK(run(args).code == cli::InputError);
  }
  CHECK(run({}).code == cli::InputError);
  CHECK(run({"frobnicate"}).code == cli::InputError);
}

TEST_CASE("check --format tree emits a JSON report") {
  auto r = run({"check", machine_path("counter.ebm"), "--format", "tree"});
  REQUIRE(r.code == cli::Ok);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["overall"] == "PASS");
  CHECK(j["machine"] == "counter");
  CHECK(j["verdicts"].size() == 2);
}

TEST_CASE("check --out writes the report to a file") {
  Scratch s;
  auto p = s.path("report.txt");
  auto r = run({"check", machine_path("counter.ebm"), "-o", p});
  CHECK(r.code == cli::Ok);
  CHECK(r.out.empty());
  CHECK(testing::read_text(p).find("PASS") != std::string::npos);
}

TEST_CASE("parse prints the canonical rendering") {
  auto src = testing::read_text(machine_path("social.ebm"));
  auto r = run({"parse", machine_path("social.ebm")});
  REQUIRE(r.code == cli::Ok);
  CHECK(r.out == eventb::render_machine(eventb::parse_machine(src)));
  // Canonical text is a fixed point.
  Scratch s;
  auto again = run({"parse", s.file("c.ebm", r.out)});
  CHECK(again.out == r.out);
}

TEST_CASE("help exits 0") {
  auto r = run({"--help"});
  CHECK(r.code == cli::Ok);
  CHECK(r.out.find("translate") != std::string::npos);
}

TEST_CASE("binary: exit codes and the ceiling environment variable") {
  auto social = machine_path("social.ebm");
  auto base = "check " + social + " --carrier PERSON=2 --carrier CONTENTS=2";
  CHECK(run_binary("check " + machine_path("counter.ebm")) == 0);
  CHECK(run_binary(base) == 0);
  CHECK(run_binary(base + " --ceiling 10") == 3);

  std::string out;
  int status = std::system(("EB2JML_CEILING=10 " + std::string(EB2JML_CLI_PATH) + " " + base +
                            " >/dev/null 2>&1")
                               .c_str());
  CHECK(WEXITSTATUS(status) == 3);
  // The flag wins over the environment.
  status = std::system(("EB2JML_CEILING=10 " + std::string(EB2JML_CLI_PATH) + " " + base +
                        " --ceiling 1000000 >/dev/null 2>&1")
                           .c_str());
  CHECK(WEXITSTATUS(status) == 0);
  status = std::system(("EB2JML_CEILING=abc " + std::string(EB2JML_CLI_PATH) + " " + base +
                        " >/dev/null 2>&1")
                           .c_str());
  CHECK(WEXITSTATUS(status) == 2);

  CHECK(run_binary("parse " + machine_path("counter.ebm"), &out) == 0);
  CHECK(out.starts_with("machine counter"));
  CHECK(run_binary("parse /nonexistent/x.ebm") == 2);
}

TEST_CASE("exit codes stay within 0..3") {
  Scratch s;
  auto counter = machine_path("counter.ebm");
  std::vector<std::vector<std::string>> invocations{
      {},
      {"check"},
      {"check", counter, "--witnesses", "-1"},
      {"check", counter, "--workers", "4"},
      {"check", counter, "--int-range", "-2..2"},
      {"check", counter, "--int-range", "99999999999999999999..1"},
      {"translate", counter, "-o", s.path("missing_dir/x.java")},
      {"parse", s.file("junk.ebm", "\x01\x02 machine")},
      {"parse", s.file("utf.ebm", "machine \xe2\x88\x88")},
      {"parse", counter, "extra"},
  };
  for (const auto& args : invocations) {
    auto r = run(args);
    CHECK(r.code >= 0);
    CHECK(r.code <= 3);
  }
}
