#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using testsupport::cli;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("svsp-cli-" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::string script(const std::string& name) { return testsupport::source_path("scripts/" + name); }

}  // namespace

TEST_CASE("check exit codes") {
  auto clean = cli({"check", testsupport::clean_fixture()});
  CHECK(clean.code == 0);
  CHECK(clean.out == "0 errors, 0 warnings\n");

  auto faulty = cli({"check", testsupport::faulty_fixture()});
  CHECK(faulty.code == 1);
  CHECK(faulty.out.find("4 errors, 2 warnings") != std::string::npos);

  auto json = cli({"check", "--format", "json", testsupport::faulty_fixture()});
  CHECK(json.code == 1);
  CHECK(std::count(json.out.begin(), json.out.end(), '\n') == 6);
  CHECK(json.out.find("errors,") == std::string::npos);
}

TEST_CASE("warnings only fail when promoted") {
  auto path = temp_file("warn.svs", "states { A } initial A\ndata \"s\" : state init A\n"
                                    "function \"EMPTY\" { param in internal \"s\" }\n");
  CHECK(cli({"check", path}).code == 0);
  auto promoted = cli({"check", "--warn-as-error", path});
  CHECK(promoted.code == 1);
  CHECK(promoted.out.find("W012 error") != std::string::npos);
}

TEST_CASE("usage, file and parse errors exit 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"check"}).code == 2);
  CHECK(cli({"check", "--format", "xml", testsupport::clean_fixture()}).code == 2);
  CHECK(cli({"list", "--order", "size", testsupport::clean_fixture()}).code == 2);
  auto missing = cli({"check", "/nonexistent/spec.svs"});
  CHECK(missing.code == 2);
  CHECK(missing.out.empty());
  CHECK_FALSE(missing.err.empty());
  auto broken = cli({"check", temp_file("broken.svs", "data \"a\" integer\n")});
  CHECK(broken.code == 2);
  CHECK(broken.out.empty());
  CHECK(broken.err.find("broken.svs:1:") != std::string::npos);
  CHECK(cli({"xref", testsupport::clean_fixture(), "no such element"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("list prints every function in the chosen order") {
  auto r = cli({"list", "--order", "name", testsupport::clean_fixture()});
  CHECK(r.code == 0);
  CHECK(r.out.find("NAME") == 0);
  CHECK(r.out.find("ACTIVATE WORKSTATION") < r.out.find("UPDATE WORKSTATION"));
  CHECK(r.out.find("15 functions, ordered by name") != std::string::npos);
  auto by_state = cli({"list", "--order", "state", testsupport::clean_fixture()});
  CHECK(by_state.out.find("[GKCL]") != std::string::npos);
}

TEST_CASE("xref names the functions using an element") {
  auto r = cli({"xref", testsupport::clean_fixture(), "operating state"});
  CHECK(r.code == 0);
  CHECK(r.out.find("OPEN GKS") != std::string::npos);
  CHECK(r.out.find("INQUIRE WORKSTATION STATE") != std::string::npos);
}

TEST_CASE("run exit codes follow the scenario result") {
  auto ok = cli({"run", testsupport::clean_fixture(), script("open-inquire.scn")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("0 assertion failures") != std::string::npos);

  auto unexpected = cli({"run", testsupport::clean_fixture(), temp_file("unexp.scn", "call \"CLOSE GKS\"\n")});
  CHECK(unexpected.code == 1);
  CHECK(unexpected.out.find("X101") != std::string::npos);

  auto failing = cli({"run", testsupport::clean_fixture(), temp_file("fail.scn", "call \"CLOSE GKS\"\n"
                                                                                   "expect X101\n"
                                                                                   "assert state WSOP\n")});
  CHECK(failing.code == 3);
  CHECK(failing.out.find("FAILED statement 3 (line 3)") != std::string::npos);

  auto refused = cli({"run", testsupport::faulty_fixture(), temp_file("open.scn", "call \"OPEN GKS\"\n")});
  CHECK(refused.code == 1);
  CHECK(refused.out.empty());

  auto bad_script = cli({"run", testsupport::clean_fixture(), temp_file("bad.scn", "dance\n")});
  CHECK(bad_script.code == 2);
}

TEST_CASE("repl reads statements from the input stream") {
  auto r = cli({"repl", testsupport::clean_fixture()},
               "call \"OPEN GKS\" with \"error file\" = \"e\", \"amount of memory\" = 8\n"
               "assert state GKOP\n"
               ":snapshot\n"
               "dance\n"
               ":reset\n"
               "assert state GKCL\n"
               ":quit\n"
               "assert state NEVER\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"OPEN GKS\" -> COMPLETED") != std::string::npos);
  CHECK(r.out.find("ok") != std::string::npos);
  CHECK(r.out.find("GKOP") != std::string::npos);
  CHECK(r.err.find("> ") != std::string::npos);
}

TEST_CASE("color is opt-in through the environment") {
  ::setenv("SVSP_COLOR", "1", 1);
  auto colored = cli({"check", testsupport::faulty_fixture()});
  ::unsetenv("SVSP_COLOR");
  auto plain = cli({"check", testsupport::faulty_fixture()});
  CHECK(colored.out.find('\x1b') != std::string::npos);
  CHECK(plain.out.find('\x1b') == std::string::npos);
}

TEST_CASE("the installed binary behaves like the in-process entry point") {
  auto r = testsupport::run_binary("check " + testsupport::shell_quote(testsupport::faulty_fixture()));
  CHECK(r.code == 1);
  CHECK(r.out == cli({"check", testsupport::faulty_fixture()}).out);
}
