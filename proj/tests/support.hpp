#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "svsp/cli.hpp"
#include "svsp/model.hpp"
#include "svsp/parser.hpp"

namespace testsupport {

inline std::string source_path(const std::string& rel) { return std::string(SVSP_SOURCE_DIR) + "/" + rel; }

inline const std::string& clean_fixture() {
  static const std::string p = source_path("fixtures/mini-gks-clean.svs");
  return p;
}

inline const std::string& faulty_fixture() {
  static const std::string p = source_path("fixtures/mini-gks.svs");
  return p;
}

inline std::shared_ptr<const svsp::SpecDb> load_db(const std::string& path) {
  auto spec = svsp::load_spec_files({path});
  return std::make_shared<const svsp::SpecDb>(std::move(spec.db));
}

inline std::shared_ptr<const svsp::SpecDb> parse_db(const std::string& text, const std::string& file = "t.svs") {
  auto r = svsp::parse_source(text, file);
  return std::make_shared<const svsp::SpecDb>(svsp::build_spec_db(std::move(r.declarations)));
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

inline CliResult cli(const std::vector<std::string>& args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = svsp::run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

/// Runs the installed binary through the shell; stdout only.
inline CliResult run_binary(const std::string& args) {
  std::string cmd = std::string("\"") + SVSP_BINARY + "\" " + args + " 2>/dev/null";
  CliResult r{-1, {}, {}};
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

}  // namespace testsupport
