#include "svsp/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "svsp/checker.hpp"
#include "svsp/parser.hpp"
#include "svsp/report.hpp"
#include "svsp/scenario.hpp"
#include "svsp/service.hpp"

namespace svsp {

namespace {

bool color_enabled() {
  const char* v = std::getenv("SVSP_COLOR");
  return v && std::string_view(v) == "1";
}

// Loads and parses the spec files; reports problems on `err`.
std::shared_ptr<const SpecDb> load(const std::vector<std::string>& files, std::ostream& err) {
  LoadedSpec spec;
  try {
    spec = load_spec_files(files);
  } catch (const IoError& e) {
    err << "svsp: " << e.what() << "\n";
    return nullptr;
  }
  if (!spec.parse_diagnostics.empty()) {
    for (const auto& d : spec.parse_diagnostics) err << format_parse_diagnostic(d) << "\n";
    err << spec.parse_diagnostics.size() << " syntax error(s)\n";
    return nullptr;
  }
  return std::make_shared<const SpecDb>(std::move(spec.db));
}

int cmd_check(const std::vector<std::string>& files, const std::string& format, bool warn_as_error,
              std::ostream& out, std::ostream& err) {
  auto db = load(files, err);
  if (!db) return kExitUsage;
  auto diags = run_all_checks(*db);
  if (warn_as_error) diags = promote_warnings(std::move(diags));
  out << render_diagnostics(diags, format == "json" ? DiagFormat::JsonLines : DiagFormat::Text, color_enabled());
  return count_errors(diags) ? kExitErrors : kExitClean;
}

int cmd_list(const std::string& file, const std::string& order, std::ostream& out, std::ostream& err) {
  auto db = load({file}, err);
  if (!db) return kExitUsage;
  out << render_listing(*db, function_listing(*db, *listing_order_from(order)));
  return kExitClean;
}

int cmd_xref(const std::string& file, const std::string& element, std::ostream& out, std::ostream& err) {
  auto db = load({file}, err);
  if (!db) return kExitUsage;
  try {
    out << render_cross_reference(cross_reference(*db, element));
  } catch (const LookupError& e) {
    err << "svsp: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitClean;
}

void report_refusal(const SpecDb& db, const SessionRefused& e, std::ostream& err) {
  err << "svsp: " << e.what() << "\n";
  auto diags = run_all_checks(db);
  diags.erase(std::remove_if(diags.begin(), diags.end(),
                             [](const Diagnostic& d) { return d.severity != Severity::Error; }),
              diags.end());
  err << render_diagnostics(diags, DiagFormat::Text);
}

int cmd_run(const std::string& file, const std::string& script_path, const std::string& level, std::ostream& out,
            std::ostream& err) {
  auto db = load({file}, err);
  if (!db) return kExitUsage;
  try {
    auto script = parse_script(read_file(script_path), script_path);
    auto result = run_script(db, script, level);
    out << render_scenario(result);
    return scenario_exit_code(result);
  } catch (const IoError& e) {
    err << "svsp: " << e.what() << "\n";
  } catch (const ScriptError& e) {
    err << script_path << ": " << e.what() << "\n";
  } catch (const SessionRefused& e) {
    report_refusal(*db, e, err);
    return kExitErrors;
  } catch (const LookupError& e) {
    err << "svsp: " << e.what() << "\n";
  }
  return kExitUsage;
}

int cmd_repl(const std::string& file, const std::string& level, std::istream& in, std::ostream& out,
             std::ostream& err) {
  auto db = load({file}, err);
  if (!db) return kExitUsage;
  std::optional<Session> session;
  try {
    session.emplace(new_session(db, level));
  } catch (const SessionRefused& e) {
    report_refusal(*db, e, err);
    return kExitErrors;
  } catch (const LookupError& e) {
    err << "svsp: " << e.what() << "\n";
    return kExitUsage;
  }
  auto runner = std::make_unique<ScenarioRunner>(*session);
  out << "session at level " << (session->level().empty() ? "-" : session->level()) << ", state "
      << session->operating_state() << "\n";

  std::string line;
  int lineno = 0;
  std::size_t ordinal = 0;
  while (err << "> " << std::flush, std::getline(in, line)) {
    ++lineno;
    std::string_view cmd(line);
    while (!cmd.empty() && (cmd.back() == ' ' || cmd.back() == '\r')) cmd.remove_suffix(1);
    if (cmd == ":quit" || cmd == ":q") break;
    if (cmd == ":snapshot") {
      out << render_snapshot(session->snapshot());
      continue;
    }
    if (cmd == ":reset") {
      session->reset();
      runner = std::make_unique<ScenarioRunner>(*session);
      out << "reset to state " << session->operating_state() << "\n";
      continue;
    }
    try {
      auto st = parse_statement(line, lineno);
      if (!st) continue;
      validate_statement(*db, *st, ordinal);
      auto step = runner->execute(*st, ordinal++);
      for (const auto& o : step.outcomes) out << render_outcome(o, session->log().size());
      if (step.failure)
        out << render_failure(*step.failure);
      else if (step.checked)
        out << "ok\n";
    } catch (const ScriptError& e) {
      err << e.what() << "\n";
    }
  }
  err << "\n";
  return kExitClean;
}

int cmd_serve(const std::string& file, int port, std::ostream& err) {
  auto db = load({file}, err);
  if (!db) return kExitUsage;
  Service service(db, file);
  if (auto n = count_errors(service.diagnostics()))
    err << "svsp: specification has " << n << " static error(s); sessions will be refused\n";
  HttpServer server(service);
  int bound = 0;
  try {
    bound = server.bind("127.0.0.1", port);
  } catch (const std::exception& e) {
    err << "svsp: " << e.what() << "\n";
    return kExitUsage;
  }
  err << "serving " << file << " on http://127.0.0.1:" << bound << "/api\n" << std::flush;
  server.listen();
  return kExitClean;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Specification validation: static checks and scenario simulation", "svsp"};
  app.require_subcommand(1);

  std::vector<std::string> check_files;
  std::string format = "text";
  bool warn_as_error = false;
  auto* check = app.add_subcommand("check", "Run the static checks and report diagnostics");
  check->add_option("spec", check_files, "Specification files, concatenated in order")->required();
  check->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  check->add_flag("--warn-as-error", warn_as_error, "Treat warnings as errors");

  std::string spec, order = "decl", element, script, level;
  int port = 7410;
  auto* list = app.add_subcommand("list", "List the functions in one of five orderings");
  list->add_option("spec", spec, "Specification file")->required();
  list->add_option("--order", order, "Ordering")->check(CLI::IsMember({"name", "type", "level", "state", "decl"}));

  auto* xref = app.add_subcommand("xref", "Show where a data element is used");
  xref->add_option("spec", spec, "Specification file")->required();
  xref->add_option("element", element, "Data element name")->required();

  auto* run = app.add_subcommand("run", "Run a scenario script");
  run->add_option("spec", spec, "Specification file")->required();
  run->add_option("script", script, "Scenario script")->required();
  run->add_option("--level", level, "Session level (default: highest declared)");

  auto* repl = app.add_subcommand("repl", "Interactive scenario session");
  repl->add_option("spec", spec, "Specification file")->required();
  repl->add_option("--level", level, "Session level (default: highest declared)");

  auto* serve = app.add_subcommand("serve", "Start the HTTP JSON service on loopback");
  serve->add_option("spec", spec, "Specification file")->required();
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitClean;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    err << "svsp: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kExitUsage;
  }

  if (check->parsed()) return cmd_check(check_files, format, warn_as_error, out, err);
  if (list->parsed()) return cmd_list(spec, order, out, err);
  if (xref->parsed()) return cmd_xref(spec, element, out, err);
  if (run->parsed()) return cmd_run(spec, script, level, out, err);
  if (repl->parsed()) return cmd_repl(spec, level, in, out, err);
  if (serve->parsed()) return cmd_serve(spec, port, err);
  err << app.help();
  return kExitUsage;
}

}  // namespace svsp
