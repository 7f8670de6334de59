// bsev: deductive verifier for MiniABS.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "bsev/cli/verify.hpp"
#include "bsev/frontend/nullability.hpp"
#include "bsev/frontend/parser.hpp"
#include "bsev/frontend/printer.hpp"
#include "bsev/frontend/typecheck.hpp"

namespace {

using namespace bsev;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cli::UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(path));
  for (std::string line; std::getline(in, line);) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

Program load(const std::string& file) {
  Program p = parse(slurp(file));
  auto errs = typecheck(p);
  if (!errs.empty()) throw FrontendError(errs);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deductive verifier for MiniABS"};
  app.require_subcommand(1);

  std::string file, target = "all", calculus = "post", solver, format = "text", dump_smt, config, ce_dir = ".";
  double timeout = 0;
  bool ce = false, dump_tree = false, dump_ast = false;
  int jobs = 1;

  auto* verify = app.add_subcommand("verify", "Verify targets of a program");
  verify->add_option("file", file, "MiniABS source")->required();
  verify->add_option("--target", target, "C.m, C.<init>, C, function, or all");
  verify->add_option("--calculus", calculus)->check(CLI::IsMember({"post", "session"}));
  verify->add_option("--solver", solver, "solver command, e.g. \"z3 -in\"");
  verify->add_option("--timeout", timeout, "seconds per goal")->check(CLI::PositiveNumber);
  verify->add_flag("--ce", ce, "write counterexamples for failed targets");
  verify->add_option("--ce-dir", ce_dir, "directory for counterexamples");
  verify->add_flag("--dump-tree", dump_tree, "print the symbolic execution trees");
  verify->add_option("--dump-smt", dump_smt, "write every solver script to DIR");
  verify->add_option("--format", format)->check(CLI::IsMember({"text", "records"}));
  verify->add_option("--jobs", jobs, "targets verified in parallel")->check(CLI::PositiveNumber);
  verify->add_option("--config", config, "key=value file with solver and timeout defaults");

  auto* check = app.add_subcommand("check", "Parse and type check");
  check->add_option("file", file, "MiniABS source")->required();
  check->add_flag("--dump-ast", dump_ast, "print the typed AST");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Program p = load(file);
    NullabilityResult nr = infer_nullability(p);
    if (!nr.errors.empty()) {
      for (const auto& e : nr.errors) std::cerr << file << ":" << e.str() << "\n";
      return 2;
    }
    if (check->parsed()) {
      if (dump_ast) std::cout << dump_typed(p);
      return 0;
    }

    cli::VerifyOptions opt;
    if (config.empty() && std::getenv("BSEV_CONFIG")) config = std::getenv("BSEV_CONFIG");
    if (!config.empty()) {
      auto cfg = read_config(config);
      if (cfg.count("solver") && !std::getenv("BSEV_SOLVER")) opt.solver.command = smt::split_command(cfg["solver"]);
      if (cfg.count("timeout")) opt.solver.timeout_s = std::stod(cfg["timeout"]);
    }
    if (!solver.empty()) opt.solver.command = smt::split_command(solver);
    if (timeout > 0) opt.solver.timeout_s = timeout;
    opt.target = target;
    opt.calculus = calculus == "session" ? Calculus::Session : Calculus::Post;
    opt.ce = ce;
    opt.dump_smt_dir = dump_smt;
    opt.jobs = jobs;

    cli::Report r = cli::verify(p, &nr.facts, opt);
    if (dump_tree)
      for (const auto& t : r.targets)
        if (t.tree) std::cout << "== " << t.name << "\n" << bsev::dump_tree(*t.tree);
    std::cout << (format == "records" ? cli::report_records(r) : cli::report_text(r));
    if (ce)
      for (const auto& path : cli::write_counterexamples(r, ce_dir)) std::cerr << "counterexample: " << path << "\n";
    return r.exit_code();
  } catch (const ParseError& e) {
    std::cerr << file << ": " << e.what() << "\n";
  } catch (const FrontendError& e) {
    for (const auto& err : e.errors()) std::cerr << file << ":" << err.str() << "\n";
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
