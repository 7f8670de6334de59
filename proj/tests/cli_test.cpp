#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result bsev(const std::string& args) {
  std::string cmd = std::string(BSEV_BINARY) + " " + args + " 2>/dev/null";
  Result r;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, f)) > 0;) r.out.append(buf, n);
  int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string fx(const std::string& name) { return fixture_path(name); }

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("bsev_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<nlohmann::json> records(const std::string& out) {
  std::vector<nlohmann::json> rs;
  std::istringstream in(out);
  for (std::string line; std::getline(in, line);) rs.push_back(nlohmann::json::parse(line));
  return rs;
}

}  // namespace

TEST_CASE("exit codes on the fixture corpus") {
  CHECK(bsev("verify " + fx("monitor.mabs") + " --target Monitor.heartbeat").code == 1);
  CHECK(bsev("verify " + fx("monitor.mabs") + " --target Monitor.reset").code == 0);
  CHECK(bsev("verify " + fx("monitor.mabs") + " --target 'Monitor.<init>'").code == 0);
  CHECK(bsev("verify " + fx("monitor.mabs")).code == 1);
  CHECK(bsev("verify " + fx("fac.mabs") + " --target fac").code == 0);
  CHECK(bsev("verify " + fx("desk.mabs")).code == 0);
  CHECK(bsev("verify " + fx("context_sets.mabs")).code == 0);
  CHECK(bsev("verify " + fx("nongreedy.mabs") + " --calculus session").code == 0);
  CHECK(bsev("verify " + fx("three_calls.mabs") + " --calculus session").code == 1);
}

TEST_CASE("usage, parse, and type errors exit with 2") {
  fs::path d = scratch("errors");
  std::ofstream(d / "syntax.mabs") << "class {";
  std::ofstream(d / "types.mabs") << "class K { Int x = True; }";
  CHECK(bsev("verify " + (d / "syntax.mabs").string()).code == 2);
  CHECK(bsev("verify " + (d / "types.mabs").string()).code == 2);
  CHECK(bsev("verify " + (d / "missing.mabs").string()).code == 2);
  CHECK(bsev("verify " + fx("fac.mabs") + " --target nothere").code == 2);
  CHECK(bsev("verify " + fx("fac.mabs") + " --calculus sideways").code == 2);
  CHECK(bsev("frobnicate").code == 2);
  // A session proof needs a Local type on an explicitly requested method.
  CHECK(bsev("verify " + fx("monitor.mabs") + " --target Monitor.reset --calculus session").code == 2);
  CHECK(bsev("verify " + fx("fac.mabs") + " --solver no-such-solver-binary").code == 2);
}

TEST_CASE("text report and summary line") {
  Result r = bsev("verify " + fx("desk.mabs"));
  CHECK(r.out.find("14/14 targets verified\n") != std::string::npos);
  r = bsev("verify " + fx("monitor.mabs") + " --target Monitor");
  CHECK(r.out.find("Monitor.heartbeat: FAIL") != std::string::npos);
  CHECK(r.out.find("    select(anon(heap, 1), this.beats) >= heap.beats\n") != std::string::npos);
  CHECK(r.out.find("3/4 targets verified\n") != std::string::npos);
  // Sorted by name whatever the job count.
  Result par = bsev("verify " + fx("desk.mabs") + " --jobs 3");
  CHECK(std::regex_replace(par.out, std::regex("[0-9.]+ s\\)"), "") ==
        std::regex_replace(bsev("verify " + fx("desk.mabs")).out, std::regex("[0-9.]+ s\\)"), ""));
}

TEST_CASE("records: statics, goals, and stuck actions") {
  auto rs = records(bsev("verify " + fx("context_sets.mabs") + " --format records").out);
  int statics = 0;
  for (const auto& r : rs)
    if (r["type"] == "static") {
      ++statics;
      CHECK(r["target"] == "Account.grow");
      CHECK(r["heap_precondition"] == "heap.x > 0");
    }
  CHECK(statics == 1);
  CHECK(rs.back()["type"] == "summary");

  rs = records(bsev("verify " + fx("three_calls.mabs") + " --calculus session --target C.m --format records").out);
  bool stuck = false;
  for (const auto& r : rs)
    if (r["type"] == "stuck") {
      stuck = true;
      CHECK(r["reason"] == "specification expected Put(result == 0), found this.f!m();");
    }
  CHECK(stuck);

  rs = records(bsev("verify " + fx("monitor.mabs") + " --target Monitor.heartbeat --format records").out);
  REQUIRE(rs.size() == 3);
  CHECK(rs[0]["status"] == "FAIL");
  CHECK(rs[1]["type"] == "goal");
  CHECK(rs[1]["residual"][0] == "select(anon(heap, 1), this.beats) >= heap.beats");
}

TEST_CASE("counterexample files and tree dump") {
  fs::path d = scratch("ce");
  Result r = bsev("verify " + fx("monitor.mabs") + " --target Monitor.heartbeat --ce --ce-dir " + d.string());
  CHECK(r.code == 1);
  CHECK(fs::exists(d / "Monitor_heartbeat_ce1.mabs"));
  CHECK(fs::exists(d / "Monitor_heartbeat_ce1.txt"));
  CHECK(bsev("check " + (d / "Monitor_heartbeat_ce1.mabs").string()).code == 0);

  r = bsev("verify " + fx("monitor.mabs") + " --target Monitor.reset --dump-tree");
  CHECK(r.out.find("== Monitor.reset\n") != std::string::npos);
  CHECK(bsev("check " + fx("monitor.mabs") + " --dump-ast").out.find("class Monitor") != std::string::npos);
}

TEST_CASE("dumped SMT is exactly what the solver saw") {
  fs::path d = scratch("smt");
  // The solver is a script that stores its input and then defers to z3.
  fs::path tee = d / "tee-solver.sh";
  std::ofstream(tee) << "#!/bin/sh\nf=$(mktemp " << (d / "seen.XXXXXX").string() << ")\ntee \"$f\" | z3 -in\n";
  fs::permissions(tee, fs::perms::owner_all);
  Result r = bsev("verify " + fx("monitor.mabs") + " --target Monitor.heartbeat --dump-smt " + (d / "dump").string() +
                  " --solver " + tee.string());
  CHECK(r.code == 1);
  std::multiset<std::string> dumped, seen;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  for (const auto& e : fs::directory_iterator(d / "dump")) dumped.insert(slurp(e.path()));
  for (const auto& e : fs::directory_iterator(d))
    if (e.path().filename().string().rfind("seen.", 0) == 0) seen.insert(slurp(e.path()));
  CHECK(dumped.size() >= 5);
  CHECK(dumped == seen);
}

TEST_CASE("config file and environment choose the solver") {
  fs::path d = scratch("config");
  std::ofstream(d / "bsev.conf") << "# defaults\nsolver = no-such-solver-binary\ntimeout = 5\n";
  std::string conf = " --config " + (d / "bsev.conf").string();
  CHECK(bsev("verify " + fx("fac.mabs") + conf).code == 2);
  CHECK(bsev("verify " + fx("fac.mabs") + conf + " --solver 'z3 -in'").code == 0);
  CHECK(bsev("verify " + fx("fac.mabs") + " --timeout 5").code == 0);
  CHECK(system(("BSEV_SOLVER=no-such-solver-binary " + std::string(BSEV_BINARY) + " verify " + fx("fac.mabs") +
                " >/dev/null 2>&1").c_str()) != 0);
}
