// Copyright 2026 The membug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks: prints one PASS or FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "membug/cli.h"
#include "membug/corpus.h"
#include "membug/diff.h"
#include "membug/invariant.h"
#include "membug/pipeline.h"
#include "membug/trace.h"
#include "support/generators.h"
#include "support/invariant_oracle.h"
#include "support/programs.h"

namespace membug {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Thrown by Require; its message becomes the FAIL reason.
struct Unmet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void Require(bool condition, const std::string& what) {
  if (!condition) throw Unmet(what);
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun Cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv = {"membug"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  CliRun run;
  run.code = RunCli(argv, out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

std::map<std::string, CorpusCase> Cases() {
  std::map<std::string, CorpusCase> cases;
  for (CorpusCase& c : CorpusCases(MEMBUG_CORPUS_DIR)) cases[c.name] = c;
  return cases;
}

CheckedProgram Load(const fs::path& path) {
  auto program = LoadProgram(path.string());
  Require(program.ok(), "cannot load " + path.string());
  return std::move(program).value();
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> Functions(const MemError& error) {
  std::vector<std::string> names;
  for (const StackFrame& frame : error.stack.frames) names.push_back(frame.function);
  return names;
}

bool HasNullAt(const Trace& trace, const std::string& point, const std::string& var) {
  const TraceSample* last = nullptr;
  for (const TraceSample& sample : trace.samples) {
    if (sample.point.Identity() == point) last = &sample;
  }
  if (last == nullptr) return false;
  for (const VarObservation& obs : last->observations) {
    if (obs.name != var) continue;
    const auto* addr = std::get_if<Address>(&obs.value);
    return addr != nullptr && addr->is_null();
  }
  return false;
}

void ArpFidelity() {
  const CorpusCase c = Cases().at("arp_mini");
  const auto start = Clock::now();
  const CliRun run = Cli({"memcheck", c.buggy_path.string(), "--", "-Ainet"});
  Require(Seconds(start) < 1.0, "memcheck took over 1 s");
  Require(run.code == kExitCrashed, "exit code " + std::to_string(run.code));
  Require(run.out.find("Address 0x0 is not stack'd, malloc'd or (recently) free'd") !=
              std::string::npos,
          "null address rendering missing");
  const ExecutionOutcome outcome = Execute(Load(c.buggy_path), {"-Ainet"}, ExecMode::kMemcheck);
  Require(outcome.errors.size() == 1, "expected exactly one error");
  const MemError& error = outcome.errors[0];
  Require(error.fatal && error.kind == MemErrorKind::kInvalidRead && error.size == 1,
          "not a fatal InvalidRead of size 1");
  Require(error.address_class && error.address_class->kind == AddressClassKind::kNull,
          "address class is not null");
  const std::vector<std::string> expected = {"my_strcmp", "get_hwtype", "arp_main", "main"};
  Require(Functions(error) == expected, "unexpected stack");
}

void TopFidelity() {
  const CorpusCase c = Cases().at("top_mini");
  const auto start = Clock::now();
  const CliRun run = Cli({"memcheck", c.buggy_path.string(), "--", "d"});
  Require(Seconds(start) < 1.0, "memcheck took over 1 s");
  Require(run.code == kExitCrashed, "exit code " + std::to_string(run.code));
  const ExecutionOutcome outcome = Execute(Load(c.buggy_path), {"d"}, ExecMode::kMemcheck);
  Require(outcome.crashed(), "no crash");
  const MemError& crash = outcome.crash();
  Require(crash.kind == MemErrorKind::kInvalidRead && crash.size == 1,
          "not an InvalidRead of size 1");
  const auto frames = Functions(crash);
  Require(frames.size() >= 2 && frames[1] == "top_main", "caller is not top_main");
  const TracedRun traced = TraceExecution(Load(c.buggy_path), {"d"});
  Require(HasNullAt(traced.trace, frames[0] + ":::ENTER", "s"),
          "interval argument not null at " + frames[0] + ":::ENTER");
}

void CleanVersions() {
  for (const auto& [name, c] : Cases()) {
    const ExecutionOutcome outcome =
        Execute(Load(c.fixed_path), c.target_args, ExecMode::kMemcheck);
    Require(outcome.errors.empty(), name + ": fixed version has errors");
    Require(outcome.leaks && outcome.leaks->definitely_lost_bytes() == 0,
            name + ": fixed version leaks");
    Require(!outcome.crashed() && outcome.status.code == 0, name + ": nonzero exit");
    std::vector<std::string> args = {"memcheck", c.fixed_path.string(), "--"};
    args.insert(args.end(), c.target_args.begin(), c.target_args.end());
    Require(Cli(args).code == kExitClean, name + ": membug exit code not 0");
  }
}

void OracleEquivalence() {
  testing::Rng rng(20261016);
  const auto start = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const Trace trace = testing::RandomTrace(rng);
    InferenceConfig config;
    config.min_samples = 2 + i % 3;
    const std::string actual = FormatInvariantSet(InferInvariants(trace, config));
    const std::string oracle = FormatInvariantSet(testing::OracleInfer(trace, config));
    Require(actual == oracle, "mismatch on trace " + std::to_string(i));
  }
  Require(Seconds(start) < 60.0, "took over 60 s");
}

std::vector<std::string> RenderedAt(const InvariantSet& set, const std::string& identity) {
  std::vector<std::string> out;
  for (const PointInvariants& point : set.points) {
    if (point.point.Identity() != identity) continue;
    for (const InvariantInstance& inv : point.invariants) out.push_back(inv.Render());
  }
  return out;
}

void ExampleInvariants() {
  Trace linear;
  linear.program = "t.mc";
  const ProgramPoint point{"f", PointKind::kEnter};
  int64_t serial = 0;
  for (int64_t x : {1, 2, 5, -3}) {
    linear.samples.push_back(TraceSample{
        point, {{"x", VarKind::kInt, x}, {"y", VarKind::kInt, 2 * x - 1}}, ++serial});
  }
  const InvariantSet set = InferInvariants(linear, {});
  int relations = 0;
  for (const InvariantInstance& inv : set.points.at(0).invariants) {
    if (inv.vars.size() == 1) continue;
    const auto* fit = std::get_if<LinearBinary>(&inv.tmpl);
    if (fit == nullptr) continue;
    ++relations;
    Require(fit->a == Rational(2) && fit->b == Rational(-1), "wrong coefficients");
    Require(inv.Render() == "y == 2*x - 1", "rendered as " + inv.Render());
  }
  Require(relations == 1, "expected exactly one linear relation");

  Trace sorted;
  sorted.program = "t.mc";
  serial = 0;
  for (std::vector<int64_t> arr : {std::vector<int64_t>{1, 2, 2, 5},
                                   std::vector<int64_t>{0, 7},
                                   std::vector<int64_t>{-4, 3, 3, 4, 6}}) {
    const int64_t length = static_cast<int64_t>(arr.size());
    sorted.samples.push_back(TraceSample{
        point, {{"arr", VarKind::kIntArray, ArrayValue{length, arr}}}, ++serial});
  }
  const auto invs = RenderedAt(InferInvariants(sorted, {}), "f:::ENTER");
  Require(std::count(invs.begin(), invs.end(), "arr sorted asc") == 1, "arr sorted asc missing");
}

void RootCauseLocalization() {
  const std::map<std::string, std::pair<std::string, std::string>> null_args = {
      {"arp_mini", {"get_hwtype:::ENTER", "- name != null"}},
      {"top_mini", {"xatou_mini:::ENTER", "- s != null"}},
  };
  const auto cases = Cases();
  for (const auto& [name, expected] : null_args) {
    const CorpusCase& c = cases.at(name);
    const PipelineResult result =
        RunPipeline(Load(c.buggy_path), Load(c.fixed_path), c.target_args, {});
    Require(result.buggy_outcome.crashed(), name + ": no crash");
    Require(!result.report.ranking.empty(), name + ": empty ranking");
    const auto stack = Functions(result.buggy_outcome.crash());
    const RootCauseEntry& top = result.report.ranking[0];
    Require(std::find(stack.begin(), stack.end(), top.point.function) != stack.end(),
            name + ": top entry " + top.point.Identity() + " not in the crash stack");
    bool exposed = false;
    for (const PointDiff& point : result.report.diff.points) {
      if (point.point.Identity() != expected.first) continue;
      const auto lines = point.Lines();
      exposed = std::find(lines.begin(), lines.end(), expected.second) != lines.end();
    }
    Require(exposed, name + ": diff at " + expected.first + " lacks " + expected.second);
  }
}

void LeakAccounting() {
  const CorpusCase c = Cases().at("leak_mini");
  // Three 10-byte buffers with the middle one freed.
  const ExecutionOutcome lost = Execute(Load(c.buggy_path), {}, ExecMode::kMemcheck);
  Require(lost.leaks && lost.leaks->definitely_lost_bytes() == 20 &&
              lost.leaks->definitely_lost.size() == 2 &&
              lost.leaks->still_reachable.empty(),
          "buggy leak totals differ from 20 bytes in 2 blocks");
  // Same, with the first buffer kept in a global.
  const ExecutionOutcome kept =
      Execute(Load(c.buggy_path.parent_path() / "reachable.mc"), {}, ExecMode::kMemcheck);
  Require(kept.leaks && kept.leaks->definitely_lost_bytes() == 10 &&
              kept.leaks->definitely_lost.size() == 1 &&
              kept.leaks->still_reachable_bytes() == 10 &&
              kept.leaks->still_reachable.size() == 1,
          "global-held block not moved to still reachable");
}

std::string ReadIfExists(const fs::path& path) {
  return fs::exists(path) ? testing::ReadFile(path.string()) : "";
}

void DeterminismAndRoundTrips() {
  const fs::path dir = fs::temp_directory_path() / ("membug_acceptance_" +
                                                    std::to_string(::getpid()));
  fs::create_directories(dir);
  for (const auto& [name, c] : Cases()) {
    const std::string buggy = c.buggy_path.string(), fixed = c.fixed_path.string();
    const std::string trace = (dir / "t.trace").string(), inv = (dir / "t.inv").string();
    const std::string report = (dir / "r.txt").string();
    const std::vector<std::vector<std::string>> commands = {
        {"run", buggy},
        {"memcheck", buggy},
        {"trace", buggy, "-o", trace},
        {"infer", trace, "-o", inv},
        {"diff", inv, inv},
        {"rootcause", "--buggy", buggy, "--stable", fixed, "-o", report},
    };
    for (std::vector<std::string> command : commands) {
      const std::string joined = command[0];
      if (command[0] != "infer" && command[0] != "diff") {
        command.push_back("--");
        command.insert(command.end(), c.target_args.begin(), c.target_args.end());
      }
      const CliRun first = Cli(command);
      const std::string files = ReadIfExists(trace) + ReadIfExists(inv) + ReadIfExists(report) +
                                ReadIfExists(dir / "r.buggy.inv");
      const CliRun second = Cli(command);
      Require(first.code != kExitUsage, name + " " + joined + ": " + first.err);
      Require(first.code == second.code && first.out == second.out && first.err == second.err,
              name + " " + joined + ": output differs between runs");
      Require(files == ReadIfExists(trace) + ReadIfExists(inv) + ReadIfExists(report) +
                           ReadIfExists(dir / "r.buggy.inv"),
              name + " " + joined + ": files differ between runs");
    }
  }
  fs::remove_all(dir);

  testing::Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const Trace trace = testing::RandomTrace(rng);
    std::istringstream in(FormatTrace(trace));
    Require(ReadTrace(in) == trace, "trace round trip failed on trace " + std::to_string(i));
    const InvariantSet set = InferInvariants(trace, {});
    Require(DiffInvariants(set, set).empty(), "self diff nonempty on set " + std::to_string(i));
  }
}

void ScaleSanity() {
  for (const auto& [name, c] : Cases()) {
    for (const fs::path& path : {c.buggy_path, c.fixed_path}) {
      const TracedRun run = TraceExecution(Load(path), c.target_args);
      Require(FormatTrace(run.trace).size() < (1u << 20), path.string() + ": trace over 1 MB");
      const auto start = Clock::now();
      InferInvariants(run.trace, {});
      Require(Seconds(start) < 5.0, path.string() + ": inference over 5 s");
    }
  }
}

}  // namespace
}  // namespace membug

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"arp case fidelity", membug::ArpFidelity},
      {"top case fidelity", membug::TopFidelity},
      {"clean-version contract", membug::CleanVersions},
      {"inference oracle equivalence", membug::OracleEquivalence},
      {"example invariants", membug::ExampleInvariants},
      {"root-cause localization", membug::RootCauseLocalization},
      {"leak accounting", membug::LeakAccounting},
      {"determinism and round trips", membug::DeterminismAndRoundTrips},
      {"scale sanity", membug::ScaleSanity},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    std::string reason;
    try {
      criteria[i].second();
    } catch (const std::exception& e) {
      reason = e.what();
    }
    const bool pass = reason.empty();
    failures += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first
              << (pass ? "" : ": " + reason) << "\n";
  }
  return failures == 0 ? 0 : 1;
}
