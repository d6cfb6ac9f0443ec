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

#include "membug/cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "membug/diff.h"
#include "membug/invariant.h"
#include "membug/pipeline.h"
#include "membug/report.h"
#include "membug/trace.h"

namespace membug {
namespace {

struct CliConfig {
  std::string program;
  std::string trace_path;
  std::string buggy_inv;
  std::string stable_inv;
  std::string buggy_path;
  std::string stable_path;
  std::string output_path;
  std::vector<std::string> target_args;
  bool json = false;
  std::optional<int> min_samples;
  std::string weights;
};

// Usage and input errors that end the run with kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

InferenceConfig MakeInferenceConfig(const CliConfig& config) {
  InferenceConfig inference;
  std::optional<int> min_samples = config.min_samples;
  if (!min_samples) {
    if (const char* env = std::getenv("MEMBUG_MIN_SAMPLES")) {
      try {
        size_t used = 0;
        min_samples = std::stoi(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw UsageError("MEMBUG_MIN_SAMPLES must be an integer, got '" +
                         std::string(env) + "'");
      }
    }
  }
  if (min_samples) {
    if (*min_samples < 2) {
      throw UsageError("minimum sample count must be at least 2, got " +
                       std::to_string(*min_samples));
    }
    inference.min_samples = *min_samples;
  }
  return inference;
}

RankWeights ParseWeights(const std::string& text) {
  RankWeights weights;
  if (text.empty()) return weights;
  const size_t comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    size_t used1 = 0, used2 = 0;
    const std::string first = text.substr(0, comma);
    const std::string second = text.substr(comma + 1);
    weights.delta = std::stod(first, &used1);
    weights.in_stack = std::stod(second, &used2);
    if (used1 != first.size() || used2 != second.size()) {
      throw std::invalid_argument(text);
    }
  } catch (const std::exception&) {
    throw UsageError("--weights expects 'w1,w2', got '" + text + "'");
  }
  return weights;
}

CheckedProgram Load(const std::string& path, std::ostream& err) {
  auto program = LoadProgram(path);
  if (!program.ok()) {
    for (const Diagnostic& d : program.diagnostics()) err << d.ToString() << "\n";
    throw UsageError("");
  }
  return std::move(program).value();
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file '" + path + "'");
  return in;
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file || !file.write(contents.data(),
                           static_cast<std::streamsize>(contents.size()))) {
    throw UsageError("cannot write file '" + path + "'");
  }
}

void PrintJson(const nlohmann::json& json, std::ostream& out) {
  out << json.dump(2) << "\n";
}

bool HasFindings(const ExecutionOutcome& outcome) {
  return !outcome.errors.empty() ||
         (outcome.leaks && outcome.leaks->definitely_lost_bytes() > 0);
}

int Run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const CheckedProgram program = Load(config.program, err);
  const ExecutionOutcome outcome =
      Execute(program, config.target_args, ExecMode::kPlain);
  if (config.json) {
    PrintJson(OutcomeToJson(outcome), out);
  } else {
    out << outcome.stdout_text;
    if (outcome.crashed()) out << RenderMemErrors(outcome.errors);
  }
  return outcome.crashed() ? kExitCrashed : kExitClean;
}

int Memcheck(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const CheckedProgram program = Load(config.program, err);
  const ExecutionOutcome outcome =
      Execute(program, config.target_args, ExecMode::kMemcheck);
  if (config.json) {
    PrintJson(OutcomeToJson(outcome), out);
  } else {
    out << outcome.stdout_text << RenderMemcheckReport(outcome);
  }
  if (outcome.crashed()) return kExitCrashed;
  return HasFindings(outcome) ? kExitFindings : kExitClean;
}

int TraceCommand(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const CheckedProgram program = Load(config.program, err);
  const TracedRun run = TraceExecution(program, config.target_args);
  WriteFile(config.output_path, FormatTrace(run.trace));
  if (!run.outcome.errors.empty()) {
    if (config.json) {
      PrintJson(OutcomeToJson(run.outcome), out);
    } else {
      out << RenderMemErrors(run.outcome.errors);
    }
  }
  if (run.outcome.crashed()) return kExitCrashed;
  return run.outcome.errors.empty() ? kExitClean : kExitFindings;
}

Trace LoadTrace(const std::string& path) {
  std::ifstream in = OpenInput(path);
  try {
    return ReadTrace(in);
  } catch (const TraceFormatError& e) {
    throw UsageError(path + ":" + std::to_string(e.line()) + ": " +
                     std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

InvariantSet LoadInvariants(const std::string& path) {
  std::ifstream in = OpenInput(path);
  try {
    return ReadInvariantSet(in);
  } catch (const InvariantFormatError& e) {
    throw UsageError(path + ":" + std::to_string(e.line()) + ": " +
                     std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

int Infer(const CliConfig& config, std::ostream& out) {
  const InferenceConfig inference = MakeInferenceConfig(config);
  const Trace trace = LoadTrace(config.trace_path);
  const std::string text = FormatInvariantSet(InferInvariants(trace, inference));
  if (config.output_path.empty()) {
    out << text;
  } else {
    WriteFile(config.output_path, text);
  }
  return kExitClean;
}

int Diff(const CliConfig& config, std::ostream& out) {
  const InvariantSet buggy = LoadInvariants(config.buggy_inv);
  const InvariantSet stable = LoadInvariants(config.stable_inv);
  const InvariantDiff diff = DiffInvariants(buggy, stable);
  if (config.json) {
    PrintJson(DiffToJson(diff), out);
  } else {
    out << RenderDiff(diff);
  }
  return diff.empty() ? kExitClean : kExitFindings;
}

int RootCause(const CliConfig& config, std::ostream& out, std::ostream& err) {
  PipelineConfig pipeline;
  pipeline.inference = MakeInferenceConfig(config);
  pipeline.weights = ParseWeights(config.weights);
  const CheckedProgram buggy = Load(config.buggy_path, err);
  const CheckedProgram stable = Load(config.stable_path, err);
  const PipelineResult result =
      RunPipeline(buggy, stable, config.target_args, pipeline);
  for (const std::string& warning : result.warnings) {
    err << "membug: warning: " << warning << "\n";
  }
  const std::string report = config.json
                                 ? ReportToJson(result.report).dump(2) + "\n"
                                 : RenderRootCauseReport(result.report);
  out << report;
  if (!config.output_path.empty()) {
    const std::filesystem::path output(config.output_path);
    const std::string stem = (output.parent_path() / output.stem()).string();
    WriteFile(config.output_path, report);
    WriteFile(stem + ".buggy.trace", FormatTrace(result.buggy_run.trace));
    WriteFile(stem + ".stable.trace", FormatTrace(result.stable_run.trace));
    WriteFile(stem + ".buggy.inv", FormatInvariantSet(result.buggy_invariants));
    WriteFile(stem + ".stable.inv", FormatInvariantSet(result.stable_invariants));
  }
  return result.report.ranking.empty() ? kExitClean : kExitFindings;
}

}  // namespace

int RunCli(const std::vector<std::string>& argv, std::ostream& out,
           std::ostream& err) {
  CliConfig config;
  std::vector<std::string> tool_args(argv.begin() + (argv.empty() ? 0 : 1),
                                     argv.end());
  auto separator = std::find(tool_args.begin(), tool_args.end(), "--");
  if (separator != tool_args.end()) {
    config.target_args.assign(separator + 1, tool_args.end());
    tool_args.erase(separator, tool_args.end());
  }

  CLI::App app("Memory checking and invariant diffing for MiniC programs", "membug");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_flag("--json", config.json, "Emit JSON instead of text");
  app.add_option("--min-samples", config.min_samples,
                 "Samples required to justify an invariant (default 3)");
  app.add_option("--weights", config.weights,
                 "Ranking weights 'w1,w2' for delta count and error-stack "
                 "membership (default 1,10)");

  auto* run = app.add_subcommand("run", "Interpret a program");
  run->add_option("program", config.program, "MiniC source file")->required();
  auto* memcheck = app.add_subcommand("memcheck", "Report memory errors and leaks");
  memcheck->add_option("program", config.program, "MiniC source file")->required();
  auto* trace = app.add_subcommand("trace", "Write a program-point trace");
  trace->add_option("program", config.program, "MiniC source file")->required();
  trace->add_option("-o,--output", config.output_path, "Trace file")->required();
  auto* infer = app.add_subcommand("infer", "Infer invariants from a trace");
  infer->add_option("trace", config.trace_path, "Trace file")->required();
  infer->add_option("-o,--output", config.output_path,
                    "Invariant file (default: stdout)");
  auto* diff = app.add_subcommand("diff", "Diff two invariant files");
  diff->add_option("buggy", config.buggy_inv, "Invariants of the buggy version")
      ->required();
  diff->add_option("stable", config.stable_inv, "Invariants of the stable version")
      ->required();
  auto* rootcause =
      app.add_subcommand("rootcause", "Rank likely root causes of a bug");
  rootcause->add_option("--buggy", config.buggy_path, "Buggy version")->required();
  rootcause->add_option("--stable", config.stable_path, "Stable version")
      ->required();
  rootcause->add_option("-o,--output", config.output_path,
                        "Report file; intermediate traces and invariants are "
                        "written beside it");
  for (auto* sub : {run, memcheck, trace, infer, diff, rootcause}) {
    sub->fallthrough();
  }

  std::reverse(tool_args.begin(), tool_args.end());
  try {
    app.parse(tool_args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    err << "membug: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  if (!config.target_args.empty() &&
      !(run->parsed() || memcheck->parsed() || trace->parsed() ||
        rootcause->parsed())) {
    err << "membug: target arguments are only accepted by run, memcheck, "
           "trace and rootcause\n";
    return kExitUsage;
  }

  try {
    if (run->parsed()) return Run(config, out, err);
    if (memcheck->parsed()) return Memcheck(config, out, err);
    if (trace->parsed()) return TraceCommand(config, out, err);
    if (infer->parsed()) return Infer(config, out);
    if (diff->parsed()) return Diff(config, out);
    return RootCause(config, out, err);
  } catch (const UsageError& e) {
    if (*e.what() != '\0') err << "membug: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ExecutionLimitExceeded& e) {
    err << "membug: error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace membug
