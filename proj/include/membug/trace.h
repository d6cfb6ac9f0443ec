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

#ifndef MEMBUG_TRACE_H_
#define MEMBUG_TRACE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "membug/interpreter.h"
#include "membug/memory.h"

namespace membug {

enum class PointKind { kEnter, kExit };

struct ProgramPoint {
  std::string function;
  PointKind kind = PointKind::kEnter;

  // "<function>:::ENTER" or "<function>:::EXIT".
  std::string Identity() const;
  static std::optional<ProgramPoint> Parse(const std::string& identity);

  bool operator==(const ProgramPoint&) const = default;
};

enum class VarKind { kInt, kPtr, kIntArray, kCharArray };

const char* ToString(VarKind kind);
std::optional<VarKind> ParseVarKind(const std::string& token);

// Arrays are captured up to kMaxArrayElements elements plus their length.
struct ArrayValue {
  static constexpr int64_t kMaxArrayElements = 16;

  int64_t length = 0;
  std::vector<int64_t> elements;

  bool operator==(const ArrayValue&) const = default;
};

struct Nonsensical {
  bool operator==(const Nonsensical&) const = default;
};

struct VarObservation {
  std::string name;
  VarKind kind = VarKind::kInt;
  // Nonsensical when any observed byte was undefined.
  std::variant<Nonsensical, int64_t, Address, ArrayValue> value;

  bool defined() const { return !std::holds_alternative<Nonsensical>(value); }
  // Value column of the trace format.
  std::string RenderValue() const;

  bool operator==(const VarObservation&) const = default;
};

struct TraceSample {
  ProgramPoint point;
  std::vector<VarObservation> observations;
  // 1-based, consecutive per point.
  int64_t serial = 0;

  bool operator==(const TraceSample&) const = default;
};

struct Trace {
  std::string program;
  std::vector<std::string> args;
  std::vector<TraceSample> samples;

  bool operator==(const Trace&) const = default;
};

// Snapshot of the visible variables: parameters in declaration order, then
// globals (alphabetically, skipping ones shadowed by a parameter), then
// `return` at EXIT points.
TraceSample EmitSample(const MachineState& state, const ProgramPoint& point,
                       const std::optional<Value>& result, int64_t serial);

// Observer that appends a sample at every function entry and exit.
class TraceRecorder : public ExecutionObserver {
 public:
  TraceRecorder(std::string program, std::vector<std::string> args);

  void OnEnter(const MachineState& state) override;
  void OnExit(const MachineState& state,
              const std::optional<Value>& result) override;

  const Trace& trace() const { return trace_; }
  Trace TakeTrace() { return std::move(trace_); }

 private:
  void Record(const MachineState& state, PointKind kind,
              const std::optional<Value>& result);

  Trace trace_;
  std::map<std::string, int64_t> serials_;
};

struct TracedRun {
  ExecutionOutcome outcome;
  Trace trace;
};

// Executes under memcheck with a TraceRecorder attached. The trace's program
// name is the program's file name.
TracedRun TraceExecution(const CheckedProgram& program,
                         const std::vector<std::string>& args);

class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Writes the line-oriented trace format; returns the number of bytes written.
// Throws std::ios_base::failure if the sink fails.
size_t WriteTrace(const Trace& trace, std::ostream& sink);
std::string FormatTrace(const Trace& trace);

// Parses the trace format. Throws TraceFormatError with the offending line.
Trace ReadTrace(std::istream& source);
Trace ParseTrace(const std::string& text);

}  // namespace membug

#endif  // MEMBUG_TRACE_H_
