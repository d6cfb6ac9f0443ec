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

#include "membug/trace.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

namespace membug {
namespace {

constexpr char kEnterSuffix[] = ":::ENTER";
constexpr char kExitSuffix[] = ":::EXIT";

std::optional<int64_t> ParseInt(std::string_view text) {
  int64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string EscapeString(const std::vector<int64_t>& chars) {
  std::string out;
  for (int64_t c : chars) {
    if (c == 0) break;
    const unsigned char u = static_cast<unsigned char>(c);
    switch (u) {
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '"':
        out += "\\\"";
        break;
      default:
        if (u < 0x20 || u >= 0x7F) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\x%02x", u);
          out += buffer;
        } else {
          out += static_cast<char>(u);
        }
    }
  }
  return out;
}

bool HasTerminator(const ArrayValue& array) {
  return std::find(array.elements.begin(), array.elements.end(), 0) !=
         array.elements.end();
}

VarObservation Observe(const AddressSpace& memory, std::string name,
                       const Type& type, Address addr) {
  VarObservation obs;
  obs.name = std::move(name);
  if (type.is_array()) {
    const Type& element = type.element();
    obs.kind = element.kind() == TypeKind::kChar ? VarKind::kCharArray
                                                 : VarKind::kIntArray;
    ArrayValue array;
    array.length = type.array_length();
    const int64_t captured =
        std::min(array.length, ArrayValue::kMaxArrayElements);
    const int64_t width = element.size_bytes();
    for (int64_t i = 0; i < captured; ++i) {
      const Value v = memory.Load(addr + i * width, static_cast<int>(width));
      if (!v.defined()) return obs;
      array.elements.push_back(v.as_int());
    }
    obs.value = std::move(array);
    return obs;
  }
  const Value v = memory.Load(addr, static_cast<int>(type.size_bytes()));
  obs.kind = type.is_pointer() ? VarKind::kPtr : VarKind::kInt;
  if (!v.defined()) return obs;
  if (type.is_pointer()) {
    obs.value = v.as_address();
  } else {
    obs.value = v.as_int();
  }
  return obs;
}

bool Traceable(const Type& type) {
  if (type.is_array()) return type.element().is_integral();
  return type.is_scalar();
}

class TraceParser {
 public:
  explicit TraceParser(std::istream& source) : source_(source) {}

  Trace Run() {
    Trace trace;
    std::string line;
    if (!Next(line) || line != "minitrace 1") {
      Fail("malformed header: expected 'minitrace 1'");
    }
    if (!Next(line) || !StartsWithWord(line, "program")) {
      Fail("malformed header: expected 'program <name>'");
    }
    trace.program = Rest(line, "program");
    if (!Next(line) || !StartsWithWord(line, "args")) {
      Fail("malformed header: expected 'args <arguments>'");
    }
    std::istringstream args(Rest(line, "args"));
    for (std::string arg; args >> arg;) trace.args.push_back(arg);

    while (Next(line)) {
      if (line.empty()) continue;
      trace.samples.push_back(ParseSample(line));
    }
    return trace;
  }

 private:
  bool Next(std::string& line) {
    // At end of input the line number points just past the last line.
    ++line_no_;
    if (!std::getline(source_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void Fail(const std::string& message) {
    throw TraceFormatError(line_no_, message);
  }

  static bool StartsWithWord(const std::string& line, const std::string& word) {
    return line == word || line.rfind(word + " ", 0) == 0;
  }
  static std::string Rest(const std::string& line, const std::string& word) {
    return line.size() > word.size() ? line.substr(word.size() + 1) : "";
  }

  TraceSample ParseSample(const std::string& ppt_line) {
    TraceSample sample;
    if (!StartsWithWord(ppt_line, "ppt")) {
      Fail("expected 'ppt <point>' but found '" + ppt_line + "'");
    }
    const int ppt_line_no = line_no_;
    auto point = ProgramPoint::Parse(Rest(ppt_line, "ppt"));
    if (!point) Fail("malformed program point '" + Rest(ppt_line, "ppt") + "'");
    sample.point = *point;
    const std::string identity = point->Identity();

    std::string line;
    if (!Next(line) || !StartsWithWord(line, "serial")) {
      Fail("expected 'serial <n>' after ppt " + identity);
    }
    auto serial = ParseInt(Rest(line, "serial"));
    if (!serial) Fail("malformed serial '" + Rest(line, "serial") + "'");
    const int64_t expected = ++serial_counts_[identity];
    if (*serial != expected) {
      Fail("serial " + std::to_string(*serial) + " of " + identity +
           " is not consecutive (expected " + std::to_string(expected) + ")");
    }
    sample.serial = *serial;

    while (Next(line) && !line.empty()) {
      sample.observations.push_back(ParseObservation(line));
    }

    std::vector<std::pair<std::string, VarKind>> schema;
    for (const VarObservation& obs : sample.observations) {
      schema.emplace_back(obs.name, obs.kind);
    }
    auto [it, inserted] = schemas_.emplace(identity, schema);
    if (!inserted && it->second != schema) {
      throw TraceFormatError(ppt_line_no,
                             "observation set of " + identity +
                                 " differs from its first sample");
    }
    return sample;
  }

  VarObservation ParseObservation(const std::string& line) {
    static const std::regex kVar(R"(var ([^ ]+) ([^ ]+) (.*))");
    std::smatch m;
    if (!std::regex_match(line, m, kVar)) {
      Fail("expected 'var <name> <kind> <value>' but found '" + line + "'");
    }
    VarObservation obs;
    obs.name = m[1];
    auto kind = ParseVarKind(m[2]);
    if (!kind) Fail("unknown kind token '" + std::string(m[2]) + "'");
    obs.kind = *kind;
    const std::string value = m[3];
    if (value == "nonsensical") return obs;
    switch (obs.kind) {
      case VarKind::kInt: {
        auto v = ParseInt(value);
        if (!v) Fail("malformed int value '" + value + "'");
        obs.value = *v;
        break;
      }
      case VarKind::kPtr: {
        if (value == "null") {
          obs.value = Address{};
          break;
        }
        auto addr = Address::Parse(value);
        if (!addr) Fail("malformed pointer value '" + value + "'");
        obs.value = *addr;
        break;
      }
      case VarKind::kIntArray:
      case VarKind::kCharArray:
        obs.value = ParseArray(obs.kind, value);
        break;
    }
    return obs;
  }

  ArrayValue ParseArray(VarKind kind, const std::string& value) {
    static const std::regex kArray(R"re((\d+):\[([^\]]*)\]( "(.*)")?)re");
    std::smatch m;
    if (!std::regex_match(value, m, kArray)) {
      Fail("malformed array value '" + value + "'");
    }
    ArrayValue array;
    auto length = ParseInt(std::string(m[1]));
    if (!length) Fail("malformed array length in '" + value + "'");
    array.length = *length;
    const std::string list = m[2];
    if (!list.empty()) {
      std::istringstream elements(list);
      for (std::string element; std::getline(elements, element, ',');) {
        auto v = ParseInt(element);
        if (!v) Fail("malformed array element '" + element + "'");
        array.elements.push_back(*v);
      }
    }
    if (static_cast<int64_t>(array.elements.size()) !=
        std::min(array.length, ArrayValue::kMaxArrayElements)) {
      Fail("array element count does not match length in '" + value + "'");
    }
    const bool has_string = m[3].matched;
    const bool expects_string = kind == VarKind::kCharArray && HasTerminator(array);
    if (has_string != expects_string ||
        (has_string && m[4] != EscapeString(array.elements))) {
      Fail("string rendering inconsistent with elements in '" + value + "'");
    }
    return array;
  }

  std::istream& source_;
  int line_no_ = 0;
  std::map<std::string, int64_t> serial_counts_;
  std::map<std::string, std::vector<std::pair<std::string, VarKind>>> schemas_;
};

}  // namespace

std::string ProgramPoint::Identity() const {
  return function + (kind == PointKind::kEnter ? kEnterSuffix : kExitSuffix);
}

std::optional<ProgramPoint> ProgramPoint::Parse(const std::string& identity) {
  auto ends_with = [&](std::string_view suffix) {
    return identity.size() > suffix.size() &&
           identity.compare(identity.size() - suffix.size(), suffix.size(),
                            suffix) == 0;
  };
  ProgramPoint point;
  std::string_view suffix;
  if (ends_with(kEnterSuffix)) {
    point.kind = PointKind::kEnter;
    suffix = kEnterSuffix;
  } else if (ends_with(kExitSuffix)) {
    point.kind = PointKind::kExit;
    suffix = kExitSuffix;
  } else {
    return std::nullopt;
  }
  point.function = identity.substr(0, identity.size() - suffix.size());
  if (point.function.find_first_of(" :") != std::string::npos) {
    return std::nullopt;
  }
  return point;
}

const char* ToString(VarKind kind) {
  switch (kind) {
    case VarKind::kInt:
      return "int";
    case VarKind::kPtr:
      return "ptr";
    case VarKind::kIntArray:
      return "intArray";
    case VarKind::kCharArray:
      return "charArray";
  }
  return "?";
}

std::optional<VarKind> ParseVarKind(const std::string& token) {
  if (token == "int") return VarKind::kInt;
  if (token == "ptr") return VarKind::kPtr;
  if (token == "intArray") return VarKind::kIntArray;
  if (token == "charArray") return VarKind::kCharArray;
  return std::nullopt;
}

std::string VarObservation::RenderValue() const {
  if (const auto* v = std::get_if<int64_t>(&value)) return std::to_string(*v);
  if (const auto* a = std::get_if<Address>(&value)) {
    return a->is_null() ? "null" : a->ToString();
  }
  if (const auto* array = std::get_if<ArrayValue>(&value)) {
    std::string out = std::to_string(array->length) + ":[";
    for (size_t i = 0; i < array->elements.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(array->elements[i]);
    }
    out += ']';
    if (kind == VarKind::kCharArray && HasTerminator(*array)) {
      out += " \"" + EscapeString(array->elements) + "\"";
    }
    return out;
  }
  return "nonsensical";
}

TraceSample EmitSample(const MachineState& state, const ProgramPoint& point,
                       const std::optional<Value>& result, int64_t serial) {
  TraceSample sample;
  sample.point = point;
  sample.serial = serial;
  std::set<std::string> param_names;
  for (size_t i = 0; i < state.function.params.size(); ++i) {
    const Param& param = state.function.params[i];
    param_names.insert(param.name);
    sample.observations.push_back(
        Observe(state.memory, param.name, param.type, Address{state.slots[i], 0}));
  }
  const Ast& ast = state.program.ast();
  std::vector<size_t> globals;
  for (size_t i = 0; i < ast.globals.size(); ++i) {
    if (Traceable(ast.globals[i].type) && !param_names.count(ast.globals[i].name)) {
      globals.push_back(i);
    }
  }
  std::sort(globals.begin(), globals.end(), [&](size_t a, size_t b) {
    return ast.globals[a].name < ast.globals[b].name;
  });
  for (size_t i : globals) {
    sample.observations.push_back(Observe(state.memory, ast.globals[i].name,
                                          ast.globals[i].type,
                                          Address{state.globals[i], 0}));
  }
  if (point.kind == PointKind::kExit && result) {
    VarObservation obs;
    obs.name = "return";
    obs.kind = state.function.return_type.is_pointer() ? VarKind::kPtr
                                                       : VarKind::kInt;
    if (result->defined()) {
      if (obs.kind == VarKind::kPtr) {
        obs.value = result->as_address();
      } else {
        obs.value = result->as_int();
      }
    }
    sample.observations.push_back(std::move(obs));
  }
  return sample;
}

TraceRecorder::TraceRecorder(std::string program, std::vector<std::string> args) {
  trace_.program = std::move(program);
  trace_.args = std::move(args);
}

void TraceRecorder::OnEnter(const MachineState& state) {
  Record(state, PointKind::kEnter, std::nullopt);
}

void TraceRecorder::OnExit(const MachineState& state,
                           const std::optional<Value>& result) {
  Record(state, PointKind::kExit, result);
}

void TraceRecorder::Record(const MachineState& state, PointKind kind,
                           const std::optional<Value>& result) {
  ProgramPoint point{state.function.name, kind};
  const int64_t serial = ++serials_[point.Identity()];
  trace_.samples.push_back(EmitSample(state, point, result, serial));
}

TracedRun TraceExecution(const CheckedProgram& program,
                         const std::vector<std::string>& args) {
  TraceRecorder recorder(
      std::filesystem::path(program.file()).filename().string(), args);
  ExecuteOptions options;
  options.mode = ExecMode::kMemcheck;
  options.observer = &recorder;
  TracedRun run;
  run.outcome = Execute(program, args, options);
  run.trace = recorder.TakeTrace();
  return run;
}

TraceFormatError::TraceFormatError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

std::string FormatTrace(const Trace& trace) {
  std::ostringstream out;
  out << "minitrace 1\n";
  out << "program " << trace.program << "\n";
  out << "args";
  for (const std::string& arg : trace.args) out << ' ' << arg;
  out << "\n";
  for (const TraceSample& sample : trace.samples) {
    out << "ppt " << sample.point.Identity() << "\n";
    out << "serial " << sample.serial << "\n";
    for (const VarObservation& obs : sample.observations) {
      out << "var " << obs.name << ' ' << ToString(obs.kind) << ' '
          << obs.RenderValue() << "\n";
    }
    out << "\n";
  }
  return out.str();
}

size_t WriteTrace(const Trace& trace, std::ostream& sink) {
  const std::string text = FormatTrace(trace);
  const auto old_mask = sink.exceptions();
  sink.exceptions(std::ios::badbit | std::ios::failbit);
  sink.write(text.data(), static_cast<std::streamsize>(text.size()));
  sink.flush();
  sink.exceptions(old_mask);
  return text.size();
}

Trace ReadTrace(std::istream& source) { return TraceParser(source).Run(); }

Trace ParseTrace(const std::string& text) {
  std::istringstream in(text);
  return ReadTrace(in);
}

}  // namespace membug
