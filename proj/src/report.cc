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

#include "membug/report.h"

#include <sstream>

namespace membug {
namespace {

std::string FrameLocation(const SourceLocation& loc) {
  return loc.file + ":" + std::to_string(loc.line);
}

void RenderFrames(const StackTrace& stack, std::ostringstream& out) {
  for (size_t i = 0; i < stack.frames.size(); ++i) {
    const StackFrame& frame = stack.frames[i];
    out << "   " << (i == 0 ? "at " : "by ") << frame.function << " ("
        << FrameLocation(frame.location) << ")\n";
  }
}

std::string AddressSentence(Address addr, const AddressClass& cls) {
  const std::string sym = addr.ToString();
  switch (cls.kind) {
    case AddressClassKind::kFreedBlock:
      return "Address " + sym + " is " + std::to_string(cls.distance) +
             " bytes inside a block of size " + std::to_string(cls.block_size) +
             " free'd";
    case AddressClassKind::kPastEndOfBlock:
      return "Address " + sym + " is " + std::to_string(cls.distance) +
             " bytes after a block of size " + std::to_string(cls.block_size) +
             " alloc'd";
    case AddressClassKind::kNull:
    case AddressClassKind::kNeverAllocated:
      break;
  }
  return "Address " + sym + " is not stack'd, malloc'd or (recently) free'd";
}

std::string AddressClassToString(const AddressClass& cls) {
  switch (cls.kind) {
    case AddressClassKind::kFreedBlock:
    case AddressClassKind::kPastEndOfBlock:
      return std::string(ToString(cls.kind)) + "(" + std::to_string(cls.block) +
             ")";
    default:
      return ToString(cls.kind);
  }
}

nlohmann::json LocationToJson(const SourceLocation& loc) {
  return {{"file", loc.file}, {"line", loc.line}, {"column", loc.column}};
}

nlohmann::json LeaksToJson(const std::vector<LeakedBlock>& leaks) {
  nlohmann::json records = nlohmann::json::array();
  int64_t bytes = 0;
  for (const LeakedBlock& leak : leaks) {
    bytes += leak.bytes;
    nlohmann::json frames = nlohmann::json::array();
    for (const StackFrame& frame : leak.block.alloc_site.frames) {
      frames.push_back({{"function", frame.function},
                        {"location", LocationToJson(frame.location)}});
    }
    records.push_back({{"block", leak.block.id},
                       {"bytes", leak.bytes},
                       {"allocFrames", std::move(frames)}});
  }
  return {{"bytes", bytes},
          {"blocks", leaks.size()},
          {"records", std::move(records)}};
}

}  // namespace

std::string KindSentence(const MemError& error) {
  const std::string size = error.size ? std::to_string(*error.size) : "?";
  switch (error.kind) {
    case MemErrorKind::kInvalidRead:
      return "Invalid read of size " + size;
    case MemErrorKind::kInvalidWrite:
      return "Invalid write of size " + size;
    case MemErrorKind::kUseOfUninitialized:
      return "Use of uninitialized value of size " + size;
    case MemErrorKind::kConditionalJumpOnUninitialized:
      return "Conditional jump or move depends on uninitialized value(s)";
    case MemErrorKind::kInvalidFree:
      return "Invalid free()";
    case MemErrorKind::kDoubleFree:
      return "Double free()";
    case MemErrorKind::kDivisionByZero:
      return "Integer division by zero";
  }
  return "?";
}

std::string RenderMemError(const MemError& error) {
  std::ostringstream out;
  out << "== " << KindSentence(error) << "\n";
  RenderFrames(error.stack, out);
  if (error.address && error.address_class) {
    out << "   " << AddressSentence(*error.address, *error.address_class)
        << "\n";
  }
  return out.str();
}

std::string RenderMemErrors(const std::vector<MemError>& errors) {
  std::ostringstream out;
  for (size_t i = 0; i < errors.size(); ++i) {
    if (i > 0) out << "==\n";
    out << RenderMemError(errors[i]);
  }
  if (!errors.empty() && errors.back().fatal) {
    out << "==\n== Process terminating with default action of signal 11 "
           "(SIGSEGV)\n";
  }
  return out.str();
}

std::string RenderMemcheckReport(const ExecutionOutcome& outcome) {
  std::ostringstream out;
  out << RenderMemErrors(outcome.errors);
  if (!outcome.errors.empty()) out << "==\n";
  out << "== ERROR SUMMARY: " << outcome.errors.size() << " errors\n";
  if (!outcome.leaks) return out.str();
  const LeakReport& leaks = *outcome.leaks;
  for (const LeakedBlock& leak : leaks.definitely_lost) {
    out << "==\n== " << leak.bytes << " bytes in block" << leak.block.id
        << " are definitely lost\n";
    RenderFrames(leak.block.alloc_site, out);
  }
  out << "==\n== LEAK SUMMARY:\n";
  out << "==    definitely lost: " << leaks.definitely_lost_bytes()
      << " bytes in " << leaks.definitely_lost.size() << " blocks\n";
  out << "==    still reachable: " << leaks.still_reachable_bytes()
      << " bytes in " << leaks.still_reachable.size() << " blocks\n";
  return out.str();
}

nlohmann::json MemErrorToJson(const MemError& error) {
  nlohmann::json frames = nlohmann::json::array();
  for (const StackFrame& frame : error.stack.frames) {
    frames.push_back({{"function", frame.function},
                      {"location", LocationToJson(frame.location)}});
  }
  nlohmann::json json = {
      {"kind", ToString(error.kind)},
      {"size", error.size ? nlohmann::json(*error.size) : nlohmann::json()},
      {"address", error.address ? nlohmann::json(error.address->ToString())
                                : nlohmann::json()},
      {"addressClass", error.address_class
                           ? nlohmann::json(AddressClassToString(*error.address_class))
                           : nlohmann::json()},
      {"fatal", error.fatal},
      {"frames", std::move(frames)},
      {"location", LocationToJson(error.location)},
  };
  return json;
}

nlohmann::json OutcomeToJson(const ExecutionOutcome& outcome) {
  nlohmann::json errors = nlohmann::json::array();
  for (const MemError& error : outcome.errors) {
    errors.push_back(MemErrorToJson(error));
  }
  nlohmann::json status;
  if (outcome.crashed()) {
    status = {{"kind", "crashed"}};
  } else {
    status = {{"kind", "exited"}, {"code", outcome.status.code}};
  }
  nlohmann::json leaks;
  if (outcome.leaks) {
    leaks = {{"definitelyLost", LeaksToJson(outcome.leaks->definitely_lost)},
             {"stillReachable", LeaksToJson(outcome.leaks->still_reachable)}};
  }
  return {{"exitStatus", std::move(status)},
          {"errors", std::move(errors)},
          {"leaks", std::move(leaks)},
          {"stdout", outcome.stdout_text}};
}

}  // namespace membug
