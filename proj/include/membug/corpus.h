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

#ifndef MEMBUG_CORPUS_H_
#define MEMBUG_CORPUS_H_

#include <filesystem>
#include <string>
#include <vector>

namespace membug {

// One buggy/fixed program pair with its arguments and golden reports.
struct CorpusCase {
  std::string name;
  std::filesystem::path buggy_path;
  std::filesystem::path fixed_path;
  std::vector<std::string> target_args;
  std::filesystem::path golden_memcheck;
  std::filesystem::path golden_diff;
  std::filesystem::path golden_rootcause;
  // The bug scenario the case reproduces.
  std::string anchor;
};

// Cases under `root`, one per subdirectory holding buggy.mc and fixed.mc,
// sorted by name. Arguments come from args.txt, split on whitespace.
std::vector<CorpusCase> CorpusCases(const std::filesystem::path& root);

}  // namespace membug

#endif  // MEMBUG_CORPUS_H_
