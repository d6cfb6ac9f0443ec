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

#include "membug/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace membug {
namespace {

const std::map<std::string, std::string>& Anchors() {
  static const auto* anchors = new std::map<std::string, std::string>{
      {"arp_mini",
       "arp -Ainet: the option test checks the address-family mask instead of "
       "the hardware-type mask, so a null hw_type reaches get_hwtype and "
       "my_strcmp reads through it"},
      {"top_mini",
       "top d: a bare word is taken as option d without checking that d needs "
       "an argument, so sinterval stays null and xatou_mini reads through it"},
      {"leak_mini",
       "heap blocks allocated and dropped without free are definitely lost"},
      {"uninit_mini",
       "a branch on an uninitialized local is a conditional jump on an "
       "undefined value"},
  };
  return *anchors;
}

std::vector<std::string> ReadArgs(const std::filesystem::path& path) {
  std::vector<std::string> args;
  std::ifstream in(path);
  for (std::string arg; in >> arg;) args.push_back(arg);
  return args;
}

}  // namespace

std::vector<CorpusCase> CorpusCases(const std::filesystem::path& root) {
  std::vector<CorpusCase> cases;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(root, ec)) {
    const std::filesystem::path dir = entry.path();
    if (!entry.is_directory() || !std::filesystem::exists(dir / "buggy.mc") ||
        !std::filesystem::exists(dir / "fixed.mc")) {
      continue;
    }
    CorpusCase c;
    c.name = dir.filename().string();
    c.buggy_path = dir / "buggy.mc";
    c.fixed_path = dir / "fixed.mc";
    c.target_args = ReadArgs(dir / "args.txt");
    c.golden_memcheck = dir / "golden.memcheck.txt";
    c.golden_diff = dir / "golden.diff.txt";
    c.golden_rootcause = dir / "golden.rootcause.txt";
    auto anchor = Anchors().find(c.name);
    if (anchor != Anchors().end()) c.anchor = anchor->second;
    cases.push_back(std::move(c));
  }
  std::sort(cases.begin(), cases.end(),
            [](const CorpusCase& a, const CorpusCase& b) { return a.name < b.name; });
  return cases;
}

}  // namespace membug
