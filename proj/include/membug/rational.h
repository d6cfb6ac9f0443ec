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

#ifndef MEMBUG_RATIONAL_H_
#define MEMBUG_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace membug {

// Exact fraction in lowest terms with a positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(int64_t value) : num_(value) {}  // NOLINT

  // Normalizes num/den; empty if den is zero or the reduced terms do not fit
  // in 64 bits.
  static std::optional<Rational> Make(__int128 num, __int128 den);
  // Parses "n" or "n/d".
  static std::optional<Rational> Parse(const std::string& text);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  // "n" when integral, otherwise "n/d".
  std::string ToString() const;

  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& other) const;

 private:
  Rational(int64_t num, int64_t den) : num_(num), den_(den) {}

  int64_t num_ = 0;
  int64_t den_ = 1;
};

}  // namespace membug

#endif  // MEMBUG_RATIONAL_H_
