// Copyright 2026 The Manna Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "manna/model.hpp"
#include "manna/pricing.hpp"
#include "manna/rational.hpp"

namespace manna {

/// Everything needed to re-check a solution against its instance.
struct Certificate {
  std::string instance_digest;
  std::uint64_t seed = 0;
  std::string mode;      // "enumerate" | "augment" | "trivial"
  std::string strategy;  // "exact" | "subdivision" | ""
  bool trivial = false;  // all-zero instance short-circuit

  std::optional<Rat> lambda;
  std::optional<Rat> omega;
  Rat epsilon;
  Rat eta;
  std::uint64_t resolution = 0;
  int attempts = 0;

  std::vector<Item> active;  // original ids of the perturbed columns
  Instance perturbed;        // last column is the auxiliary item
  Weight w_star;
  PriceVector prices;
  Rat tau;
  Allocation allocation_perturbed;
  Allocation allocation;
  /// Per-agent single tie item (or nothing) whose toggle lifts the bundle
  /// price to tau.
  std::vector<std::optional<Bundle>> price_swaps;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// 64-bit FNV-1a over a canonical text rendering of the instance.
inline std::string instance_digest(const Instance& inst) {
  std::string text = std::to_string(inst.agents()) + " " + std::to_string(inst.items());
  for (const Rat& v : inst.values()) text += " " + to_string(v);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace manna
