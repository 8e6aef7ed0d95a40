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
#include <string>
#include <vector>

#include "manna/errors.hpp"
#include "manna/model.hpp"

namespace manna::oracles {

inline constexpr std::uint64_t kDefaultGuard = 10'000'000;

/// agents^items, saturating at guard + 1.
inline std::uint64_t allocation_count(int agents, int items, std::uint64_t guard) {
  std::uint64_t count = 1;
  for (int j = 0; j < items; ++j) {
    count *= static_cast<std::uint64_t>(agents);
    if (count > guard) return guard + 1;
  }
  return count;
}

/// Streams every complete allocation of `items` items to `agents` agents as
/// an owner vector, in mixed-radix order (item 0 is the least significant
/// digit). The visitor returns true to stop early. Returns the number of
/// allocations visited.
template <typename Visitor>
std::uint64_t enumerate_allocations(int agents, int items, Visitor&& visit,
                                    std::uint64_t guard = kDefaultGuard) {
  if (agents < 2 || items < 2) throw InputError("enumeration needs n >= 2 and m >= 2");
  if (allocation_count(agents, items, guard) > guard)
    throw SizeError("n^m = " + std::to_string(agents) + "^" + std::to_string(items) +
                    " exceeds the enumeration guard " + std::to_string(guard));
  std::vector<Agent> owner(static_cast<std::size_t>(items), 0);
  std::uint64_t visited = 0;
  while (true) {
    ++visited;
    if (visit(static_cast<const std::vector<Agent>&>(owner))) return visited;
    std::size_t j = 0;
    while (j < owner.size() && owner[j] == agents - 1) owner[j++] = 0;
    if (j == owner.size()) return visited;
    ++owner[j];
  }
}

}  // namespace manna::oracles
