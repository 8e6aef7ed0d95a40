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

// Fixtures and independent reference computations shared by the tests.
// The reference code deliberately avoids the library's own helpers: it
// works on plain owner vectors and bitmasks.

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "manna/manna.hpp"

namespace manna::testing {

inline Rat R(long num, long den = 1) { return make_rat(num, den); }

inline Instance rows(std::vector<std::vector<Rat>> r) { return Instance::from_rows(r); }

/// Two agents, a good and a chore.
inline Instance e1() { return rows({{R(4), R(-2)}, {R(3), R(-1)}}); }

/// Hand-perturbed version of e1 with the auxiliary column; lambda = 1.
inline PerturbedInstance ebar() {
  return preprocess::from_perturbed_values(
      rows({{R(31, 8), R(-17, 8), R(1, 2)}, {R(23, 8), R(-9, 8), R(1, 2)}}), R(1), 2);
}

/// Two agents who each want a different item.
inline PerturbedInstance disjoint_support() {
  return preprocess::from_perturbed_values(rows({{R(1), R(0), R(1, 2)}, {R(0), R(1), R(1, 2)}}), R(1), 2);
}

inline Weight W(std::vector<Rat> c) { return Weight(std::move(c)); }

/// Owner vectors of every complete allocation, item 0 least significant.
inline std::vector<std::vector<int>> all_owner_vectors(int n, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> o(static_cast<std::size_t>(m), 0);
  while (true) {
    out.push_back(o);
    int j = 0;
    while (j < m && o[static_cast<std::size_t>(j)] == n - 1) o[static_cast<std::size_t>(j++)] = 0;
    if (j == m) return out;
    ++o[static_cast<std::size_t>(j)];
  }
}

/// Smallest positive gap between subset sums, from all pairs of bitmasks.
inline std::optional<Rat> ref_lambda(const Instance& inst) {
  std::optional<Rat> best;
  const int m = inst.items();
  for (Agent i = 0; i < inst.agents(); ++i)
    for (unsigned s = 0; s < (1u << m); ++s)
      for (unsigned t = 0; t < (1u << m); ++t) {
        Rat d = 0;
        for (int j = 0; j < m; ++j) {
          if (s >> j & 1) d += inst.value(i, j);
          if (t >> j & 1) d -= inst.value(i, j);
        }
        if (sgn(d) > 0 && (!best || d < *best)) best = d;
      }
  return best;
}

/// Smallest positive welfare gap over all pairs of allocations.
inline std::optional<Rat> ref_omega(const Instance& inst) {
  std::vector<Rat> w;
  for (const auto& o : all_owner_vectors(inst.agents(), inst.items())) {
    Rat s = 0;
    for (int j = 0; j < inst.items(); ++j) s += inst.value(o[static_cast<std::size_t>(j)], j);
    w.push_back(s);
  }
  std::optional<Rat> best;
  for (const Rat& a : w)
    for (const Rat& b : w)
      if (a > b && (!best || a - b < *best)) best = a - b;
  return best;
}

/// Prices from the definition, one agent at a time.
inline std::vector<Rat> ref_prices(const PerturbedInstance& p, const Weight& w) {
  std::vector<Rat> out;
  for (int j = 0; j < p.items(); ++j) {
    std::optional<Rat> best;
    for (int i = 0; i < p.agents(); ++i) {
      Rat v = (w[i] + p.eta()) * p.bar.value(i, j);
      if (!best || v > *best) best = v;
    }
    out.push_back(*best);
  }
  return out;
}

inline Rat ref_bundle_price(const std::vector<Rat>& prices, const Bundle& b) {
  Rat s = 0;
  for (Item t : b) s += prices[static_cast<std::size_t>(t)];
  return s;
}

/// Candidate weights where the price structure of a two-agent instance can
/// change along w = (s, 1 - s): item ties, bundle ties of every complete
/// allocation, and the two endpoints.
inline std::set<Rat> two_agent_breakpoints(const PerturbedInstance& p) {
  std::set<Rat> out{Rat(0), Rat(1)};
  const Rat& eta = p.eta();
  auto add = [&](const Rat& x, const Rat& y) {
    // (s + eta) x = (1 - s + eta) y
    if (sgn(x + y) == 0) return;
    Rat s = (y * (1 + eta) - eta * x) / (x + y);
    if (sgn(s) >= 0 && s <= 1) out.insert(s);
  };
  for (int j = 0; j < p.items(); ++j) add(p.bar.value(0, j), p.bar.value(1, j));
  for (const auto& o : all_owner_vectors(2, p.items())) {
    Rat x = 0, y = 0;
    for (int j = 0; j < p.items(); ++j) (o[static_cast<std::size_t>(j)] == 0 ? x : y) += p.bar.value(o[static_cast<std::size_t>(j)], j);
    add(x, y);
  }
  return out;
}

struct CorpusEntry {
  std::uint64_t seed;
  int agents;
  int items;
  gen::SignProfile profile;
  Instance instance;
};

/// The seeded acceptance corpus: n in {2, 3}, m in 2..5, values in
/// [-10, 10], all four sign profiles.
inline std::vector<CorpusEntry> corpus(int count) {
  std::vector<CorpusEntry> out;
  for (int k = 0; k < count; ++k) {
    CorpusEntry e;
    e.seed = 1000 + static_cast<std::uint64_t>(k);
    e.agents = 2 + k % 2;
    e.items = 2 + (k / 2) % 4;
    e.profile = static_cast<gen::SignProfile>((k / 8) % 4);
    e.instance = gen::random_instance(e.seed, e.agents, e.items, 10, e.profile);
    out.push_back(std::move(e));
  }
  return out;
}

/// Random interior point of the simplex face on a 1/den grid, with the given
/// coordinates forced to zero.
inline Weight random_weight(std::mt19937_64& rng, int n, const std::vector<char>& zero = {}, int den = 97) {
  std::vector<long> parts(static_cast<std::size_t>(n), 0);
  long total = 0;
  for (int i = 0; i < n; ++i) {
    if (!zero.empty() && zero[static_cast<std::size_t>(i)]) continue;
    parts[static_cast<std::size_t>(i)] = 1 + static_cast<long>(preprocess::uniform_below(rng, static_cast<std::uint64_t>(den)));
    total += parts[static_cast<std::size_t>(i)];
  }
  std::vector<Rat> c;
  for (long v : parts) c.push_back(make_rat(v, total));
  return Weight(c);
}

}  // namespace manna::testing
