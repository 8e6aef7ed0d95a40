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

// Turns an arbitrary instance into the non-degenerate perturbed instance the
// solver works on: sign normalisation, the separation constants, the extra
// universally-valued item, random rational perturbations and the exact
// ratio-cycle check.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "manna/enumerate.hpp"
#include "manna/errors.hpp"
#include "manna/model.hpp"
#include "manna/rational.hpp"

namespace manna {

/// ZeroNegative items (no positive value, some zeros) and DegenerateZero
/// items (all zeros) never enter the perturbed instance; each goes to its
/// first zero-valuer on restriction.
enum class ItemClass { Good, Chore, ZeroPositive, ZeroNegative, DegenerateZero };

inline const char* to_string(ItemClass c) {
  switch (c) {
    case ItemClass::Good: return "good";
    case ItemClass::Chore: return "chore";
    case ItemClass::ZeroPositive: return "zero-positive";
    case ItemClass::ZeroNegative: return "zero-negative";
    case ItemClass::DegenerateZero: return "degenerate-zero";
  }
  return "?";
}

/// Separation constants. `lambda` is empty for an all-zero instance and
/// `omega` is empty when every complete allocation has the same welfare.
struct Constants {
  std::optional<Rat> lambda;
  std::optional<Rat> omega;
  Rat epsilon;
  Rat eta;
  Rat eta_floor;
  Rat value_cap;
  /// Item count used in the epsilon/eta formulas (original m).
  int formula_items = 0;
};

/// Perturbed instance. `bar` has one column per active item of `base`
/// followed by the auxiliary item; items valued 0 by every agent are left
/// out and handed back to agent 0 by restrict().
struct PerturbedInstance {
  Instance base;
  std::vector<Item> active;
  Instance bar;
  std::vector<Rat> epsilons;  // agents x active.size(), row-major
  Constants constants;
  std::uint64_t seed = 0;
  std::uint64_t resolution = 0;
  int attempts = 0;

  int agents() const noexcept { return bar.agents(); }
  int items() const noexcept { return bar.items(); }
  Item aux_item() const noexcept { return bar.items() - 1; }
  const Rat& eta() const noexcept { return constants.eta; }
  const Rat& value(Agent i, Item j) const { return bar.value(i, j); }
};

namespace preprocess {

/// Items valued positively by someone and negatively by someone else become
/// zero for the negative valuers.
inline Instance normalize_mixed(const Instance& inst) {
  Instance out = inst;
  for (Item j = 0; j < inst.items(); ++j) {
    bool pos = false, neg = false;
    for (Agent i = 0; i < inst.agents(); ++i) {
      pos = pos || sgn(inst.value(i, j)) > 0;
      neg = neg || sgn(inst.value(i, j)) < 0;
    }
    if (pos && neg)
      for (Agent i = 0; i < inst.agents(); ++i)
        if (sgn(out.value(i, j)) < 0) out.value(i, j) = 0;
  }
  return out;
}

inline std::vector<ItemClass> classify_items(const Instance& inst) {
  std::vector<ItemClass> out;
  for (Item j = 0; j < inst.items(); ++j) {
    int pos = 0, neg = 0, zero = 0;
    for (Agent i = 0; i < inst.agents(); ++i) {
      const int s = sgn(inst.value(i, j));
      (s > 0 ? pos : s < 0 ? neg : zero)++;
    }
    if (pos > 0 && neg > 0)
      throw InputError("item " + std::to_string(j + 1) + " has mixed signs; normalize first");
    if (pos == 0 && neg == 0)
      out.push_back(ItemClass::DegenerateZero);
    else if (neg > 0)
      out.push_back(zero > 0 ? ItemClass::ZeroNegative : ItemClass::Chore);
    else if (zero > 0)
      out.push_back(ItemClass::ZeroPositive);
    else
      out.push_back(ItemClass::Good);
  }
  return out;
}

inline constexpr int kLambdaItemGuard = 22;

/// Smallest positive difference v_i(S) - v_i(T) over agents and bundle
/// pairs, i.e. the smallest gap between distinct subset sums of a row.
/// Empty when every value is zero.
inline std::optional<Rat> compute_lambda(const Instance& inst) {
  if (inst.items() > kLambdaItemGuard)
    throw SizeError("lambda needs subset-sum enumeration; too many items");
  std::optional<Rat> best;
  for (Agent i = 0; i < inst.agents(); ++i) {
    std::set<Rat> sums{Rat(0)};
    for (Item j = 0; j < inst.items(); ++j) {
      if (sgn(inst.value(i, j)) == 0) continue;
      std::set<Rat> next = sums;
      for (const Rat& s : sums) next.insert(s + inst.value(i, j));
      sums = std::move(next);
    }
    for (auto it = sums.begin(), nx = std::next(it); nx != sums.end(); ++it, ++nx) {
      Rat gap = *nx - *it;
      if (!best || gap < *best) best = gap;
    }
  }
  return best;
}

/// Smallest positive gap between social-welfare values of complete
/// allocations, by exhaustive enumeration. Empty means +infinity.
inline std::optional<Rat> compute_omega(const Instance& inst,
                                        std::uint64_t guard = oracles::kDefaultGuard) {
  std::set<Rat> welfare;
  oracles::enumerate_allocations(
      inst.agents(), inst.items(),
      [&](const std::vector<Agent>& owner) {
        Rat w = 0;
        for (std::size_t j = 0; j < owner.size(); ++j) w += inst.value(owner[j], static_cast<Item>(j));
        welfare.insert(std::move(w));
        return false;
      },
      guard);
  std::optional<Rat> best;
  for (auto it = welfare.begin(), nx = std::next(welfare.begin()); nx != welfare.end(); ++it, ++nx) {
    Rat gap = *nx - *it;
    if (!best || gap < *best) best = gap;
  }
  return best;
}

/// Lower bound on any positive welfare gap when enumeration is infeasible.
inline Rat omega_lower_bound(const Instance& inst) {
  Rat r(1);
  r /= Rat(lcm_of_denominators(inst.values()) * inst.agents());
  return r;
}

inline Rat lambda_lower_bound(const Instance& inst) {
  Rat r(1);
  r /= Rat(lcm_of_denominators(inst.values()));
  return r;
}

inline Rat value_cap(const Instance& inst) {
  Rat cap = 0;
  for (const Rat& v : inst.values()) cap = std::max(cap, abs_rat(v));
  return cap;
}

/// lambda / (2 m n (V + lambda)); a draw-independent lower bound on eta,
/// since every perturbed value satisfies |v| <= V + lambda.
inline Rat eta_floor(const Rat& lambda, int agents, int items, const Rat& cap) {
  return lambda / (Rat(2 * items * agents) * (cap + lambda));
}

/// Half of min{lambda, n omega, eta_floor omega} / (2m); omega terms drop out
/// when omega is infinite.
inline Rat choose_epsilon(const Rat& lambda, const std::optional<Rat>& omega, int agents, int items,
                          const Rat& cap) {
  if (sgn(lambda) <= 0) throw InputError("lambda must be positive");
  Rat bound = lambda;
  if (omega) {
    bound = std::min(bound, Rat(agents * *omega));
    bound = std::min(bound, Rat(eta_floor(lambda, agents, items, cap) * *omega));
  }
  Rat eps = bound / Rat(2 * items);
  return eps / 2;
}

/// lambda / (2 m n max|v̄|), where m is the original item count.
inline Rat compute_eta(const Rat& lambda, int formula_items, const Instance& bar) {
  const Rat cap = value_cap(bar);
  if (sgn(cap) == 0) throw InputError("perturbed instance is all zero");
  return lambda / (Rat(2 * formula_items * bar.agents()) * cap);
}

inline constexpr int kFullCheckAgents = 4;
inline constexpr int kFullCheckItems = 8;  // including the auxiliary item

/// Searches every simple alternating cycle over nonzero entries for a
/// value-ratio product equal to one. Cycles are rooted at their smallest
/// item to skip rotations.
inline std::optional<Cycle> check_nondegeneracy(const Instance& bar) {
  const int n = bar.agents();
  const int m = bar.items();
  std::vector<char> agent_used(static_cast<std::size_t>(n), 0);
  std::vector<char> item_used(static_cast<std::size_t>(m), 0);
  Cycle path;
  std::optional<Cycle> found;

  // `ratio` is the product over closed steps; the open step leaves
  // path.back() at an item that still needs an agent.
  auto dfs = [&](auto&& self, Item root, const Rat& ratio) -> bool {
    const Item cur = path.back().item;
    for (Agent i = 0; i < n; ++i) {
      if (agent_used[static_cast<std::size_t>(i)] || sgn(bar.value(i, cur)) == 0) continue;
      agent_used[static_cast<std::size_t>(i)] = 1;
      path.back().agent = i;
      // Close back to the root.
      if (path.size() >= 2 && sgn(bar.value(i, root)) != 0) {
        if (ratio * bar.value(i, cur) / bar.value(i, root) == 1) {
          found = path;
          return true;
        }
      }
      for (Item j = root + 1; j < m; ++j) {
        if (item_used[static_cast<std::size_t>(j)] || sgn(bar.value(i, j)) == 0) continue;
        item_used[static_cast<std::size_t>(j)] = 1;
        path.push_back({j, -1});
        const Rat next = ratio * bar.value(i, cur) / bar.value(i, j);
        if (self(self, root, next)) return true;
        path.pop_back();
        item_used[static_cast<std::size_t>(j)] = 0;
      }
      agent_used[static_cast<std::size_t>(i)] = 0;
    }
    return false;
  };

  for (Item root = 0; root < m; ++root) {
    item_used[static_cast<std::size_t>(root)] = 1;
    path = {{root, -1}};
    if (dfs(dfs, root, Rat(1))) return found;
    item_used[static_cast<std::size_t>(root)] = 0;
  }
  return std::nullopt;
}

inline bool full_cycle_check_feasible(const Instance& bar) {
  return bar.agents() <= kFullCheckAgents && bar.items() <= kFullCheckItems;
}

/// Unbiased draw in [0, bound) from a 64-bit engine; portable across
/// standard libraries, unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

struct PerturbOptions {
  /// Perturbations are multiples of epsilon / resolution.
  std::uint64_t resolution = std::uint64_t{1} << 32;
  int max_retries = 16;
  /// Draws consumed before the first candidate; lets callers re-draw after a
  /// lazily detected degeneracy.
  int skip_draws = 0;
};

/// Items of `inst` that someone values nonzero.
/// Items with a positive value, or negative for everyone.
inline std::vector<Item> active_items(const Instance& inst) {
  std::vector<Item> out;
  for (Item j = 0; j < inst.items(); ++j) {
    bool pos = false, zero = false;
    for (Agent i = 0; i < inst.agents(); ++i) {
      pos = pos || sgn(inst.value(i, j)) > 0;
      zero = zero || sgn(inst.value(i, j)) == 0;
    }
    if (pos || !zero) out.push_back(j);
  }
  return out;
}

/// Owner of an inactive item: the first agent who values it at zero.
inline Agent first_zero_valuer(const Instance& inst, Item j) {
  for (Agent i = 0; i < inst.agents(); ++i)
    if (sgn(inst.value(i, j)) == 0) return i;
  throw InvariantError("item " + std::to_string(j + 1) + " has no zero valuer");
}

/// Builds the separation constants (eta is filled in by perturb once the
/// perturbed matrix is known).
inline Constants make_constants(const Instance& normalized, std::uint64_t guard = oracles::kDefaultGuard) {
  Constants c;
  c.formula_items = normalized.items();
  c.value_cap = value_cap(normalized);
  c.lambda = normalized.items() <= kLambdaItemGuard ? compute_lambda(normalized)
                                                    : std::optional<Rat>(lambda_lower_bound(normalized));
  if (!c.lambda) return c;
  if (oracles::allocation_count(normalized.agents(), normalized.items(), guard) <= guard)
    c.omega = compute_omega(normalized, guard);
  else
    c.omega = omega_lower_bound(normalized);
  c.eta_floor = eta_floor(*c.lambda, normalized.agents(), normalized.items(), c.value_cap);
  c.epsilon = choose_epsilon(*c.lambda, c.omega, normalized.agents(), normalized.items(), c.value_cap);
  return c;
}

/// Assembles a perturbed instance from an explicit perturbed matrix whose
/// last column is the auxiliary item. Used for hand-built instances.
inline PerturbedInstance from_perturbed_values(const Instance& bar, const Rat& lambda, int formula_items) {
  PerturbedInstance p;
  std::vector<Rat> base_values;
  for (Agent i = 0; i < bar.agents(); ++i)
    for (Item j = 0; j + 1 < bar.items(); ++j) base_values.push_back(bar.value(i, j));
  const int m = bar.items() - 1;
  if (m >= 2) p.base = Instance(bar.agents(), m, base_values);
  for (Item j = 0; j < m; ++j) p.active.push_back(j);
  p.bar = bar;
  p.epsilons.assign(static_cast<std::size_t>(bar.agents() * m), Rat(0));
  p.constants.lambda = lambda;
  p.constants.formula_items = formula_items;
  p.constants.value_cap = value_cap(bar);
  p.constants.eta = compute_eta(lambda, formula_items, bar);
  return p;
}

/// Draws the perturbed instance. Each draw consumes the seeded engine in a
/// fixed order, so the result depends only on (inst, seed, options). When
/// the instance is small enough for exhaustive cycle search, draws are
/// rejected until the search finds no ratio-one cycle; otherwise the first
/// draw is returned and degeneracy is caught lazily by the tie graph.
inline PerturbedInstance perturb(const Instance& normalized, std::uint64_t seed, const Constants& c,
                                 const PerturbOptions& opts = {}) {
  if (!c.lambda) throw InputError("cannot perturb an all-zero instance");
  if (opts.resolution == 0) throw InputError("perturbation resolution must be positive");
  const int n = normalized.agents();
  const std::vector<Item> active = active_items(normalized);
  const int k = static_cast<int>(active.size());
  std::mt19937_64 rng(seed);

  auto draw = [&](std::vector<Rat>& eps) {
    eps.assign(static_cast<std::size_t>(n * k), Rat(0));
    for (Agent i = 0; i < n; ++i)
      for (int t = 0; t < k; ++t) {
        if (sgn(normalized.value(i, active[static_cast<std::size_t>(t)])) == 0) continue;
        const std::uint64_t step = uniform_below(rng, opts.resolution) + 1;
        Rat e(mpz_class(std::to_string(step)), mpz_class(std::to_string(opts.resolution)));
        e.canonicalize();
        eps[static_cast<std::size_t>(i * k + t)] = c.epsilon * e;
      }
  };

  std::vector<Rat> eps;
  for (int s = 0; s < opts.skip_draws; ++s) draw(eps);

  std::optional<Cycle> last_cycle;
  for (int attempt = 1; attempt <= opts.max_retries; ++attempt) {
    draw(eps);
    std::vector<Rat> values;
    values.reserve(static_cast<std::size_t>(n * (k + 1)));
    for (Agent i = 0; i < n; ++i) {
      for (int t = 0; t < k; ++t)
        values.push_back(normalized.value(i, active[static_cast<std::size_t>(t)]) -
                         eps[static_cast<std::size_t>(i * k + t)]);
      values.push_back(*c.lambda / 2);
    }
    // k + 1 >= 2 since a non-all-zero instance has an active item.
    Instance bar(n, k + 1, std::move(values));
    for (Agent i = 0; i < n; ++i)
      for (int t = 0; t < k; ++t)
        if (sgn(bar.value(i, t)) != sgn(normalized.value(i, active[static_cast<std::size_t>(t)])))
          throw InvariantError("perturbation flipped a value sign");

    if (full_cycle_check_feasible(bar)) {
      last_cycle = check_nondegeneracy(bar);
      if (last_cycle) continue;
    }
    PerturbedInstance p;
    p.base = normalized;
    p.active = active;
    p.bar = std::move(bar);
    p.epsilons = eps;
    p.constants = c;
    p.constants.eta = compute_eta(*c.lambda, c.formula_items, p.bar);
    p.seed = seed;
    p.resolution = opts.resolution;
    p.attempts = opts.skip_draws + attempt;
    return p;
  }
  throw DegeneracyError("no non-degenerate perturbation within " + std::to_string(opts.max_retries) +
                            " draws",
                        last_cycle.value_or(Cycle{}));
}

/// Drops the auxiliary item and maps items back to the original ids;
/// items nobody values go to agent 0.
inline Allocation restrict(const PerturbedInstance& p, const Allocation& a) {
  if (a.agents() != p.agents() || !a.is_complete(p.items()))
    throw InputError("restrict needs a complete allocation of the perturbed instance");
  Allocation out(p.agents());
  std::vector<char> covered(static_cast<std::size_t>(p.base.items()), 0);
  for (Agent i = 0; i < a.agents(); ++i)
    for (Item t : a[i]) {
      if (t == p.aux_item()) continue;
      const Item orig = p.active[static_cast<std::size_t>(t)];
      out[i].insert(orig);
      covered[static_cast<std::size_t>(orig)] = 1;
    }
  for (Item j = 0; j < p.base.items(); ++j)
    if (!covered[static_cast<std::size_t>(j)]) out[first_zero_valuer(p.base, j)].insert(j);
  return out;
}

}  // namespace preprocess
}  // namespace manna
