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

#include <algorithm>
#include <optional>
#include <vector>

#include "manna/errors.hpp"
#include "manna/model.hpp"
#include "manna/pricing.hpp"

namespace manna {

struct LevelState {
  Rat tau;
  Allocation allocation;
  std::vector<Agent> satisfied;
};

namespace leveling {

inline bool within_sandwich(const TieGraph& g, Agent i, const Bundle& s) {
  for (Item t : g.forced_of(i))
    if (!s.contains(t)) return false;
  for (Item t : s)
    if (!g.forced_of(i).contains(t) && !g.gamma_of(i).contains(t)) return false;
  return true;
}

/// Best bundle price agent i can reach by toggling at most one of its tie
/// items.
inline Rat p_plus(const TieGraph& g, const PriceVector& prices, Agent i, const Bundle& s) {
  if (!within_sandwich(g, i, s)) throw InputError("bundle is outside the agent's optimal range");
  const Rat base = prices.of(s);
  Rat best = base;
  for (Item t : g.gamma_of(i)) best = std::max(best, s.contains(t) ? Rat(base - prices[t]) : Rat(base + prices[t]));
  return best;
}

inline Rat max_bundle_price(const PriceVector& prices, const Allocation& a) {
  Rat best = prices.of(a[0]);
  for (Agent i = 1; i < a.agents(); ++i) best = std::max(best, prices.of(a[i]));
  return best;
}

inline std::vector<Agent> satisfied_agents(const TieGraph& g, const PriceVector& prices, const Allocation& a,
                                           const Rat& tau) {
  std::vector<Agent> out;
  for (Agent i = 0; i < a.agents(); ++i)
    if (p_plus(g, prices, i, a[i]) >= tau) out.push_back(i);
  return out;
}

/// min over the optimal face of the largest bundle price.
inline Rat compute_tau(const TieGraph& g, const PriceVector& prices) {
  std::optional<Rat> tau;
  pricing::for_each_opt(g, [&](const Allocation& a) {
    Rat mx = max_bundle_price(prices, a);
    if (!tau || mx < *tau) tau = std::move(mx);
    return false;
  });
  return *tau;
}

/// Among optimal allocations whose largest bundle price is tau, the first
/// (in tie-assignment order) with the most agents at p+ >= tau. With
/// `require_all`, anything short of every agent is a soundness failure.
inline LevelState find_leveled(const TieGraph& g, const PriceVector& prices, const Rat& tau,
                               bool require_all = false) {
  std::optional<LevelState> best;
  pricing::for_each_opt(g, [&](const Allocation& a) {
    if (max_bundle_price(prices, a) != tau) return false;
    std::vector<Agent> sat = satisfied_agents(g, prices, a, tau);
    if (!best || sat.size() > best->satisfied.size()) best = LevelState{tau, a, std::move(sat)};
    return static_cast<int>(best->satisfied.size()) == g.agents;
  });
  if (!best) throw InvariantError("no optimal allocation attains tau");
  if (require_all && static_cast<int>(best->satisfied.size()) != g.agents)
    throw InvariantError("leveled allocation leaves an agent below tau at a star point");
  return *best;
}

/// Swap per agent certifying p(A_i toggled T) >= tau with T a single tie
/// item or empty; the empty swap is preferred, then the smallest item.
inline std::vector<std::optional<Bundle>> price_swaps(const TieGraph& g, const PriceVector& prices,
                                                      const Allocation& a, const Rat& tau) {
  std::vector<std::optional<Bundle>> out(static_cast<std::size_t>(a.agents()));
  for (Agent i = 0; i < a.agents(); ++i) {
    const Rat base = prices.of(a[i]);
    if (base >= tau) {
      out[static_cast<std::size_t>(i)] = Bundle{};
      continue;
    }
    for (Item t : g.gamma_of(i)) {
      const Rat v = a[i].contains(t) ? Rat(base - prices[t]) : Rat(base + prices[t]);
      if (v >= tau) {
        out[static_cast<std::size_t>(i)] = Bundle{t};
        break;
      }
    }
  }
  return out;
}

}  // namespace leveling
}  // namespace manna
