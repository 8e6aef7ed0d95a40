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

// Augmenting-forest procedure. Starting from an optimal allocation whose
// largest bundle price is tau and an agent r with p+(S_r) < tau, items are
// pushed down the tie-graph tree rooted at r until every touched agent has
// p+ >= tau while its bundle price stays below tau. Every step is checked
// against the invariants that make the procedure correct; a breach raises
// InvariantError carrying the event trace.

#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "manna/errors.hpp"
#include "manna/kkm.hpp"
#include "manna/leveling.hpp"
#include "manna/model.hpp"
#include "manna/pricing.hpp"

namespace manna {

/// The tie-graph component of `root`, oriented towards it.
struct RootedForest {
  Agent root = 0;
  std::vector<Item> parent;     // per agent; -1 for the root and agents outside
  std::vector<char> in_component;  // per agent

  bool contains(Agent i) const { return in_component[static_cast<std::size_t>(i)] != 0; }
  Item parent_of(Agent i) const { return parent[static_cast<std::size_t>(i)]; }
};

struct TraceEvent {
  std::string kind;
  Agent agent = -1;
  Agent other = -1;
  Item item = -1;
  Bundle items;

  std::string describe() const {
    std::ostringstream os;
    os << kind;
    if (agent >= 0) os << " agent=" << agent + 1;
    if (other >= 0) os << " other=" << other + 1;
    if (item >= 0) os << " item=" << item + 1;
    if (!items.empty()) {
      os << " items={";
      bool first = true;
      for (Item t : items) {
        os << (first ? "" : ",") << t + 1;
        first = false;
      }
      os << "}";
    }
    return os.str();
  }
};

struct AugmentResult {
  Allocation allocation;
  std::vector<TraceEvent> trace;
  std::vector<int> enqueue_count;
  int satisfied_before = 0;
  int satisfied_after = 0;
};

struct AugmentRun {
  Allocation start;
  Allocation allocation;
  std::vector<AugmentResult> runs;
  int iterations() const { return static_cast<int>(runs.size()); }
};

namespace augmenting {

inline RootedForest root_at(const TieGraph& g, Agent r) {
  if (r < 0 || r >= g.agents) throw InputError("root agent out of range");
  RootedForest rf;
  rf.root = r;
  rf.parent.assign(static_cast<std::size_t>(g.agents), -1);
  rf.in_component.assign(static_cast<std::size_t>(g.agents), 0);
  rf.in_component[static_cast<std::size_t>(r)] = 1;
  std::vector<char> item_seen(static_cast<std::size_t>(g.items), 0);
  std::queue<Agent> q;
  q.push(r);
  while (!q.empty()) {
    const Agent a = q.front();
    q.pop();
    for (Item t : g.agent_items[static_cast<std::size_t>(a)]) {
      if (item_seen[static_cast<std::size_t>(t)]) continue;
      item_seen[static_cast<std::size_t>(t)] = 1;
      for (Agent b : g.item_agents[static_cast<std::size_t>(t)]) {
        if (rf.in_component[static_cast<std::size_t>(b)]) continue;
        rf.in_component[static_cast<std::size_t>(b)] = 1;
        rf.parent[static_cast<std::size_t>(b)] = t;
        q.push(b);
      }
    }
  }
  return rf;
}

namespace detail {

[[noreturn]] inline void fail(const std::string& what, const std::vector<TraceEvent>& trace) {
  std::ostringstream os;
  os << what << "; trace:";
  for (const auto& e : trace) os << "\n  " << e.describe();
  throw InvariantError(os.str());
}

inline Rat toggled_price(const PriceVector& prices, const Bundle& s, Item t) {
  const Rat base = prices.of(s);
  return s.contains(t) ? Rat(base - prices[t]) : Rat(base + prices[t]);
}

inline Bundle toggled(Bundle s, const Bundle& x) {
  for (Item t : x) s.toggle(t);
  return s;
}

inline int satisfied_count(const TieGraph& g, const PriceVector& prices, const Allocation& a, const Rat& tau) {
  return static_cast<int>(leveling::satisfied_agents(g, prices, a, tau).size());
}

}  // namespace detail

/// The transfer set for agent i: from the items where S_i and the witness
/// bundle differ, keep those whose toggle raises p(S_i); take a minimal
/// subset reaching tau (greedy by gain, then a pruning pass) and drop the
/// parent item, or the smallest item if the parent is absent.
inline Bundle construct_X(const TieGraph& g, const PriceVector& prices, const Bundle& s_i, Agent i,
                          const Bundle& witness_bundle, const Rat& tau, const RootedForest& rf) {
  const Rat base = prices.of(s_i);
  if (leveling::p_plus(g, prices, i, s_i) >= tau) throw InvariantError("construct_X: agent already reaches tau");
  if (prices.of(witness_bundle) < tau) throw InvariantError("construct_X: witness bundle is below tau");
  if (!leveling::within_sandwich(g, i, witness_bundle))
    throw InvariantError("construct_X: witness bundle leaves the agent's optimal range");

  struct Gain {
    Item t;
    Rat gain;
  };
  std::vector<Gain> k;
  for (Item t : sym_diff(witness_bundle, s_i)) {
    Rat gain = detail::toggled_price(prices, s_i, t) - base;
    if (sgn(gain) > 0) k.push_back({t, std::move(gain)});
  }
  std::stable_sort(k.begin(), k.end(), [](const Gain& a, const Gain& b) { return a.gain > b.gain; });

  std::vector<Gain> chosen;
  Rat level = base;
  for (const Gain& x : k) {
    if (level >= tau) break;
    level += x.gain;
    chosen.push_back(x);
  }
  if (level < tau) throw InvariantError("construct_X: improving items do not reach tau");
  std::sort(chosen.begin(), chosen.end(), [](const Gain& a, const Gain& b) { return a.t < b.t; });
  for (auto it = chosen.begin(); it != chosen.end();) {
    if (level - it->gain >= tau) {
      level -= it->gain;
      it = chosen.erase(it);
    } else {
      ++it;
    }
  }

  Bundle k_tilde;
  for (const Gain& x : chosen) k_tilde.insert(x.t);
  const Item parent = rf.parent_of(i);
  Bundle x = k_tilde;
  if (parent >= 0 && k_tilde.contains(parent))
    x.erase(parent);
  else
    x.erase(*k_tilde.begin());

  const Bundle applied = detail::toggled(s_i, x);
  if (!(prices.of(applied) < tau) || leveling::p_plus(g, prices, i, applied) < tau)
    throw InvariantError("construct_X: transfer set misses the price window");
  for (Item t : x) {
    if (!g.gamma_of(i).contains(t) || t == parent) throw InvariantError("construct_X: item outside the child ties");
    if (!(detail::toggled_price(prices, s_i, t) > base)) throw InvariantError("construct_X: non-improving item");
  }
  return x;
}

/// One run of the procedure from deficient agent r. `witnesses[i]` is an
/// optimal allocation in which agent i's bundle price is maximal.
inline AugmentResult augment(const TieGraph& g, const PriceVector& prices, const Rat& tau, const Allocation& start,
                             Agent r, const std::vector<Allocation>& witnesses) {
  const int n = g.agents;
  AugmentResult res;
  auto& trace = res.trace;
  if (leveling::max_bundle_price(prices, start) != tau) detail::fail("input max price differs from tau", trace);
  if (leveling::p_plus(g, prices, r, start[r]) >= tau) detail::fail("root is not deficient", trace);

  const RootedForest rf = root_at(g, r);
  std::vector<Bundle> s = start.bundles;
  std::vector<std::optional<Bundle>> done(static_cast<std::size_t>(n));
  res.enqueue_count.assign(static_cast<std::size_t>(n), 0);
  res.satisfied_before = detail::satisfied_count(g, prices, start, tau);

  std::set<Agent> queue{r};
  res.enqueue_count[static_cast<std::size_t>(r)] = 1;
  trace.push_back({"enqueue", r, -1, -1, {}});

  auto current = [&] {
    Allocation a(n);
    for (Agent i = 0; i < n; ++i)
      a[i] = done[static_cast<std::size_t>(i)] ? *done[static_cast<std::size_t>(i)] : s[static_cast<std::size_t>(i)];
    return a;
  };

  while (!queue.empty()) {
    const Agent i = *queue.begin();
    queue.erase(queue.begin());
    trace.push_back({"process", i, -1, -1, s[static_cast<std::size_t>(i)]});
    const Bundle& si = s[static_cast<std::size_t>(i)];
    if (!rf.contains(i)) detail::fail("processed agent outside the root's component", trace);
    if (leveling::p_plus(g, prices, i, si) >= tau) detail::fail("processed agent already reaches tau", trace);

    const Bundle x = construct_X(g, prices, si, i, witnesses[static_cast<std::size_t>(i)][i], tau, rf);
    trace.push_back({"transfer-set", i, -1, -1, x});
    for (Item t : x) {
      Agent a = -1;
      if (si.contains(t)) {
        for (Agent b : g.item_agents[static_cast<std::size_t>(t)])
          if (b != i) {
            a = b;
            break;
          }
      } else {
        for (Agent b = 0; b < n; ++b)
          if (s[static_cast<std::size_t>(b)].contains(t)) a = b;
      }
      if (a < 0) detail::fail("no counterpart for item " + std::to_string(t + 1), trace);
      if (rf.parent_of(a) != t) detail::fail("counterpart's parent is not the transferred item", trace);
      if (!s[static_cast<std::size_t>(a)].contains(t) && !si.contains(t))
        detail::fail("transferred item held by neither side", trace);

      Bundle moved = s[static_cast<std::size_t>(a)];
      moved.toggle(t);
      if (leveling::p_plus(g, prices, a, moved) < tau) {
        s[static_cast<std::size_t>(a)] = std::move(moved);
        if (++res.enqueue_count[static_cast<std::size_t>(a)] > 1) detail::fail("agent enqueued twice", trace);
        queue.insert(a);
        trace.push_back({"enqueue", a, i, t, {}});
      } else {
        if (!(prices.of(moved) < tau)) detail::fail("finalized child bundle reaches tau", trace);
        done[static_cast<std::size_t>(a)] = std::move(moved);
        trace.push_back({"finalize-child", a, i, t, *done[static_cast<std::size_t>(a)]});
      }
    }
    done[static_cast<std::size_t>(i)] = detail::toggled(si, x);
    trace.push_back({"finalize", i, -1, -1, *done[static_cast<std::size_t>(i)]});
    if (!current().is_complete(g.items)) detail::fail("bundles no longer partition the items", trace);
  }

  res.allocation = current();
  for (Agent i = 0; i < n; ++i) {
    const Bundle& b = res.allocation[i];
    for (Item t : b)
      if (!g.has_edge(i, t)) detail::fail("item " + std::to_string(t + 1) + " left its tie edges", trace);
    if (b != start[i] && (!(prices.of(b) < tau) || leveling::p_plus(g, prices, i, b) < tau))
      detail::fail("changed bundle of agent " + std::to_string(i + 1) + " misses the price window", trace);
  }
  if (leveling::max_bundle_price(prices, res.allocation) != tau) detail::fail("max price moved off tau", trace);
  res.satisfied_after = detail::satisfied_count(g, prices, res.allocation, tau);
  if (res.satisfied_after <= res.satisfied_before) detail::fail("satisfied count did not increase", trace);
  return res;
}

/// Repeats augment from the smallest deficient agent, starting at the first
/// optimal allocation (tie-assignment order) whose max price is tau.
inline AugmentRun solve_by_augmenting(const TieGraph& g, const PriceVector& prices, const Rat& tau,
                                      const std::vector<Allocation>& witnesses) {
  AugmentRun run;
  std::optional<Allocation> start;
  pricing::for_each_opt(g, [&](const Allocation& a) {
    if (leveling::max_bundle_price(prices, a) != tau) return false;
    start = a;
    return true;
  });
  if (!start) throw InvariantError("no optimal allocation attains tau");
  run.start = *start;
  Allocation cur = *start;
  while (true) {
    Agent r = -1;
    for (Agent i = 0; i < g.agents && r < 0; ++i)
      if (leveling::p_plus(g, prices, i, cur[i]) < tau) r = i;
    if (r < 0) break;
    if (run.iterations() >= g.agents) throw InvariantError("augmenting did not converge within n iterations");
    run.runs.push_back(augment(g, prices, tau, cur, r, witnesses));
    cur = run.runs.back().allocation;
  }
  run.allocation = std::move(cur);
  return run;
}

inline std::vector<Allocation> witness_allocations(const StarPoint& sp) {
  std::vector<Allocation> out;
  for (const auto& c : sp.witnesses) out.push_back(c.allocation);
  return out;
}

}  // namespace augmenting
}  // namespace manna
