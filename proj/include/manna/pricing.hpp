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

// Weighted-welfare assignment LP over the perturbed instance, solved in
// closed form. For weights w the dual optimum prices item j at
// max_i (w_i + eta) v_i(j); the primal optimal face is every allocation that
// gives each item to an agent attaining that maximum. The tie graph records
// which (agent, item) pairs attain it.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "manna/errors.hpp"
#include "manna/model.hpp"
#include "manna/preprocess.hpp"
#include "manna/rational.hpp"

namespace manna {

/// A point of the probability simplex.
class Weight {
 public:
  Weight() = default;
  explicit Weight(std::vector<Rat> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw InputError("empty weight vector");
    Rat total = 0;
    for (const Rat& c : coords_) {
      if (sgn(c) < 0) throw InputError("weight coordinates must be non-negative");
      total += c;
    }
    if (total != 1) throw InputError("weight coordinates must sum to 1");
  }

  static Weight uniform(int n) { return Weight(std::vector<Rat>(static_cast<std::size_t>(n), Rat(1, n))); }
  static Weight vertex(int n, Agent k) {
    std::vector<Rat> c(static_cast<std::size_t>(n), Rat(0));
    c[static_cast<std::size_t>(k)] = 1;
    return Weight(std::move(c));
  }

  int size() const noexcept { return static_cast<int>(coords_.size()); }
  const Rat& operator[](Agent i) const { return coords_[static_cast<std::size_t>(i)]; }
  const std::vector<Rat>& coords() const noexcept { return coords_; }

  std::vector<Agent> support() const {
    std::vector<Agent> s;
    for (Agent i = 0; i < size(); ++i)
      if (sgn(coords_[static_cast<std::size_t>(i)]) > 0) s.push_back(i);
    return s;
  }
  bool on_boundary() const { return static_cast<int>(support().size()) < size(); }

  friend bool operator==(const Weight&, const Weight&) = default;
  friend bool operator<(const Weight& a, const Weight& b) { return a.coords_ < b.coords_; }

 private:
  std::vector<Rat> coords_;
};

struct PriceVector {
  std::vector<Rat> prices;

  const Rat& operator[](Item j) const { return prices[static_cast<std::size_t>(j)]; }
  std::size_t size() const noexcept { return prices.size(); }

  Rat of(const Bundle& s) const {
    Rat total = 0;
    for (Item t : s) total += prices[static_cast<std::size_t>(t)];
    return total;
  }

  Rat total() const {
    Rat t = 0;
    for (const Rat& p : prices) t += p;
    return t;
  }

  friend bool operator==(const PriceVector&, const PriceVector&) = default;
};

/// Equality graph of the dual optimum. Nodes are agents [0, n) and items,
/// the latter numbered n + j in `component`.
struct TieGraph {
  int agents = 0;
  int items = 0;
  std::vector<std::vector<Item>> agent_items;
  std::vector<std::vector<Agent>> item_agents;
  std::vector<Bundle> forced;  // items whose only maximiser is the agent
  Bundle tie_items;            // items with two or more maximisers
  std::vector<Bundle> gamma;   // tie items adjacent to each agent
  std::vector<int> component;

  int degree(Item j) const { return static_cast<int>(item_agents[static_cast<std::size_t>(j)].size()); }
  bool has_edge(Agent i, Item j) const {
    const auto& a = item_agents[static_cast<std::size_t>(j)];
    return std::find(a.begin(), a.end(), i) != a.end();
  }
  const Bundle& forced_of(Agent i) const { return forced[static_cast<std::size_t>(i)]; }
  const Bundle& gamma_of(Agent i) const { return gamma[static_cast<std::size_t>(i)]; }
  int agent_component(Agent i) const { return component[static_cast<std::size_t>(i)]; }
  int item_component(Item j) const { return component[static_cast<std::size_t>(agents + j)]; }

  std::uint64_t opt_count() const {
    std::uint64_t c = 1;
    for (Item t : tie_items) c *= static_cast<std::uint64_t>(degree(t));
    return c;
  }
};

namespace pricing {

inline constexpr std::uint64_t kOptGuard = 1'000'000;

inline Rat scaled_value(const PerturbedInstance& p, const Weight& w, Agent i, Item j) {
  return (w[i] + p.eta()) * p.value(i, j);
}

inline PriceVector dual_prices(const PerturbedInstance& p, const Weight& w) {
  if (w.size() != p.agents()) throw InputError("weight dimension does not match agent count");
  PriceVector out;
  out.prices.reserve(static_cast<std::size_t>(p.items()));
  for (Item j = 0; j < p.items(); ++j) {
    Rat best = scaled_value(p, w, 0, j);
    for (Agent i = 1; i < p.agents(); ++i) best = std::max(best, scaled_value(p, w, i, j));
    out.prices.push_back(std::move(best));
  }
  return out;
}

namespace detail {

/// Path between two nodes of a forest given as adjacency lists.
inline std::vector<int> forest_path(const std::vector<std::vector<int>>& adj, int from, int to) {
  std::vector<int> prev(adj.size(), -1);
  std::queue<int> q;
  q.push(from);
  prev[static_cast<std::size_t>(from)] = from;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (u == to) break;
    for (int v : adj[static_cast<std::size_t>(u)])
      if (prev[static_cast<std::size_t>(v)] < 0) {
        prev[static_cast<std::size_t>(v)] = u;
        q.push(v);
      }
  }
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(prev[static_cast<std::size_t>(path.back())]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

/// Builds the equality graph. Throws DegeneracyError if it contains a cycle
/// and InvariantError if an edge carries a zero value or an item has no
/// maximiser.
inline TieGraph build_tie_graph(const PerturbedInstance& p, const Weight& w, const PriceVector& prices) {
  const int n = p.agents();
  const int m = p.items();
  TieGraph g;
  g.agents = n;
  g.items = m;
  g.agent_items.resize(static_cast<std::size_t>(n));
  g.item_agents.resize(static_cast<std::size_t>(m));
  g.forced.resize(static_cast<std::size_t>(n));
  g.gamma.resize(static_cast<std::size_t>(n));

  std::vector<int> parent(static_cast<std::size_t>(n + m));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n + m));

  for (Item j = 0; j < m; ++j) {
    for (Agent i = 0; i < n; ++i) {
      if (scaled_value(p, w, i, j) != prices[j]) continue;
      if (sgn(p.value(i, j)) == 0)
        throw InvariantError("tie edge (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                             ") has zero value");
      const int a = find(i), b = find(n + j);
      if (a == b) {
        const std::vector<int> path = detail::forest_path(adj, n + j, i);
        Cycle cycle;
        for (std::size_t k = 0; k + 1 < path.size(); k += 2) cycle.push_back({path[k] - n, path[k + 1]});
        throw DegeneracyError("equality graph has a cycle", cycle);
      }
      parent[static_cast<std::size_t>(a)] = b;
      adj[static_cast<std::size_t>(i)].push_back(n + j);
      adj[static_cast<std::size_t>(n + j)].push_back(i);
      g.agent_items[static_cast<std::size_t>(i)].push_back(j);
      g.item_agents[static_cast<std::size_t>(j)].push_back(i);
    }
    const auto& holders = g.item_agents[static_cast<std::size_t>(j)];
    if (holders.empty()) throw InvariantError("item " + std::to_string(j + 1) + " has no maximiser");
    if (holders.size() == 1) {
      g.forced[static_cast<std::size_t>(holders.front())].insert(j);
    } else {
      g.tie_items.insert(j);
      for (Agent i : holders) g.gamma[static_cast<std::size_t>(i)].insert(j);
    }
  }
  g.component.resize(static_cast<std::size_t>(n + m));
  for (int v = 0; v < n + m; ++v) g.component[static_cast<std::size_t>(v)] = find(v);
  if (static_cast<int>(g.tie_items.size()) > n - 1)
    throw InvariantError("more tie items than a forest allows");
  return g;
}

/// Visits every allocation of the optimal face: forced bundles fixed, each
/// tie item given to one of its maximisers. Tie items are taken in
/// increasing id with the smallest item as the most significant digit, so
/// visiting order is lexicographic in the tie assignment.
template <typename Visitor>
void for_each_opt(const TieGraph& g, Visitor&& visit, std::uint64_t guard = kOptGuard) {
  if (g.opt_count() > guard) throw SizeError("optimal face too large to enumerate");
  const std::vector<Item>& ties = g.tie_items.items();
  std::vector<std::size_t> digit(ties.size(), 0);
  while (true) {
    Allocation a(g.forced);
    for (std::size_t k = 0; k < ties.size(); ++k)
      a[g.item_agents[static_cast<std::size_t>(ties[k])][digit[k]]].insert(ties[k]);
    if (visit(static_cast<const Allocation&>(a))) return;
    std::size_t k = ties.size();
    while (k > 0) {
      --k;
      if (++digit[k] < g.item_agents[static_cast<std::size_t>(ties[k])].size()) break;
      digit[k] = 0;
      if (k == 0) return;
    }
    if (ties.empty()) return;
  }
}

inline std::vector<Allocation> enumerate_opt(const TieGraph& g, std::uint64_t guard = kOptGuard) {
  std::vector<Allocation> out;
  for_each_opt(
      g,
      [&](const Allocation& a) {
        out.push_back(a);
        return false;
      },
      guard);
  return out;
}

inline Rat lp_objective(const PerturbedInstance& p, const Weight& w, const Allocation& a) {
  Rat total = 0;
  for (Agent i = 0; i < a.agents(); ++i)
    for (Item t : a[i]) total += scaled_value(p, w, i, t);
  return total;
}

inline bool in_optimal_face(const PerturbedInstance& p, const Weight& w, const PriceVector& prices,
                            const Allocation& a) {
  return a.agents() == p.agents() && a.is_complete(p.items()) && lp_objective(p, w, a) == prices.total();
}

/// Sign class of each perturbed item (the auxiliary item is a good).
inline std::vector<ItemClass> perturbed_classes(const PerturbedInstance& p) {
  return preprocess::classify_items(p.bar);
}

/// Structural facts every tie graph must satisfy; returns one message per
/// violation.
inline std::vector<std::string> structural_violations(const PerturbedInstance& p, const PriceVector& prices,
                                                      const TieGraph& g) {
  std::vector<std::string> out;
  const auto classes = perturbed_classes(p);
  for (Item j = 0; j < p.items(); ++j) {
    const ItemClass c = classes[static_cast<std::size_t>(j)];
    const int s = sgn(prices[j]);
    if ((c == ItemClass::Good || c == ItemClass::ZeroPositive) && s <= 0)
      out.push_back("non-positive price on good item " + std::to_string(j + 1));
    if (c == ItemClass::Chore && s >= 0) out.push_back("non-negative price on chore " + std::to_string(j + 1));
    if (g.degree(j) < 1) out.push_back("item " + std::to_string(j + 1) + " has no maximiser");
    for (Agent i : g.item_agents[static_cast<std::size_t>(j)])
      if (sgn(p.value(i, j)) == 0) out.push_back("zero-valued tie edge on item " + std::to_string(j + 1));
  }
  int edges = 0;
  for (const auto& row : g.agent_items) edges += static_cast<int>(row.size());
  std::vector<int> roots = g.component;
  std::sort(roots.begin(), roots.end());
  const int components = static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
  if (edges != g.agents + g.items - components) out.push_back("equality graph is not a forest");
  if (static_cast<int>(g.tie_items.size()) > g.agents - 1) out.push_back("more than n-1 tie items");
  return out;
}

}  // namespace pricing
}  // namespace manna
