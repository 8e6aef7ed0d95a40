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

// Instance and allocation data model plus the definitional fairness and
// efficiency predicates. Agents and items are 0-based internally; file
// formats and user-facing text are 1-based.

#pragma once

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manna/errors.hpp"
#include "manna/rational.hpp"

namespace manna {

using Agent = int;
using Item = int;

/// Additive valuations: an agents x items matrix of exact rationals.
class Instance {
 public:
  Instance() = default;

  Instance(int agents, int items, std::vector<Rat> values)
      : n_(agents), m_(items), values_(std::move(values)) {
    if (n_ < 2) throw InputError("instance needs at least 2 agents");
    if (m_ < 2) throw InputError("instance needs at least 2 items");
    if (values_.size() != static_cast<std::size_t>(n_) * m_)
      throw InputError("value matrix has wrong size");
  }

  static Instance from_rows(const std::vector<std::vector<Rat>>& rows) {
    if (rows.empty()) throw InputError("empty value matrix");
    std::vector<Rat> flat;
    const std::size_t m = rows.front().size();
    for (const auto& row : rows) {
      if (row.size() != m) throw InputError("ragged value matrix");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return Instance(static_cast<int>(rows.size()), static_cast<int>(m), std::move(flat));
  }

  int agents() const noexcept { return n_; }
  int items() const noexcept { return m_; }

  const Rat& value(Agent i, Item j) const { return values_[index(i, j)]; }
  Rat& value(Agent i, Item j) { return values_[index(i, j)]; }

  const std::vector<Rat>& values() const noexcept { return values_; }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::size_t index(Agent i, Item j) const {
    return static_cast<std::size_t>(i) * m_ + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  int m_ = 0;
  std::vector<Rat> values_;
};

/// A set of items, kept sorted and duplicate-free.
class Bundle {
 public:
  Bundle() = default;
  Bundle(std::initializer_list<Item> items) : items_(items) { normalize(); }
  explicit Bundle(std::vector<Item> items) : items_(std::move(items)) { normalize(); }

  bool contains(Item t) const { return std::binary_search(items_.begin(), items_.end(), t); }
  void insert(Item t) {
    auto it = std::lower_bound(items_.begin(), items_.end(), t);
    if (it == items_.end() || *it != t) items_.insert(it, t);
  }
  void erase(Item t) {
    auto it = std::lower_bound(items_.begin(), items_.end(), t);
    if (it != items_.end() && *it == t) items_.erase(it);
  }
  void toggle(Item t) {
    if (contains(t))
      erase(t);
    else
      insert(t);
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }
  const std::vector<Item>& items() const noexcept { return items_; }

  friend bool operator==(const Bundle&, const Bundle&) = default;
  friend auto operator<=>(const Bundle&, const Bundle&) = default;

 private:
  void normalize() {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  }

  std::vector<Item> items_;
};

inline Bundle sym_diff(const Bundle& a, const Bundle& b) {
  std::vector<Item> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return Bundle(std::move(out));
}

/// One bundle per agent. Bundles must be pairwise disjoint.
struct Allocation {
  std::vector<Bundle> bundles;

  Allocation() = default;
  explicit Allocation(int agents) : bundles(static_cast<std::size_t>(agents)) {}
  explicit Allocation(std::vector<Bundle> b) : bundles(std::move(b)) {}

  /// owner[j] is the agent holding item j.
  static Allocation from_owners(const std::vector<Agent>& owner, int agents) {
    Allocation a(agents);
    for (std::size_t j = 0; j < owner.size(); ++j)
      a.bundles[static_cast<std::size_t>(owner[j])].insert(static_cast<Item>(j));
    return a;
  }

  int agents() const noexcept { return static_cast<int>(bundles.size()); }
  const Bundle& operator[](Agent i) const { return bundles[static_cast<std::size_t>(i)]; }
  Bundle& operator[](Agent i) { return bundles[static_cast<std::size_t>(i)]; }

  /// Holder of item t, or -1.
  Agent owner_of(Item t) const {
    for (std::size_t i = 0; i < bundles.size(); ++i)
      if (bundles[i].contains(t)) return static_cast<Agent>(i);
    return -1;
  }

  /// Disjoint and covering exactly [0, items).
  bool is_complete(int items) const {
    std::vector<int> seen(static_cast<std::size_t>(items), 0);
    for (const Bundle& b : bundles)
      for (Item t : b) {
        if (t < 0 || t >= items) return false;
        if (seen[static_cast<std::size_t>(t)]++) return false;
      }
    return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
  friend auto operator<=>(const Allocation&, const Allocation&) = default;
};

/// Per-agent evidence of IEF1: toggling `swap` (at most one item) in the
/// agent's own bundle reaches `applied_bundle_value`, which weakly beats
/// every bundle in the agent's eyes.
struct SwapWitness {
  Agent agent = 0;
  Bundle swap;
  Rat applied_bundle_value;

  friend bool operator==(const SwapWitness&, const SwapWitness&) = default;
};

inline Rat bundle_value(const Instance& inst, Agent i, const Bundle& s) {
  if (i < 0 || i >= inst.agents()) throw InputError("agent id out of range");
  Rat total = 0;
  for (Item t : s) {
    if (t < 0 || t >= inst.items()) throw InputError("item id out of range");
    total += inst.value(i, t);
  }
  return total;
}

inline void require_complete(const Instance& inst, const Allocation& a) {
  if (a.agents() != inst.agents()) throw InputError("allocation has wrong number of bundles");
  if (!a.is_complete(inst.items())) throw InputError("allocation is not complete");
}

/// Lexicographically smallest witness per agent: the empty swap first, then
/// single items by id. nullopt means the agent has no witness.
inline std::vector<std::optional<SwapWitness>> ief1_witnesses(const Instance& inst,
                                                              const Allocation& a) {
  require_complete(inst, a);
  std::vector<std::optional<SwapWitness>> out(static_cast<std::size_t>(inst.agents()));
  for (Agent i = 0; i < inst.agents(); ++i) {
    Rat best_other = bundle_value(inst, i, a[0]);
    for (Agent k = 1; k < inst.agents(); ++k) best_other = std::max(best_other, bundle_value(inst, i, a[k]));
    const Rat own = bundle_value(inst, i, a[i]);
    if (own >= best_other) {
      out[static_cast<std::size_t>(i)] = SwapWitness{i, Bundle{}, own};
      continue;
    }
    for (Item t = 0; t < inst.items(); ++t) {
      const Rat applied = a[i].contains(t) ? Rat(own - inst.value(i, t)) : Rat(own + inst.value(i, t));
      if (applied >= best_other) {
        out[static_cast<std::size_t>(i)] = SwapWitness{i, Bundle{t}, applied};
        break;
      }
    }
  }
  return out;
}

inline bool is_ief1(const Instance& inst, const Allocation& a) {
  const auto w = ief1_witnesses(inst, a);
  return std::all_of(w.begin(), w.end(), [](const auto& x) { return x.has_value(); });
}

inline bool pareto_dominates(const Instance& inst, const Allocation& b, const Allocation& a) {
  require_complete(inst, a);
  require_complete(inst, b);
  bool strict = false;
  for (Agent i = 0; i < inst.agents(); ++i) {
    const Rat vb = bundle_value(inst, i, b[i]);
    const Rat va = bundle_value(inst, i, a[i]);
    if (vb < va) return false;
    if (vb > va) strict = true;
  }
  return strict;
}

inline Rat social_welfare(const Instance& inst, const Allocation& a) {
  require_complete(inst, a);
  Rat total = 0;
  for (Agent i = 0; i < inst.agents(); ++i) total += bundle_value(inst, i, a[i]);
  return total;
}

}  // namespace manna
