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

// Brute-force ground truth. Nothing here reads the tie graph: optimality is
// decided by comparing LP objectives over every complete allocation, and
// Pareto optimality by scanning every allocation for a dominator.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "manna/certificate.hpp"
#include "manna/enumerate.hpp"
#include "manna/errors.hpp"
#include "manna/kkm.hpp"
#include "manna/leveling.hpp"
#include "manna/model.hpp"
#include "manna/preprocess.hpp"
#include "manna/pricing.hpp"

namespace manna {

struct Verdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerificationReport {
  std::vector<Verdict> checks;
  std::vector<std::optional<SwapWitness>> ief1_perturbed_witnesses;
  std::vector<std::optional<SwapWitness>> ief1_original_witnesses;
  std::vector<std::string> boundary_checks;
  bool po_verified = true;

  bool overall() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const Verdict* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  std::string first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return c.name + ": " + c.detail;
    return {};
  }
};

namespace oracles {

inline std::vector<Rat> value_profile(const Instance& inst, const std::vector<Agent>& owner) {
  std::vector<Rat> v(static_cast<std::size_t>(inst.agents()), Rat(0));
  for (std::size_t j = 0; j < owner.size(); ++j)
    v[static_cast<std::size_t>(owner[j])] += inst.value(owner[j], static_cast<Item>(j));
  return v;
}

/// True iff no complete allocation Pareto dominates `a`.
inline bool brute_po(const Instance& inst, const Allocation& a, std::uint64_t guard = kDefaultGuard) {
  require_complete(inst, a);
  std::vector<Rat> base(static_cast<std::size_t>(inst.agents()));
  for (Agent i = 0; i < inst.agents(); ++i) base[static_cast<std::size_t>(i)] = bundle_value(inst, i, a[i]);
  bool dominated = false;
  enumerate_allocations(
      inst.agents(), inst.items(),
      [&](const std::vector<Agent>& owner) {
        const auto v = value_profile(inst, owner);
        bool strict = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (v[i] < base[i]) return false;
          if (v[i] > base[i]) strict = true;
        }
        dominated = strict;
        return dominated;
      },
      guard);
  return !dominated;
}

struct IEF1POSearch {
  std::optional<Allocation> first;
  std::vector<Allocation> all;  // filled only when collecting
  std::uint64_t count = 0;
};

/// First allocation in enumeration order that is IEF1 and PO; with
/// `collect_all`, every such allocation.
inline IEF1POSearch brute_find_ief1_po(const Instance& inst, bool collect_all = false,
                                       std::uint64_t guard = kDefaultGuard) {
  IEF1POSearch out;
  enumerate_allocations(
      inst.agents(), inst.items(),
      [&](const std::vector<Agent>& owner) {
        const Allocation a = Allocation::from_owners(owner, inst.agents());
        if (!is_ief1(inst, a) || !brute_po(inst, a, guard)) return false;
        ++out.count;
        if (!out.first) out.first = a;
        if (collect_all) out.all.push_back(a);
        return !collect_all;
      },
      guard);
  return out;
}

/// Optimal face at w by its definition: every complete allocation of the
/// perturbed instance whose LP objective equals the dual price total.
inline std::set<Allocation> definitional_opt(const PerturbedInstance& p, const Weight& w,
                                             std::uint64_t guard = kDefaultGuard) {
  const PriceVector prices = pricing::dual_prices(p, w);
  const Rat target = prices.total();
  std::set<Allocation> out;
  enumerate_allocations(
      p.agents(), p.items(),
      [&](const std::vector<Agent>& owner) {
        Allocation a = Allocation::from_owners(owner, p.agents());
        if (pricing::lp_objective(p, w, a) == target) out.insert(std::move(a));
        return false;
      },
      guard);
  return out;
}

/// min over the definitional optimal face of the largest bundle price.
inline Rat brute_tau(const PerturbedInstance& p, const Weight& w, std::uint64_t guard = kDefaultGuard) {
  const PriceVector prices = pricing::dual_prices(p, w);
  std::optional<Rat> tau;
  for (const Allocation& a : definitional_opt(p, w, guard)) {
    Rat mx = leveling::max_bundle_price(prices, a);
    if (!tau || mx < *tau) tau = std::move(mx);
  }
  if (!tau) throw InvariantError("definitional optimal face is empty");
  return *tau;
}

namespace detail {

inline PerturbedInstance rebuild(const Instance& normalized, const Certificate& c) {
  PerturbedInstance p;
  p.base = normalized;
  p.active = c.active;
  p.bar = c.perturbed;
  p.constants.lambda = c.lambda;
  p.constants.omega = c.omega;
  p.constants.epsilon = c.epsilon;
  p.constants.eta = c.eta;
  p.constants.formula_items = normalized.items();
  p.resolution = c.resolution;
  return p;
}

inline std::string agent_list(const std::vector<Agent>& agents) {
  std::string s;
  for (Agent i : agents) s += (s.empty() ? "" : ",") + std::to_string(i + 1);
  return s;
}

/// The perturbed matrix is the normalized one, minus at most epsilon on
/// each nonzero entry, restricted to the listed columns, plus an auxiliary
/// column at lambda/2.
inline std::string perturbation_problem(const Instance& normalized, const Certificate& c) {
  const auto expect_active = preprocess::active_items(normalized);
  if (c.active != expect_active) return "active item list does not match the instance";
  const Instance& bar = c.perturbed;
  const int k = static_cast<int>(c.active.size());
  if (bar.agents() != normalized.agents() || bar.items() != k + 1) return "perturbed matrix has wrong shape";
  if (!c.lambda) return "missing lambda";
  for (Agent i = 0; i < bar.agents(); ++i) {
    if (bar.value(i, k) != *c.lambda / 2) return "auxiliary column is not lambda/2";
    for (int t = 0; t < k; ++t) {
      const Rat& v = normalized.value(i, c.active[static_cast<std::size_t>(t)]);
      const Rat d = v - bar.value(i, t);
      if (sgn(v) == 0 ? sgn(d) != 0 : (sgn(d) <= 0 || d > c.epsilon))
        return "entry (" + std::to_string(i + 1) + "," + std::to_string(t + 1) + ") is not a valid perturbation";
    }
  }
  if (c.eta != preprocess::compute_eta(*c.lambda, normalized.items(), bar)) return "eta does not match lambda";
  return {};
}

}  // namespace detail

/// Re-derives every claim of the certificate from the instance alone.
inline VerificationReport verify_certificate(const Instance& inst, const Certificate& c,
                                             std::uint64_t guard = kDefaultGuard) {
  VerificationReport r;
  auto check = [&](const std::string& name, bool ok, std::string detail = {}) {
    r.checks.push_back({name, ok, ok ? std::string() : std::move(detail)});
    return ok;
  };

  if (!check("digest", c.instance_digest == instance_digest(inst), "digest mismatch")) return r;
  const bool shape_ok =
      c.allocation.agents() == inst.agents() && c.allocation.is_complete(inst.items());
  if (!check("allocation", shape_ok, "allocation is not a complete allocation of the instance")) return r;

  r.ief1_original_witnesses = ief1_witnesses(inst, c.allocation);
  {
    std::vector<Agent> bad;
    for (Agent i = 0; i < inst.agents(); ++i)
      if (!r.ief1_original_witnesses[static_cast<std::size_t>(i)]) bad.push_back(i);
    check("ief1_on_original", bad.empty(), "no witness for agent(s) " + detail::agent_list(bad));
  }
  try {
    check("po_on_original", brute_po(inst, c.allocation, guard), "a complete allocation Pareto dominates it");
  } catch (const SizeError&) {
    r.po_verified = false;
    check("po_on_original", true);
    r.checks.back().detail = "PO unverified: enumeration guard exceeded";
  }

  if (c.trivial) {
    bool zero = true;
    for (const Rat& v : inst.values()) zero = zero && sgn(v) == 0;
    check("trivial_instance", zero, "trivial certificate for an instance with nonzero values");
    return r;
  }

  const Instance normalized = preprocess::normalize_mixed(inst);
  const std::string pert = detail::perturbation_problem(normalized, c);
  if (!check("perturbation", pert.empty(), pert)) return r;
  const PerturbedInstance p = detail::rebuild(normalized, c);
  const Allocation& abar = c.allocation_perturbed;
  if (!check("allocation_perturbed", abar.agents() == p.agents() && abar.is_complete(p.items()),
             "perturbed allocation is not complete"))
    return r;
  if (!check("weight", c.w_star.size() == p.agents(), "weight dimension mismatch")) return r;

  const PriceVector prices = pricing::dual_prices(p, c.w_star);
  check("prices", prices == c.prices, "prices differ from max_i (w_i + eta) v_i(j)");
  check("opt_membership", pricing::in_optimal_face(p, c.w_star, prices, abar),
        "LP objective differs from the price total");

  Rat tau;
  try {
    tau = brute_tau(p, c.w_star, guard);
  } catch (const SizeError&) {
    tau = leveling::compute_tau(pricing::build_tie_graph(p, c.w_star, prices), prices);
  }
  check("tau_check", tau == c.tau && leveling::max_bundle_price(prices, abar) == tau,
        "tau is " + to_string(tau) + ", certificate claims " + to_string(c.tau));

  {
    std::vector<Agent> bad;
    if (c.price_swaps.size() != static_cast<std::size_t>(p.agents())) {
      for (Agent i = 0; i < p.agents(); ++i) bad.push_back(i);
    } else {
      for (Agent i = 0; i < p.agents(); ++i) {
        const auto& sw = c.price_swaps[static_cast<std::size_t>(i)];
        bool ok = sw && sw->size() <= 1;
        if (ok) {
          Bundle applied = abar[i];
          for (Item t : *sw) {
            applied.toggle(t);
            ok = ok && t >= 0 && t < p.items() && pricing::scaled_value(p, c.w_star, i, t) == prices[t];
          }
          ok = ok && prices.of(applied) >= c.tau;
        }
        if (!ok) bad.push_back(i);
      }
    }
    check("price_ief1", bad.empty(), "price swap fails for agent(s) " + detail::agent_list(bad));
  }

  r.ief1_perturbed_witnesses = ief1_witnesses(p.bar, abar);
  {
    std::vector<Agent> bad;
    for (Agent i = 0; i < p.agents(); ++i)
      if (!r.ief1_perturbed_witnesses[static_cast<std::size_t>(i)]) bad.push_back(i);
    check("ief1_on_perturbed", bad.empty(), "no witness for agent(s) " + detail::agent_list(bad));
  }
  check("restriction", preprocess::restrict(p, abar) == c.allocation,
        "original allocation is not the restriction of the perturbed one");

  if (c.w_star.on_boundary()) {
    r.boundary_checks = kkm::boundary_violations(p, c.w_star, prices, abar);
    std::string joined;
    for (const auto& s : r.boundary_checks) joined += (joined.empty() ? "" : "; ") + s;
    check("boundary", r.boundary_checks.empty(), joined);
  }
  return r;
}

}  // namespace oracles
}  // namespace manna
