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

// End-to-end pipeline: normalize, perturb, locate w*, level (by enumeration
// or by augmenting), read off price swaps, restrict, verify. Also the
// random instance generator and the structural dump behind `explain`.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "manna/augmenting.hpp"
#include "manna/certificate.hpp"
#include "manna/errors.hpp"
#include "manna/io.hpp"
#include "manna/kkm.hpp"
#include "manna/leveling.hpp"
#include "manna/oracles.hpp"
#include "manna/parallel.hpp"
#include "manna/preprocess.hpp"
#include "manna/pricing.hpp"

namespace manna {

enum class Mode { Enumerate, Augment };

inline const char* to_string(Mode m) { return m == Mode::Enumerate ? "enumerate" : "augment"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "enumerate") return Mode::Enumerate;
  if (s == "augment") return Mode::Augment;
  throw InputError("unknown mode '" + s + "'");
}

inline kkm::Strategy parse_strategy(const std::string& s) {
  if (s == "exact") return kkm::Strategy::Exact;
  if (s == "subdivision") return kkm::Strategy::Subdivision;
  throw InputError("unknown strategy '" + s + "'");
}

struct SolveOptions {
  std::uint64_t seed = 1;
  Mode mode = Mode::Enumerate;
  kkm::Strategy strategy = kkm::Strategy::Exact;
  std::uint64_t guard = oracles::kDefaultGuard;
  std::uint64_t resolution = std::uint64_t{1} << 32;
  int max_retries = 16;
  int threads = 1;
  int depth_limit = 4;
  bool all_witnesses = false;
};

struct SolveResult {
  Certificate certificate;
  VerificationReport report;
  std::optional<PerturbedInstance> perturbed;
  std::optional<StarPoint> star;
  std::optional<AugmentRun> augment;
  kkm::SearchStats search;
  /// Draws rejected because a ratio-one cycle surfaced in a tie graph.
  int lazy_redraws = 0;
  std::optional<oracles::IEF1POSearch> all_witnesses;
};

namespace solver {

inline bool all_zero(const Instance& inst) {
  for (const Rat& v : inst.values())
    if (sgn(v) != 0) return false;
  return true;
}

/// Draws a perturbation and searches for w*, re-drawing when the search
/// meets a degenerate tie graph.
inline std::pair<PerturbedInstance, StarPoint> perturb_and_search(const Instance& normalized,
                                                                  const Constants& c,
                                                                  const SolveOptions& opts,
                                                                  SolveResult& out) {
  preprocess::PerturbOptions po;
  po.resolution = opts.resolution;
  po.max_retries = opts.max_retries;
  while (true) {
    PerturbedInstance p = preprocess::perturb(normalized, opts.seed, c, po);
    try {
      kkm::SearchOptions so;
      so.threads = opts.threads;
      so.depth_limit = opts.depth_limit;
      StarPoint sp = kkm::find_wstar(p, opts.strategy, so, &out.search);
      return {std::move(p), std::move(sp)};
    } catch (const DegeneracyError& e) {
      ++out.lazy_redraws;
      if (p.attempts >= opts.max_retries)
        throw DegeneracyError("no non-degenerate perturbation within " + std::to_string(opts.max_retries) +
                                  " draws",
                              e.cycle());
      po.skip_draws = p.attempts;
      po.max_retries = opts.max_retries - p.attempts;
    }
  }
}

}  // namespace solver

inline SolveResult solve(const Instance& inst, const SolveOptions& opts = {}) {
  SolveResult out;
  Certificate& cert = out.certificate;
  cert.instance_digest = instance_digest(inst);
  cert.seed = opts.seed;

  if (solver::all_zero(inst)) {
    cert.trivial = true;
    cert.mode = "trivial";
    cert.allocation = Allocation(inst.agents());
    for (Item j = 0; j < inst.items(); ++j) cert.allocation[0].insert(j);
  } else {
    const Instance normalized = preprocess::normalize_mixed(inst);
    const Constants c = preprocess::make_constants(normalized, opts.guard);
    auto [p, sp] = solver::perturb_and_search(normalized, c, opts, out);
    const TieGraph& g = sp.tie_graph;
    const Rat tau = leveling::compute_tau(g, sp.prices);

    Allocation a;
    if (opts.mode == Mode::Enumerate) {
      a = leveling::find_leveled(g, sp.prices, tau, true).allocation;
    } else {
      out.augment = augmenting::solve_by_augmenting(g, sp.prices, tau, augmenting::witness_allocations(sp));
      a = out.augment->allocation;
    }

    cert.mode = to_string(opts.mode);
    cert.strategy = kkm::to_string(opts.strategy);
    cert.lambda = p.constants.lambda;
    cert.omega = p.constants.omega;
    cert.epsilon = p.constants.epsilon;
    cert.eta = p.constants.eta;
    cert.resolution = p.resolution;
    cert.attempts = p.attempts;
    cert.active = p.active;
    cert.perturbed = p.bar;
    cert.w_star = sp.w_star;
    cert.prices = sp.prices;
    cert.tau = tau;
    cert.price_swaps = leveling::price_swaps(g, sp.prices, a, tau);
    cert.allocation = preprocess::restrict(p, a);
    cert.allocation_perturbed = std::move(a);
    out.perturbed = std::move(p);
    out.star = std::move(sp);
  }

  out.report = oracles::verify_certificate(inst, cert, opts.guard);
  if (opts.all_witnesses) out.all_witnesses = oracles::brute_find_ief1_po(inst, true, opts.guard);
  return out;
}

/// Certificate file contents for a solve result.
inline io::Json result_json(const SolveResult& r) {
  io::Json j = io::certificate_json(r.certificate, &r.report);
  if (r.all_witnesses) {
    io::Json all = io::Json::array();
    for (const Allocation& a : r.all_witnesses->all) all.push_back(io::allocation_json(a));
    j["all_ief1_po"] = std::move(all);
  }
  return j;
}

namespace gen {

enum class SignProfile { Goods, Chores, Mixed, ZeroMixed };

inline SignProfile parse_profile(const std::string& s) {
  if (s == "goods") return SignProfile::Goods;
  if (s == "chores") return SignProfile::Chores;
  if (s == "mixed") return SignProfile::Mixed;
  if (s == "zero-mixed") return SignProfile::ZeroMixed;
  throw InputError("unknown sign profile '" + s + "'");
}

inline const char* to_string(SignProfile p) {
  switch (p) {
    case SignProfile::Goods: return "goods";
    case SignProfile::Chores: return "chores";
    case SignProfile::Mixed: return "mixed";
    case SignProfile::ZeroMixed: return "zero-mixed";
  }
  return "?";
}

/// Random integer instance with |values| <= range.
///   goods:      every entry in [1, range]
///   chores:     every entry in [-range, -1]
///   mixed:      each item a good, a chore, or uniform in [-range, range]
///   zero-mixed: each item a good, a chore, or zeros beside positive values
inline Instance random_instance(std::uint64_t seed, int agents, int items, int range, SignProfile profile) {
  if (agents < 2 || items < 2) throw InputError("need at least 2 agents and 2 items");
  if (range < 1) throw InputError("value range must be at least 1");
  std::mt19937_64 rng(seed);
  auto pick = [&](long lo, long hi) {
    return lo + static_cast<long>(preprocess::uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
  };
  std::vector<std::vector<Rat>> rows(static_cast<std::size_t>(agents), std::vector<Rat>(static_cast<std::size_t>(items)));
  for (Item j = 0; j < items; ++j) {
    int kind = 0;  // 0 good, 1 chore, 2 uniform, 3 zero-positive
    if (profile == SignProfile::Chores) kind = 1;
    if (profile == SignProfile::Mixed) kind = static_cast<int>(pick(0, 2));
    if (profile == SignProfile::ZeroMixed) kind = std::array<int, 3>{0, 1, 3}[static_cast<std::size_t>(pick(0, 2))];
    const Agent keep = kind == 3 ? static_cast<Agent>(pick(0, agents - 1)) : 0;
    for (Agent i = 0; i < agents; ++i) {
      long v = 0;
      switch (kind) {
        case 0: v = pick(1, range); break;
        case 1: v = -pick(1, range); break;
        case 2: v = pick(-range, range); break;
        default: v = (i == keep || pick(0, 1)) ? pick(1, range) : 0; break;
      }
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Rat(v);
    }
  }
  return Instance::from_rows(rows);
}

}  // namespace gen

struct ExplainOptions {
  std::optional<Weight> w;
  /// Treat the instance as already perturbed (last column auxiliary) with
  /// this lambda.
  std::optional<Rat> as_perturbed_lambda;
  bool trace = false;
};

/// Structural dump at a given weight, or at w* when none is given.
inline io::Json explain(const Instance& inst, const SolveOptions& opts, const ExplainOptions& eo) {
  io::Json j;
  PerturbedInstance p;
  std::optional<StarPoint> star;
  if (eo.as_perturbed_lambda) {
    p = preprocess::from_perturbed_values(inst, *eo.as_perturbed_lambda, inst.items() - 1);
  } else {
    if (solver::all_zero(inst)) throw InputError("explain needs an instance with a nonzero value");
    const Instance normalized = preprocess::normalize_mixed(inst);
    const Constants c = preprocess::make_constants(normalized, opts.guard);
    if (eo.w) {
      preprocess::PerturbOptions po;
      po.resolution = opts.resolution;
      po.max_retries = opts.max_retries;
      p = preprocess::perturb(normalized, opts.seed, c, po);
    } else {
      SolveResult scratch;
      auto [pp, sp] = solver::perturb_and_search(normalized, c, opts, scratch);
      p = std::move(pp);
      star = std::move(sp);
    }
  }
  const Weight w = eo.w ? *eo.w : star ? star->w_star : Weight::uniform(p.agents());
  const Item aux = p.aux_item();

  const PriceVector prices = pricing::dual_prices(p, w);
  const TieGraph g = pricing::build_tie_graph(p, w, prices);
  const kkm::Snapshot snap = kkm::snapshot(p, w);
  const Rat tau = leveling::compute_tau(g, prices);
  const LevelState level = leveling::find_leveled(g, prices, tau);

  j["eta"] = io::rat_json(p.eta());
  j["perturbed_values"] = io::matrix_json(p.bar, false);
  j["w"] = io::rats_json(w.coords());
  j["w_is_star"] = star.has_value() && !eo.w;
  j["prices"] = io::rats_json(prices.prices);
  io::Json edges = io::Json::array();
  for (Agent i = 0; i < g.agents; ++i)
    for (Item t : g.agent_items[static_cast<std::size_t>(i)])
      edges.push_back(io::Json::array({i + 1, t == aux ? io::Json("aux") : io::Json(t + 1)}));
  j["tie_edges"] = std::move(edges);
  io::Json forced = io::Json::array();
  for (const Bundle& b : g.forced) forced.push_back(io::bundle_json(b, aux));
  j["forced"] = std::move(forced);
  j["tie_items"] = io::bundle_json(g.tie_items, aux);
  io::Json comps = io::Json::array();
  {
    std::vector<int> roots = g.component;
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    for (int root : roots) {
      io::Json agents = io::Json::array(), items = io::Json::array();
      for (Agent i = 0; i < g.agents; ++i)
        if (g.agent_component(i) == root) agents.push_back(i + 1);
      for (Item t = 0; t < g.items; ++t)
        if (g.item_component(t) == root) items.push_back(t == aux ? io::Json("aux") : io::Json(t + 1));
      comps.push_back({{"agents", agents}, {"items", items}});
    }
  }
  j["components"] = std::move(comps);
  j["opt_size"] = snap.opt.size();
  j["tau"] = io::rat_json(tau);
  j["leveled_allocation"] = io::allocation_json(level.allocation, aux);
  io::Json pplus = io::Json::array();
  for (Agent i = 0; i < g.agents; ++i)
    pplus.push_back(io::rat_json(leveling::p_plus(g, prices, i, level.allocation[i])));
  j["p_plus"] = std::move(pplus);
  j["satisfied"] = level.satisfied.size();
  io::Json members = io::Json::array();
  const auto table = kkm::membership_table(snap);
  for (Agent i = 0; i < g.agents; ++i) {
    const auto& c = table[static_cast<std::size_t>(i)];
    io::Json row;
    row["agent"] = i + 1;
    row["member"] = c.has_value();
    if (c) row["witness"] = io::allocation_json(c->allocation, aux);
    members.push_back(std::move(row));
  }
  j["membership"] = std::move(members);
  if (w.on_boundary()) {
    io::Json b = io::Json::array();
    for (const Allocation& a : snap.opt)
      for (const auto& v : kkm::boundary_violations(p, w, prices, a)) b.push_back(v);
    j["boundary"] = {{"support", io::bundle_json(Bundle(w.support()))}, {"violations", b}};
  }
  if (star && opts.mode == Mode::Augment) {
    const AugmentRun run =
        augmenting::solve_by_augmenting(star->tie_graph, star->prices, tau, augmenting::witness_allocations(*star));
    j["augment_iterations"] = run.iterations();
    if (eo.trace) {
      io::Json tr = io::Json::array();
      for (const auto& r : run.runs)
        for (const auto& e : r.trace) tr.push_back(e.describe());
      j["augment_trace"] = std::move(tr);
    }
  }
  return j;
}

}  // namespace manna
