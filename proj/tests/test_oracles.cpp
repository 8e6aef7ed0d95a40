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

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace manna {
namespace {

using testing::e1;
using testing::R;

TEST(BrutePO, E1) {
  EXPECT_TRUE(oracles::brute_po(e1(), Allocation({Bundle{0, 1}, Bundle{}})));
  EXPECT_TRUE(oracles::brute_po(e1(), Allocation({Bundle{}, Bundle{0, 1}})));
  // Values (-2, 3): every other allocation hurts one of the agents.
  EXPECT_TRUE(oracles::brute_po(e1(), Allocation({Bundle{1}, Bundle{0}})));
  // Swapping the two goods helps both.
  const Instance crossed = testing::rows({{R(2), R(1)}, {R(1), R(2)}});
  EXPECT_FALSE(oracles::brute_po(crossed, Allocation({Bundle{1}, Bundle{0}})));
  EXPECT_TRUE(oracles::brute_po(crossed, Allocation({Bundle{0}, Bundle{1}})));
}

TEST(BrutePO, IdenticalValuations) {
  const Instance inst = testing::rows({{R(3), R(-1), R(2)}, {R(3), R(-1), R(2)}});
  for (const auto& o : testing::all_owner_vectors(2, 3)) EXPECT_TRUE(oracles::brute_po(inst, Allocation::from_owners(o, 2)));
}

TEST(BrutePO, GuardExceeded) {
  const Instance inst = gen::random_instance(1, 3, 12, 5, gen::SignProfile::Goods);
  Allocation a(3);
  for (Item j = 0; j < 12; ++j) a[0].insert(j);
  EXPECT_THROW(oracles::brute_po(inst, a, 1000), SizeError);
}

TEST(BruteIEF1PO, ExistsOnE1AndAllZero) {
  const auto r = oracles::brute_find_ief1_po(e1(), true);
  ASSERT_TRUE(r.first.has_value());
  EXPECT_EQ(r.all.size(), r.count);
  for (const auto& a : r.all) {
    EXPECT_TRUE(is_ief1(e1(), a));
    EXPECT_TRUE(oracles::brute_po(e1(), a));
  }
  const Instance zero = testing::rows({{R(0), R(0)}, {R(0), R(0)}});
  const auto z = oracles::brute_find_ief1_po(zero);
  ASSERT_TRUE(z.first.has_value());
  EXPECT_EQ(*z.first, Allocation({Bundle{0, 1}, Bundle{}}));
}

TEST(BruteIEF1PO, NeverNoneOnRandomTwoAgentInstances) {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    const Instance inst = gen::random_instance(seed, 2, 4, 10, static_cast<gen::SignProfile>(seed % 4));
    EXPECT_TRUE(oracles::brute_find_ief1_po(inst).first.has_value()) << "seed " << seed;
  }
}

TEST(BruteTau, EbarAndAgreement) {
  EXPECT_EQ(oracles::brute_tau(testing::ebar(), Weight::uniform(2)), R(33, 16));
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = preprocess::normalize_mixed(gen::random_instance(seed, 2 + seed % 2, 3, 10, gen::SignProfile::Mixed));
    const PerturbedInstance p = preprocess::perturb(inst, seed, preprocess::make_constants(inst));
    for (const Weight& w : {testing::random_weight(rng, p.agents()), kkm::find_wstar(p, kkm::Strategy::Exact).w_star}) {
      const auto prices = pricing::dual_prices(p, w);
      EXPECT_EQ(oracles::brute_tau(p, w), leveling::compute_tau(pricing::build_tie_graph(p, w, prices), prices));
    }
  }
}

TEST(BruteTau, NoTiesIsLargestForcedPrice) {
  const Weight w = testing::W({R(1, 3), R(2, 3)});
  const auto prices = pricing::dual_prices(testing::ebar(), w);
  const auto g = pricing::build_tie_graph(testing::ebar(), w, prices);
  EXPECT_EQ(oracles::brute_tau(testing::ebar(), w), std::max(prices.of(g.forced_of(0)), prices.of(g.forced_of(1))));
}

TEST(Verify, SolverOutputOnE1Passes) {
  for (Mode m : {Mode::Enumerate, Mode::Augment}) {
    SolveOptions o;
    o.mode = m;
    const SolveResult r = solve(e1(), o);
    EXPECT_TRUE(r.report.overall()) << r.report.first_failure();
    EXPECT_TRUE(oracles::verify_certificate(e1(), r.certificate).overall());
  }
}

TEST(Verify, TamperedAllocationFails) {
  const SolveResult r = solve(e1());
  Certificate c = r.certificate;
  std::swap(c.allocation_perturbed.bundles[0], c.allocation_perturbed.bundles[1]);
  std::swap(c.allocation.bundles[0], c.allocation.bundles[1]);
  const auto rep = oracles::verify_certificate(e1(), c);
  EXPECT_FALSE(rep.overall());
  const bool named = !rep.find("opt_membership")->pass || !rep.find("ief1_on_original")->pass ||
                     !rep.find("ief1_on_perturbed")->pass;
  EXPECT_TRUE(named);
}

TEST(Verify, WrongTauFails) {
  Certificate c = solve(e1()).certificate;
  c.tau += 1;
  const auto rep = oracles::verify_certificate(e1(), c);
  ASSERT_NE(rep.find("tau_check"), nullptr);
  EXPECT_FALSE(rep.find("tau_check")->pass);
}

TEST(Verify, DigestMismatch) {
  const Certificate c = solve(e1()).certificate;
  const auto rep = oracles::verify_certificate(testing::rows({{R(4), R(-2)}, {R(3), R(-2)}}), c);
  EXPECT_FALSE(rep.overall());
  EXPECT_EQ(rep.first_failure(), "digest: digest mismatch");
}

TEST(Verify, PoDowngradeWhenGuardExceeded) {
  const Instance inst = gen::random_instance(2, 2, 5, 10, gen::SignProfile::Mixed);
  const Certificate c = solve(inst).certificate;
  const auto rep = oracles::verify_certificate(inst, c, 8);
  EXPECT_FALSE(rep.po_verified);
  EXPECT_TRUE(rep.find("po_on_original")->pass);
}

TEST(Restriction, IEF1AndPOTransfer) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = gen::random_instance(seed, 2 + seed % 2, 3, 10, static_cast<gen::SignProfile>(seed % 4));
    const Instance norm = preprocess::normalize_mixed(inst);
    const PerturbedInstance p = preprocess::perturb(norm, seed, preprocess::make_constants(norm));
    for (const auto& o : testing::all_owner_vectors(p.agents(), p.items())) {
      const Allocation a = Allocation::from_owners(o, p.agents());
      // Without PO only the normalized instance inherits IEF1.
      if (is_ief1(p.bar, a)) {
        EXPECT_TRUE(is_ief1(norm, preprocess::restrict(p, a))) << "seed " << seed;
      }
    }
    const Weight w = testing::random_weight(rng, p.agents());
    for (const Allocation& a : oracles::definitional_opt(p, w))
      EXPECT_TRUE(oracles::brute_po(inst, preprocess::restrict(p, a))) << "seed " << seed;
  }
}

}  // namespace
}  // namespace manna
