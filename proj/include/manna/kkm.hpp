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

// Search for a weight vector w* at which every agent can hold a
// highest-priced bundle in some optimal allocation.
//
// Cell i is the set of weights w admitting an optimal allocation in which
// agent i's bundle price is maximal. The cells are closed and cover the
// simplex in the KKM sense, so they share a point; we locate one exactly.
//
// Exact strategy (n <= 3). The item-tie hyperplanes
//   (w_a + eta) v_a(j) = (w_b + eta) v_b(j)
// together with the simplex facets cut the simplex into relatively open
// faces on which the optimal face of the LP is constant. On such a face a
// bundle price is linear, (w_a + eta) v_a(A_a), so the common cell points
// inside it form a finite union of polyhedra cut out by the bundle-tie
// hyperplanes (w_a + eta) v_a(A_a) = (w_b + eta) v_b(A_b) of that face's
// optimal allocations. Taking a lowest-dimensional face that meets the
// intersection, the intersection is compact inside it and therefore has a
// vertex given by bundle-tie hyperplanes restricted to the face. The
// candidates are thus: every vertex of the item arrangement; on every edge,
// its crossings with the edge's bundle-tie hyperplanes; in every 2-face, the
// crossings of its allocation's bundle-tie hyperplanes. Every 2-face touches
// an arrangement vertex and its allocation is optimal there, so the 2-face
// allocations are found by enumerating the optimal faces at the vertices.
//
// Subdivision strategy (any n). Kuhn triangulation of the simplex, vertices
// labelled by the smallest supported agent whose cell contains them;
// fully-labelled simplices are refined and their vertices, centroid and
// the nearby crossings of item-tie, facet and bundle-tie hyperplanes are
// tested exactly.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "manna/errors.hpp"
#include "manna/leveling.hpp"
#include "manna/model.hpp"
#include "manna/parallel.hpp"
#include "manna/pricing.hpp"

namespace manna {

struct CellWitness {
  Agent agent = 0;
  Weight w;
  Allocation allocation;
  Rat max_price;
};

struct StarPoint {
  Weight w_star;
  std::vector<CellWitness> witnesses;
  PriceVector prices;
  TieGraph tie_graph;
};

namespace kkm {

enum class Strategy { Exact, Subdivision };

inline const char* to_string(Strategy s) { return s == Strategy::Exact ? "exact" : "subdivision"; }

struct SearchOptions {
  int threads = 1;
  int depth_limit = 4;
};

struct SearchStats {
  std::size_t candidates_tested = 0;
  std::string stage;
};

/// Prices, tie graph and optimal face at one weight vector.
struct Snapshot {
  Weight w;
  PriceVector prices;
  TieGraph graph;
  std::vector<Allocation> opt;
};

inline Snapshot snapshot(const PerturbedInstance& p, const Weight& w) {
  Snapshot s;
  s.w = w;
  s.prices = pricing::dual_prices(p, w);
  s.graph = pricing::build_tie_graph(p, w, s.prices);
  s.opt = pricing::enumerate_opt(s.graph);
  return s;
}

/// For each agent, the first optimal allocation (in tie-assignment order) in
/// which that agent's bundle price is maximal.
inline std::vector<std::optional<CellWitness>> membership_table(const Snapshot& s) {
  const int n = s.graph.agents;
  std::vector<std::optional<CellWitness>> out(static_cast<std::size_t>(n));
  for (const Allocation& a : s.opt) {
    const Rat mx = leveling::max_bundle_price(s.prices, a);
    for (Agent i = 0; i < n; ++i)
      if (!out[static_cast<std::size_t>(i)] && s.prices.of(a[i]) == mx)
        out[static_cast<std::size_t>(i)] = CellWitness{i, s.w, a, mx};
  }
  return out;
}

inline std::optional<CellWitness> cell_membership(const PerturbedInstance& p, const Weight& w, Agent i) {
  return membership_table(snapshot(p, w))[static_cast<std::size_t>(i)];
}

inline Agent covering_label(const Snapshot& s) {
  const auto table = membership_table(s);
  for (Agent i : s.w.support())
    if (table[static_cast<std::size_t>(i)]) return i;
  throw InvariantError("no supported agent's cell contains the weight vector");
}

inline Agent covering_label(const PerturbedInstance& p, const Weight& w) { return covering_label(snapshot(p, w)); }

inline std::optional<StarPoint> star_from(Snapshot s) {
  auto table = membership_table(s);
  StarPoint sp;
  for (auto& c : table) {
    if (!c) return std::nullopt;
    sp.witnesses.push_back(std::move(*c));
  }
  sp.w_star = std::move(s.w);
  sp.prices = std::move(s.prices);
  sp.tie_graph = std::move(s.graph);
  return sp;
}

inline std::optional<StarPoint> try_star(const PerturbedInstance& p, const Weight& w) {
  return star_from(snapshot(p, w));
}

/// Facts any optimal allocation satisfies at a boundary weight: goods stay
/// inside the support, the heaviest agent holds the auxiliary item and no
/// chore, and that agent's bundle price separates outside from inside.
inline std::vector<std::string> boundary_violations(const PerturbedInstance& p, const Weight& w,
                                                    const PriceVector& prices, const Allocation& a) {
  std::vector<std::string> out;
  const auto supp = w.support();
  auto in_supp = [&](Agent i) { return std::binary_search(supp.begin(), supp.end(), i); };
  const auto classes = pricing::perturbed_classes(p);
  for (Item j = 0; j < p.items(); ++j)
    if (classes[static_cast<std::size_t>(j)] == ItemClass::Good && !in_supp(a.owner_of(j)))
      out.push_back("good " + std::to_string(j + 1) + " allocated outside the support");
  const Agent ell = a.owner_of(p.aux_item());
  const Rat wmax = *std::max_element(w.coords().begin(), w.coords().end());
  if (w[ell] != wmax) out.push_back("auxiliary item not held by a heaviest agent");
  for (Item t : a[ell])
    if (classes[static_cast<std::size_t>(t)] == ItemClass::Chore)
      out.push_back("heaviest agent holds chore " + std::to_string(t + 1));
  const Rat p_ell = prices.of(a[ell]);
  std::optional<Rat> out_max, in_max;
  for (Agent i = 0; i < a.agents(); ++i) {
    Rat pi = prices.of(a[i]);
    auto& slot = in_supp(i) ? in_max : out_max;
    if (!slot || pi > *slot) slot = pi;
  }
  if (out_max && *out_max > p_ell) out.push_back("an unsupported agent out-prices the heaviest agent");
  if (in_max && p_ell > *in_max) out.push_back("heaviest agent exceeds the supported maximum");
  return out;
}

namespace detail {

/// a . w = b.
struct Hyperplane {
  std::vector<Rat> a;
  Rat b;

  void normalize() {
    for (const Rat& c : a)
      if (sgn(c) != 0) {
        const Rat lead = c;
        for (Rat& x : a) x /= lead;
        b /= lead;
        return;
      }
  }
  bool contains(const std::vector<Rat>& w) const {
    Rat s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * w[k];
    return s == b;
  }
  friend bool operator<(const Hyperplane& x, const Hyperplane& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  }
  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;
};

/// (w_a + eta) x = (w_b + eta) y, or nullopt when it holds identically.
inline std::optional<Hyperplane> tie_hyperplane(int n, Agent a, Agent b, const Rat& x, const Rat& y,
                                                const Rat& eta) {
  if (sgn(x) == 0 && sgn(y) == 0) return std::nullopt;
  Hyperplane h;
  h.a.assign(static_cast<std::size_t>(n), Rat(0));
  h.a[static_cast<std::size_t>(a)] = x;
  h.a[static_cast<std::size_t>(b)] -= y;
  h.b = eta * (y - x);
  h.normalize();
  return h;
}

/// Solves the given hyperplanes together with sum(w) = 1. Returns the unique
/// solution, or nullopt if the system is singular.
inline std::optional<std::vector<Rat>> solve(const std::vector<const Hyperplane*>& rows, int n) {
  const std::size_t N = static_cast<std::size_t>(n);
  std::vector<std::vector<Rat>> m;
  for (const Hyperplane* h : rows) {
    std::vector<Rat> r = h->a;
    r.push_back(h->b);
    m.push_back(std::move(r));
  }
  m.emplace_back(N + 1, Rat(1));
  if (m.size() != N) return std::nullopt;
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    while (piv < N && sgn(m[piv][col]) == 0) ++piv;
    if (piv == N) return std::nullopt;
    std::swap(m[piv], m[col]);
    for (std::size_t r = 0; r < N; ++r) {
      if (r == col || sgn(m[r][col]) == 0) continue;
      const Rat f = m[r][col] / m[col][col];
      for (std::size_t c = col; c <= N; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<Rat> x(N);
  for (std::size_t k = 0; k < N; ++k) x[k] = m[k][N] / m[k][k];
  return x;
}

inline bool in_simplex(const std::vector<Rat>& w) {
  return std::all_of(w.begin(), w.end(), [](const Rat& c) { return sgn(c) >= 0; });
}

template <typename Fn>
void for_each_combination(std::size_t total, std::size_t k, Fn&& fn) {
  if (k > total) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(static_cast<const std::vector<std::size_t>&>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == total - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Bundle-tie hyperplanes of one allocation over all agent pairs.
inline std::vector<Hyperplane> bundle_hyperplanes(const PerturbedInstance& p, const Allocation& a) {
  std::vector<Hyperplane> out;
  const int n = p.agents();
  for (Agent x = 0; x < n; ++x)
    for (Agent y = x + 1; y < n; ++y)
      if (auto h = tie_hyperplane(n, x, y, bundle_value(p.bar, x, a[x]), bundle_value(p.bar, y, a[y]), p.eta()))
        out.push_back(std::move(*h));
  return out;
}

/// Points where n-1 of the hyperplanes meet inside the simplex.
inline void add_vertices(const std::vector<Hyperplane>& hs, int n, std::set<std::vector<Rat>>& out) {
  for_each_combination(hs.size(), static_cast<std::size_t>(n - 1), [&](const std::vector<std::size_t>& idx) {
    std::vector<const Hyperplane*> rows;
    for (std::size_t k : idx) rows.push_back(&hs[k]);
    if (auto w = solve(rows, n); w && in_simplex(*w)) out.insert(std::move(*w));
  });
}

/// Snapshot per point, computed on up to `threads` workers. The first
/// exception by index is rethrown.
inline std::vector<Snapshot> snapshots(const PerturbedInstance& p, const std::vector<std::vector<Rat>>& pts,
                                       int threads) {
  std::vector<std::optional<Snapshot>> out(pts.size());
  parallel_find_first(pts.size(), threads, [&](std::size_t k) {
    out[k] = snapshot(p, Weight(pts[k]));
    return false;
  });
  std::vector<Snapshot> done;
  done.reserve(pts.size());
  for (auto& s : out) done.push_back(std::move(*s));
  return done;
}

class CandidateTester {
 public:
  CandidateTester(const PerturbedInstance& p, int threads, SearchStats* stats)
      : p_(p), threads_(threads), stats_(stats) {}

  /// Tests the not-yet-seen points in lexicographic order.
  std::optional<StarPoint> test(const std::set<std::vector<Rat>>& pts, const std::string& stage) {
    std::vector<std::vector<Rat>> fresh;
    for (const auto& w : pts)
      if (seen_.insert(w).second) fresh.push_back(w);
    if (stats_) {
      stats_->candidates_tested += fresh.size();
      stats_->stage = stage;
    }
    const auto hit = parallel_find_first(fresh.size(), threads_,
                                         [&](std::size_t k) { return try_star(p_, Weight(fresh[k])).has_value(); });
    if (!hit) return std::nullopt;
    return try_star(p_, Weight(fresh[*hit]));
  }

 private:
  const PerturbedInstance& p_;
  int threads_;
  SearchStats* stats_;
  std::set<std::vector<Rat>> seen_;
};

inline std::set<std::vector<Rat>> equal_price_points(const PerturbedInstance& p, const Allocation& a) {
  std::set<std::vector<Rat>> out;
  add_vertices(bundle_hyperplanes(p, a), p.agents(), out);
  return out;
}

/// Item-tie hyperplanes over all agent pairs, plus the simplex facets.
inline std::vector<Hyperplane> item_hyperplanes(const PerturbedInstance& p) {
  const int n = p.agents();
  std::set<Hyperplane> unique;
  for (Agent a = 0; a < n; ++a)
    for (Agent b = a + 1; b < n; ++b)
      for (Item j = 0; j < p.items(); ++j)
        if (auto h = tie_hyperplane(n, a, b, p.value(a, j), p.value(b, j), p.eta())) unique.insert(*h);
  for (Agent k = 0; k < n; ++k) {
    Hyperplane f;
    f.a.assign(static_cast<std::size_t>(n), Rat(0));
    f.a[static_cast<std::size_t>(k)] = 1;
    f.b = 0;
    unique.insert(f);
  }
  return {unique.begin(), unique.end()};
}

inline StarPoint find_exact(const PerturbedInstance& p, const SearchOptions& opts, SearchStats* stats) {
  const int n = p.agents();
  if (n > 3) throw InputError("the exact strategy supports at most 3 agents");
  const std::vector<Hyperplane> hs = item_hyperplanes(p);

  std::set<std::vector<Rat>> vertices;
  add_vertices(hs, n, vertices);
  CandidateTester tester(p, opts.threads, stats);
  if (auto sp = tester.test(vertices, "arrangement-vertices")) return *sp;

  const std::vector<std::vector<Rat>> vlist(vertices.begin(), vertices.end());
  const std::vector<Snapshot> vsnaps = snapshots(p, vlist, opts.threads);

  if (n == 3) {
    // Edges: consecutive arrangement vertices along each hyperplane.
    std::vector<std::vector<Rat>> mids;
    std::vector<const Hyperplane*> mid_line;
    for (const Hyperplane& h : hs) {
      std::vector<std::vector<Rat>> on;
      for (const auto& v : vlist)
        if (h.contains(v)) on.push_back(v);
      for (std::size_t k = 0; k + 1 < on.size(); ++k) {
        std::vector<Rat> mid(static_cast<std::size_t>(n));
        for (std::size_t c = 0; c < mid.size(); ++c) mid[c] = (on[k][c] + on[k + 1][c]) / 2;
        mids.push_back(std::move(mid));
        mid_line.push_back(&h);
      }
    }
    const std::vector<Snapshot> esnaps = snapshots(p, mids, opts.threads);
    std::set<std::vector<Rat>> edge_pts;
    for (std::size_t e = 0; e < esnaps.size(); ++e)
      for (const Allocation& a : esnaps[e].opt)
        for (const Hyperplane& bh : bundle_hyperplanes(p, a))
          if (auto w = solve({mid_line[e], &bh}, n); w && in_simplex(*w)) edge_pts.insert(std::move(*w));
    if (auto sp = tester.test(edge_pts, "edge-crossings")) return *sp;
  }

  std::set<Allocation> face_allocs;
  for (const Snapshot& s : vsnaps) face_allocs.insert(s.opt.begin(), s.opt.end());
  std::set<std::vector<Rat>> face_pts;
  for (const Allocation& a : face_allocs) {
    auto pts = equal_price_points(p, a);
    face_pts.insert(pts.begin(), pts.end());
  }
  if (auto sp = tester.test(face_pts, "face-crossings")) return *sp;

  throw InvariantError("exact search exhausted every candidate without a common cell point");
}

/// Compositions of `total` into `n` non-negative parts, lexicographic.
inline std::vector<std::vector<int>> compositions(int total, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int k, int left) -> void {
    if (k == n - 1) {
      cur[static_cast<std::size_t>(k)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[static_cast<std::size_t>(k)] = v;
      self(self, k + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

inline std::vector<Rat> grid_weight(const std::vector<int>& x, int total) {
  std::vector<Rat> w;
  for (int v : x) w.push_back(Rat(v, total));
  for (Rat& c : w) c.canonicalize();
  return w;
}

inline StarPoint find_subdivision(const PerturbedInstance& p, const SearchOptions& opts, SearchStats* stats) {
  const int n = p.agents();
  CandidateTester tester(p, opts.threads, stats);
  const std::vector<Hyperplane> planes = item_hyperplanes(p);
  std::string best;
  for (int depth = 0; depth <= opts.depth_limit; ++depth) {
    const int N = 2 << depth;
    const auto grid = compositions(N, n);
    std::map<std::vector<int>, std::size_t> index;
    std::vector<std::vector<Rat>> pts;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      index[grid[k]] = k;
      pts.push_back(grid_weight(grid[k], N));
    }
    const std::vector<Snapshot> snaps = snapshots(p, pts, opts.threads);
    std::vector<Agent> label;
    for (const Snapshot& s : snaps) label.push_back(covering_label(s));

    // Kuhn simplices in cumulative coordinates y_k = x_0 + ... + x_k.
    std::set<std::vector<Rat>> cands;
    std::vector<int> perm(static_cast<std::size_t>(n - 1));
    for (const auto& x : grid) {
      std::vector<int> y(static_cast<std::size_t>(n - 1));
      int acc = 0;
      for (int k = 0; k < n - 1; ++k) y[static_cast<std::size_t>(k)] = acc += x[static_cast<std::size_t>(k)];
      for (int k = 0; k < n - 1; ++k) perm[static_cast<std::size_t>(k)] = k;
      do {
        std::vector<std::vector<int>> verts;
        std::vector<int> cur = y;
        bool ok = true;
        auto to_x = [&](const std::vector<int>& yy) {
          std::vector<int> xx(static_cast<std::size_t>(n));
          int prev = 0;
          for (int k = 0; k < n - 1; ++k) {
            xx[static_cast<std::size_t>(k)] = yy[static_cast<std::size_t>(k)] - prev;
            prev = yy[static_cast<std::size_t>(k)];
          }
          xx[static_cast<std::size_t>(n - 1)] = N - prev;
          return xx;
        };
        verts.push_back(to_x(cur));
        for (int k : perm) {
          ++cur[static_cast<std::size_t>(k)];
          const auto xx = to_x(cur);
          if (std::any_of(xx.begin(), xx.end(), [](int v) { return v < 0; })) {
            ok = false;
            break;
          }
          verts.push_back(xx);
        }
        if (!ok) continue;
        std::vector<char> hit(static_cast<std::size_t>(n), 0);
        for (const auto& v : verts) hit[static_cast<std::size_t>(label[index.at(v)])] = 1;
        if (std::count(hit.begin(), hit.end(), 1) != n) continue;

        std::vector<Rat> centroid(static_cast<std::size_t>(n), Rat(0));
        for (const auto& v : verts) {
          const auto& w = pts[index.at(v)];
          cands.insert(w);
          for (int c = 0; c < n; ++c) centroid[static_cast<std::size_t>(c)] += w[static_cast<std::size_t>(c)] / n;
        }
        cands.insert(centroid);
        // Hyperplanes crossing the simplex blown up threefold about its
        // centroid; their (n-1)-fold crossings near it are candidates.
        std::vector<std::vector<Rat>> hull;
        for (const auto& v : verts) {
          std::vector<Rat> q(static_cast<std::size_t>(n));
          for (int c = 0; c < n; ++c)
            q[static_cast<std::size_t>(c)] =
                centroid[static_cast<std::size_t>(c)] +
                3 * (pts[index.at(v)][static_cast<std::size_t>(c)] - centroid[static_cast<std::size_t>(c)]);
          hull.push_back(std::move(q));
        }
        auto crosses = [&](const Hyperplane& h) {
          bool lo = false, hi = false;
          for (const auto& q : hull) {
            Rat d = -h.b;
            for (int c = 0; c < n; ++c) d += h.a[static_cast<std::size_t>(c)] * q[static_cast<std::size_t>(c)];
            lo = lo || sgn(d) <= 0;
            hi = hi || sgn(d) >= 0;
          }
          return lo && hi;
        };
        std::set<Hyperplane> local;
        for (const Hyperplane& h : planes)
          if (crosses(h)) local.insert(h);
        for (const auto& v : verts)
          for (const Allocation& a : snaps[index.at(v)].opt)
            for (Hyperplane& h : bundle_hyperplanes(p, a))
              if (crosses(h)) local.insert(std::move(h));
        std::set<std::vector<Rat>> crossings;
        add_vertices(std::vector<Hyperplane>(local.begin(), local.end()), n, crossings);
        for (const auto& q : crossings) {
          bool near = true;
          for (int c = 0; c < n; ++c)
            if (abs_rat(q[static_cast<std::size_t>(c)] - centroid[static_cast<std::size_t>(c)]) > Rat(3, N)) near = false;
          if (near) cands.insert(q);
        }
        if (best.empty() || depth > 0) {
          std::ostringstream os;
          os << "depth " << depth << ", diameter 1/" << N << ", vertices";
          for (const auto& v : verts) {
            os << " (";
            for (int c = 0; c < n; ++c) os << (c ? "," : "") << manna::to_string(pts[index.at(v)][static_cast<std::size_t>(c)]);
            os << ")";
          }
          best = os.str();
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    if (auto sp = tester.test(cands, "subdivision-depth-" + std::to_string(depth))) return *sp;
  }
  throw UnresolvedError("subdivision search reached its depth limit", best);
}

}  // namespace detail

inline StarPoint find_wstar(const PerturbedInstance& p, Strategy strategy, const SearchOptions& opts = {},
                            SearchStats* stats = nullptr) {
  return strategy == Strategy::Exact ? detail::find_exact(p, opts, stats) : detail::find_subdivision(p, opts, stats);
}

}  // namespace kkm
}  // namespace manna
