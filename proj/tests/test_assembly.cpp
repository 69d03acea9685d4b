#include <gtest/gtest.h>

#include <functional>
#include <numeric>

#include "goodpants/assembly.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gp;
using gp::test::Rng;

namespace {

// bookkeeping-only catalog: pants given by (curve, sign) per cuff, feet at 0 on hl = R
PantsCatalog manual_catalog(const std::vector<std::array<std::pair<int, int>, 3>>& pants, int ncurves,
                            double R = 5.0, double eps = 0.5) {
  PantsCatalog cat;
  cat.eps = eps;
  cat.R = R;
  for (int k = 0; k < ncurves; ++k) {
    GoodCurve c;
    c.length = 2 * R;
    c.hl = R;
    cat.curves.push_back(c);
  }
  for (size_t p = 0; p < pants.size(); ++p) {
    cat.pants.push_back(GoodPants{});
    for (int i = 0; i < 3; ++i) {
      EndRecord r;
      r.pants = static_cast<int>(p);
      r.cuff = i;
      r.curve = pants[p][i].first;
      r.sign = pants[p][i].second;
      Complex z = r.sign < 0 ? Complex(1.0, kPi) : Complex(0.0);
      r.ft_left = z;
      r.ft_right = z + Complex(R);
      r.foot = FlatTorusPoint(z, R);
      cat.ends.push_back(r);
    }
  }
  cat.rebuild_index();
  return cat;
}

PantsMeasure all_ones(const PantsCatalog& cat) {
  PantsMeasure mu;
  for (size_t p = 0; p < cat.pants.size(); ++p) mu.weights[static_cast<int>(p)] = 1;
  return mu;
}

std::vector<std::pair<int, int>> dual_edges(const Surface& s) {
  std::vector<std::pair<int, int>> e;
  for (auto& g : s.gluings) e.push_back({g.minus_end / 3, g.plus_end / 3});
  return e;
}

// random closed surface: random pairing of 3n half-edges, curve = gluing index
Surface random_cubic_surface(Rng& rng, int n) {
  Surface s;
  s.eps = 0.5;
  s.R = 5;
  for (int i = 0; i < n; ++i) {
    s.instance_pants.push_back(i);
    s.instance_copy.push_back(0);
  }
  std::vector<int> half(3 * n);
  std::iota(half.begin(), half.end(), 0);
  std::shuffle(half.begin(), half.end(), rng);
  s.ends.resize(3 * n);
  for (int k = 0; k < 3 * n / 2; ++k) {
    int m = half[2 * k], p = half[2 * k + 1];
    s.ends[m] = {k, "c" + std::to_string(k), -1, FlatTorusPoint(Complex(1.0, kPi), 5.0)};
    s.ends[p] = {k, "c" + std::to_string(k), +1, FlatTorusPoint(0.0, 5.0)};
    s.gluings.push_back({m, p, 0.0});
  }
  return s;
}

Surface glue_copies_separately(const PantsCatalog& cat, int copies) {
  // pants 2c is P, 2c+1 its mirror; glue each pair on its own
  LiftedEnds L = lift_ends(all_ones(cat), cat);
  std::vector<CurveMatching> ms;
  for (int c = 0; c < copies; ++c) {
    CurveMatching cm;
    for (int i = 0; i < 3; ++i) {
      int pe = 3 * (2 * c) + i;
      for (int j = 0; j < 3; ++j) {
        int me = 3 * (2 * c + 1) + j;
        if (L.ends[me].curve == L.ends[pe].curve) cm.pairs.push_back({me, pe});
      }
    }
    ms.push_back(cm);
  }
  return assemble(L, ms);
}

}  // namespace

TEST(Boundary, Examples) {
  PantsCatalog cat = manual_catalog({{{{0, 1}, {1, 1}, {2, 1}}}, {{{0, 1}, {0, 1}, {1, -1}}}}, 3);
  PantsMeasure one;
  one.weights[0] = 1;
  auto b = boundary_unoriented(one, cat);
  EXPECT_EQ(b, (std::map<int, long long>{{0, 1}, {1, 1}, {2, 1}}));
  PantsMeasure two;
  two.weights[1] = 1;
  EXPECT_EQ(boundary_unoriented(two, cat), (std::map<int, long long>{{0, 2}, {1, 1}}));
  EXPECT_EQ(boundary_unoriented(one * 3, cat), (std::map<int, long long>{{0, 3}, {1, 3}, {2, 3}}));
  // additivity
  auto sum = boundary(one + two, cat), b1 = boundary(one, cat), b2 = boundary(two, cat);
  for (auto& [k, w] : b2) b1[k] += w;
  EXPECT_EQ(sum, b1);
}

TEST(Assemble, TwoPantsGenusTwo) {
  Rng rng(400);
  PantsCatalog cat = duplicated_pants_catalog(4.0, 0.2, 1, 0.0, rng);
  LiftedEnds L = lift_ends(all_ones(cat), cat);
  auto ms = match_ends(L);
  for (auto& m : ms) ASSERT_FALSE(m.failure);
  Surface s = assemble(L, ms);
  EXPECT_EQ(s.pants_count(), 2);
  EXPECT_EQ(s.euler_characteristic(), -2);
  EXPECT_EQ(s.component_count(), 1);
  EXPECT_EQ(s.components()[0].genus, 2);
  EXPECT_DOUBLE_EQ(s.area(), 4 * kPi);
  EXPECT_LT(s.max_discrepancy(), 1e-9);
}

TEST(Assemble, Errors) {
  Rng rng(401);
  PantsCatalog cat = duplicated_pants_catalog(4.0, 0.2, 1, 0.0, rng);
  LiftedEnds L = lift_ends(all_ones(cat), cat);
  auto ms = match_ends(L);
  auto short_ms = ms;
  short_ms[0].pairs.pop_back();
  try {
    assemble(L, short_ms);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnmatchedEnd);
  }
  auto clash = ms;
  std::swap(clash[0].pairs[0].first, clash[0].pairs[0].second);
  try {
    assemble(L, clash);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrientationClash);
  }
}

TEST(Assemble, EulerCountOnDuplicatedPants) {
  Rng rng(402);
  for (int copies : {1, 2, 3, 5, 8}) {
    PantsCatalog cat = duplicated_pants_catalog(5.0, 0.2, copies, 0.2 / 5.0 / 3, rng);
    LiftedEnds L = lift_ends(all_ones(cat), cat);
    auto ms = match_ends(L);
    for (auto& m : ms) ASSERT_FALSE(m.failure);
    Surface s = assemble(L, ms);
    int n = s.pants_count();
    EXPECT_EQ(n, 2 * copies);
    int sum = 0;
    for (auto& c : s.components()) {
      EXPECT_EQ(2 - 2 * c.genus, c.euler);
      sum += 2 - 2 * c.genus;
    }
    EXPECT_EQ(sum, -n);
    if (s.component_count() == 1) EXPECT_EQ(s.components()[0].genus, 1 + n / 2);
    EXPECT_LT(s.max_discrepancy(), 0.2 / 5.0);
  }
}

TEST(Irreducible, Examples) {
  // one pants carrying gamma and gamma^-1
  PantsCatalog self = manual_catalog({{{{0, 1}, {0, -1}, {1, 1}}}}, 2);
  PantsMeasure one;
  one.weights[0] = 1;
  EXPECT_TRUE(is_irreducible(one, self).irreducible);
  EXPECT_TRUE(is_irreducible(one * 4, self).irreducible);
  // two pants with no reversed curve in common
  PantsCatalog apart = manual_catalog({{{{0, 1}, {1, 1}, {2, 1}}}, {{{3, 1}, {4, 1}, {5, -1}}}}, 6);
  auto r = is_irreducible(all_ones(apart), apart);
  EXPECT_FALSE(r.irreducible);
  EXPECT_EQ(r.part1.support().size() + r.part2.support().size(), 2u);
  EXPECT_THROW(is_irreducible(PantsMeasure{}, apart), Error);
  // a lone pants without self pairing splits by weight
  PantsCatalog lone = manual_catalog({{{{0, 1}, {1, 1}, {2, 1}}}}, 3);
  EXPECT_TRUE(is_irreducible(one, lone).irreducible);
  EXPECT_FALSE(is_irreducible(one * 2, lone).irreducible);
}

TEST(Irreducible, AgreesWithExhaustiveDecompositions) {
  Rng rng(403);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + trial % 6;
    int ncur = 2 + static_cast<int>(rng() % 4);
    std::vector<std::array<std::pair<int, int>, 3>> ps(n);
    for (auto& p : ps)
      for (auto& c : p) c = {static_cast<int>(rng() % ncur), rng() % 2 ? 1 : -1};
    PantsCatalog cat = manual_catalog(ps, ncur);
    PantsMeasure mu;
    for (int p = 0; p < n; ++p) mu.weights[p] = 1 + static_cast<long long>(rng() % 2);
    // oracle: every sub-measure 0 < mu1 < mu must have gamma in d mu1 with gamma^-1 in d mu2
    std::vector<long long> w;
    for (auto& [p, x] : mu.weights) w.push_back(x);
    bool irreducible = true;
    std::function<void(int, PantsMeasure&)> rec = [&](int i, PantsMeasure& m1) {
      if (!irreducible) return;
      if (i == n) {
        long long t = m1.total();
        if (t == 0 || t == mu.total()) return;
        PantsMeasure m2;
        for (int p = 0; p < n; ++p) m2.weights[p] = mu.weights[p] - m1.weights[p];
        auto b1 = boundary(m1, cat), b2 = boundary(m2, cat);
        bool ok = false;
        for (auto& [k, x] : b1)
          if (x > 0 && b2.count({k.first, -k.second}) && b2[{k.first, -k.second}] > 0) ok = true;
        if (!ok) irreducible = false;
        return;
      }
      for (long long x = 0; x <= w[i]; ++x) {
        m1.weights[i] = x;
        rec(i + 1, m1);
      }
    };
    PantsMeasure m1;
    rec(0, m1);
    auto rep = is_irreducible(mu, cat);
    EXPECT_EQ(rep.irreducible, irreducible) << "trial " << trial;
    if (!rep.irreducible) EXPECT_EQ((rep.part1 + rep.part2).weights, mu.weights);
  }
}

TEST(Bridges, MatchRemovalOracle) {
  Rng rng(404);
  for (int t = 0; t < 200; ++t) {
    Surface s = random_cubic_surface(rng, 2 * (1 + t % 6));
    auto br = find_bridges(s);
    auto edges = dual_edges(s);
    int base = oracle::count_components(s.pants_count(), edges);
    std::vector<int> expect;
    for (size_t e = 0; e < edges.size(); ++e)
      if (oracle::count_components(s.pants_count(), edges, static_cast<int>(e)) > base) expect.push_back(static_cast<int>(e));
    EXPECT_EQ(br, expect);
  }
}

TEST(DoubleCover, ThetaGraph) {
  Rng rng(405);
  PantsCatalog cat = duplicated_pants_catalog(4.0, 0.2, 1, 0.0, rng);
  Surface s = glue_copies_separately(cat, 1);
  EXPECT_TRUE(find_bridges(s).empty());
  Surface c = nonseparating_double_cover(s);
  EXPECT_EQ(c.pants_count(), 4);
  EXPECT_EQ(c.gluings.size(), 6u);
  EXPECT_EQ(c.component_count(), 1);
  EXPECT_TRUE(find_bridges(c).empty());
}

TEST(DoubleCover, CenterWithThreeLoopedLeaves) {
  // center pants (x, y, z); leaf k has cuffs (w_k, w_k^-1, x_k^-1): bridges to the center
  PantsCatalog cat = manual_catalog({{{{0, 1}, {1, 1}, {2, 1}}},
                                     {{{3, 1}, {3, -1}, {0, -1}}},
                                     {{{4, 1}, {4, -1}, {1, -1}}},
                                     {{{5, 1}, {5, -1}, {2, -1}}}},
                                    6);
  LiftedEnds L = lift_ends(all_ones(cat), cat);
  std::vector<CurveMatching> ms;
  for (auto& [k, mlist] : L.minus) {
    CurveMatching cm;
    cm.curve = k;
    cm.pairs.push_back({mlist[0], L.plus[k][0]});
    ms.push_back(cm);
  }
  Surface s = assemble(L, ms);
  EXPECT_EQ(find_bridges(s).size(), 3u);
  Surface c = nonseparating_double_cover(s);
  EXPECT_EQ(c.pants_count(), 8);
  EXPECT_EQ(c.gluings.size(), 12u);
  EXPECT_TRUE(find_bridges(c).empty());
  EXPECT_EQ(c.component_count(), 1);
  // each pants has two preimages
  std::map<int, int> pre;
  for (int p : c.instance_pants) pre[p]++;
  for (auto& [p, k] : pre) EXPECT_EQ(k, 2);
}

TEST(DoubleCover, RandomCubicSurfaces) {
  Rng rng(406);
  for (int t = 0; t < 300; ++t) {
    Surface s = random_cubic_surface(rng, 2 * (1 + t % 8));
    Surface c = nonseparating_double_cover(s);
    EXPECT_EQ(c.pants_count(), 2 * s.pants_count());
    EXPECT_EQ(c.gluings.size(), 2 * s.gluings.size());
    EXPECT_TRUE(find_bridges(c).empty());
    // a connected base has a connected cover
    if (s.component_count() == 1) EXPECT_EQ(c.component_count(), 1);
    // projection is a covering: each lifted gluing projects to a base gluing
    for (size_t e = 0; e < c.gluings.size(); ++e) {
      int n3 = 3 * s.pants_count();
      EXPECT_EQ(c.gluings[e].minus_end % n3, s.gluings[e / 2].minus_end);
      EXPECT_EQ(c.gluings[e].plus_end % n3, s.gluings[e / 2].plus_end);
    }
  }
}

TEST(Reglue, IdenticalCopiesConnectAfterOneSwap) {
  Rng rng(407);
  PantsCatalog cat = duplicated_pants_catalog(4.0, 0.2, 2, 0.0, rng);
  Surface s = glue_copies_separately(cat, 2);
  ASSERT_EQ(s.component_count(), 2);
  ReglueResult r = reglue_connect(s);
  EXPECT_EQ(r.swaps.size(), 1u);
  EXPECT_EQ(r.surface.component_count(), 1);
  EXPECT_LE(r.surface.max_discrepancy(), s.max_discrepancy() + 1e-15);
  EXPECT_EQ(r.surface.components()[0].genus, 3);
}

TEST(Reglue, GapTooLargeReported) {
  Rng rng(408);
  double R = 4.0, eps = 0.2;
  PantsCatalog cat = duplicated_pants_catalog(R, eps, 2, 0.0, rng);
  // move copy 1 rigidly by 1.5 eps/R: internal gluings stay perfect
  for (int p : {2, 3})
    for (int i = 0; i < 3; ++i) {
      EndRecord& e = cat.ends[3 * p + i];
      e.foot = e.foot + Complex(1.5 * eps / R, 0);
    }
  Surface s = glue_copies_separately(cat, 2);
  EXPECT_LT(s.max_discrepancy(), 1e-12);
  try {
    reglue_connect(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoEligibleSwap);
    EXPECT_NE(std::string(e.what()).find("0.075"), std::string::npos) << e.what();
  }
}

TEST(Reglue, RandomizedMultiComponent) {
  Rng rng(409);
  double R = 5.0, eps = 0.25;
  for (int t = 0; t < 30; ++t) {
    int copies = 2 + t % 6;
    PantsCatalog cat = duplicated_pants_catalog(R, eps, copies, eps / R / 4, rng);
    Surface s = glue_copies_separately(cat, copies);
    ASSERT_EQ(s.component_count(), copies);
    ReglueResult r = reglue_connect(s);
    EXPECT_EQ(static_cast<int>(r.swaps.size()), copies - 1);
    // recount
    EXPECT_EQ(oracle::count_components(r.surface.pants_count(), dual_edges(r.surface)), 1);
    for (const auto& g : r.surface.gluings) {
      const EndInfo &m = r.surface.ends[g.minus_end], &p = r.surface.ends[g.plus_end];
      EXPECT_EQ(m.curve, p.curve);
      Complex d = m.foot.z() - (p.foot.z() + Complex(1.0, kPi));
      double best = 1e9;
      for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) best = std::min(best, std::abs(d + double(a) * m.foot.hl() + Complex(0, kTwoPi * b)));
      EXPECT_NEAR(best, g.discrepancy, 1e-12);
      EXPECT_LT(g.discrepancy, 2 * eps / R);
    }
    for (const auto& sw : r.swaps) EXPECT_LE(sw.new_max, sw.old_max + sw.cross_gap + 1e-12);
  }
}

TEST(Hybrid, Examples) {
  auto p = hybrid_degree_plan(1.0, {{"T", 0.0}}, 5, {{"T", 2}});
  EXPECT_EQ(p.rounded["T"], 0);
  EXPECT_DOUBLE_EQ(p.alpha_M_realized, 1.0);
  auto q = hybrid_degree_plan(0.5, {{"T", 0.5}}, 11, {{"T", 2}});
  EXPECT_DOUBLE_EQ(q.exact["T"], 10.0);
  EXPECT_EQ(q.rounded["T"], 10);
  EXPECT_DOUBLE_EQ(q.alpha_M_realized, 0.5);
  EXPECT_THROW(hybrid_degree_plan(0.5, {{"T", 0.6}}, 11, {{"T", 2}}), Error);
  try {
    hybrid_degree_plan(0.0, {{"T", 1.0}}, 11, {{"T", 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroBulk);
  }
}

TEST(Hybrid, RoundingWithinBound) {
  Rng rng(410);
  for (int t = 0; t < 500; ++t) {
    int k = 1 + t % 3;
    std::map<std::string, double> alpha;
    std::map<std::string, int> genera;
    std::vector<double> raw(k + 1);
    double sum = 0;
    for (auto& x : raw) sum += x = gp::test::uniform(rng, 0.05, 1.0);
    double aM = raw[0] / sum;
    double rest = 1.0 - aM;
    for (int i = 0; i < k; ++i) {
      std::string name = "T" + std::to_string(i);
      alpha[name] = i + 1 < k ? raw[i + 1] / sum : rest;
      rest -= alpha[name];
      genera[name] = 2 + static_cast<int>(rng() % 4);
    }
    int gS = 2 + static_cast<int>(rng() % 40);
    DegreePlan p = hybrid_degree_plan(aM, alpha, gS, genera);
    EXPECT_LE(std::abs(p.alpha_M_realized - aM), p.alpha_M_bound + 1e-12);
    double tot = p.alpha_M_realized;
    for (auto& [name, a] : alpha) {
      EXPECT_LE(std::abs(p.alpha_realized[name] - a), p.alpha_bound[name] + 1e-12);
      EXPECT_LE(std::abs(p.rounded[name] - p.exact[name]), 0.5 + 1e-12);
      tot += p.alpha_realized[name];
    }
    EXPECT_NEAR(tot, 1.0, 1e-12);
  }
}
