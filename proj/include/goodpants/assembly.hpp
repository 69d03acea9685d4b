#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "matching.hpp"
#include "pants.hpp"

namespace gp {

/// Finitely supported nonnegative integer measure on pants (catalog indices).
struct PantsMeasure {
  std::map<int, long long> weights;

  long long total() const {
    long long s = 0;
    for (auto& [p, w] : weights) s += w;
    return s;
  }
  bool zero() const { return total() == 0; }
  PantsMeasure operator+(const PantsMeasure& o) const {
    PantsMeasure r = *this;
    for (auto& [p, w] : o.weights) r.weights[p] += w;
    return r;
  }
  PantsMeasure operator*(long long k) const {
    PantsMeasure r;
    for (auto& [p, w] : weights) r.weights[p] = w * k;
    return r;
  }
  std::vector<int> support() const {
    std::vector<int> s;
    for (auto& [p, w] : weights)
      if (w > 0) s.push_back(p);
    return s;
  }
};

/// Oriented curve measure: key (curve, sign).
using CurveMeasure = std::map<std::pair<int, int>, long long>;

inline CurveMeasure boundary(const PantsMeasure& mu, const PantsCatalog& cat) {
  CurveMeasure out;
  for (auto& [p, w] : mu.weights) {
    if (w <= 0) continue;
    for (int i = 0; i < 3; ++i) {
      const EndRecord& e = cat.ends.at(3 * p + i);
      out[{e.curve, e.sign}] += w;
    }
  }
  return out;
}

/// Unoriented totals per curve.
inline std::map<int, long long> boundary_unoriented(const PantsMeasure& mu, const PantsCatalog& cat) {
  std::map<int, long long> out;
  for (auto& [k, w] : boundary(mu, cat)) out[k.first] += w;
  return out;
}

inline std::string curve_label(const PantsCatalog& cat, int k) {
  const Word& w = cat.curves.at(k).word;
  return w.empty() ? "c" + std::to_string(k) : word_to_string(w);
}

// ---- ends of the lifted multiset and the surface ----

struct EndInfo {
  int curve = 0;
  std::string label;
  int sign = +1;
  FlatTorusPoint foot;
};

struct LiftedEnds {
  double eps = 0, R = 0;
  std::vector<int> instance_pants, instance_copy;
  std::vector<EndInfo> ends;                    // 3 * instance + cuff
  std::map<int, std::vector<int>> minus, plus;  // curve -> end ids
};

inline LiftedEnds lift_ends(const PantsMeasure& mu, const PantsCatalog& cat) {
  LiftedEnds L;
  L.eps = cat.eps;
  L.R = cat.R;
  for (auto& [p, w] : mu.weights)
    for (long long c = 0; c < w; ++c) {
      int inst = static_cast<int>(L.instance_pants.size());
      L.instance_pants.push_back(p);
      L.instance_copy.push_back(static_cast<int>(c));
      for (int i = 0; i < 3; ++i) {
        const EndRecord& r = cat.ends.at(3 * p + i);
        L.ends.push_back({r.curve, curve_label(cat, r.curve), r.sign, r.foot});
        (r.sign > 0 ? L.plus : L.minus)[r.curve].push_back(3 * inst + i);
      }
    }
  return L;
}

/// Discrepancy of gluing a minus end to a plus end: dist(ft m, tau(ft p)).
inline double gluing_discrepancy(const EndInfo& m, const EndInfo& p) {
  return torus_distance(m.foot, tau_shift(p.foot));
}

struct CurveMatching {
  int curve = 0;
  std::vector<std::pair<int, int>> pairs;  // (minus end, plus end)
  std::optional<Matching> failure;         // Hall witness when no perfect matching
  double max_discrepancy = 0;
};

/// Runs the good-gluing matcher per curve.
inline std::vector<CurveMatching> match_ends(const LiftedEnds& L) {
  std::vector<CurveMatching> out;
  std::set<int> curves;
  for (auto& [k, v] : L.minus) curves.insert(k);
  for (auto& [k, v] : L.plus) curves.insert(k);
  for (int k : curves) {
    const auto& ms = L.minus.count(k) ? L.minus.at(k) : std::vector<int>{};
    const auto& ps = L.plus.count(k) ? L.plus.at(k) : std::vector<int>{};
    std::vector<FlatTorusPoint> lf, rf;
    for (int e : ms) lf.push_back(L.ends[e].foot);
    for (int e : ps) rf.push_back(L.ends[e].foot);
    CurveMatching cm;
    cm.curve = k;
    if (ms.size() != ps.size())
      throw Error(ErrorCode::UnbalancedSides, "curve " + L.ends[ms.empty() ? ps[0] : ms[0]].label +
                                                  ": " + std::to_string(ms.size()) + " minus vs " +
                                                  std::to_string(ps.size()) + " plus ends");
    FeetGraph g = build_feet_graph(lf, rf, L.eps, L.R);
    Matching m = perfect_matching(g);
    if (m.perfect()) {
      for (size_t i = 0; i < ms.size(); ++i) {
        cm.pairs.push_back({ms[i], ps[m.pairs[i]]});
        cm.max_discrepancy = std::max(cm.max_discrepancy, gluing_discrepancy(L.ends[ms[i]], L.ends[ps[m.pairs[i]]]));
      }
    } else {
      cm.failure = m;
    }
    out.push_back(cm);
  }
  return out;
}

struct Gluing {
  int minus_end = 0, plus_end = 0;
  double discrepancy = 0;
};

struct Surface {
  double eps = 0, R = 0;
  std::vector<int> instance_pants, instance_copy;
  std::vector<EndInfo> ends;
  std::vector<Gluing> gluings;  // one per pair

  int pants_count() const { return static_cast<int>(instance_pants.size()); }
  int euler_characteristic() const { return -pants_count(); }
  double area() const { return kTwoPi * pants_count(); }

  std::vector<int> mate() const {
    std::vector<int> m(ends.size(), -1);
    for (const auto& g : gluings) {
      m[g.minus_end] = g.plus_end;
      m[g.plus_end] = g.minus_end;
    }
    return m;
  }

  /// Component id per instance.
  std::vector<int> component_of() const {
    std::vector<int> parent(instance_pants.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& g : gluings) parent[find(g.minus_end / 3)] = find(g.plus_end / 3);
    std::map<int, int> ids;
    std::vector<int> out(instance_pants.size());
    for (size_t i = 0; i < out.size(); ++i) {
      int r = find(static_cast<int>(i));
      if (!ids.count(r)) ids[r] = static_cast<int>(ids.size());
      out[i] = ids[r];
    }
    return out;
  }

  int component_count() const {
    auto c = component_of();
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
  }

  struct Component {
    int pants = 0;
    int euler = 0;
    int genus = 0;
  };

  std::vector<Component> components() const {
    auto c = component_of();
    std::vector<Component> out(component_count());
    for (int x : c) out[x].pants++;
    for (auto& k : out) {
      k.euler = -k.pants;
      k.genus = (2 - k.euler) / 2;
    }
    return out;
  }

  double max_discrepancy() const {
    double d = 0;
    for (const auto& g : gluings) d = std::max(d, g.discrepancy);
    return d;
  }
};

inline Surface assemble(const LiftedEnds& L, const std::vector<CurveMatching>& matchings) {
  Surface s;
  s.eps = L.eps;
  s.R = L.R;
  s.instance_pants = L.instance_pants;
  s.instance_copy = L.instance_copy;
  s.ends = L.ends;
  std::vector<int> used(L.ends.size(), 0);
  for (const auto& cm : matchings) {
    for (auto [m, p] : cm.pairs) {
      if (m < 0 || p < 0 || m >= static_cast<int>(L.ends.size()) || p >= static_cast<int>(L.ends.size()))
        throw Error(ErrorCode::InvalidArgument, "end id out of range");
      const EndInfo &em = L.ends[m], &ep = L.ends[p];
      if (em.curve != ep.curve || em.sign != -1 || ep.sign != +1)
        throw Error(ErrorCode::OrientationClash, "ends " + std::to_string(m) + " and " + std::to_string(p) +
                                                     " do not induce opposite orientations on one curve");
      if (used[m]++ || used[p]++) throw Error(ErrorCode::InvalidArgument, "end paired twice");
      s.gluings.push_back({m, p, gluing_discrepancy(em, ep)});
    }
  }
  for (size_t e = 0; e < used.size(); ++e)
    if (!used[e]) throw Error(ErrorCode::UnmatchedEnd, "end " + std::to_string(e) + " is unpaired");
  return s;
}

// ---- irreducibility ----

struct IrreducibilityReport {
  bool irreducible = true;
  PantsMeasure part1, part2;  // certificate when reducible
};

/// Two pants are linked when a cuff of one reverses a cuff of the other (a pants may be
/// linked to itself).
inline bool linked(const PantsCatalog& cat, int p, int q) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const EndRecord &a = cat.ends.at(3 * p + i), &b = cat.ends.at(3 * q + j);
      if (a.curve == b.curve && a.sign == -b.sign) return true;
    }
  return false;
}

inline IrreducibilityReport is_irreducible(const PantsMeasure& mu, const PantsCatalog& cat) {
  if (mu.zero()) throw Error(ErrorCode::ZeroMeasure, "measure is zero");
  std::vector<int> supp = mu.support();
  IrreducibilityReport rep;
  if (supp.size() == 1) {
    int p = supp[0];
    long long w = mu.weights.at(p);
    // a lone pants can only be split by splitting its weight
    if (w >= 2 && !linked(cat, p, p)) {
      rep.irreducible = false;
      rep.part1.weights[p] = 1;
      rep.part2.weights[p] = w - 1;
    }
    return rep;
  }
  std::vector<int> seen(supp.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (size_t v = 0; v < supp.size(); ++v)
      if (!seen[v] && linked(cat, supp[u], supp[v])) {
        seen[v] = 1;
        stack.push_back(static_cast<int>(v));
      }
  }
  for (size_t v = 0; v < supp.size(); ++v) {
    PantsMeasure& part = seen[v] ? rep.part1 : rep.part2;
    part.weights[supp[v]] = mu.weights.at(supp[v]);
  }
  rep.irreducible = rep.part2.weights.empty();
  if (rep.irreducible) rep.part1 = {};
  return rep;
}

// ---- dual graph, bridges, double covers ----

/// Edge ids of bridges in the dual multigraph (vertices = instances, edges = gluings).
inline std::vector<int> find_bridges(const Surface& s) {
  int n = s.pants_count();
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge id)
  for (size_t e = 0; e < s.gluings.size(); ++e) {
    int u = s.gluings[e].minus_end / 3, v = s.gluings[e].plus_end / 3;
    adj[u].push_back({v, static_cast<int>(e)});
    adj[v].push_back({u, static_cast<int>(e)});
  }
  std::vector<int> disc(n, -1), low(n, 0), bridges;
  int timer = 0;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    // iterative DFS: (vertex, parent edge, next adjacency index)
    std::vector<std::tuple<int, int, size_t>> st{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!st.empty()) {
      auto& [u, pe, idx] = st.back();
      if (idx < adj[u].size()) {
        auto [v, e] = adj[u][idx++];
        if (e == pe) continue;
        if (disc[v] < 0) {
          disc[v] = low[v] = timer++;
          st.push_back({v, e, 0});
        } else {
          low[u] = std::min(low[u], disc[v]);
        }
      } else {
        int uu = u, upe = pe;
        st.pop_back();
        if (!st.empty()) {
          int p = std::get<0>(st.back());
          low[p] = std::min(low[p], low[uu]);
          if (low[uu] > disc[p]) bridges.push_back(upe);
        }
      }
    }
  }
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

/// Degree-2 cover in which every gluing is nonseparating. Bridges and spanning-tree edges
/// of each bridgeless piece lift trivially, all other edges swap the two sheets.
inline Surface nonseparating_double_cover(const Surface& s) {
  int n = s.pants_count();
  std::vector<int> bridge = find_bridges(s);
  std::vector<char> is_bridge(s.gluings.size(), 0);
  for (int e : bridge) is_bridge[e] = 1;
  // spanning forest of X - F
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::vector<int> label(s.gluings.size(), 0);
  for (size_t e = 0; e < s.gluings.size(); ++e) {
    if (is_bridge[e]) continue;
    int u = find(s.gluings[e].minus_end / 3), v = find(s.gluings[e].plus_end / 3);
    if (u == v)
      label[e] = 1;
    else
      parent[u] = v;
  }
  Surface c;
  c.eps = s.eps;
  c.R = s.R;
  for (int sheet = 0; sheet < 2; ++sheet)
    for (int i = 0; i < n; ++i) {
      c.instance_pants.push_back(s.instance_pants[i]);
      c.instance_copy.push_back(2 * s.instance_copy[i] + sheet);
    }
  for (int sheet = 0; sheet < 2; ++sheet) c.ends.insert(c.ends.end(), s.ends.begin(), s.ends.end());
  int shift = 3 * n;
  for (size_t e = 0; e < s.gluings.size(); ++e) {
    const Gluing& g = s.gluings[e];
    for (int sheet = 0; sheet < 2; ++sheet) {
      int other = (sheet + label[e]) % 2;
      c.gluings.push_back({g.minus_end + sheet * shift, g.plus_end + other * shift, g.discrepancy});
    }
  }
  if (!find_bridges(c).empty()) throw Error(ErrorCode::BridgeRemains, "double cover still has bridges");
  return c;
}

// ---- regluing surgery ----

struct SwapRecord {
  int gluing1 = 0, gluing2 = 0;
  std::string curve;
  double cross_gap = 0;
  double old_max = 0, new_max = 0;
};

struct ReglueResult {
  Surface surface;
  std::vector<SwapRecord> swaps;
};

/// One swap merging two components: gluings (m1,p1) and (m2,p2) on the same curve in different
/// components become (m1,p2), (m2,p1). Eligible when the minus feet are within eps/R, the
/// new gluings stay below 2 eps/R, and at least one of the two gluings is nonseparating.
inline ReglueResult reglue_once(const Surface& s) {
  auto comp = s.component_of();
  std::vector<int> br = find_bridges(s);
  std::vector<char> is_bridge(s.gluings.size(), 0);
  for (int e : br) is_bridge[e] = 1;
  double thr = s.eps / s.R;
  struct Cand {
    double gap;
    std::string curve;
    int g1, g2;
  };
  std::optional<Cand> best;
  double best_any = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < s.gluings.size(); ++i)
    for (size_t j = i + 1; j < s.gluings.size(); ++j) {
      const Gluing &a = s.gluings[i], &b = s.gluings[j];
      const EndInfo &ma = s.ends[a.minus_end], &mb = s.ends[b.minus_end];
      if (ma.curve != mb.curve) continue;
      if (comp[a.minus_end / 3] == comp[b.minus_end / 3]) continue;
      double gap = torus_distance(ma.foot, mb.foot);
      best_any = std::min(best_any, gap);
      if (!(gap < thr)) continue;
      if (is_bridge[i] && is_bridge[j]) continue;
      double d1 = gluing_discrepancy(ma, s.ends[b.plus_end]), d2 = gluing_discrepancy(mb, s.ends[a.plus_end]);
      if (!(d1 < 2 * thr && d2 < 2 * thr)) continue;
      Cand c{gap, ma.label, static_cast<int>(i), static_cast<int>(j)};
      if (!best || c.gap < best->gap || (c.gap == best->gap && std::tie(c.curve, c.g1, c.g2) <
                                                                  std::tie(best->curve, best->g1, best->g2)))
        best = c;
    }
  if (!best) {
    std::string msg = "no cross-component pair within eps/R";
    if (std::isfinite(best_any)) msg += "; best cross gap " + std::to_string(best_any);
    throw Error(ErrorCode::NoEligibleSwap, msg);
  }
  ReglueResult r{s, {}};
  Gluing &a = r.surface.gluings[best->g1], &b = r.surface.gluings[best->g2];
  SwapRecord rec{best->g1, best->g2, best->curve, best->gap, std::max(a.discrepancy, b.discrepancy), 0};
  std::swap(a.plus_end, b.plus_end);
  a.discrepancy = gluing_discrepancy(r.surface.ends[a.minus_end], r.surface.ends[a.plus_end]);
  b.discrepancy = gluing_discrepancy(r.surface.ends[b.minus_end], r.surface.ends[b.plus_end]);
  rec.new_max = std::max(a.discrepancy, b.discrepancy);
  r.swaps.push_back(rec);
  return r;
}

inline ReglueResult reglue_connect(const Surface& s) {
  ReglueResult r{s, {}};
  while (r.surface.component_count() > 1) {
    ReglueResult step = reglue_once(r.surface);
    r.surface = std::move(step.surface);
    r.swaps.insert(r.swaps.end(), step.swaps.begin(), step.swaps.end());
  }
  return r;
}

/// Whether every curve occurring in the surface occurs at least r times (as gluings) in each
/// component.
inline bool curve_multiplicity_at_least(const Surface& s, int r) {
  auto comp = s.component_of();
  std::map<int, std::map<int, int>> count;  // component -> curve -> gluings
  std::set<int> curves;
  for (const auto& g : s.gluings) {
    int k = s.ends[g.minus_end].curve;
    curves.insert(k);
    count[comp[g.minus_end / 3]][k]++;
  }
  for (int c = 0; c < s.component_count(); ++c)
    for (int k : curves)
      if (count[c][k] < r) return false;
  return true;
}

// ---- hybrid surfaces ----

struct DegreePlan {
  std::map<std::string, double> exact;        // d(T)
  std::map<std::string, long long> rounded;
  double alpha_M_realized = 0;
  std::map<std::string, double> alpha_realized;
  double alpha_M_bound = 0;                    // |realized - target| bounds
  std::map<std::string, double> alpha_bound;
};

inline DegreePlan hybrid_degree_plan(double alpha_M, const std::map<std::string, double>& alpha, int genus_S,
                                     const std::map<std::string, int>& genera) {
  double sum = alpha_M;
  if (alpha_M < 0) throw Error(ErrorCode::InvalidWeights, "negative weight");
  for (auto& [t, a] : alpha) {
    if (a < 0) throw Error(ErrorCode::InvalidWeights, "negative weight for " + t);
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidWeights, "weights sum to " + std::to_string(sum));
  if (genus_S < 2) throw Error(ErrorCode::InvalidGenus, "surface genus must be >= 2");
  for (auto& [t, a] : alpha) {
    if (!genera.count(t)) throw Error(ErrorCode::InvalidArgument, "no genus for " + t);
    if (genera.at(t) < 2) throw Error(ErrorCode::InvalidGenus, "genus of " + t + " must be >= 2");
  }
  if (alpha_M == 0) {
    double tiny = 1e-6;
    std::string msg = "alpha_M = 0 is not reachable at finite degree; with alpha_M = 1e-6 the degrees are";
    for (auto& [t, a] : alpha) msg += " " + t + ":" + std::to_string(a * (genus_S - 1) / (tiny * (genera.at(t) - 1)));
    throw Error(ErrorCode::ZeroBulk, msg);
  }
  DegreePlan plan;
  double S = genus_S - 1;
  double X = 0, round_mass = 0;
  for (auto& [t, a] : alpha) {
    int g = genera.at(t);
    double d = a * S / (alpha_M * (g - 1));
    plan.exact[t] = d;
    plan.rounded[t] = std::llround(d);
    X += (g - 1) * static_cast<double>(plan.rounded[t]);
    round_mass += (g - 1) * std::abs(plan.rounded[t] - d);
  }
  double total = S + X;
  plan.alpha_M_realized = S / total;
  plan.alpha_M_bound = alpha_M * round_mass / total;
  for (auto& [t, a] : alpha) {
    int g = genera.at(t);
    plan.alpha_realized[t] = (g - 1) * static_cast<double>(plan.rounded[t]) / total;
    plan.alpha_bound[t] = ((g - 1) * std::abs(plan.rounded[t] - plan.exact[t]) + a * round_mass) / total;
  }
  return plan;
}

}  // namespace gp
