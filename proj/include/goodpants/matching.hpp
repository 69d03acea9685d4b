#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "torus.hpp"

namespace gp {

/// The gluing shift: x -> x + 1 + i pi.
inline FlatTorusPoint tau_shift(const FlatTorusPoint& x) { return x + Complex(1.0, kPi); }

struct FeetGraph {
  std::vector<FlatTorusPoint> left;   // minus ends
  std::vector<FlatTorusPoint> right;  // plus ends
  double threshold = 0;
  std::vector<std::vector<int>> adj;  // left -> right, sorted
};

inline FeetGraph build_feet_graph(const std::vector<FlatTorusPoint>& lefts,
                                  const std::vector<FlatTorusPoint>& rights, double eps, double R) {
  FeetGraph g{lefts, rights, eps / R, std::vector<std::vector<int>>(lefts.size())};
  std::vector<FlatTorusPoint> shifted;
  shifted.reserve(rights.size());
  for (const auto& r : rights) shifted.push_back(tau_shift(r));
  for (size_t i = 0; i < lefts.size(); ++i)
    for (size_t j = 0; j < rights.size(); ++j)
      if (torus_distance(lefts[i], shifted[j]) < g.threshold) g.adj[i].push_back(static_cast<int>(j));
  return g;
}

/// Bipartite graph given only by adjacency, for direct use of the matcher.
struct Bipartite {
  int n_left = 0, n_right = 0;
  std::vector<std::vector<int>> adj;
};

struct Matching {
  // pairs[i] = right partner of left i; filled iff perfect
  std::vector<int> pairs;
  // left set with more elements than neighbors; filled iff not perfect
  std::vector<int> witness;
  std::vector<int> witness_neighbors;
  bool perfect() const { return witness.empty(); }
};

/// Hopcroft-Karp maximum matching; returns match_left (-1 when free).
inline std::vector<int> max_matching(const Bipartite& g) {
  const int INF = std::numeric_limits<int>::max();
  std::vector<int> ml(g.n_left, -1), mr(g.n_right, -1), dist(g.n_left);
  auto bfs = [&] {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < g.n_left; ++u) {
      if (ml[u] < 0) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = INF;
      }
    }
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : g.adj[u]) {
        int w = mr[v];
        if (w < 0)
          found = true;
        else if (dist[w] == INF) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };
  // iterative DFS along the layering
  std::vector<size_t> it(g.n_left);
  auto dfs = [&](int root) {
    std::vector<int> stack{root};
    std::vector<int> via;  // right vertex used to descend
    while (!stack.empty()) {
      int u = stack.back();
      if (it[u] >= g.adj[u].size()) {
        dist[u] = INF;
        stack.pop_back();
        if (!via.empty()) via.pop_back();
        continue;
      }
      int v = g.adj[u][it[u]++];
      int w = mr[v];
      if (w < 0) {
        // augment along stack/via + v
        via.push_back(v);
        for (size_t k = 0; k < stack.size(); ++k) {
          ml[stack[k]] = via[k];
          mr[via[k]] = stack[k];
        }
        return true;
      }
      if (dist[w] == dist[u] + 1) {
        via.push_back(v);
        stack.push_back(w);
      }
    }
    return false;
  };
  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (int u = 0; u < g.n_left; ++u)
      if (ml[u] < 0) dfs(u);
  }
  return ml;
}

/// Right neighbors of a set of left vertices.
inline std::vector<int> neighbors_of(const Bipartite& g, const std::vector<int>& A) {
  std::set<int> s;
  for (int u : A) s.insert(g.adj[u].begin(), g.adj[u].end());
  return {s.begin(), s.end()};
}

inline Matching perfect_matching(const Bipartite& g) {
  if (g.n_left != g.n_right) throw Error(ErrorCode::UnbalancedSides, "sides differ in size");
  std::vector<int> ml = max_matching(g);
  Matching m;
  if (std::find(ml.begin(), ml.end(), -1) == ml.end()) {
    m.pairs = ml;
    return m;
  }
  std::vector<int> mr(g.n_right, -1);
  for (int u = 0; u < g.n_left; ++u)
    if (ml[u] >= 0) mr[ml[u]] = u;
  // left vertices reachable by alternating paths from free left vertices
  std::vector<bool> seen(g.n_left, false);
  std::queue<int> q;
  for (int u = 0; u < g.n_left; ++u)
    if (ml[u] < 0) {
      seen[u] = true;
      q.push(u);
    }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : g.adj[u]) {
      int w = mr[v];
      if (w >= 0 && !seen[w]) {
        seen[w] = true;
        q.push(w);
      }
    }
  }
  for (int u = 0; u < g.n_left; ++u)
    if (seen[u]) m.witness.push_back(u);
  m.witness_neighbors = neighbors_of(g, m.witness);
  return m;
}

inline Bipartite as_bipartite(const FeetGraph& g) {
  return {static_cast<int>(g.left.size()), static_cast<int>(g.right.size()), g.adj};
}

inline Matching perfect_matching(const FeetGraph& g) { return perfect_matching(as_bipartite(g)); }

/// Largest foot discrepancy dist(ft left, tau(ft right)) over matched pairs.
inline double max_discrepancy(const FeetGraph& g, const Matching& m) {
  double d = 0;
  for (size_t i = 0; i < m.pairs.size(); ++i)
    d = std::max(d, torus_distance(g.left[i], tau_shift(g.right[m.pairs[i]])));
  return d;
}

// ---- expansion checks on the torus ----

struct GrowthReport {
  bool defined = false;           // false when the set has measure zero
  double measure = 0;             // normalized measure of A
  double nbhd_inner = 0, nbhd_outer = 0;  // normalized measure of the eta-neighborhood, bracketed
  double ratio_inner = 0, ratio_outer = 0;
  bool asserted = false;          // whether the expansion bound applies (neighborhood <= 1/2)
  bool bound_holds = false;       // ratio > 1 + eta / R, using the lower bracket
};

inline GrowthReport neighborhood_growth(const TorusRegion& A, double eta, double R) {
  GrowthReport r;
  r.measure = A.measure();
  // inscribed and circumscribed squares of the eta-disk
  r.nbhd_inner = A.dilated(eta / std::sqrt(2.0)).measure();
  r.nbhd_outer = A.dilated(eta).measure();
  if (r.measure <= 0) return r;
  r.defined = true;
  r.ratio_inner = r.nbhd_inner / r.measure;
  r.ratio_outer = r.nbhd_outer / r.measure;
  r.asserted = r.nbhd_outer <= 0.5;
  r.bound_holds = r.ratio_inner > 1.0 + eta / R;
  return r;
}

struct FeetCountReport {
  long in_B = 0;
  long in_image = 0;  // feet in rho(N_{eps/R} B)
  bool holds = false;
};

/// Counts feet in B and in the translated open eps/R-neighborhood of B.
inline FeetCountReport feet_count_lemma_check(const std::vector<FlatTorusPoint>& feet, const TorusRegion& B,
                                              Complex rho, double eps, double R) {
  FeetCountReport r;
  TorusRegion moved = B.shifted(rho);
  for (const auto& f : feet) {
    if (B.contains(f.z())) ++r.in_B;
    if (moved.distance(f.z()) < eps / R) ++r.in_image;
  }
  r.holds = r.in_B <= r.in_image;
  return r;
}

}  // namespace gp
