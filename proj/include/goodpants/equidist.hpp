#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "assembly.hpp"
#include "moebius.hpp"
#include "pants.hpp"
#include "torus.hpp"

namespace gp {

// ---- ideal triangles ----

struct IdealTriangle {
  std::array<SpherePoint, 3> vertices;
  int orientation = +1;  // -1 rotates every frame by pi about its first vector
};

inline void check_triangle(const IdealTriangle& T) {
  for (int i = 0; i < 3; ++i)
    if (chordal(T.vertices[i], T.vertices[(i + 1) % 3]) < 1e-12)
      throw Error(ErrorCode::InvalidArgument, "triangle vertices coincide");
}

/// The Moebius map sending 0, 1, infinity to the three vertices.
inline GroupElement standard_map(const IdealTriangle& T) {
  check_triangle(T);
  const SpherePoint &p = T.vertices[0], &q = T.vertices[1], &r = T.vertices[2];
  Complex s = p.den * q.num - p.num * q.den;
  Complex u = r.num * q.den - r.den * q.num;
  return GroupElement::normalized(r.num * s, p.num * u, r.den * s, p.den * u);
}

/// z -> 1/(1-z), cycling 0 -> 1 -> infinity -> 0.
inline GroupElement order_three() { return {0.0, 1.0, -1.0, 1.0}; }

inline SpacePoint standard_barycenter() { return {Complex(0.5, 0.0), std::sqrt(3.0) / 2}; }

inline SpacePoint barycenter(const IdealTriangle& T) { return apply(standard_map(T), standard_barycenter()); }

/// Tangency points of the symmetric horocycles; entry k lies on the side from vertex k to vertex k+1.
inline std::array<SpacePoint, 3> midpoints(const IdealTriangle& T) {
  GroupElement h = standard_map(T);
  return {apply(h, SpacePoint{Complex(0.5, 0.0), 0.5}), apply(h, SpacePoint{Complex(1.0, 0.0), 1.0}),
          apply(h, SpacePoint{Complex(0.0, 0.0), 1.0})};
}

/// Frame at the barycenter of (0, 1, infinity) with v vertical toward infinity, w toward +1.
inline GroupElement standard_framed_barycenter() {
  return GroupElement(1.0, 0.5, 0.0, 1.0) * a_t(std::log(std::sqrt(3.0) / 2));
}

/// Frame at the barycenter whose v points away from side k (vertices k, k+1), toward vertex k+2.
inline Frame framed_barycenter(const IdealTriangle& T, int side) {
  if (side < 0 || side > 2) throw Error(ErrorCode::InvalidArgument, "side index must be 0, 1 or 2");
  GroupElement g = standard_map(T);
  for (int s = 0; s < side; ++s) g = g * order_three();
  g = g * standard_framed_barycenter();
  if (T.orientation < 0) g = g * a_complex(Complex(0, kPi));
  return {g};
}

inline std::array<Frame, 3> framed_barycenters(const IdealTriangle& T) {
  return {framed_barycenter(T, 0), framed_barycenter(T, 1), framed_barycenter(T, 2)};
}

// ---- spun triangles of a pants ----

// Distance from the midpoint of a side to the barycenter: acosh(2/sqrt 3) = log 3 / 2.
inline const double kBarycenterOffset = 0.5 * std::log(3.0);

/// F a_{R/2} k a_offset.
inline Frame approx_barycenter(const Frame& foot, double R, double offset = kBarycenterOffset) {
  return right_act(foot, a_t(R / 2) * k_rot() * a_t(offset));
}

enum class Side { Left, Right };

/// Left: attracting points of cuffs (i, i-1, i+1); the same triangle for every cuff.
/// Right: attracting points of cuffs i, i+1 and of (c_i c_{i+1})^-1.
inline IdealTriangle spun_triangle(const GoodPants& p, Side s, int i = 0) {
  const auto& c = p.cuffs;
  auto plus = [](const GroupElement& g) { return attracting_fixed_point(g); };
  if (s == Side::Left) return {{plus(c[i]), plus(c[(i + 2) % 3]), plus(c[(i + 1) % 3])}, +1};
  const GroupElement& x = c[i];
  const GroupElement& y = c[(i + 1) % 3];
  return {{plus(x), plus(y), plus((x * y).inverse())}, +1};
}

/// The foot frame of cuff i turned to face its seam (w toward the other cuff).
inline Frame seam_facing_foot(const GoodPants& p, Side s, int i = 0) {
  EndFrames e = end_frames(p, i);
  return right_act(s == Side::Left ? e.left : e.right, a_complex(Complex(0, kPi)));
}

inline double barycenter_gap(const GoodPants& p, Side s, double R, int i = 0, double offset = kBarycenterOffset) {
  Frame ab = approx_barycenter(seam_facing_foot(p, s, i), R, offset);
  return frame_distance(ab, framed_barycenter(spun_triangle(p, s, i), 0));
}

// ---- feet sums and smoothing ----

struct FootSumConstants {
  double eps = 0, R = 0, c_eps = 1, vol_M = 1;
};

struct FootSum {
  double raw = 0, normalized = 0, C = 0;
};

using TorusObservable = std::function<double(const FlatTorusPoint&)>;

/// C = 2 pi c_eps eps^4 l e^{4R - l} / vol M with l the real length of gamma.
inline double foot_normalization(const GoodCurve& gamma, const FootSumConstants& k) {
  double l = gamma.length.real();
  return kTwoPi * k.c_eps * std::pow(k.eps, 4) * l * std::exp(4 * k.R - l) / k.vol_M;
}

/// Sum of g over both feet of every end, as points of N^1(gamma) = C / (l Z + 2 pi i Z).
inline FootSum weighted_foot_sum(const GoodCurve& gamma, const std::vector<EndRecord>& ends, const TorusObservable& g,
                                 const FootSumConstants& k) {
  FootSum out;
  Complex l = 2.0 * gamma.hl;
  for (const auto& e : ends) out.raw += g(FlatTorusPoint(e.ft_left, l)) + g(FlatTorusPoint(e.ft_right, l));
  out.C = foot_normalization(gamma, k);
  out.normalized = out.raw / out.C;
  return out;
}

/// Observable on a flat torus described well enough to smooth exactly.
struct SmoothableObservable {
  enum class Kind { Constant, RectStep, Lipschitz, Opaque } kind = Kind::Opaque;
  double value = 0;  // Constant
  TorusRegion region;  // RectStep: a single rectangle
  double inside = 1, outside = 0;
  std::function<double(Complex)> f;  // Lipschitz and Opaque
  double L = 0;

  double operator()(Complex z) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::RectStep: return region.contains(z) ? inside : outside;
      default: return f(z);
    }
  }
};

struct MinMax {
  std::function<double(Complex)> lower, upper;
};

/// m_d g = inf over the closed d-ball, M_d g = sup. Exact for constants and rectangle steps;
/// for Lipschitz observables the envelopes g -+ L d (sharp for affine g).
inline MinMax min_max_smoothing(const SmoothableObservable& g, double d) {
  using K = SmoothableObservable::Kind;
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "negative smoothing radius");
  switch (g.kind) {
    case K::Constant: {
      double c = g.value;
      return {[c](Complex) { return c; }, [c](Complex) { return c; }};
    }
    case K::RectStep: {
      if (g.region.rects.size() != 1) throw Error(ErrorCode::UnsupportedObservable, "step needs one rectangle");
      TorusRegion inner{g.region.hl, {g.region.rects[0].eroded(d)}};
      TorusRegion outer = g.region;
      double in = g.inside, out = g.outside;
      double lo = std::min(in, out), hi = std::max(in, out);
      // inf is the smaller value unless the ball stays on one side
      auto only_in = [inner](Complex z) { return !inner.rects[0].empty() && inner.contains(z); };
      auto touches_in = [outer, d](Complex z) { return outer.distance(z) <= d; };
      auto only_out = [outer, d](Complex z) { return outer.distance(z) > d; };
      auto lower = [=](Complex z) {
        if (only_in(z)) return in;
        if (only_out(z)) return out;
        return lo;
      };
      auto upper = [=](Complex z) {
        if (only_in(z)) return in;
        if (!touches_in(z)) return out;
        return hi;
      };
      return {lower, upper};
    }
    case K::Lipschitz: {
      auto f = g.f;
      double s = g.L * d;
      return {[f, s](Complex z) { return f(z) - s; }, [f, s](Complex z) { return f(z) + s; }};
    }
    case K::Opaque: break;
  }
  throw Error(ErrorCode::UnsupportedObservable, "observable is neither constant, step nor Lipschitz");
}

// ---- frame observables ----

using FrameObservable = std::function<double(const Frame&)>;

/// g~(F) = (1/2 pi) int g(F r_theta) d theta by the periodic trapezoid rule.
inline FrameObservable rotation_average(FrameObservable g, int nodes = 256) {
  if (nodes < 1) throw Error(ErrorCode::InvalidArgument, "need at least one node");
  return [g = std::move(g), nodes](const Frame& F) {
    std::vector<double> vals(nodes);
    for (int k = 0; k < nodes; ++k) vals[k] = g(right_act(F, r_theta(kTwoPi * k / nodes)));
    double s = 0;
    for (double v : vals) s += v;
    return s / nodes;
  };
}

struct NamedObservable {
  std::string id;
  FrameObservable g;
};

namespace detail {

// deterministic pairwise sum
inline double tree_sum(const double* x, size_t n) {
  if (n == 0) return 0;
  if (n <= 8) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  size_t h = n / 2;
  return tree_sum(x, h) + tree_sum(x + h, n - h);
}

template <class F>
void parallel_for(size_t n, int threads, F&& body) {
  int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nt == 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (size_t i = t; i < n; i += nt) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

struct EmpiricalFrameMeasure {
  std::vector<std::pair<Frame, double>> atoms;
  bool normalized = false;

  double total_weight() const {
    std::vector<double> w;
    for (const auto& a : atoms) w.push_back(a.second);
    return detail::tree_sum(w.data(), w.size());
  }

  void normalize() {
    double t = total_weight();
    if (!(t > 0)) throw Error(ErrorCode::ZeroMeasure, "measure has no mass");
    for (auto& a : atoms) a.second /= t;
    normalized = true;
  }

  double integrate(const FrameObservable& g, int threads = 1) const {
    std::vector<double> v(atoms.size());
    detail::parallel_for(atoms.size(), threads, [&](size_t i) { v[i] = atoms[i].second * g(atoms[i].first); });
    return detail::tree_sum(v.data(), v.size());
  }

  /// Standard error of integrate(g) if the atoms were independent draws with these weights.
  double standard_error(const FrameObservable& g, int threads = 1) const {
    double mean = integrate(g, threads) / total_weight();
    std::vector<double> v(atoms.size()), w2(atoms.size());
    detail::parallel_for(atoms.size(), threads, [&](size_t i) {
      double d = g(atoms[i].first) - mean;
      double w = atoms[i].second;
      v[i] = w * w * d * d;
      w2[i] = w * w;
    });
    double t = total_weight();
    double n_eff = t * t / detail::tree_sum(w2.data(), w2.size());
    double var = detail::tree_sum(v.data(), v.size()) / (t * t);
    return n_eff > 1 ? std::sqrt(var * n_eff / (n_eff - 1)) : 0.0;
  }
};

// ---- Haar measure on a chart ----

/// Haar measure restricted to frames based within `radius` of j, normalized.
/// Frames are k1 a_r k2 with k uniform in SU(2) and r distributed as sinh^2 r on [0, radius].
struct HaarChart {
  double radius = 1.5;

  template <class Rng>
  GroupElement sample_unitary(Rng& rng) const {
    std::normal_distribution<double> N(0.0, 1.0);
    double q[4];
    double s;
    do {
      s = 0;
      for (double& x : q) { x = N(rng); s += x * x; }
    } while (s < 1e-20);
    s = std::sqrt(s);
    Complex alpha(q[0] / s, q[1] / s), beta(q[2] / s, q[3] / s);
    return {alpha, -std::conj(beta), beta, std::conj(alpha)};
  }

  template <class Rng>
  Frame sample(Rng& rng) const {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double top = std::sinh(radius) * std::sinh(radius);
    double r;
    for (;;) {
      r = radius * U(rng);
      double sr = std::sinh(r);
      if (U(rng) * top <= sr * sr) break;
    }
    return {sample_unitary(rng) * a_t(r) * sample_unitary(rng)};
  }

  template <class Rng>
  EmpiricalFrameMeasure sample_measure(Rng& rng, size_t n) const {
    EmpiricalFrameMeasure m;
    m.atoms.reserve(n);
    for (size_t i = 0; i < n; ++i) m.atoms.push_back({sample(rng), 1.0 / static_cast<double>(n)});
    m.normalized = true;
    return m;
  }

  bool contains(const Frame& F) const { return hyperbolic_distance(F.base(), SpacePoint{0.0, 1.0}) <= radius; }
};

struct TargetMeasure {
  double alpha_M = 1;
  std::map<std::string, double> alpha_T;
  std::map<std::string, EmpiricalFrameMeasure> nu_T;  // atom lists
  HaarChart bulk;

  void validate() const {
    double s = alpha_M;
    if (alpha_M < 0) throw Error(ErrorCode::InvalidWeights, "negative bulk weight");
    for (const auto& [k, a] : alpha_T) {
      if (a < 0) throw Error(ErrorCode::InvalidWeights, "negative weight for " + k);
      if (!nu_T.count(k)) throw Error(ErrorCode::InvalidArgument, "no measure for " + k);
      s += a;
    }
    if (std::abs(s - 1.0) > 1e-12) throw Error(ErrorCode::InvalidWeights, "weights do not sum to 1");
  }
};

struct TargetValue {
  double value = 0, se = 0;
};

/// Bulk part by Monte Carlo with `samples` Haar draws seeded by `seed`; atom parts exactly.
inline TargetValue evaluate_target(const TargetMeasure& nu, const FrameObservable& g, size_t samples, uint64_t seed,
                                   int threads = 1) {
  nu.validate();
  TargetValue out;
  if (nu.alpha_M > 0) {
    std::mt19937_64 rng(seed);
    EmpiricalFrameMeasure s = nu.bulk.sample_measure(rng, samples);
    out.value += nu.alpha_M * s.integrate(g, threads);
    out.se = nu.alpha_M * s.standard_error(g, threads);
  }
  for (const auto& [k, a] : nu.alpha_T) {
    const auto& m = nu.nu_T.at(k);
    out.value += a * m.integrate(g, threads) / m.total_weight();
  }
  return out;
}

struct DiscrepancyRow {
  std::string id;
  double empirical = 0, target = 0, target_se = 0, gap = 0;
};

inline std::vector<DiscrepancyRow> discrepancy(const EmpiricalFrameMeasure& mu, const TargetMeasure& nu,
                                               const std::vector<NamedObservable>& suite, size_t samples,
                                               uint64_t seed, int threads = 1) {
  std::vector<DiscrepancyRow> rows;
  double t = mu.total_weight();
  if (!(t > 0)) throw Error(ErrorCode::ZeroMeasure, "empirical measure has no mass");
  for (const auto& o : suite) {
    DiscrepancyRow r;
    r.id = o.id;
    r.empirical = mu.integrate(o.g, threads) / t;
    TargetValue v = evaluate_target(nu, o.g, samples, seed, threads);
    r.target = v.value;
    r.target_se = v.se;
    r.gap = std::abs(r.empirical - r.target);
    rows.push_back(r);
  }
  return rows;
}

/// Fixed test suite on the chart: bumps and direction components around j.
inline std::vector<NamedObservable> standard_suite(double radius = 1.5) {
  auto dist = [](const Frame& F) { return hyperbolic_distance(F.base(), SpacePoint{0.0, 1.0}); };
  auto bump = [dist, radius](const Frame& F) {
    double r = dist(F) / radius;
    return r < 1 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
  };
  std::vector<NamedObservable> s;
  s.push_back({"ball_half", [dist, radius](const Frame& F) { return dist(F) < 0.5 * radius ? 1.0 : 0.0; }});
  s.push_back({"bump", bump});
  s.push_back({"bump_v_up", [bump](const Frame& F) { return bump(F) * F.v().t; }});
  s.push_back({"bump_v_up_sq", [bump](const Frame& F) { return bump(F) * F.v().t * F.v().t; }});
  s.push_back({"bump_n_x", [bump](const Frame& F) { return bump(F) * F.n().x; }});
  s.push_back({"plane_n_up_sq", rotation_average([bump](const Frame& F) {
                 double c = F.n().t;
                 return bump(F) * c * c;
               }, 32)});
  return s;
}

// ---- barycenter measure of an assembled surface ----

/// Two atoms per pants instance, one per spun triangle, each of weight 1 / (2 #pants).
inline EmpiricalFrameMeasure surface_measure(const Surface& s, const PantsCatalog& cat, int threads = 1) {
  size_t n = s.instance_pants.size();
  if (n == 0) throw Error(ErrorCode::ZeroMeasure, "surface has no pants");
  EmpiricalFrameMeasure m;
  m.atoms.resize(2 * n);
  double w = 1.0 / (2.0 * static_cast<double>(n));
  detail::parallel_for(n, threads, [&](size_t i) {
    const GoodPants& p = cat.pants.at(s.instance_pants[i]);
    m.atoms[2 * i] = {framed_barycenter(spun_triangle(p, Side::Left), 0), w};
    m.atoms[2 * i + 1] = {framed_barycenter(spun_triangle(p, Side::Right), 0), w};
  });
  m.normalized = true;
  return m;
}

}  // namespace gp
