#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <complex>
#include <vector>

#include "core.hpp"

namespace gp {

/// Signed generator letters: +k is generator k-1, -k its inverse.
using Word = std::vector<int>;

inline Word inverse_word(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (int& x : r) x = -x;
  return r;
}

inline Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

/// Freely reduces a word (cancels adjacent x x^-1).
inline Word free_reduce(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (int x : w) {
    if (!r.empty() && r.back() == -x)
      r.pop_back();
    else
      r.push_back(x);
  }
  return r;
}

class GroupElement {
 public:
  Complex a{1}, b{0}, c{0}, d{1};
  Word word;

  GroupElement() = default;
  GroupElement(Complex a_, Complex b_, Complex c_, Complex d_, Word w = {})
      : a(a_), b(b_), c(c_), d(d_), word(std::move(w)) {}

  static GroupElement identity() { return {}; }

  /// Scales to determinant one. Throws if the matrix is singular.
  static GroupElement normalized(Complex a, Complex b, Complex c, Complex d, Word w = {}) {
    Complex det = a * d - b * c;
    if (std::abs(det) < 1e-300) throw Error(ErrorCode::BadDeterminant, "singular matrix");
    Complex s = std::sqrt(det);
    return {a / s, b / s, c / s, d / s, std::move(w)};
  }

  Complex det() const { return a * d - b * c; }
  Complex trace() const { return a + d; }

  GroupElement inverse() const { return {d, -b, -c, a, inverse_word(word)}; }

  GroupElement operator*(const GroupElement& o) const {
    Complex na = a * o.a + b * o.c;
    Complex nb = a * o.b + b * o.d;
    Complex nc = c * o.a + d * o.c;
    Complex nd = c * o.b + d * o.d;
    Complex det = na * nd - nb * nc;
    // only correct deviations the rounding error of det cannot explain
    double scale = std::abs(na) * std::abs(nd) + std::abs(nb) * std::abs(nc);
    double dev = std::abs(det - 1.0);
    if (dev > 1e-15 && dev > 64 * std::numeric_limits<double>::epsilon() * scale) {
      Complex s = std::sqrt(det);
      na /= s; nb /= s; nc /= s; nd /= s;
    }
    Word w;
    if (!word.empty() || !o.word.empty()) w = free_reduce(concat(word, o.word));
    return {na, nb, nc, nd, std::move(w)};
  }

  GroupElement operator-() const { return {-a, -b, -c, -d, word}; }

  double norm() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
  }

  /// Projective comparison: g ~ -g.
  bool approx_equal(const GroupElement& o, double tol = kTol) const {
    double plus = std::sqrt(std::norm(a - o.a) + std::norm(b - o.b) + std::norm(c - o.c) +
                            std::norm(d - o.d));
    double minus = std::sqrt(std::norm(a + o.a) + std::norm(b + o.b) + std::norm(c + o.c) +
                             std::norm(d + o.d));
    double scale = std::max({1.0, norm(), o.norm()});
    return std::min(plus, minus) <= tol * scale;
  }

  bool operator==(const GroupElement& o) const { return approx_equal(o); }
};

/// Point of the Riemann sphere in homogeneous coordinates (num : den).
struct SpherePoint {
  Complex num{0}, den{1};

  SpherePoint() = default;
  SpherePoint(Complex z) : num(z), den(1) {}
  SpherePoint(double x) : num(x), den(1) {}
  SpherePoint(Complex n, Complex d) : num(n), den(d) {
    double s = std::max(std::abs(num), std::abs(den));
    if (s > 0) { num /= s; den /= s; }
  }

  static SpherePoint infinity() { return {Complex(1), Complex(0)}; }

  bool is_infinite(double tol = 1e-14) const { return std::abs(den) <= tol * std::abs(num); }
  Complex value() const { return num / den; }
};

/// Homogeneous difference; zero iff the points coincide.
inline Complex cross(const SpherePoint& p, const SpherePoint& q) {
  return p.num * q.den - q.num * p.den;
}

/// Chordal distance on the sphere, used to detect shared endpoints.
inline double chordal(const SpherePoint& p, const SpherePoint& q) {
  double np = std::sqrt(std::norm(p.num) + std::norm(p.den));
  double nq = std::sqrt(std::norm(q.num) + std::norm(q.den));
  return 2.0 * std::abs(cross(p, q)) / (np * nq);
}

inline SpherePoint apply(const GroupElement& g, const SpherePoint& p) {
  return {g.a * p.num + g.b * p.den, g.c * p.num + g.d * p.den};
}

/// Oriented geodesic of H^3 from p to q.
struct Geodesic {
  SpherePoint p, q;
  Geodesic reversed() const { return {q, p}; }
};

inline Geodesic apply(const GroupElement& g, const Geodesic& l) {
  return {apply(g, l.p), apply(g, l.q)};
}

/// Point (z, t) of upper half-space, t > 0.
struct SpacePoint {
  Complex z;
  double t = 1;
};

inline SpacePoint apply(const GroupElement& g, const SpacePoint& p) {
  Complex czd = g.c * p.z + g.d;
  double t2 = p.t * p.t;
  double denom = std::norm(czd) + std::norm(g.c) * t2;
  Complex z = ((g.a * p.z + g.b) * std::conj(czd) + g.a * std::conj(g.c) * t2) / denom;
  return {z, p.t / denom};
}

inline double hyperbolic_distance(const SpacePoint& p, const SpacePoint& q) {
  double num = std::norm(p.z - q.z) + (p.t - q.t) * (p.t - q.t);
  // cosh d - 1 = 2 sinh^2(d/2), without the cancellation near d = 0
  return 2.0 * std::asinh(std::sqrt(num / (4.0 * p.t * q.t)));
}

// Euclidean direction in (x, y, t) coordinates; the model is conformal so angles are Euclidean.
struct Vec3 {
  double x = 0, y = 0, t = 0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.t * b.t; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.t - a.t * b.y, a.t * b.x - a.x * b.t, a.x * b.y - a.y * b.x};
}
inline Vec3 normalized(const Vec3& v) {
  double n = std::sqrt(dot(v, v));
  return {v.x / n, v.y / n, v.t / n};
}

/// Unit tangent at p (assumed on the geodesic) pointing toward l.q.
inline Vec3 geodesic_tangent(const Geodesic& l, const SpacePoint& p) {
  if (l.q.is_infinite()) return {0, 0, 1};
  if (l.p.is_infinite()) return {0, 0, -1};
  Complex u = l.p.value(), w = l.q.value();
  Complex c = 0.5 * (u + w);
  Complex e = (w - u) / std::abs(w - u);
  double s = std::real((p.z - c) * std::conj(e));
  Complex h = p.t * e;
  return normalized({h.real(), h.imag(), -s});
}

// ---- standard elements ----

/// a_t = diag(e^{t/2}, e^{-t/2}); translation by t along the first frame vector.
inline GroupElement a_t(double t) {
  return {std::exp(t / 2), 0.0, 0.0, std::exp(-t / 2)};
}

/// Screw motion along the vertical axis: translation Re z, rotation Im z.
inline GroupElement a_complex(Complex z) {
  return {std::exp(z / 2.0), 0.0, 0.0, std::exp(-z / 2.0)};
}

/// Rotation by theta in the plane of the first two frame vectors.
inline GroupElement r_theta(double theta) {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {c, -s, s, c};
}

/// Ninety-degree rotation taking the first frame vector to the second.
inline GroupElement k_rot() { return r_theta(kPi / 2); }

/// Half-turn about the geodesic l.
inline GroupElement half_turn(const Geodesic& l) {
  // [P Q] diag(i, -i) [P Q]^{-1}
  Complex p1 = l.p.num, p2 = l.p.den, q1 = l.q.num, q2 = l.q.den;
  Complex det = p1 * q2 - q1 * p2;
  const Complex I(0, 1);
  Complex a = (I * p1 * q2 + I * q1 * p2) / det;
  Complex b = (-2.0 * I * p1 * q1) / det;
  Complex c = (2.0 * I * p2 * q2) / det;
  Complex d = (-I * q1 * p2 - I * p1 * q2) / det;
  return GroupElement::normalized(a, b, c, d);
}

/// Element sending 0 to l.p, infinity to l.q and j onto the geodesic.
inline GroupElement normalizer(const Geodesic& l) {
  return GroupElement::normalized(l.q.num, l.p.num, l.q.den, l.p.den);
}

// ---- lengths and distances ----

inline Complex complex_translation_length(const GroupElement& g) {
  Complex tr = g.trace();
  if (std::abs(tr * tr - 4.0) <= kTol)
    throw Error(ErrorCode::NotLoxodromic, "parabolic or identity");
  if (std::abs(tr.imag()) <= kTol * std::max(1.0, std::abs(tr)) && std::abs(tr.real()) < 2.0)
    throw Error(ErrorCode::NotLoxodromic, "elliptic");
  Complex l = 2.0 * std::acosh(tr / 2.0);
  if (l.real() < 0) l = -l;
  if (l.real() <= kTol) throw Error(ErrorCode::NotLoxodromic, "no translation");
  return {l.real(), wrap_angle(l.imag())};
}

inline bool is_loxodromic(const GroupElement& g) {
  try {
    complex_translation_length(g);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Oriented axis from the repelling to the attracting fixed point.
inline Geodesic axis(const GroupElement& g) {
  Complex tr = g.trace();
  Complex disc = std::sqrt(tr * tr - 4.0);
  Complex l1 = (tr + disc) / 2.0, l2 = (tr - disc) / 2.0;
  if (std::abs(l1) < std::abs(l2)) std::swap(l1, l2);
  auto eigvec = [&](Complex lam) {
    SpherePoint v1(g.b, lam - g.a), v2(lam - g.d, g.c);
    double n1 = std::abs(g.b) + std::abs(lam - g.a), n2 = std::abs(lam - g.d) + std::abs(g.c);
    return n1 >= n2 ? v1 : v2;
  };
  return {eigvec(l2), eigvec(l1)};
}

inline SpherePoint attracting_fixed_point(const GroupElement& g) { return axis(g).q; }
inline SpherePoint repelling_fixed_point(const GroupElement& g) { return axis(g).p; }

inline void check_disjoint(const Geodesic& g1, const Geodesic& g2, double tol = 1e-12) {
  const SpherePoint* a[2] = {&g1.p, &g1.q};
  const SpherePoint* b[2] = {&g2.p, &g2.q};
  for (auto* x : a)
    for (auto* y : b)
      if (chordal(*x, *y) <= tol) throw Error(ErrorCode::SharedEndpoint, "geodesics share an endpoint");
}

/// Oriented complex distance: Re >= 0, Im in (-pi, pi]; reversing one geodesic adds i*pi.
inline Complex oriented_complex_distance(const Geodesic& g1, const Geodesic& g2) {
  check_disjoint(g1, g2);
  Complex cr = (cross(g1.p, g2.p) * cross(g1.q, g2.q)) / (cross(g1.p, g2.q) * cross(g1.q, g2.p));
  Complex s = std::sqrt(cr);
  if (s.real() < 0) s = -s;
  Complex delta = std::log((1.0 + s) / (1.0 - s));
  return {std::max(0.0, delta.real()), wrap_angle(delta.imag())};
}

/// Distance plus angle, angle folded into [0, pi].
inline Complex complex_distance(const Geodesic& g1, const Geodesic& g2) {
  Complex d = oriented_complex_distance(g1, g2);
  return {d.real(), std::abs(d.imag())};
}

/// Common perpendicular oriented from `from` toward `to`, with its feet.
struct Perpendicular {
  Geodesic line;
  SpacePoint foot_from, foot_to;
  // in coordinates where `from` is (0, inf): the perpendicular is (-rho, rho)
  Complex rho;
  Complex length;  // oriented complex distance
};

inline Perpendicular common_perpendicular(const Geodesic& from, const Geodesic& to) {
  check_disjoint(from, to);
  GroupElement m = normalizer(from);
  GroupElement mi = m.inverse();
  Complex u = apply(mi, to.p).value(), w = apply(mi, to.q).value();
  Complex rho = std::sqrt(u * w);
  if (std::real((u + w) / rho) < 0) rho = -rho;
  Perpendicular r;
  r.rho = rho;
  r.line = apply(m, Geodesic{SpherePoint(-rho), SpherePoint(rho)});
  r.foot_from = apply(m, SpacePoint{0.0, std::abs(rho)});
  r.length = oriented_complex_distance(from, to);
  GroupElement m2 = normalizer(to);
  GroupElement m2i = m2.inverse();
  Complex rho2 = std::sqrt(apply(m2i, from.p).value() * apply(m2i, from.q).value());
  r.foot_to = apply(m2, SpacePoint{0.0, std::abs(rho2)});
  return r;
}

// ---- frames ----

struct Frame {
  GroupElement g;

  SpacePoint base() const { return apply(g, SpacePoint{0.0, 1.0}); }
  Vec3 v() const { return vec(SpherePoint(0.0), SpherePoint::infinity()); }
  Vec3 w() const { return vec(SpherePoint(-1.0), SpherePoint(1.0)); }
  Vec3 n() const { return vec(SpherePoint(Complex(0, -1)), SpherePoint(Complex(0, 1))); }

 private:
  Vec3 vec(const SpherePoint& from, const SpherePoint& to) const {
    return geodesic_tangent({apply(g, from), apply(g, to)}, base());
  }
};

inline Frame right_act(const Frame& f, const GroupElement& h) { return {f.g * h}; }
inline Frame left_act(const GroupElement& h, const Frame& f) { return {h * f.g}; }

/// Left-invariant distance: translation part and rotation angle combined in quadrature.
inline double frame_distance(const Frame& f1, const Frame& f2) {
  const GroupElement m = f1.g.inverse() * f2.g;
  for (Complex x : {m.a, m.b, m.c, m.d})
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return std::numeric_limits<double>::quiet_NaN();
  // cosh d - 1 = (|a - conj d|^2 + |b + conj c|^2) / 2, free of cancellation near the identity
  double x = 0.5 * (std::norm(m.a - std::conj(m.d)) + std::norm(m.b + std::conj(m.c)));
  double d = 2.0 * std::asinh(std::sqrt(0.5 * x));
  // positive square root of m m^*, then the unitary factor
  Complex p11 = m.a * std::conj(m.a) + m.b * std::conj(m.b);
  Complex p12 = m.a * std::conj(m.c) + m.b * std::conj(m.d);
  Complex p22 = m.c * std::conj(m.c) + m.d * std::conj(m.d);
  double tr = p11.real() + p22.real();
  double s = std::sqrt(tr + 2.0);
  Complex q11 = (p11 + 1.0) / s, q12 = p12 / s, q21 = std::conj(p12) / s, q22 = (p22 + 1.0) / s;
  Complex u11 = q22 * m.a - q12 * m.c;
  Complex u21 = -q21 * m.a + q11 * m.c;
  Complex u22 = -q21 * m.b + q11 * m.d;
  Complex alpha = 0.5 * (u11 + std::conj(u22));
  double angle = 2.0 * std::atan2(std::hypot(alpha.imag(), std::abs(u21)), std::abs(alpha.real()));
  return std::sqrt(d * d + angle * angle);
}

}  // namespace gp
