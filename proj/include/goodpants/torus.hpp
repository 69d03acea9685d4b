#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"

namespace gp {

/// Point of C / (hl Z + 2 pi i Z), stored reduced into [0, Re hl) x [0, 2 pi).
class FlatTorusPoint {
 public:
  FlatTorusPoint() = default;
  FlatTorusPoint(Complex z, Complex hl) : hl_(hl) {
    if (!(hl.real() > 0)) throw Error(ErrorCode::InvalidArgument, "lattice needs Re hl > 0");
    z_ = reduce(z, hl);
  }

  Complex z() const { return z_; }
  Complex hl() const { return hl_; }

  FlatTorusPoint operator+(Complex s) const { return {z_ + s, hl_}; }

  static Complex reduce(Complex z, Complex hl) {
    double m = std::floor(z.real() / hl.real());
    z -= m * hl;
    // floating point can leave Re z == Re hl
    if (z.real() >= hl.real()) z -= hl;
    if (z.real() < 0) z += hl;
    double y = wrap(z.imag(), kTwoPi);
    return {z.real(), y};
  }

 private:
  Complex z_{0};
  Complex hl_{1};
};

inline bool same_lattice(Complex h1, Complex h2) {
  return std::abs(h1 - h2) <= 1e-12 * std::max(1.0, std::abs(h1));
}

namespace detail {

struct ReducedBasis {
  Complex b1, b2;
};

// Lagrange-Gauss reduction of the lattice basis (hl, 2 pi i).
inline ReducedBasis gauss_reduce(Complex u, Complex v) {
  if (std::norm(u) > std::norm(v)) std::swap(u, v);
  for (int it = 0; it < 100; ++it) {
    double mu = std::round(std::real(v * std::conj(u)) / std::norm(u));
    v -= mu * u;
    if (std::norm(v) >= std::norm(u)) break;
    std::swap(u, v);
  }
  return {u, v};
}

}  // namespace detail

/// Flat distance: shortest representative of the difference.
inline double torus_distance(const FlatTorusPoint& p, const FlatTorusPoint& q) {
  if (!same_lattice(p.hl(), q.hl())) throw Error(ErrorCode::LatticeMismatch, "points on different tori");
  auto B = detail::gauss_reduce(p.hl(), Complex(0, kTwoPi));
  Complex d = p.z() - q.z();
  // coordinates of d in the reduced basis
  double det = B.b1.real() * B.b2.imag() - B.b1.imag() * B.b2.real();
  double s = (d.real() * B.b2.imag() - d.imag() * B.b2.real()) / det;
  double t = (B.b1.real() * d.imag() - B.b1.imag() * d.real()) / det;
  double ms = std::round(s), mt = std::round(t);
  double best = std::abs(d);
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      best = std::min(best, std::abs(d - (ms + i) * B.b1 - (mt + j) * B.b2));
  return best;
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1] in the universal cover.
struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  double area() const { return std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0); }
  Rect dilated(double r) const { return {x0 - r, x1 + r, y0 - r, y1 + r}; }
  Rect eroded(double r) const { return {x0 + r, x1 - r, y0 + r, y1 - r}; }
  Rect shifted(Complex s) const { return {x0 + s.real(), x1 + s.real(), y0 + s.imag(), y1 + s.imag()}; }
  bool empty() const { return !(x1 > x0 && y1 > y0); }
  bool contains(Complex z) const { return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1; }
  double distance(Complex z) const {
    double dx = std::max({x0 - z.real(), 0.0, z.real() - x1});
    double dy = std::max({y0 - z.imag(), 0.0, z.imag() - y1});
    return std::hypot(dx, dy);
  }
};

/// Finite union of rectangles projected to the torus C / (hl Z + 2 pi i Z).
struct TorusRegion {
  Complex hl{1};
  std::vector<Rect> rects;

  double total_area() const { return hl.real() * kTwoPi; }

  /// All pieces of lattice translates inside the fundamental rectangle.
  std::vector<Rect> pieces() const {
    std::vector<Rect> out;
    const double W = hl.real(), H = kTwoPi;
    const Rect D{0, W, 0, H};
    for (const Rect& r0 : rects) {
      if (r0.empty()) continue;
      int m0 = static_cast<int>(std::floor(-r0.x1 / W)) - 1, m1 = static_cast<int>(std::ceil((W - r0.x0) / W)) + 1;
      for (int m = m0; m <= m1; ++m) {
        Rect r = r0.shifted(double(m) * hl);
        int n0 = static_cast<int>(std::floor(-r.y1 / H)) - 1, n1 = static_cast<int>(std::ceil((H - r.y0) / H)) + 1;
        for (int n = n0; n <= n1; ++n) {
          Rect s = r.shifted(Complex(0, n * H));
          Rect c{std::max(s.x0, D.x0), std::min(s.x1, D.x1), std::max(s.y0, D.y0), std::min(s.y1, D.y1)};
          if (!c.empty()) out.push_back(c);
        }
      }
    }
    return out;
  }

  /// Exact area of the union (coordinate compression).
  double area() const {
    std::vector<Rect> ps = pieces();
    if (ps.empty()) return 0.0;
    std::vector<double> xs, ys;
    for (const Rect& r : ps) {
      xs.push_back(r.x0); xs.push_back(r.x1);
      ys.push_back(r.y0); ys.push_back(r.y1);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    double total = 0;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
      double cx = 0.5 * (xs[i] + xs[i + 1]);
      for (size_t j = 0; j + 1 < ys.size(); ++j) {
        double cy = 0.5 * (ys[j] + ys[j + 1]);
        for (const Rect& r : ps)
          if (cx > r.x0 && cx < r.x1 && cy > r.y0 && cy < r.y1) {
            total += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
            break;
          }
      }
    }
    return total;
  }

  /// Normalized measure in [0, 1].
  double measure() const { return std::min(1.0, area() / total_area()); }

  TorusRegion dilated(double r) const {
    TorusRegion o{hl, {}};
    for (const Rect& x : rects) o.rects.push_back(x.dilated(r));
    return o;
  }

  TorusRegion shifted(Complex s) const {
    TorusRegion o{hl, {}};
    for (const Rect& x : rects) o.rects.push_back(x.shifted(s));
    return o;
  }

  /// Flat distance from a point to the region (0 inside).
  double distance(Complex z) const {
    Complex p = FlatTorusPoint::reduce(z, hl);
    double best = INFINITY;
    for (const Rect& r0 : rects) {
      if (r0.empty()) continue;
      Complex c = Complex(r0.x0, r0.y0);
      Complex off = FlatTorusPoint::reduce(c, hl) - c;
      Rect r = r0.shifted(off);
      for (int m = -3; m <= 3; ++m)
        for (int n = -3; n <= 3; ++n) best = std::min(best, r.shifted(double(m) * hl + Complex(0, n * kTwoPi)).distance(p));
    }
    return best;
  }

  bool contains(Complex z) const { return distance(z) == 0.0; }
};

}  // namespace gp
