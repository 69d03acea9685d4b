#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "core.hpp"

namespace gp {

using Vec2 = std::array<double, 2>;
using Sym2 = std::array<double, 3>;  // (xx, xy, yy)

struct FlowPointData {
  double tau = 0;
  Vec2 grad_tau{0, 0};
  Sym2 A{0, 0, 0};
  double lambda = 0;

  void validate() const {
    if (tau < 0) throw Error(ErrorCode::OutOfDomain, "hitting time must be >= 0");
    if (!(std::abs(lambda) < 1)) throw Error(ErrorCode::InvalidCurvature, "principal curvature outside (-1, 1)");
  }
};

struct BoundInputs {
  double K = 1, bers = 0, C_seppi = 1;

  void validate() const {
    if (!(K >= 1)) throw Error(ErrorCode::OutOfDomain, "quasiconformal constant below 1");
    if (!(bers >= 0 && bers < 0.5)) throw Error(ErrorCode::OutOfDomain, "Bers norm outside [0, 1/2)");
    if (!(C_seppi > 0)) throw Error(ErrorCode::OutOfDomain, "curvature constant must be positive");
  }
};

/// Conformal factor of the metric on the surface at normal distance t.
inline double equidistant_metric_factor(double t) {
  double c = std::cosh(t);
  return c * c;
}

/// Area distortion of p -> (p, tau(p)) into the pleated normal coordinates.
inline double jacobian_pleated(double tau, const Vec2& grad) {
  if (tau < 0) throw Error(ErrorCode::OutOfDomain, "hitting time must be >= 0");
  double c2 = equidistant_metric_factor(tau);
  double g2 = grad[0] * grad[0] + grad[1] * grad[1];
  return std::sqrt(c2 * c2 + g2 * c2);
}

struct SymEigen {
  double k1, k2;
  Vec2 e1, e2;  // orthonormal
};

inline SymEigen sym_eigen(const Sym2& A) {
  double a = A[0], b = A[1], d = A[2];
  double m = 0.5 * (a + d), r = std::hypot(0.5 * (a - d), b);
  SymEigen out{m + r, m - r, {1, 0}, {0, 1}};
  if (r > 0) {
    double phi = 0.5 * std::atan2(2 * b, a - d);
    out.e1 = {std::cos(phi), std::sin(phi)};
    out.e2 = {-std::sin(phi), std::cos(phi)};
  }
  return out;
}

/// Same for a minimal surface with second fundamental form A: metric (cosh t I + sinh t A)^2,
/// evaluated in the eigenbasis of A where it is diagonal.
inline double jacobian_minimal(double tau, const Vec2& grad, const Sym2& A) {
  if (tau < 0) throw Error(ErrorCode::OutOfDomain, "hitting time must be >= 0");
  SymEigen e = sym_eigen(A);
  double ch = std::cosh(tau), sh = std::sinh(tau);
  double s1 = ch + sh * e.k1, s2 = ch + sh * e.k2;
  if (s1 <= 0 || s2 <= 0) throw Error(ErrorCode::DegenerateEquidistant, "equidistant surface is singular here");
  double gx = grad[0] * e.e1[0] + grad[1] * e.e1[1];
  double gy = grad[0] * e.e2[0] + grad[1] * e.e2[1];
  double nx = s1 * s1, ny = s2 * s2;  // |d_x|^2, |d_y|^2 at time tau
  return std::sqrt(nx * ny + gx * gx * ny + gy * gy * nx);
}

struct Curvatures {
  double plus, minus;
};

/// Principal curvatures of the equidistant surface at distance t from one with curvatures +-lambda.
inline Curvatures equidistant_curvatures(double lambda, double t) {
  if (!(std::abs(lambda) < 1)) throw Error(ErrorCode::InvalidCurvature, "principal curvature outside (-1, 1)");
  double T = std::tanh(t);
  return {(lambda - T) / (1 - lambda * T), (-lambda - T) / (1 + lambda * T)};
}

/// Lower bound on the angle between the normal flow and the convex-core boundary.
inline double convexity_angle(double tau, double eta) {
  if (tau < 0 || !(eta > 0)) throw Error(ErrorCode::OutOfDomain, "need tau >= 0 and eta > 0");
  if (tau >= eta) throw Error(ErrorCode::VacuousBound, "tau >= eta gives no angle bound");
  return std::acos(std::tanh(tau) / std::tanh(eta));
}

inline double seppi_curvature_bound(double K, double C) {
  BoundInputs{K, 0, C}.validate();
  return C * std::log(K);
}

inline double bers_collar(double bers) {
  BoundInputs{1, bers, 1}.validate();
  return std::atanh(2 * bers);
}

inline double gauss_bonnet_area(int genus) {
  if (genus < 2) throw Error(ErrorCode::InvalidGenus, "need genus >= 2");
  return kTwoPi * (2.0 * genus - 2.0);
}

/// |1 - area(pleated) / area(minimal)| <= sup lambda^2.
inline double area_ratio_bound(double lambda_sup) {
  if (!(lambda_sup >= 0 && lambda_sup < 1)) throw Error(ErrorCode::OutOfDomain, "lambda_sup outside [0, 1)");
  return lambda_sup * lambda_sup;
}

// ---- synthetic smooth fields ----

/// tau(x, y) = c0 + sum a_k cos(p_k x + q_k y + phi_k), kept nonnegative by c0 >= sum |a_k|.
struct TrigField {
  double c0 = 0;
  struct Term {
    double a, p, q, phi;
  };
  std::vector<Term> terms;

  double operator()(double x, double y) const {
    double s = c0;
    for (const auto& t : terms) s += t.a * std::cos(t.p * x + t.q * y + t.phi);
    return s;
  }

  Vec2 grad(double x, double y) const {
    Vec2 g{0, 0};
    for (const auto& t : terms) {
      double s = -t.a * std::sin(t.p * x + t.q * y + t.phi);
      g[0] += s * t.p;
      g[1] += s * t.q;
    }
    return g;
  }

  template <class Rng>
  static TrigField random(Rng& rng, int n_terms = 4, double amplitude = 0.3, int max_freq = 3) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> F(-max_freq, max_freq);
    TrigField f;
    double total = 0;
    for (int k = 0; k < n_terms; ++k) {
      Term t{amplitude * U(rng), double(F(rng)), double(F(rng)), kPi * U(rng)};
      total += std::abs(t.a);
      f.terms.push_back(t);
    }
    f.c0 = total + amplitude * (1.0 + U(rng));
    return f;
  }
};

}  // namespace gp
