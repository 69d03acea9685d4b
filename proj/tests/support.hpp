#pragma once

#include <random>

#include "goodpants/moebius.hpp"

namespace gp::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Complex gauss_c(Rng& rng, double s = 1.0) {
  std::normal_distribution<double> n(0.0, s);
  return {n(rng), n(rng)};
}

inline GroupElement random_element(Rng& rng, double s = 1.0) {
  for (;;) {
    Complex a = gauss_c(rng, s), b = gauss_c(rng, s), c = gauss_c(rng, s), d = gauss_c(rng, s);
    if (std::abs(a * d - b * c) > 0.1) return GroupElement::normalized(a, b, c, d);
  }
}

inline SpherePoint random_point(Rng& rng) { return SpherePoint(gauss_c(rng, 2.0)); }

inline Geodesic random_geodesic(Rng& rng) {
  for (;;) {
    SpherePoint p = random_point(rng), q = random_point(rng);
    if (chordal(p, q) > 0.05) return {p, q};
  }
}

inline bool near(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace gp::test
