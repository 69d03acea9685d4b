#pragma once

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "moebius.hpp"
#include "torus.hpp"
#include "words.hpp"

namespace gp {

/// A good curve, with a gauge realizing N^1(gamma) as C / (l Z + 2 pi i Z).
struct GoodCurve {
  Word word;              // oriented canonical word (= unoriented key); empty for synthetic curves
  GroupElement element;   // representative
  Complex length;         // l, Re > 0, Im in (-pi, pi]
  Complex hl;             // l / 2
  GroupElement gauge;     // h^-1 element h = A_l; h * j is the base point of N^1(gamma)

  /// Coordinate of the unit normal at the foot of the perpendicular from the axis to `target`,
  /// pointing away from `target`. `target` is given in the same lift as `element`.
  Complex foot_toward(const Geodesic& target) const {
    GroupElement hi = gauge.inverse();
    Complex u = apply(hi, target.p).value(), w = apply(hi, target.q).value();
    Complex rho = std::sqrt(u * w);
    if (std::real((u + w) / rho) < 0) rho = -rho;
    Complex z = std::log(-rho);
    return {z.real(), wrap_angle(z.imag())};
  }

  FlatTorusPoint point(Complex zeta) const { return {zeta, hl}; }
};

/// Builds the gauge. The base point is the foot of the perpendicular toward the axis of the
/// first reference element whose axis is disjoint from gamma's; with none, the axis point
/// closest to j.
inline GoodCurve make_good_curve(const GroupElement& g, const Word& word,
                                 const std::vector<GroupElement>& references) {
  GoodCurve c;
  c.word = word;
  c.element = g;
  c.length = complex_translation_length(g);
  c.hl = c.length / 2.0;
  Geodesic ax = axis(g);
  GroupElement h1 = normalizer(ax);
  GroupElement h1i = h1.inverse();
  std::optional<Complex> zeta0;
  for (const auto& r : references) {
    if (!is_loxodromic(r)) continue;
    Geodesic rax = axis(r);
    double sep = std::min({chordal(rax.p, ax.p), chordal(rax.p, ax.q), chordal(rax.q, ax.p), chordal(rax.q, ax.q)});
    if (sep < 1e-9) continue;
    Complex u = apply(h1i, rax.p).value(), w = apply(h1i, rax.q).value();
    Complex rho = std::sqrt(u * w);
    if (std::real((u + w) / rho) < 0) rho = -rho;
    zeta0 = std::log(rho);
    break;
  }
  if (!zeta0) {
    SpacePoint o = apply(h1i, SpacePoint{0.0, 1.0});
    double height = std::sqrt(std::norm(o.z) + o.t * o.t);
    double arg = std::abs(o.z) > 1e-300 ? std::arg(o.z) : 0.0;
    zeta0 = Complex(std::log(height), arg);
  }
  c.gauge = h1 * a_complex(*zeta0);
  return c;
}

struct GoodPants {
  GroupElement a, b;
  std::array<GroupElement, 3> cuffs;  // a, b, (ba)^-1
  std::array<Complex, 3> lengths;
  std::optional<WordPair> key;  // only when words are known
  int orientation = +1;
};

/// CuffOutOfWindow messages name the offending cuff as 0, 1 or 2.
inline GoodPants make_pants(const GroupElement& a, const GroupElement& b, double eps, double R) {
  GoodPants p;
  p.a = a;
  p.b = b;
  p.cuffs = {a, b, (b * a).inverse()};
  Window win{R, eps};
  for (int i = 0; i < 3; ++i) {
    p.lengths[i] = complex_translation_length(p.cuffs[i]);
    if (!win.contains(p.lengths[i]))
      throw Error(ErrorCode::CuffOutOfWindow, "cuff " + std::to_string(i) + " out of window");
  }
  if (!a.word.empty() && !b.word.empty()) {
    p.key = pants_key(a.word, b.word);
    WordPair rev = pants_key(inverse_word(b.word), inverse_word(a.word));
    p.orientation = pair_less(rev, *p.key) ? -1 : +1;
  }
  return p;
}

struct Orthogeodesic {
  int from, to;  // cuff indices
  Perpendicular perp;
};

inline void check_nondegenerate(const GoodPants& p) {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Geodesic x = axis(p.cuffs[i]), y = axis(p.cuffs[j]);
      double sep = std::min({chordal(x.p, y.p), chordal(x.p, y.q), chordal(x.q, y.p), chordal(x.q, y.q)});
      if (sep < 1e-7) throw Error(ErrorCode::DegenerateConfiguration, "cuff axes nearly share an endpoint");
    }
}

/// The three seams of the hexagon spanned by the cuff axes: (0,1), (1,2), (2,0).
inline std::array<Orthogeodesic, 3> short_orthogeodesics(const GoodPants& p) {
  check_nondegenerate(p);
  std::array<Orthogeodesic, 3> out;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    out[i] = {i, j, common_perpendicular(axis(p.cuffs[i]), axis(p.cuffs[j]))};
  }
  return out;
}

/// Foot frames of cuff i in the pants' own lift: first vector along the cuff,
/// second vector the foot (pointing away from the seam).
struct EndFrames {
  Frame left, right;       // left seam goes to cuff i-1, right seam to cuff i+1
  Complex zeta_left, zeta_right;  // coordinates in the cuff's normalizer gauge
};

inline Frame foot_frame(const Geodesic& cuff_axis, const Geodesic& target) {
  GroupElement m = normalizer(cuff_axis);
  GroupElement mi = m.inverse();
  Complex u = apply(mi, target.p).value(), w = apply(mi, target.q).value();
  Complex rho = std::sqrt(u * w);
  if (std::real((u + w) / rho) < 0) rho = -rho;
  return {m * a_complex(std::log(-rho))};
}

inline EndFrames end_frames(const GoodPants& p, int i) {
  check_nondegenerate(p);
  Geodesic ax = axis(p.cuffs[i]);
  Geodesic prev = axis(p.cuffs[(i + 2) % 3]), next = axis(p.cuffs[(i + 1) % 3]);
  EndFrames e;
  e.left = foot_frame(ax, prev);
  e.right = foot_frame(ax, next);
  GoodCurve self = make_good_curve(p.cuffs[i], {}, {});
  e.zeta_left = self.foot_toward(prev);
  e.zeta_right = self.foot_toward(next);
  return e;
}

/// Feet of cuff i on the curve gamma, where cuff_i = u * gamma^sign * u^-1.
struct EndFeet {
  Complex left, right;  // unreduced coordinates on N^1(gamma)
};

inline EndFeet feet_on_curve(const GoodPants& p, int i, const GoodCurve& gamma, const GroupElement& u) {
  GroupElement ui = u.inverse();
  Geodesic prev = apply(ui, axis(p.cuffs[(i + 2) % 3]));
  Geodesic next = apply(ui, axis(p.cuffs[(i + 1) % 3]));
  return {gamma.foot_toward(prev), gamma.foot_toward(next)};
}

/// Residual of the two feet on N^1(sqrt gamma); also reports whether the geometric
/// difference is off by i*pi (far from Fuchsian).
struct FeetAgreement {
  double residual = 0;       // torus distance between left and right foot
  bool pi_shifted = false;   // difference matches hl + i*pi instead
};

inline FeetAgreement feet_agreement(const EndFeet& f, Complex hl) {
  FeetAgreement a;
  a.residual = torus_distance(FlatTorusPoint(f.left, hl), FlatTorusPoint(f.right, hl));
  if (a.residual > 1e-6) {
    double alt = torus_distance(FlatTorusPoint(f.left + Complex(0, kPi), hl), FlatTorusPoint(f.right, hl));
    a.pi_shifted = alt < 1e-6;
  }
  return a;
}

// ---- catalogs of pants and ends ----

struct EndRecord {
  int pants = 0, cuff = 0;
  int curve = 0;
  int sign = +1;           // +1: cuff ~ gamma, -1: cuff ~ gamma^-1
  Complex ft_left, ft_right;
  FlatTorusPoint foot;      // ft_left reduced on N^1(sqrt gamma)
};

struct PantsCatalog {
  double eps = 0, R = 0;
  std::vector<GoodCurve> curves;
  std::vector<GoodPants> pants;
  std::vector<EndRecord> ends;  // end id = 3 * pants + cuff
  std::vector<std::vector<int>> plus, minus;  // per curve: end ids
  std::vector<int> pi_shift_diagnostics;     // end ids whose feet disagree by i*pi

  void rebuild_index() {
    plus.assign(curves.size(), {});
    minus.assign(curves.size(), {});
    for (size_t e = 0; e < ends.size(); ++e)
      (ends[e].sign > 0 ? plus : minus)[ends[e].curve].push_back(static_cast<int>(e));
  }
};

/// Unoriented curves from an enumeration: one per pair {class, inverse class}.
inline std::vector<GoodCurve> good_curves(const EnumerationResult& classes, const GroupPresentation& G) {
  std::vector<GroupElement> refs;
  for (size_t i = 0; i < G.generators.size(); ++i) refs.push_back(G.letter(static_cast<int>(i) + 1));
  std::vector<GoodCurve> out;
  for (const auto& c : classes.classes)
    if (unoriented_key(c.canonical_word) == c.canonical_word)
      out.push_back(make_good_curve(c.representative, c.canonical_word, refs));
  return out;
}

/// Adds pants p with known cuff-to-curve data and computes its ends.
inline void add_pants(PantsCatalog& cat, const GoodPants& p, const std::array<int, 3>& curve,
                      const std::array<int, 3>& sign, const std::array<GroupElement, 3>& conj) {
  int idx = static_cast<int>(cat.pants.size());
  cat.pants.push_back(p);
  for (int i = 0; i < 3; ++i) {
    const GoodCurve& g = cat.curves[curve[i]];
    EndFeet f = feet_on_curve(p, i, g, conj[i]);
    EndRecord r;
    r.pants = idx;
    r.cuff = i;
    r.curve = curve[i];
    r.sign = sign[i];
    r.ft_left = f.left;
    r.ft_right = f.right;
    r.foot = g.point(f.left);
    if (feet_agreement(f, g.hl).pi_shifted) cat.pi_shift_diagnostics.push_back(3 * idx + i);
    cat.ends.push_back(r);
  }
}

/// Enumerates good pants (x, y) with x the canonical word of a good curve (either
/// orientation) and y any reduced word of length <= max_word_len. One pants per key.
inline PantsCatalog enumerate_good_pants(const std::vector<GoodCurve>& curves, const GroupPresentation& G,
                                         int max_word_len, double eps, double R) {
  PantsCatalog cat;
  cat.eps = eps;
  cat.R = R;
  cat.curves = curves;
  // oriented canonical word -> (curve, sign)
  std::map<Word, std::pair<int, int>> lookup;
  for (size_t k = 0; k < curves.size(); ++k) {
    lookup[curves[k].word] = {static_cast<int>(k), +1};
    lookup[canonical_form(inverse_word(curves[k].word))] = {static_cast<int>(k), -1};
  }
  std::vector<GroupElement> ys = enumerate_elements(G, max_word_len);
  std::map<WordPair, int> seen;
  struct Candidate {
    WordPair key;
    Word x, y;
  };
  std::vector<Candidate> found;
  for (const auto& [xw, cs] : lookup) {
    for (const auto& Y : ys) {
      const Word& yw = Y.word;
      Word zw = third_cuff(xw, yw);
      if (!lookup.count(canonical_form(yw)) || !lookup.count(canonical_form(zw))) continue;
      WordPair key = pants_key(xw, yw);
      if (seen.count(key)) continue;
      seen[key] = 1;
      found.push_back({key, xw, yw});
    }
  }
  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return pair_less(a.key, b.key); });
  for (const auto& c : found) {
    // realize the key's own marking so stored pants are canonical
    GroupElement X = G.evaluate(c.key.first), Y = G.evaluate(c.key.second);
    GoodPants p;
    try {
      p = make_pants(X, Y, eps, R);
      check_nondegenerate(p);
    } catch (const Error&) {
      continue;
    }
    std::array<Word, 3> w = {c.key.first, c.key.second, third_cuff(c.key.first, c.key.second)};
    std::array<int, 3> curve{}, sign{};
    std::array<GroupElement, 3> conj;
    for (int i = 0; i < 3; ++i) {
      auto [k, s] = lookup.at(canonical_form(w[i]));
      curve[i] = k;
      sign[i] = s;
      Word u = canonical_conjugator(w[i]);
      if (s < 0) {
        // canonical(w) = p^-1 key^-1 p
        Word pre = canonical_conjugator(inverse_word(curves[k].word));
        u = free_reduce(concat(u, inverse_word(pre)));
      }
      conj[i] = G.evaluate(u);
    }
    add_pants(cat, p, curve, sign, conj);
  }
  cat.rebuild_index();
  return cat;
}

// ---- synthetic Fuchsian pants ----

/// Pants from three pairwise disjoint lines via half-turns: a = I3 I2, b = I1 I3.
inline std::pair<GroupElement, GroupElement> pants_from_lines(const Geodesic& m1, const Geodesic& m2,
                                                              const Geodesic& m3) {
  GroupElement i1 = half_turn(m1), i2 = half_turn(m2), i3 = half_turn(m3);
  return {i3 * i2, i1 * i3};
}

/// Three lines at mutual distance R, symmetric under the order-3 rotation about j.
inline std::array<Geodesic, 3> symmetric_lines(double R) {
  auto lines = [](double s) {
    std::array<Geodesic, 3> m;
    Geodesic base{SpherePoint(-std::exp(s)), SpherePoint(std::exp(s))};
    for (int k = 0; k < 3; ++k) m[k] = apply(r_theta(2.0 * kPi * k / 3.0), base);
    return m;
  };
  auto dist = [&](double s) {
    auto m = lines(s);
    return complex_distance(m[0], m[1]).real();
  };
  // distance grows with s
  double lo = 0.0, hi = 1.0;
  while (dist(hi) < R) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (dist(mid) < R ? lo : hi) = mid;
  }
  return lines(0.5 * (lo + hi));
}

/// Symmetric pants with the three cuffs of length exactly 2R.
inline std::pair<GroupElement, GroupElement> symmetric_fuchsian_pants(double R) {
  auto m = symmetric_lines(R);
  return pants_from_lines(m[0], m[1], m[2]);
}

/// Perturbed symmetric pants: endpoints moved by up to `jitter` (real, so still Fuchsian,
/// or complex when `planar` is false), then conjugated by h.
template <class Rng>
std::pair<GroupElement, GroupElement> random_pants(Rng& rng, double R, double jitter, bool planar,
                                                   const GroupElement& h) {
  auto m = symmetric_lines(R);
  std::uniform_real_distribution<double> U(-jitter, jitter);
  auto move = [&](const SpherePoint& p) {
    Complex z = p.value();
    double s = 1.0 + std::abs(z);
    return SpherePoint(z + s * Complex(U(rng), planar ? 0.0 : U(rng)));
  };
  for (auto& g : m) g = {move(g.p), move(g.q)};
  auto [a, b] = pants_from_lines(m[0], m[1], m[2]);
  GroupElement hi = h.inverse();
  return {h * a * hi, h * b * hi};
}

/// Builds a catalog from matrix-only pants: each cuff is its own curve (plus end).
inline PantsCatalog catalog_from_pants(const std::vector<std::pair<GroupElement, GroupElement>>& ab, double eps,
                                       double R) {
  PantsCatalog cat;
  cat.eps = eps;
  cat.R = R;
  for (const auto& [a, b] : ab) {
    GoodPants p = make_pants(a, b, eps, R);
    std::array<int, 3> curve{}, sign{+1, +1, +1};
    std::array<GroupElement, 3> conj;
    for (int i = 0; i < 3; ++i) {
      curve[i] = static_cast<int>(cat.curves.size());
      cat.curves.push_back(make_good_curve(p.cuffs[i], {}, {a, b}));
    }
    add_pants(cat, p, curve, sign, conj);
  }
  cat.rebuild_index();
  return cat;
}

/// Synthetic well-glued material: `copies` copies of the symmetric pants P (plus ends on three
/// curves) and of its mirror (minus ends), the mirror's feet placed at ft + 1 + i pi so that the
/// pairs glue with shear 1. Each foot gets an independent offset of modulus < noise.
template <class Rng>
PantsCatalog duplicated_pants_catalog(double R, double eps, int copies, double noise, Rng& rng) {
  auto [a, b] = symmetric_fuchsian_pants(R);
  PantsCatalog cat;
  cat.eps = eps;
  cat.R = R;
  GoodPants P = make_pants(a, b, eps, R);
  GoodPants M = make_pants(b.inverse(), a.inverse(), eps, R);  // cuffs B, A, ba
  M.orientation = -1;
  for (int i = 0; i < 3; ++i) cat.curves.push_back(make_good_curve(P.cuffs[i], {}, {a, b}));
  std::array<Complex, 3> base;
  for (int i = 0; i < 3; ++i) base[i] = feet_on_curve(P, i, cat.curves[i], GroupElement()).left;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto jitter = [&]() { return std::polar(noise * std::sqrt(U(rng)) * 0.999, kTwoPi * U(rng)); };
  auto push = [&](const GoodPants& p, const std::array<int, 3>& curve, int sign, Complex shift) {
    int idx = static_cast<int>(cat.pants.size());
    cat.pants.push_back(p);
    for (int i = 0; i < 3; ++i) {
      EndRecord r;
      r.pants = idx;
      r.cuff = i;
      r.curve = curve[i];
      r.sign = sign;
      r.ft_left = base[curve[i]] + shift + jitter();
      r.ft_right = r.ft_left + cat.curves[curve[i]].hl;
      r.foot = cat.curves[curve[i]].point(r.ft_left);
      cat.ends.push_back(r);
    }
  };
  for (int c = 0; c < copies; ++c) {
    push(P, {0, 1, 2}, +1, 0.0);
    push(M, {1, 0, 2}, -1, Complex(1.0, kPi));
  }
  cat.rebuild_index();
  return cat;
}

}  // namespace gp
