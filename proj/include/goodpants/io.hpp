#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "equidist.hpp"
#include "lattice.hpp"
#include "pants.hpp"
#include "words.hpp"

namespace gp {

// ---- tokens ----

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(Complex z) { return fmt(z.real()) + " " + fmt(z.imag()); }

inline std::string fmt(const GroupElement& g) {
  return fmt(g.a) + " " + fmt(g.b) + " " + fmt(g.c) + " " + fmt(g.d);
}

inline std::string word_token(const Word& w) { return w.empty() ? "-" : word_to_string(w); }
inline Word token_word(const std::string& s) { return s == "-" ? Word{} : word_from_string(s); }

/// Whitespace-separated reader over one line, with line numbers in errors.
class LineReader {
 public:
  LineReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  /// Next non-empty, non-comment line; false at end of input.
  bool next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      size_t h = line.find('#');
      if (h != std::string::npos) line.erase(h);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ss_.clear();
      ss_.str(line);
      return true;
    }
    return false;
  }

  void require_next() {
    if (!next()) fail("unexpected end of input");
  }

  std::string str() {
    std::string s;
    if (!(ss_ >> s)) fail("missing field");
    return s;
  }

  void expect(const std::string& tag) {
    std::string s = str();
    if (s != tag) fail("expected '" + tag + "', got '" + s + "'");
  }

  double real() {
    std::string s = str();
    char* end = nullptr;
    double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail("bad number '" + s + "'");
    return x;
  }

  long long integer() { return integer(str()); }

  long long integer(const std::string& s) const {
    char* end = nullptr;
    long long x = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') fail("bad integer '" + s + "'");
    return x;
  }

  int small() { return static_cast<int>(integer()); }

  Complex complex() {
    double re = real();
    return {re, real()};
  }

  GroupElement element() {
    Complex a = complex(), b = complex(), c = complex(), d = complex();
    return {a, b, c, d};
  }

  /// Remaining tokens of the current line.
  std::vector<std::string> rest() {
    std::vector<std::string> out;
    std::string s;
    while (ss_ >> s) out.push_back(s);
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, what_ + " line " + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::string what_;
  int lineno_ = 0;
  std::istringstream ss_;
};

// ---- curves ----

inline void write_curves(std::ostream& os, const EnumerationResult& r, const Window& w, int max_word_len) {
  os << "curves " << r.classes.size() << " R " << fmt(w.R) << " eps " << fmt(w.eps) << " L " << max_word_len
     << "\n";
  for (const auto& c : r.classes)
    os << "class " << word_token(c.canonical_word) << " " << fmt(c.length) << " " << fmt(c.representative) << "\n";
  for (const auto& t : r.collisions)
    os << "collision " << word_token(t.first) << " " << word_token(t.second) << "\n";
}

inline EnumerationResult read_curves(std::istream& is) {
  LineReader in(is, "curves");
  in.require_next();
  in.expect("curves");
  long long n = in.integer();
  EnumerationResult r;
  while (in.next()) {
    std::string tag = in.str();
    if (tag == "class") {
      ConjugacyClass c;
      c.canonical_word = token_word(in.str());
      c.length = in.complex();
      c.representative = in.element();
      c.representative.word = c.canonical_word;
      r.classes.push_back(c);
    } else if (tag == "collision") {
      TraceCollision t;
      t.first = token_word(in.str());
      t.second = token_word(in.str());
      r.collisions.push_back(t);
    } else {
      in.fail("unknown record '" + tag + "'");
    }
  }
  if (static_cast<long long>(r.classes.size()) != n) in.fail("class count mismatch");
  return r;
}

// ---- pants catalog ----

inline void write_catalog(std::ostream& os, const PantsCatalog& cat) {
  os << "catalog eps " << fmt(cat.eps) << " R " << fmt(cat.R) << " curves " << cat.curves.size() << " pants "
     << cat.pants.size() << "\n";
  for (size_t k = 0; k < cat.curves.size(); ++k) {
    const GoodCurve& c = cat.curves[k];
    os << "curve " << k << " " << word_token(c.word) << " " << fmt(c.length) << " " << fmt(c.hl) << " "
       << fmt(c.element) << " " << fmt(c.gauge) << "\n";
  }
  for (size_t p = 0; p < cat.pants.size(); ++p) {
    const GoodPants& P = cat.pants[p];
    std::string key = P.key ? word_token(P.key->first) + "|" + word_token(P.key->second) : "-";
    os << "pants " << p << " " << key << " " << P.orientation;
    for (int i = 0; i < 3; ++i) os << " " << word_token(P.cuffs[i].word);
    for (int i = 0; i < 3; ++i) os << " " << fmt(P.lengths[i]);
    os << " " << fmt(P.a) << " " << fmt(P.b) << "\n";
  }
  for (size_t e = 0; e < cat.ends.size(); ++e) {
    const EndRecord& r = cat.ends[e];
    os << "end " << e << " " << r.pants << " " << r.cuff << " " << r.curve << " " << r.sign << " " << fmt(r.ft_left)
       << " " << fmt(r.ft_right) << "\n";
  }
  if (!cat.pi_shift_diagnostics.empty()) {
    os << "pishift";
    for (int e : cat.pi_shift_diagnostics) os << " " << e;
    os << "\n";
  }
}

inline PantsCatalog read_catalog(std::istream& is) {
  LineReader in(is, "pants");
  in.require_next();
  in.expect("catalog");
  PantsCatalog cat;
  in.expect("eps");
  cat.eps = in.real();
  in.expect("R");
  cat.R = in.real();
  in.expect("curves");
  long long nc = in.integer();
  in.expect("pants");
  long long np = in.integer();
  while (in.next()) {
    std::string tag = in.str();
    if (tag == "curve") {
      if (in.integer() != static_cast<long long>(cat.curves.size())) in.fail("curves out of order");
      GoodCurve c;
      c.word = token_word(in.str());
      c.length = in.complex();
      c.hl = in.complex();
      c.element = in.element();
      c.element.word = c.word;
      c.gauge = in.element();
      cat.curves.push_back(c);
    } else if (tag == "pants") {
      if (in.integer() != static_cast<long long>(cat.pants.size())) in.fail("pants out of order");
      GoodPants P;
      std::string key = in.str();
      if (key != "-") {
        size_t bar = key.find('|');
        if (bar == std::string::npos) in.fail("bad pants key");
        P.key = WordPair{token_word(key.substr(0, bar)), token_word(key.substr(bar + 1))};
      }
      P.orientation = in.small();
      std::array<Word, 3> w;
      for (auto& x : w) x = token_word(in.str());
      for (auto& l : P.lengths) l = in.complex();
      P.a = in.element();
      P.b = in.element();
      P.a.word = w[0];
      P.b.word = w[1];
      P.cuffs = {P.a, P.b, (P.b * P.a).inverse()};
      P.cuffs[2].word = w[2];
      cat.pants.push_back(P);
    } else if (tag == "end") {
      if (in.integer() != static_cast<long long>(cat.ends.size())) in.fail("ends out of order");
      EndRecord r;
      r.pants = in.small();
      r.cuff = in.small();
      r.curve = in.small();
      r.sign = in.small();
      r.ft_left = in.complex();
      r.ft_right = in.complex();
      if (r.curve < 0 || r.curve >= static_cast<int>(cat.curves.size())) in.fail("end refers to unknown curve");
      r.foot = cat.curves[r.curve].point(r.ft_left);
      cat.ends.push_back(r);
    } else if (tag == "pishift") {
      for (const auto& t : in.rest()) cat.pi_shift_diagnostics.push_back(static_cast<int>(in.integer(t)));
    } else {
      in.fail("unknown record '" + tag + "'");
    }
  }
  if (static_cast<long long>(cat.curves.size()) != nc || static_cast<long long>(cat.pants.size()) != np)
    in.fail("count mismatch");
  if (cat.ends.size() != 3 * cat.pants.size()) in.fail("need three ends per pants");
  cat.rebuild_index();
  return cat;
}

// ---- matchings ----

struct MatchingFile {
  PantsMeasure measure;
  std::vector<CurveMatching> curves;
  std::vector<std::string> labels;  // per entry of curves
  bool perfect() const {
    for (const auto& c : curves)
      if (c.failure) return false;
    return true;
  }
};

inline void write_matching(std::ostream& os, const PantsMeasure& mu, const LiftedEnds& L,
                           const std::vector<CurveMatching>& ms) {
  os << "matching eps " << fmt(L.eps) << " R " << fmt(L.R) << " curves " << ms.size() << "\n";
  os << "measure";
  for (const auto& [p, w] : mu.weights) os << " " << p << ":" << w;
  os << "\n";
  for (const auto& m : ms) {
    std::string label = "-";
    auto it = L.minus.find(m.curve);
    if (it != L.minus.end() && !it->second.empty()) label = L.ends[it->second[0]].label;
    else if (L.plus.count(m.curve) && !L.plus.at(m.curve).empty()) label = L.ends[L.plus.at(m.curve)[0]].label;
    if (m.failure) {
      os << "curve " << m.curve << " " << label << " hall " << m.failure->witness.size();
      for (int x : m.failure->witness) os << " " << x;
      os << " neighbors " << m.failure->witness_neighbors.size();
      for (int x : m.failure->witness_neighbors) os << " " << x;
      os << "\n";
    } else {
      os << "curve " << m.curve << " " << label << " pairs " << m.pairs.size() << " max " << fmt(m.max_discrepancy);
      for (auto [a, b] : m.pairs) os << " " << a << " " << b;
      os << "\n";
    }
  }
}

inline MatchingFile read_matching(std::istream& is) {
  LineReader in(is, "matching");
  in.require_next();
  in.expect("matching");
  in.expect("eps");
  in.real();
  in.expect("R");
  in.real();
  in.expect("curves");
  long long n = in.integer();
  MatchingFile f;
  in.require_next();
  in.expect("measure");
  for (const auto& tok : in.rest()) {
    size_t c = tok.find(':');
    if (c == std::string::npos) in.fail("bad measure entry '" + tok + "'");
    f.measure.weights[static_cast<int>(in.integer(tok.substr(0, c)))] = in.integer(tok.substr(c + 1));
  }
  while (in.next()) {
    in.expect("curve");
    CurveMatching m;
    m.curve = in.small();
    f.labels.push_back(in.str());
    std::string kind = in.str();
    if (kind == "pairs") {
      long long k = in.integer();
      in.expect("max");
      m.max_discrepancy = in.real();
      for (long long i = 0; i < k; ++i) {
        int a = in.small();
        m.pairs.push_back({a, in.small()});
      }
    } else if (kind == "hall") {
      Matching h;
      long long k = in.integer();
      for (long long i = 0; i < k; ++i) h.witness.push_back(in.small());
      in.expect("neighbors");
      k = in.integer();
      for (long long i = 0; i < k; ++i) h.witness_neighbors.push_back(in.small());
      m.failure = h;
    } else {
      in.fail("unknown matching kind '" + kind + "'");
    }
    f.curves.push_back(m);
  }
  if (static_cast<long long>(f.curves.size()) != n) in.fail("curve count mismatch");
  return f;
}

// ---- surfaces ----

inline void write_surface(std::ostream& os, const Surface& s) {
  os << "surface eps " << fmt(s.eps) << " R " << fmt(s.R) << " pants " << s.pants_count() << " ends "
     << s.ends.size() << " gluings " << s.gluings.size() << "\n";
  for (int i = 0; i < s.pants_count(); ++i)
    os << "instance " << i << " " << s.instance_pants[i] << " " << s.instance_copy[i] << "\n";
  for (size_t e = 0; e < s.ends.size(); ++e) {
    const EndInfo& x = s.ends[e];
    os << "end " << e << " " << x.curve << " " << x.label << " " << x.sign << " " << fmt(x.foot.z()) << " "
       << fmt(x.foot.hl()) << "\n";
  }
  for (const auto& g : s.gluings)
    os << "gluing " << s.ends[g.minus_end].label << " " << g.minus_end << " " << g.plus_end << " "
       << fmt(g.discrepancy) << "\n";
}

inline Surface read_surface(std::istream& is) {
  LineReader in(is, "surface");
  in.require_next();
  in.expect("surface");
  Surface s;
  in.expect("eps");
  s.eps = in.real();
  in.expect("R");
  s.R = in.real();
  in.expect("pants");
  long long np = in.integer();
  in.expect("ends");
  long long ne = in.integer();
  in.expect("gluings");
  long long ng = in.integer();
  while (in.next()) {
    std::string tag = in.str();
    if (tag == "instance") {
      if (in.integer() != static_cast<long long>(s.instance_pants.size())) in.fail("instances out of order");
      s.instance_pants.push_back(in.small());
      s.instance_copy.push_back(in.small());
    } else if (tag == "end") {
      if (in.integer() != static_cast<long long>(s.ends.size())) in.fail("ends out of order");
      EndInfo x;
      x.curve = in.small();
      x.label = in.str();
      x.sign = in.small();
      Complex z = in.complex(), hl = in.complex();
      x.foot = FlatTorusPoint(z, hl);
      if (x.foot.z() != z) in.fail("foot not reduced");
      s.ends.push_back(x);
    } else if (tag == "gluing") {
      in.str();
      Gluing g;
      g.minus_end = in.small();
      g.plus_end = in.small();
      g.discrepancy = in.real();
      if (g.minus_end < 0 || g.plus_end < 0 || g.minus_end >= static_cast<int>(s.ends.size()) ||
          g.plus_end >= static_cast<int>(s.ends.size()))
        in.fail("gluing refers to unknown end");
      s.gluings.push_back(g);
    } else {
      in.fail("unknown record '" + tag + "'");
    }
  }
  if (static_cast<long long>(s.instance_pants.size()) != np || static_cast<long long>(s.ends.size()) != ne ||
      static_cast<long long>(s.gluings.size()) != ng)
    in.fail("count mismatch");
  if (s.ends.size() != 3 * s.instance_pants.size()) in.fail("need three ends per pants");
  return s;
}

// ---- measures and statistics ----

inline void write_measure(std::ostream& os, const EmpiricalFrameMeasure& m) {
  os << "measure " << m.atoms.size() << " normalized " << (m.normalized ? 1 : 0) << "\n";
  for (const auto& [F, w] : m.atoms) os << fmt(F.g) << " " << fmt(w) << "\n";
}

inline EmpiricalFrameMeasure read_measure(std::istream& is) {
  LineReader in(is, "measure");
  in.require_next();
  in.expect("measure");
  long long n = in.integer();
  in.expect("normalized");
  EmpiricalFrameMeasure m;
  m.normalized = in.integer() != 0;
  while (in.next()) {
    GroupElement g = in.element();
    double w = in.real();
    if (w < 0) in.fail("negative weight");
    m.atoms.push_back({Frame{g}, w});
  }
  if (static_cast<long long>(m.atoms.size()) != n) in.fail("atom count mismatch");
  return m;
}

inline void write_stats_csv(std::ostream& os, const std::vector<DiscrepancyRow>& rows) {
  os << "observable,empirical,target,target_se,gap\n";
  for (const auto& r : rows)
    os << r.id << "," << fmt(r.empirical) << "," << fmt(r.target) << "," << fmt(r.target_se) << "," << fmt(r.gap)
       << "\n";
}

inline std::vector<DiscrepancyRow> read_stats_csv(std::istream& is) {
  std::string line;
  std::vector<DiscrepancyRow> rows;
  if (!std::getline(is, line) || line != "observable,empirical,target,target_se,gap")
    throw Error(ErrorCode::ParseError, "stats: bad header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (f.size() != 5) throw Error(ErrorCode::ParseError, "stats line " + std::to_string(lineno) + ": 5 fields");
    DiscrepancyRow r;
    r.id = f[0];
    double* slots[4] = {&r.empirical, &r.target, &r.target_se, &r.gap};
    for (int k = 0; k < 4; ++k) {
      char* end = nullptr;
      *slots[k] = std::strtod(f[k + 1].c_str(), &end);
      if (*end != '\0') throw Error(ErrorCode::ParseError, "stats line " + std::to_string(lineno) + ": bad number");
    }
    rows.push_back(r);
  }
  return rows;
}

// ---- run configuration ----

struct RunConfig {
  std::string group;
  std::string source = "group";  // or "duplicated"
  double eps = 0.5, R = 3.0;
  int max_word_len = 3;
  double q = 1.0;
  double c_eps = 1.0, vol_M = 1.0, C_seppi = 1.0;
  double K = 1.0, bers = 0.0;
  unsigned long long seed = 1;
  std::string out = "out";
  int threads = 1;
  int copies = 4;           // duplicated source
  double noise = 0.0;       // duplicated source, in units of eps/R
  int multiplicity = 1;     // weight of every catalog pants in the measure
  int samples = 4000;       // Haar draws for statistics
  double chart_radius = 1.5;

  void set(const std::string& key, const std::string& value) {
    auto num = [&](double& x) {
      char* end = nullptr;
      x = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0') throw Error(ErrorCode::ParseError, "config " + key + ": bad number");
    };
    auto integer = [&](auto& x) {
      char* end = nullptr;
      long long v = std::strtoll(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0') throw Error(ErrorCode::ParseError, "config " + key + ": bad integer");
      x = static_cast<std::remove_reference_t<decltype(x)>>(v);
    };
    if (key == "group") group = value;
    else if (key == "source") source = value;
    else if (key == "eps") num(eps);
    else if (key == "R") num(R);
    else if (key == "max_word_len") integer(max_word_len);
    else if (key == "q") num(q);
    else if (key == "c_eps") num(c_eps);
    else if (key == "vol_M") num(vol_M);
    else if (key == "C_seppi") num(C_seppi);
    else if (key == "K") num(K);
    else if (key == "bers") num(bers);
    else if (key == "seed") integer(seed);
    else if (key == "out") out = value;
    else if (key == "threads") integer(threads);
    else if (key == "copies") integer(copies);
    else if (key == "noise") num(noise);
    else if (key == "multiplicity") integer(multiplicity);
    else if (key == "samples") integer(samples);
    else if (key == "chart_radius") num(chart_radius);
    else throw Error(ErrorCode::ParseError, "config: unknown key '" + key + "'");
  }

  void validate() const {
    if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (!(R > 0)) throw Error(ErrorCode::InvalidArgument, "R must be positive");
    if (max_word_len < 1) throw Error(ErrorCode::InvalidArgument, "max_word_len must be >= 1");
    if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
    if (source != "group" && source != "duplicated")
      throw Error(ErrorCode::InvalidArgument, "source must be 'group' or 'duplicated'");
    if (copies < 1 || multiplicity < 1 || samples < 2)
      throw Error(ErrorCode::InvalidArgument, "copies, multiplicity >= 1 and samples >= 2");
    if (!(c_eps > 0 && vol_M > 0 && C_seppi > 0 && chart_radius > 0))
      throw Error(ErrorCode::InvalidArgument, "constants must be positive");
  }

  std::map<std::string, std::string> dump() const {
    return {{"group", group},
            {"source", source},
            {"eps", fmt(eps)},
            {"R", fmt(R)},
            {"max_word_len", std::to_string(max_word_len)},
            {"q", fmt(q)},
            {"c_eps", fmt(c_eps)},
            {"vol_M", fmt(vol_M)},
            {"C_seppi", fmt(C_seppi)},
            {"K", fmt(K)},
            {"bers", fmt(bers)},
            {"seed", std::to_string(seed)},
            {"out", out},
            {"threads", std::to_string(threads)},
            {"copies", std::to_string(copies)},
            {"noise", fmt(noise)},
            {"multiplicity", std::to_string(multiplicity)},
            {"samples", std::to_string(samples)},
            {"chart_radius", fmt(chart_radius)}};
  }
};

/// key = value per line; '#' starts a comment; later keys override earlier ones.
inline void parse_config(std::istream& is, RunConfig& cfg) {
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    size_t h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, "config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline void write_config(std::ostream& os, const RunConfig& cfg) {
  for (const auto& [k, v] : cfg.dump()) os << k << " = " << v << "\n";
}

}  // namespace gp
