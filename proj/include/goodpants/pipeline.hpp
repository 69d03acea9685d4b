#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "assembly.hpp"
#include "equidist.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "normal_flow.hpp"
#include "pants.hpp"

namespace gp {

// ---- exit codes ----

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitMissingInput = 3,
  kExitParse = 4,
  kExitGeometry = 5,
  kExitAssembly = 6,
  kExitAnalysis = 7,
  kExitHallWitness = 10,
};

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return kExitParse;
    case ErrorCode::InvalidArgument: return kExitUsage;
    case ErrorCode::NotLoxodromic:
    case ErrorCode::SharedEndpoint:
    case ErrorCode::BadDeterminant:
    case ErrorCode::CuffOutOfWindow:
    case ErrorCode::DegenerateConfiguration:
    case ErrorCode::LatticeMismatch: return kExitGeometry;
    case ErrorCode::UnbalancedSides:
    case ErrorCode::UnmatchedEnd:
    case ErrorCode::OrientationClash:
    case ErrorCode::ZeroMeasure:
    case ErrorCode::BridgeRemains:
    case ErrorCode::NoEligibleSwap:
    case ErrorCode::InvalidWeights:
    case ErrorCode::ZeroBulk:
    case ErrorCode::InvalidGenus: return kExitAssembly;
    case ErrorCode::UnsupportedObservable:
    case ErrorCode::DegenerateEquidistant:
    case ErrorCode::InvalidCurvature:
    case ErrorCode::VacuousBound:
    case ErrorCode::OutOfDomain: return kExitAnalysis;
  }
  return kExitInternal;
}

class MissingInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- artifact files ----

namespace files {
inline const char* curves = "curves.txt";
inline const char* pants = "pants.txt";
inline const char* matching = "matching.txt";
inline const char* surface = "surface.txt";
inline const char* surface_report = "surface_report.txt";
inline const char* connected = "surface_connected.txt";
inline const char* connect_report = "connect_report.txt";
inline const char* stats = "stats.csv";
inline const char* measure = "measure.txt";
inline const char* flow = "flow.txt";
inline const char* flow_samples = "flow_samples.csv";
}  // namespace files

inline std::filesystem::path artifact(const RunConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.out) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw MissingInput("missing input " + p.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

template <class Reader>
auto read_artifact(const RunConfig& cfg, const char* name, Reader&& r) {
  std::istringstream in(slurp(artifact(cfg, name)));
  return r(in);
}

inline void write_artifact(const RunConfig& cfg, const char* name, const std::string& content) {
  std::filesystem::create_directories(cfg.out);
  std::ofstream f(artifact(cfg, name), std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + artifact(cfg, name).string());
  f << content;
}

inline GroupPresentation load_config_group(const RunConfig& cfg) {
  if (cfg.group.empty()) throw Error(ErrorCode::InvalidArgument, "no group file configured");
  if (!std::filesystem::exists(cfg.group)) throw MissingInput("missing group file " + cfg.group);
  return load_group(cfg.group);
}

// ---- stages ----

struct StageResult {
  int code = kExitOk;
  std::string summary;
};

inline StageResult cmd_curves(const RunConfig& cfg) {
  GroupPresentation G = load_config_group(cfg);
  Window w{cfg.R, cfg.eps};
  EnumerationResult r = enumerate_conjugacy_classes(G, cfg.max_word_len, w, cfg.threads);
  std::ostringstream os;
  write_curves(os, r, w, cfg.max_word_len);
  write_artifact(cfg, files::curves, os.str());
  return {kExitOk, std::to_string(r.classes.size()) + " curves, " + std::to_string(r.collisions.size()) +
                       " trace collisions"};
}

inline StageResult cmd_pants(const RunConfig& cfg) {
  PantsCatalog cat;
  if (cfg.source == "duplicated") {
    std::mt19937_64 rng(cfg.seed);
    cat = duplicated_pants_catalog(cfg.R, cfg.eps, cfg.copies, cfg.noise * cfg.eps / cfg.R, rng);
  } else {
    GroupPresentation G = load_config_group(cfg);
    EnumerationResult classes = read_artifact(cfg, files::curves, read_curves);
    cat = enumerate_good_pants(good_curves(classes, G), G, cfg.max_word_len, cfg.eps, cfg.R);
  }
  std::ostringstream os;
  write_catalog(os, cat);
  write_artifact(cfg, files::pants, os.str());
  return {kExitOk, std::to_string(cat.curves.size()) + " curves, " + std::to_string(cat.pants.size()) + " pants, " +
                       std::to_string(cat.pi_shift_diagnostics.size()) + " i*pi feet"};
}

inline PantsMeasure uniform_measure(const PantsCatalog& cat, int multiplicity) {
  PantsMeasure mu;
  for (size_t p = 0; p < cat.pants.size(); ++p) mu.weights[static_cast<int>(p)] = multiplicity;
  return mu;
}

inline StageResult cmd_match(const RunConfig& cfg) {
  PantsCatalog cat = read_artifact(cfg, files::pants, read_catalog);
  PantsMeasure mu = uniform_measure(cat, cfg.multiplicity);
  if (mu.zero()) throw Error(ErrorCode::ZeroMeasure, "catalog has no pants");
  LiftedEnds L = lift_ends(mu, cat);
  std::vector<CurveMatching> ms = match_ends(L);
  std::ostringstream os;
  write_matching(os, mu, L, ms);
  write_artifact(cfg, files::matching, os.str());
  int failed = 0;
  double worst = 0;
  for (const auto& m : ms) {
    if (m.failure) ++failed;
    else worst = std::max(worst, m.max_discrepancy);
  }
  if (failed) return {kExitHallWitness, std::to_string(failed) + " of " + std::to_string(ms.size()) +
                                            " curves have a Hall witness"};
  return {kExitOk, "perfect matching on " + std::to_string(ms.size()) + " curves, max discrepancy " + fmt(worst)};
}

inline std::string surface_report(const Surface& s) {
  std::ostringstream os;
  os << "pants " << s.pants_count() << "\n";
  os << "euler " << s.euler_characteristic() << "\n";
  os << "area " << fmt(s.area()) << "\n";
  os << "components " << s.component_count() << "\n";
  auto cs = s.components();
  for (size_t c = 0; c < cs.size(); ++c)
    os << "component " << c << " pants " << cs[c].pants << " euler " << cs[c].euler << " genus " << cs[c].genus
       << "\n";
  os << "bridges " << find_bridges(s).size() << "\n";
  os << "max_discrepancy " << fmt(s.max_discrepancy()) << "\n";
  return os.str();
}

inline StageResult cmd_assemble(const RunConfig& cfg) {
  PantsCatalog cat = read_artifact(cfg, files::pants, read_catalog);
  MatchingFile mf = read_artifact(cfg, files::matching, read_matching);
  if (!mf.perfect()) return {kExitHallWitness, "matching has Hall witnesses; nothing to assemble"};
  LiftedEnds L = lift_ends(mf.measure, cat);
  Surface s = assemble(L, mf.curves);
  std::ostringstream os;
  write_surface(os, s);
  write_artifact(cfg, files::surface, os.str());
  write_artifact(cfg, files::surface_report, surface_report(s));
  return {kExitOk, std::to_string(s.pants_count()) + " pants in " + std::to_string(s.component_count()) +
                       " components, euler " + std::to_string(s.euler_characteristic())};
}

inline StageResult cmd_connect(const RunConfig& cfg) {
  Surface s = read_artifact(cfg, files::surface, read_surface);
  std::ostringstream rep;
  bool covered = false;
  if (s.component_count() > 1 && !find_bridges(s).empty()) {
    s = nonseparating_double_cover(s);
    covered = true;
  }
  ReglueResult r = reglue_connect(s);
  rep << "double_cover " << (covered ? 1 : 0) << "\n";
  rep << "swaps " << r.swaps.size() << "\n";
  for (const auto& w : r.swaps)
    rep << "swap " << w.gluing1 << " " << w.gluing2 << " " << w.curve << " gap " << fmt(w.cross_gap) << " old "
        << fmt(w.old_max) << " new " << fmt(w.new_max) << "\n";
  rep << surface_report(r.surface);
  std::ostringstream os;
  write_surface(os, r.surface);
  write_artifact(cfg, files::connected, os.str());
  write_artifact(cfg, files::connect_report, rep.str());
  auto cs = r.surface.components();
  return {kExitOk, std::to_string(r.swaps.size()) + " swaps, " + std::to_string(cs.size()) + " component(s), genus " +
                       (cs.size() == 1 ? std::to_string(cs[0].genus) : std::string("-"))};
}

inline StageResult cmd_stats(const RunConfig& cfg) {
  PantsCatalog cat = read_artifact(cfg, files::pants, read_catalog);
  const char* which = std::filesystem::exists(artifact(cfg, files::connected)) ? files::connected : files::surface;
  Surface s = read_artifact(cfg, which, read_surface);
  EmpiricalFrameMeasure mu = surface_measure(s, cat, cfg.threads);
  TargetMeasure nu;
  nu.bulk.radius = cfg.chart_radius;
  auto rows = discrepancy(mu, nu, standard_suite(cfg.chart_radius), static_cast<size_t>(cfg.samples), cfg.seed,
                          cfg.threads);
  std::ostringstream csv, ms;
  write_stats_csv(csv, rows);
  write_measure(ms, mu);
  write_artifact(cfg, files::stats, csv.str());
  write_artifact(cfg, files::measure, ms.str());
  double worst = 0;
  for (const auto& r : rows) worst = std::max(worst, r.gap);
  return {kExitOk, std::to_string(mu.atoms.size()) + " atoms, largest gap " + fmt(worst) + " (chart-restricted Haar)"};
}

inline StageResult cmd_flow(const RunConfig& cfg) {
  BoundInputs b{cfg.K, cfg.bers, cfg.C_seppi};
  b.validate();
  std::ostringstream os;
  double delta = std::exp(-cfg.q * cfg.R);
  double lam = seppi_curvature_bound(cfg.K, cfg.C_seppi);
  os << "delta " << fmt(delta) << "\n";
  os << "metric_factor_delta " << fmt(equidistant_metric_factor(delta)) << "\n";
  os << "seppi_curvature_bound " << fmt(lam) << "\n";
  os << "bers_collar " << fmt(bers_collar(cfg.bers)) << "\n";
  if (lam < 1) os << "area_ratio_bound " << fmt(area_ratio_bound(lam)) << "\n";
  else os << "area_ratio_bound vacuous\n";
  std::filesystem::path surf = artifact(cfg, files::connected);
  if (!std::filesystem::exists(surf)) surf = artifact(cfg, files::surface);
  if (std::filesystem::exists(surf)) {
    std::istringstream in(slurp(surf));
    Surface s = read_surface(in);
    for (const auto& c : s.components())
      if (c.genus >= 2) os << "component_area genus " << c.genus << " " << fmt(gauss_bonnet_area(c.genus)) << "\n";
  }
  // jacobians on a synthetic hitting-time field, second fundamental form bounded by the curvature bound
  std::mt19937_64 rng(cfg.seed);
  TrigField f = TrigField::random(rng, 4, delta);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double k = std::min(lam, 0.99);
  std::ostringstream csv;
  csv << "x,y,tau,grad_x,grad_y,jacobian_pleated,jacobian_minimal\n";
  for (int i = 0; i < 16; ++i) {
    double x = 2 * U(rng), y = 2 * U(rng);
    double k1 = k * U(rng), k2 = -k1;
    double phi = kPi * U(rng), c = std::cos(phi), s = std::sin(phi);
    Sym2 A{k1 * c * c + k2 * s * s, (k1 - k2) * c * s, k1 * s * s + k2 * c * c};
    Vec2 g = f.grad(x, y);
    csv << fmt(x) << "," << fmt(y) << "," << fmt(f(x, y)) << "," << fmt(g[0]) << "," << fmt(g[1]) << ","
        << fmt(jacobian_pleated(f(x, y), g)) << "," << fmt(jacobian_minimal(f(x, y), g, A)) << "\n";
  }
  write_artifact(cfg, files::flow, os.str());
  write_artifact(cfg, files::flow_samples, csv.str());
  return {kExitOk, "delta " + fmt(delta) + ", curvature bound " + fmt(lam)};
}

/// Runs a stage, mapping errors to exit codes.
template <class Stage>
StageResult run_stage(Stage&& stage, const RunConfig& cfg) {
  try {
    cfg.validate();
    return stage(cfg);
  } catch (const MissingInput& e) {
    return {kExitMissingInput, e.what()};
  } catch (const Error& e) {
    return {exit_code_for(e.code()), e.what()};
  } catch (const std::exception& e) {
    return {kExitInternal, e.what()};
  }
}

}  // namespace gp
