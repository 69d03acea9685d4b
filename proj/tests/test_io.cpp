#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <limits>
#include <set>

#include "goodpants/pipeline.hpp"
#include "support.hpp"

using namespace gp;
using gp::test::Rng;
namespace fs = std::filesystem;

namespace {

template <class W, class T>
std::string dump(W&& write, const T& x) {
  std::ostringstream os;
  write(os, x);
  return os.str();
}

template <class R>
auto load(R&& read, const std::string& s) {
  std::istringstream in(s);
  return read(in);
}

bool bits_equal(double a, double b) { return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b); }
bool bits_equal(Complex a, Complex b) { return bits_equal(a.real(), b.real()) && bits_equal(a.imag(), b.imag()); }
bool bits_equal(const GroupElement& x, const GroupElement& y) {
  return bits_equal(x.a, y.a) && bits_equal(x.b, y.b) && bits_equal(x.c, y.c) && bits_equal(x.d, y.d);
}

std::string parse_error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "no error thrown";
  return "";
}

struct TempDir {
  fs::path path;
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path = fs::temp_directory_path() / (std::string("gp_io_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PantsCatalog noisy_catalog(uint64_t seed) {
  Rng rng(seed);
  return duplicated_pants_catalog(6.0, 0.5, 3, 0.4 * 0.5 / 6.0, rng);
}

Surface assembled_surface(const PantsCatalog& cat) {
  PantsMeasure mu = uniform_measure(cat, 1);
  LiftedEnds L = lift_ends(mu, cat);
  return assemble(L, match_ends(L));
}

}  // namespace

TEST(Format, DoublesRoundTripBitExactly) {
  Rng rng(3);
  std::vector<double> xs = {0.0, -0.0, 1.0, -1.0 / 3.0, 1e-310, std::numeric_limits<double>::max(),
                            std::numeric_limits<double>::min(), std::nextafter(1.0, 2.0)};
  for (int i = 0; i < 2000; ++i) xs.push_back(std::ldexp(gp::test::uniform(rng, -1, 1), int(rng() % 200) - 100));
  for (double x : xs) {
    std::string s = fmt(x);
    EXPECT_TRUE(bits_equal(std::strtod(s.c_str(), nullptr), x)) << s;
  }
}

TEST(Format, WordTokens) {
  EXPECT_EQ(word_token({}), "-");
  EXPECT_TRUE(token_word("-").empty());
  Word w = word_from_string("aBab");
  EXPECT_EQ(token_word(word_token(w)), w);
}

TEST(Curves, RoundTrip) {
  GroupPresentation G = load_group(GP_DATA_DIR "/pants_R3.group");
  Window w{3.0, 0.5};
  EnumerationResult r = enumerate_conjugacy_classes(G, 3, w, 1);
  ASSERT_FALSE(r.classes.empty());
  std::string s = dump([&](std::ostream& os, const EnumerationResult& x) { write_curves(os, x, w, 3); }, r);
  EnumerationResult back = load(read_curves, s);
  ASSERT_EQ(back.classes.size(), r.classes.size());
  ASSERT_EQ(back.collisions.size(), r.collisions.size());
  for (size_t i = 0; i < r.classes.size(); ++i) {
    EXPECT_EQ(back.classes[i].canonical_word, r.classes[i].canonical_word);
    EXPECT_TRUE(bits_equal(back.classes[i].length, r.classes[i].length));
    EXPECT_TRUE(bits_equal(back.classes[i].representative, r.classes[i].representative));
  }
  EXPECT_EQ(dump([&](std::ostream& os, const EnumerationResult& x) { write_curves(os, x, w, 3); }, back), s);
}

TEST(Catalog, SyntheticRoundTrip) {
  PantsCatalog cat = noisy_catalog(11);
  std::string s = dump(write_catalog, cat);
  PantsCatalog back = load(read_catalog, s);
  EXPECT_EQ(dump(write_catalog, back), s);
  ASSERT_EQ(back.pants.size(), cat.pants.size());
  ASSERT_EQ(back.ends.size(), cat.ends.size());
  for (size_t e = 0; e < cat.ends.size(); ++e) {
    EXPECT_EQ(back.ends[e].curve, cat.ends[e].curve);
    EXPECT_EQ(back.ends[e].sign, cat.ends[e].sign);
    EXPECT_TRUE(bits_equal(back.ends[e].ft_left, cat.ends[e].ft_left));
    EXPECT_TRUE(bits_equal(back.ends[e].foot.z(), cat.ends[e].foot.z()));
  }
  for (size_t p = 0; p < cat.pants.size(); ++p) {
    EXPECT_EQ(back.pants[p].orientation, cat.pants[p].orientation);
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(bits_equal(back.pants[p].cuffs[i], cat.pants[p].cuffs[i]));
  }
  EXPECT_EQ(back.plus, cat.plus);
  EXPECT_EQ(back.minus, cat.minus);
}

TEST(Catalog, EnumeratedRoundTripKeepsKeys) {
  GroupPresentation G = load_group(GP_DATA_DIR "/pants_R3.group");
  EnumerationResult r = enumerate_conjugacy_classes(G, 3, Window{3.0, 0.5}, 1);
  PantsCatalog cat = enumerate_good_pants(good_curves(r, G), G, 3, 0.5, 3.0);
  ASSERT_FALSE(cat.pants.empty());
  std::string s = dump(write_catalog, cat);
  PantsCatalog back = load(read_catalog, s);
  EXPECT_EQ(dump(write_catalog, back), s);
  for (size_t p = 0; p < cat.pants.size(); ++p) {
    ASSERT_TRUE(back.pants[p].key.has_value());
    EXPECT_EQ(*back.pants[p].key, *cat.pants[p].key);
  }
  for (size_t k = 0; k < cat.curves.size(); ++k) EXPECT_EQ(back.curves[k].word, cat.curves[k].word);
}

TEST(Matching, PerfectRoundTrip) {
  PantsCatalog cat = noisy_catalog(5);
  PantsMeasure mu = uniform_measure(cat, 2);
  LiftedEnds L = lift_ends(mu, cat);
  auto ms = match_ends(L);
  std::ostringstream os;
  write_matching(os, mu, L, ms);
  MatchingFile mf = load(read_matching, os.str());
  EXPECT_TRUE(mf.perfect());
  EXPECT_EQ(mf.measure.weights, mu.weights);
  ASSERT_EQ(mf.curves.size(), ms.size());
  for (size_t i = 0; i < ms.size(); ++i) {
    EXPECT_EQ(mf.curves[i].curve, ms[i].curve);
    EXPECT_EQ(mf.curves[i].pairs, ms[i].pairs);
    EXPECT_TRUE(bits_equal(mf.curves[i].max_discrepancy, ms[i].max_discrepancy));
  }
  std::ostringstream again;
  write_matching(again, mf.measure, L, mf.curves);
  EXPECT_EQ(again.str(), os.str());
}

TEST(Matching, HallWitnessRoundTrip) {
  // no i*pi shift between the feet: nothing glues at R = 3
  GroupPresentation G = load_group(GP_DATA_DIR "/pants_R3.group");
  EnumerationResult r = enumerate_conjugacy_classes(G, 3, Window{3.0, 0.5}, 1);
  PantsCatalog cat = enumerate_good_pants(good_curves(r, G), G, 3, 0.5, 3.0);
  PantsMeasure mu = uniform_measure(cat, 1);
  LiftedEnds L = lift_ends(mu, cat);
  auto ms = match_ends(L);
  std::ostringstream os;
  write_matching(os, mu, L, ms);
  MatchingFile mf = load(read_matching, os.str());
  EXPECT_FALSE(mf.perfect());
  for (size_t i = 0; i < ms.size(); ++i) {
    ASSERT_EQ(mf.curves[i].failure.has_value(), ms[i].failure.has_value());
    if (!ms[i].failure) continue;
    EXPECT_EQ(mf.curves[i].failure->witness, ms[i].failure->witness);
    EXPECT_EQ(mf.curves[i].failure->witness_neighbors, ms[i].failure->witness_neighbors);
  }
  std::ostringstream again;
  write_matching(again, mf.measure, L, mf.curves);
  EXPECT_EQ(again.str(), os.str());
}

TEST(Surface, RoundTrip) {
  PantsCatalog cat = noisy_catalog(9);
  Surface s = assembled_surface(cat);
  std::string text = dump(write_surface, s);
  Surface back = load(read_surface, text);
  EXPECT_EQ(dump(write_surface, back), text);
  EXPECT_EQ(back.instance_pants, s.instance_pants);
  EXPECT_EQ(back.gluings.size(), s.gluings.size());
  EXPECT_EQ(back.component_count(), s.component_count());
  EXPECT_EQ(back.euler_characteristic(), s.euler_characteristic());
  for (size_t e = 0; e < s.ends.size(); ++e) EXPECT_TRUE(bits_equal(back.ends[e].foot.z(), s.ends[e].foot.z()));
}

TEST(Measure, RoundTrip) {
  PantsCatalog cat = noisy_catalog(2);
  EmpiricalFrameMeasure mu = surface_measure(assembled_surface(cat), cat, 1);
  std::string text = dump(write_measure, mu);
  EmpiricalFrameMeasure back = load(read_measure, text);
  EXPECT_EQ(back.normalized, mu.normalized);
  ASSERT_EQ(back.atoms.size(), mu.atoms.size());
  for (size_t i = 0; i < mu.atoms.size(); ++i) {
    EXPECT_TRUE(bits_equal(back.atoms[i].first.g, mu.atoms[i].first.g));
    EXPECT_TRUE(bits_equal(back.atoms[i].second, mu.atoms[i].second));
  }
  EXPECT_EQ(dump(write_measure, back), text);
}

TEST(Stats, CsvRoundTrip) {
  std::vector<DiscrepancyRow> rows = {{"ball_half", 0.5, 1.0 / 3.0, 1e-3, 0.5 - 1.0 / 3.0}, {"bump", -0.0, 2, 0, 2}};
  std::string text = dump(write_stats_csv, rows);
  auto back = load(read_stats_csv, text);
  ASSERT_EQ(back.size(), rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].id, rows[i].id);
    EXPECT_TRUE(bits_equal(back[i].target, rows[i].target));
    EXPECT_TRUE(bits_equal(back[i].gap, rows[i].gap));
  }
  EXPECT_EQ(dump(write_stats_csv, back), text);
}

TEST(ParseErrors, CarryLineNumbers) {
  PantsCatalog cat = noisy_catalog(1);
  std::string s = dump(write_surface, assembled_surface(cat));
  // damage the third line
  size_t a = s.find('\n') + 1, b = s.find('\n', a) + 1;
  std::string bad = s.substr(0, b) + "end x\n" + s.substr(s.find('\n', b) + 1);
  EXPECT_NE(parse_error_message([&] { load(read_surface, bad); }).find("line 3"), std::string::npos);

  EXPECT_NE(parse_error_message([&] { load(read_curves, "curves 1 R 3 eps 0.5 L 2\nclass a 1 0 1 0\n"); })
                .find("line 2"),
            std::string::npos);
  parse_error_message([&] { load(read_catalog, ""); });
  parse_error_message([&] { load(read_matching, "matching eps 0.5 R 3 curves 1\nmeasure 0:x\n"); });
  parse_error_message([&] { load(read_stats_csv, "observable,empirical\n"); });
}

TEST(ParseErrors, TruncationIsDetected) {
  PantsCatalog cat = noisy_catalog(4);
  std::string s = dump(write_catalog, cat);
  std::string cut = s.substr(0, s.size() / 2);
  cut = cut.substr(0, cut.rfind('\n') + 1);
  parse_error_message([&] { load(read_catalog, cut); });
}

TEST(Config, ParseOverrideAndDump) {
  RunConfig cfg;
  std::istringstream in("# comment\n eps = 0.25 \nR=7\n\nR = 8 # later wins\nsource = duplicated\nout = x y\n");
  parse_config(in, cfg);
  EXPECT_EQ(cfg.eps, 0.25);
  EXPECT_EQ(cfg.R, 8.0);
  EXPECT_EQ(cfg.source, "duplicated");
  EXPECT_EQ(cfg.out, "x y");
  cfg.set("seed", "42");
  EXPECT_EQ(cfg.seed, 42u);

  std::ostringstream os;
  write_config(os, cfg);
  RunConfig back;
  std::istringstream again(os.str());
  parse_config(again, back);
  EXPECT_EQ(back.dump(), cfg.dump());
}

TEST(Config, Errors) {
  RunConfig cfg;
  std::istringstream no_eq("eps 0.5\n");
  EXPECT_NE(parse_error_message([&] { parse_config(no_eq, cfg); }).find("line 1"), std::string::npos);
  parse_error_message([&] { cfg.set("epsilon", "1"); });
  parse_error_message([&] { cfg.set("eps", "half"); });
  parse_error_message([&] { cfg.set("threads", "2.5"); });

  auto invalid = [](auto mutate) {
    RunConfig c;
    mutate(c);
    try {
      c.validate();
    } catch (const Error& e) {
      return e.code() == ErrorCode::InvalidArgument;
    }
    return false;
  };
  EXPECT_TRUE(invalid([](RunConfig& c) { c.eps = 0; }));
  EXPECT_TRUE(invalid([](RunConfig& c) { c.R = -1; }));
  EXPECT_TRUE(invalid([](RunConfig& c) { c.max_word_len = 0; }));
  EXPECT_TRUE(invalid([](RunConfig& c) { c.source = "other"; }));
  EXPECT_FALSE(invalid([](RunConfig&) {}));
}

TEST(ExitCodes, FamiliesAreDistinct) {
  EXPECT_EQ(exit_code_for(ErrorCode::ParseError), kExitParse);
  EXPECT_EQ(exit_code_for(ErrorCode::InvalidArgument), kExitUsage);
  EXPECT_EQ(exit_code_for(ErrorCode::CuffOutOfWindow), kExitGeometry);
  EXPECT_EQ(exit_code_for(ErrorCode::NoEligibleSwap), kExitAssembly);
  EXPECT_EQ(exit_code_for(ErrorCode::VacuousBound), kExitAnalysis);
  std::set<int> codes = {kExitOk, kExitInternal, kExitUsage, kExitMissingInput, kExitParse,
                         kExitGeometry, kExitAssembly, kExitAnalysis, kExitHallWitness};
  EXPECT_EQ(codes.size(), 9u);
}

TEST(Pipeline, SingleGeneratorGivesTwoCurves) {
  TempDir t;
  RunConfig cfg;
  cfg.group = GP_DATA_DIR "/single_a4.group";
  cfg.R = 2;
  cfg.eps = 0.5;
  cfg.max_word_len = 2;
  cfg.out = t.path.string();
  StageResult r = run_stage(cmd_curves, cfg);
  ASSERT_EQ(r.code, kExitOk) << r.summary;
  EnumerationResult e = read_artifact(cfg, files::curves, read_curves);
  EXPECT_EQ(e.classes.size(), 2u);
}

TEST(Pipeline, MissingInputsAndHallWitness) {
  TempDir t;
  RunConfig cfg;
  cfg.out = t.path.string();
  cfg.group = (t.path / "absent.group").string();
  EXPECT_EQ(run_stage(cmd_curves, cfg).code, kExitMissingInput);
  EXPECT_EQ(run_stage(cmd_match, cfg).code, kExitMissingInput);
  EXPECT_EQ(run_stage(cmd_stats, cfg).code, kExitMissingInput);

  cfg.group = GP_DATA_DIR "/pants_R3.group";
  ASSERT_EQ(run_stage(cmd_curves, cfg).code, kExitOk);
  ASSERT_EQ(run_stage(cmd_pants, cfg).code, kExitOk);
  EXPECT_EQ(run_stage(cmd_match, cfg).code, kExitHallWitness);
  EXPECT_TRUE(fs::exists(artifact(cfg, files::matching)));
  EXPECT_EQ(run_stage(cmd_assemble, cfg).code, kExitHallWitness);

  cfg.K = 0.5;
  EXPECT_EQ(run_stage(cmd_flow, cfg).code, kExitAnalysis);
}

TEST(Pipeline, DuplicatedSourceEndsConnectedAndConsistent) {
  TempDir t;
  RunConfig cfg;
  cfg.source = "duplicated";
  cfg.R = 6;
  cfg.copies = 4;
  cfg.noise = 0.5;
  cfg.seed = 7;
  cfg.samples = 500;
  cfg.out = t.path.string();
  for (auto stage : {cmd_pants, cmd_match, cmd_assemble, cmd_connect, cmd_stats, cmd_flow}) {
    StageResult r = run_stage(stage, cfg);
    ASSERT_EQ(r.code, kExitOk) << r.summary;
  }
  Surface s = read_artifact(cfg, files::connected, read_surface);
  ASSERT_EQ(s.component_count(), 1);
  // recount from the gluings: every end used once, 2 - 2g = -#pants
  std::vector<int> used(s.ends.size(), 0);
  for (const auto& g : s.gluings) used[g.minus_end]++, used[g.plus_end]++;
  for (int u : used) EXPECT_EQ(u, 1);
  EXPECT_EQ(2 * s.gluings.size(), s.ends.size());
  int genus = s.components()[0].genus;
  EXPECT_EQ(2 - 2 * genus, -s.pants_count());
  for (const auto& g : s.gluings) EXPECT_LT(g.discrepancy, 2 * cfg.eps / cfg.R);
  std::string report = slurp(artifact(cfg, files::connect_report));
  EXPECT_NE(report.find("genus " + std::to_string(genus)), std::string::npos);
}
