// Acceptance checks, one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "attrib/cli/commands.hpp"
#include "attrib/corpus_model.hpp"
#include "attrib/label_store.hpp"
#include "attrib/mosaic.hpp"
#include "attrib/source_classifier.hpp"
#include "attrib/stats/contingency.hpp"
#include "attrib/stats/distributions.hpp"
#include "attrib/stats/fisher.hpp"
#include "attrib/stats/glm.hpp"
#include "attrib/stats/sampling.hpp"
#include "test_support.hpp"

using namespace attrib;
using namespace attrib::stats;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail.clear();
    if (!detail.empty()) detail += "; ";
    detail += what;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Verdict fisher_oracle_agreement() {
  Verdict v;
  const auto start = Clock::now();
  std::size_t tables = 0;
  double worst = 0.0;
  auto check = [&](const ContingencyTable& t) {
    const double p = fisher_exact(t).p_value;
    const double ref = attrib::testing::fisher_oracle(t);
    worst = std::max(worst, std::fabs(p - ref) / ref);
    ++tables;
  };

  // Every 2 x 2 table with n <= 40 and no empty row or column.
  for (std::int64_t a = 0; a <= 40; ++a)
    for (std::int64_t b = 0; a + b <= 40; ++b)
      for (std::int64_t c = 0; a + b + c <= 40; ++c)
        for (std::int64_t d = 0; a + b + c + d <= 40; ++d) {
          if (a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0) continue;
          check(ContingencyTable::from_counts({a, b}, {c, d}));
        }
  std::mt19937_64 gen(20160);
  for (int i = 0; i < 10000; ++i) check(attrib::testing::random_table(gen, 3, 40));

  const double spot = fisher_exact(ContingencyTable::from_counts({3, 1}, {1, 3})).p_value;
  const double secs = seconds_since(start);
  v.detail = std::to_string(tables) + " tables, max rel err " + fmt("%.3g", worst) +
             ", [[3,1],[1,3]] p=" + fmt("%.12f", spot) + ", " + fmt("%.1f", secs) + " s";
  v.require(worst <= 1e-12, "max rel err " + fmt("%.3g", worst) + " > 1e-12");
  v.require(std::fabs(spot - 34.0 / 70.0) <= 1e-12 * (34.0 / 70.0), "spot value off");
  v.require(tables >= 10000, "fewer than 10^4 tables");
  v.require(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s");
  return v;
}

Verdict chi_square_yates() {
  Verdict v;
  const auto r = chi_square_test(ContingencyTable::from_counts({10, 20}, {20, 10}));
  double worst = 0.0;
  for (int df = 1; df <= 20; ++df) {
    for (double x = 0.0; x <= 100.0; x += 0.05) {
      const double ref = boost::math::gamma_q(df / 2.0, x / 2.0);
      worst = std::max(worst, std::fabs(chi_square_upper_tail(x, df) - ref));
    }
  }
  v.detail = "statistic " + fmt("%.12g", *r.statistic) + " df " + std::to_string(*r.df) +
             ", max tail err " + fmt("%.3g", worst);
  v.require(r.test == TestKind::kChiSqYates, "not Yates-corrected");
  v.require(std::fabs(*r.statistic - 5.4) < 1e-12, "statistic != 5.4");
  v.require(*r.df == 1, "df != 1");
  v.require(worst <= 1e-10, "tail err " + fmt("%.3g", worst) + " > 1e-10");
  return v;
}

Verdict poisson_irls() {
  Verdict v;
  const auto start = Clock::now();
  std::mt19937_64 gen(4242);
  double worst_fit = 0.0;
  double worst_sat = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto t = attrib::testing::random_table(gen, 2 + i % 5, 10000);
    const auto cc = cross_classification(t);
    const auto fit = fit_loglinear(cc.counts, independence_design(cc));
    for (std::size_t cell = 0; cell < cc.cell_count(); ++cell) {
      const auto idx = cc.level_indices(cell);
      const double e = t.expected(idx[0], idx[1]);
      worst_fit = std::max(worst_fit, std::fabs(fit.fitted_counts[cell] - e) / std::max(1.0, e));
    }
    if (i % 10 == 0) {
      bool positive = true;
      for (double c : cc.counts) positive &= c > 0;
      if (positive)
        worst_sat = std::max(worst_sat, fit_loglinear(cc.counts, saturated_design(cc)).deviance);
    }
  }
  const auto cc = cross_classification(ContingencyTable::from_counts({10, 20}, {20, 10}));
  const auto lr = interaction_test(cc.counts, saturated_design(cc), independence_design(cc));
  const double secs = seconds_since(start);
  v.detail = "fit err " + fmt("%.3g", worst_fit) + ", saturated deviance " +
             fmt("%.3g", worst_sat) + ", LR " + fmt("%.6f", *lr.statistic) + ", " +
             fmt("%.1f", secs) + " s";
  v.require(worst_fit <= 1e-8, "fitted counts off closed form");
  v.require(worst_sat <= 1e-8, "saturated deviance > 1e-8");
  v.require(std::fabs(*lr.statistic - 6.7963) <= 1e-3, "LR statistic off");
  v.require(secs < 30.0, "runtime " + fmt("%.1f", secs) + " s");
  return v;
}

Verdict sampling_rule() {
  Verdict v;
  std::vector<labels::LabeledAttribution> rows;
  auto add = [&](const std::string& pub, labels::SourceLabel label, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      labels::LabeledAttribution r;
      r.key = {pub, "a", rows.size()};
      r.source_label = label;
      rows.push_back(r);
    }
  };
  add("breitbart", labels::SourceLabel::kOtherPerson, 50);
  add("huffpost", labels::SourceLabel::kOtherPerson, 40);
  add("nyt", labels::SourceLabel::kTrump, 121);
  add("nyt", labels::SourceLabel::kClinton, 100);
  const labels::Dataset d(rows);
  const auto pubs = publishers_of(d);
  auto keys = [](const Rows& r) {
    std::set<corpus::AttributionKey> out;
    for (const auto* x : r) out.insert(x->key);
    return out;
  };

  const auto pb = PopulationSpec::parse("breitbart", pubs);
  const auto ph = PopulationSpec::parse("huffpost", pubs);
  const auto pt = PopulationSpec::parse("trump", pubs);
  const auto pc = PopulationSpec::parse("clinton", pubs);
  const auto [a, b] = sample_populations(d, pb, ph, 7);
  const auto [t, c] = sample_populations(d, pt, pc, 7);
  const auto [t2, c2] = sample_populations(d, pt, pc, 7);
  const auto [a2, b2] = sample_populations(d, pb, ph, 7);
  v.detail = "publisher (50,40) -> (" + std::to_string(a.size()) + "," +
             std::to_string(b.size()) + "), source (121,100) -> (" + std::to_string(t.size()) +
             "," + std::to_string(c.size()) + ")";
  v.require(a.size() == 30 && b.size() == 30, "publisher contrast not 30 per side");
  v.require(t.size() == 100 && c.size() == 100, "source contrast not 100 per side");
  v.require(keys(a) == keys(a2) && keys(b) == keys(b2) && keys(t) == keys(t2) &&
                keys(c) == keys(c2),
            "same seed gave different samples");
  return v;
}

Verdict classifier_examples() {
  Verdict v;
  using classify::Candidate;
  const auto rules = classify::MatchRuleSet::defaults();
  const std::vector<std::pair<std::string, Candidate>> cases = {
      {"Bill Clinton", Candidate::kOther},
      {"Donald Trump Jr.", Candidate::kOther},
      {"The Clinton Campaign", Candidate::kClinton},
      {"Hillary Clinton, wife of former president Bill Clinton", Candidate::kClinton},
      {"The Clinton Administration", Candidate::kOther},
  };
  std::size_t ok = 0;
  for (const auto& [text, want] : cases) {
    const auto got = classify::classify_text(text, std::nullopt, rules).label;
    if (got == want) {
      ++ok;
    } else {
      v.require(false, "'" + text + "' -> " + std::string(classify::to_string(got)));
    }
  }
  if (v.pass) v.detail = std::to_string(ok) + "/5 examples";
  return v;
}

Verdict classifier_fixture() {
  Verdict v;
  const auto start = Clock::now();
  const auto load = corpus::load_corpus(attrib::testing::fixture_corpus());
  const auto d = labels::read_labels_csv(attrib::testing::fixture_labels());
  const auto report = classify::evaluate(d, load.corpus, classify::MatchRuleSet::defaults());
  const double secs = seconds_since(start);
  const auto& tr = report.of(classify::Candidate::kTrump);
  const auto& cl = report.of(classify::Candidate::kClinton);
  v.detail = "accuracy " + fmt("%.4f", report.accuracy()) + ", trump P/R " +
             fmt("%.4f", tr.precision()) + "/" + fmt("%.4f", tr.recall()) + ", clinton P/R " +
             fmt("%.4f", cl.precision()) + "/" + fmt("%.4f", cl.recall()) + ", " +
             fmt("%.2f", secs) + " s";
  v.require(load.issues.empty(), "fixture corpus has load issues");
  v.require(report.accuracy() >= 0.88, "accuracy < 0.88");
  v.require(tr.precision() >= 0.90 && cl.precision() >= 0.90, "precision < 0.90");
  v.require(tr.recall() >= 0.75 && cl.recall() >= 0.75, "recall < 0.75");
  v.require(secs < 10.0, "runtime " + fmt("%.1f", secs) + " s");
  return v;
}

Verdict dataset_bookkeeping() {
  Verdict v;
  // Per-publisher rows as transcribed: articles, trump, clinton, other.
  const std::vector<labels::PublisherBreakdown> rows = {
      {"breitbart", 3, 11, 28, 45},  {"huffpost", 3, 11, 10, 29}, {"nyt", 5, 23, 11, 70},
      {"politico", 4, 40, 33, 64},   {"usa-today", 4, 11, 10, 27}, {"wash-post", 3, 19, 11, 94},
      {"west-journal", 4, 8, 4, 36},
  };
  const labels::PublisherBreakdown printed{"totals", 26, 121, 100, 365};
  const auto b = labels::breakdown_table(labels::read_labels_csv(attrib::testing::fixture_labels()));
  v.require(b.publishers == rows, "per-publisher rows differ from the transcription");
  const auto& t = b.totals;
  v.detail = "totals (" + std::to_string(t.articles) + ", " + std::to_string(t.trump) + ", " +
             std::to_string(t.clinton) + ", " + std::to_string(t.other) + ") vs printed (26, 121, 100, 365)";
  const std::string sums = v.detail;
  v.require(t.articles == printed.articles, "articles total differs");
  v.require(t.trump == printed.trump,
            "trump column sums to " + std::to_string(t.trump) + ", printed total is 121");
  v.require(t.clinton == printed.clinton,
            "clinton column sums to " + std::to_string(t.clinton) + ", printed total is 100");
  v.require(t.other == printed.other, "other total differs");
  if (!v.pass) v.detail = sums + ": " + v.detail + " (the printed per-publisher rows do not add up to the printed totals)";
  return v;
}

Verdict mosaic_geometry() {
  Verdict v;
  std::mt19937_64 gen(88);
  double worst_area = 0.0;
  std::size_t overlaps = 0;
  bool deterministic = true;
  for (int i = 0; i < 500; ++i) {
    const auto t = attrib::testing::random_table(gen, 2 + i % 6, 1000);
    const auto flat = mosaic::layout(t, {0.0, false});
    for (const auto& tile : flat.tiles)
      worst_area = std::max(worst_area, std::fabs(tile.w * tile.h -
                                                  static_cast<double>(tile.count) / t.total()));
    const auto l = mosaic::layout(t);
    for (std::size_t a = 0; a < l.tiles.size(); ++a) {
      const auto& p = l.tiles[a];
      if (p.x < 0 || p.y < 0 || p.x + p.w > 1 + 1e-12 || p.y + p.h > 1 + 1e-12) ++overlaps;
      for (std::size_t b = a + 1; b < l.tiles.size(); ++b) {
        const auto& q = l.tiles[b];
        const double eps = 1e-12;
        if (p.x + eps < q.x + q.w && q.x + eps < p.x + p.w && p.y + eps < q.y + q.h &&
            q.y + eps < p.y + p.h)
          ++overlaps;
      }
    }
    if (i % 50 == 0) {
      const auto res = pearson_residuals(t);
      deterministic &= mosaic::render_svg(l, res) == mosaic::render_svg(l, res);
    }
  }
  const mosaic::ShadingScheme s;
  const bool bins = s.fill(0.0) == s.neutral && s.fill(3.1) == s.positive_low &&
                    s.fill(-3.1) == s.negative_low && s.fill(4.2) == s.positive_high &&
                    s.fill(-4.2) == s.negative_high;
  v.detail = "max area err " + fmt("%.3g", worst_area) + ", " + std::to_string(overlaps) +
             " overlaps, shading bins " + (bins ? "ok" : "wrong");
  v.require(worst_area <= 1e-9, "area err > 1e-9");
  v.require(overlaps == 0, "overlapping or out-of-bounds tiles");
  v.require(deterministic, "SVG bytes differ across renders");
  v.require(bins, "shading bins wrong");
  return v;
}

Verdict end_to_end_determinism() {
  Verdict v;
  attrib::testing::TempDir first, second;
  auto run_suite = [](const std::filesystem::path& out) {
    const std::string labels = attrib::testing::fixture_labels().string();
    const std::string dir = out.string();
    const char* argv[] = {"attrib", "suite",  "--labels", labels.c_str(), "--seed",
                          "7",      "--mosaic", "--out",  dir.c_str()};
    std::ostringstream o, e;
    return cli::run(9, argv, o, e);
  };
  const int a = run_suite(first.path());
  const int b = run_suite(second.path());
  v.require(a == 0 && b == 0, "suite exited " + std::to_string(a) + "/" + std::to_string(b));

  std::size_t files = 0;
  std::size_t svgs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(first.path())) {
    const auto name = entry.path().filename().string();
    if (name == "config_echo.json") continue;  // holds the output path
    ++files;
    if (entry.path().extension() == ".svg") ++svgs;
    const auto other = second.path() / name;
    v.require(std::filesystem::exists(other), name + " missing from second run");
    if (std::filesystem::exists(other))
      v.require(attrib::testing::read_text(entry.path()) == attrib::testing::read_text(other),
                name + " differs");
  }
  std::size_t files_b = 0;
  for (const auto& entry : std::filesystem::directory_iterator(second.path()))
    files_b += entry.path().filename() != "config_echo.json";
  v.require(files == files_b, "runs wrote different file sets");
  v.require(std::filesystem::exists(first.path() / "suite.json"), "no suite.json");
  v.require(svgs > 0, "no SVGs written");
  if (v.pass)
    v.detail = "suite.json and " + std::to_string(svgs) + " SVGs byte-identical across two runs";
  return v;
}

const std::vector<std::pair<std::string, std::function<Verdict()>>> kCriteria = {
    {"fisher exact matches enumeration oracle", fisher_oracle_agreement},
    {"chi-square with Yates correction", chi_square_yates},
    {"poisson IRLS fits and LR statistic", poisson_irls},
    {"contrast sampling rule", sampling_rule},
    {"classifier worked examples", classifier_examples},
    {"classifier accuracy on the fixture corpus", classifier_fixture},
    {"dataset breakdown totals", dataset_bookkeeping},
    {"mosaic geometry and shading", mosaic_geometry},
    {"end-to-end suite determinism", end_to_end_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-9)")
      ->check(CLI::Range(1, static_cast<int>(kCriteria.size())));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Verdict v;
    try {
      v = kCriteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    all_pass &= v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
              << kCriteria[i].first << " (" << v.detail << ")" << std::endl;
  }
  return all_pass ? 0 : 1;
}
