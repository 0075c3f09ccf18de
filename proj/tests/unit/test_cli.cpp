#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "attrib/cli/commands.hpp"
#include "attrib/label_store.hpp"
#include "attrib/source_classifier.hpp"
#include "test_support.hpp"

using namespace attrib;
using attrib::testing::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "attrib");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string corpus_arg() { return attrib::testing::fixture_corpus().string(); }
std::string labels_arg() { return attrib::testing::fixture_labels().string(); }

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("ingest") {
  TempDir tmp;
  const auto r = run_cli({"ingest", "--corpus", corpus_arg(), "--labels", labels_arg(), "--out",
                          tmp.path().string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("total\t26\t595\n") != std::string::npos);
  const auto summary = attrib::testing::read_text(tmp / "summary.tsv");
  CHECK(count_lines(summary) == 27);
  const auto echo = nlohmann::json::parse(attrib::testing::read_text(tmp / "config_echo.json"));
  CHECK(echo["command"] == "ingest");

  // Copy one article without its .xml: a load issue is a data error.
  TempDir broken;
  const auto src = attrib::testing::fixture_corpus() / "nyt";
  for (const auto& e : std::filesystem::directory_iterator(src)) {
    if (e.path().extension() == ".xml" && e.path().stem() == "article_01") continue;
    std::filesystem::create_directories(broken / "nyt");
    std::filesystem::copy_file(e.path(), broken / "nyt" / e.path().filename());
  }
  CHECK(run_cli({"ingest", "--corpus", broken.path().string()}).code == cli::kExitData);

  TempDir empty;
  const auto e = run_cli({"ingest", "--corpus", empty.path().string()});
  CHECK(e.code == cli::kExitOk);
  CHECK(e.out.find("total\t0\t0\n") != std::string::npos);
}

TEST_CASE("classify") {
  const auto r = run_cli({"classify", "--corpus", corpus_arg()});
  CHECK(r.code == cli::kExitOk);
  CHECK(count_lines(r.out) == 595);
  const auto first = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  CHECK(first.contains("label"));

  TempDir tmp;
  const auto w = run_cli({"classify", "--corpus", corpus_arg(), "--labels", labels_arg(), "--out",
                          tmp.path().string()});
  CHECK(w.code == cli::kExitOk);
  CHECK(count_lines(attrib::testing::read_text(tmp / "traces.jsonl")) == 595);

  const auto bad_rules = tmp / "bad.tsv";
  attrib::testing::write_text(bad_rules, "nonsense\n");
  CHECK(run_cli({"classify", "--corpus", corpus_arg(), "--rules", bad_rules.string()}).code ==
        cli::kExitData);
}

TEST_CASE("evaluate against labels that agree with the classifier") {
  const auto corpus = corpus::load_corpus(attrib::testing::fixture_corpus()).corpus;
  const auto gold = labels::read_labels_csv(attrib::testing::fixture_labels());
  const auto traces =
      classify::classify_dataset(gold, corpus, classify::MatchRuleSet::defaults());
  std::vector<labels::LabeledAttribution> rows = gold.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    switch (traces[i].label) {
      case classify::Candidate::kTrump:
        rows[i].source_label = labels::SourceLabel::kTrump;
        break;
      case classify::Candidate::kClinton:
        rows[i].source_label = labels::SourceLabel::kClinton;
        break;
      case classify::Candidate::kOther:
        if (classify::collapse(rows[i].source_label) != classify::Candidate::kOther)
          rows[i].source_label = labels::SourceLabel::kOrganization;
        break;
    }
  }
  TempDir tmp;
  labels::write_labels_csv(labels::Dataset(rows), tmp / "agree.csv");
  const auto r = run_cli({"evaluate", "--corpus", corpus_arg(), "--labels",
                          (tmp / "agree.csv").string(), "--out", tmp.path().string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.rfind("accuracy\t1.000000\n", 0) == 0);
  const auto eval = nlohmann::json::parse(attrib::testing::read_text(tmp / "eval.json"));
  CHECK(eval["misclassified"] == 0);

  const auto fixture = run_cli({"evaluate", "--corpus", corpus_arg(), "--labels", labels_arg()});
  CHECK(fixture.code == cli::kExitOk);
  CHECK(fixture.out.find("errors:coref_failure") != std::string::npos);
}

TEST_CASE("suite") {
  TempDir a, b;
  const std::vector<std::string> common = {"--labels", labels_arg(), "--seed", "7",
                                           "--contrast", "trump:clinton", "--feature",
                                           "stance_type", "--feature", "cue_valence", "--mosaic"};
  auto args_a = std::vector<std::string>{"suite", "--out", a.path().string()};
  auto args_b = std::vector<std::string>{"suite", "--out", b.path().string()};
  args_a.insert(args_a.end(), common.begin(), common.end());
  args_b.insert(args_b.end(), common.begin(), common.end());
  REQUIRE(run_cli(args_a).code == cli::kExitOk);
  REQUIRE(run_cli(args_b).code == cli::kExitOk);
  const auto suite = attrib::testing::read_text(a / "suite.json");
  CHECK(suite == attrib::testing::read_text(b / "suite.json"));
  CHECK(nlohmann::json::parse(suite).size() == 2);
  const std::string svg = "mosaic_trump_vs_clinton_stance_type.svg";
  CHECK(std::filesystem::exists(a / svg));
  CHECK(attrib::testing::read_text(a / svg) == attrib::testing::read_text(b / svg));

  // An empty population is reported, not fatal.
  const auto skipped = run_cli({"suite", "--labels", labels_arg(), "--contrast",
                                "cruz-usa-today:trump", "--feature", "stance_type"});
  CHECK(skipped.code == cli::kExitOk);
  CHECK(skipped.err.find("skipped:") != std::string::npos);

  CHECK(run_cli({"suite", "--labels", labels_arg(), "--mosaic"}).code == cli::kExitUsage);
  CHECK(run_cli({"suite", "--labels", labels_arg(), "--feature", "bogus"}).code ==
        cli::kExitUsage);
}

TEST_CASE("high-yield") {
  TempDir tmp;
  const auto r = run_cli({"high-yield", "--corpus", corpus_arg(), "--target", "trump",
                          "--min-count", "3", "--out", tmp.path().string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(std::filesystem::exists(tmp / "high_yield.tsv"));
  CHECK(run_cli({"high-yield", "--corpus", corpus_arg(), "--target", "obama"}).code ==
        cli::kExitData);
  CHECK(run_cli({"high-yield", "--corpus", corpus_arg(), "--target", "other"}).code ==
        cli::kExitData);
  CHECK(run_cli({"high-yield", "--corpus", corpus_arg(), "--target", "trump", "--min-count",
                 "0"})
            .code == cli::kExitUsage);
  TempDir empty;
  CHECK(run_cli({"high-yield", "--corpus", empty.path().string(), "--target", "clinton"}).code ==
        cli::kExitOk);
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"suite", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(run_cli({"evaluate", "--corpus", corpus_arg()}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
}
