#include "attrib/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "attrib/corpus_model.hpp"
#include "attrib/errors.hpp"
#include "attrib/label_store.hpp"
#include "attrib/mosaic.hpp"
#include "attrib/source_classifier.hpp"
#include "attrib/stats/suite.hpp"

namespace attrib::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

const fs::path& require(const std::optional<fs::path>& path, const char* flag) {
  if (!path) throw UsageError(std::string(flag) + " is required");
  return *path;
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << bytes;
  if (!f) throw IoError("short write to " + path.string());
}

// Creates the output dir and writes config_echo.json into it.
std::optional<fs::path> prepare_output(const RunConfig& config) {
  if (!config.output_dir) return std::nullopt;
  std::error_code ec;
  fs::create_directories(*config.output_dir, ec);
  if (ec) throw IoError("cannot create " + config.output_dir->string() + ": " + ec.message());
  write_file(*config.output_dir / "config_echo.json", config_echo(config));
  return config.output_dir;
}

// Loads the corpus; any per-article failure is reported and makes the run a
// data error.
corpus::Corpus load(const RunConfig& config, std::ostream& err, bool& failed) {
  auto loaded = corpus::load_corpus(require(config.corpus_dir, "--corpus"),
                                    corpus::XmlOptions{config.lenient});
  for (const auto& issue : loaded.issues) {
    err << "error: " << issue.key.str() << ": " << issue.message << "\n";
    failed = true;
  }
  return std::move(loaded.corpus);
}

classify::MatchRuleSet rules_of(const RunConfig& config) {
  return config.rules_file ? classify::MatchRuleSet::load(*config.rules_file)
                           : classify::MatchRuleSet::defaults();
}

std::string traces_jsonl(const std::vector<classify::ClassificationTrace>& traces) {
  std::string out;
  for (const auto& t : traces) out += classify::trace_to_json(t) + "\n";
  return out;
}

std::string file_safe(const std::string& name) {
  std::string out;
  for (unsigned char c : name) out += (std::isalnum(c) || c == '-' || c == '_') ? char(c) : '_';
  return out;
}

}  // namespace

std::string config_echo(const RunConfig& config) {
  auto path = [](const std::optional<fs::path>& p) -> nlohmann::ordered_json {
    if (!p) return nullptr;
    return fs::absolute(*p).lexically_normal().string();
  };
  nlohmann::ordered_json j;
  j["command"] = config.command;
  j["corpus_dir"] = path(config.corpus_dir);
  j["labels_csv"] = path(config.labels_csv);
  j["rules_file"] = path(config.rules_file);
  j["seed"] = config.seed;
  j["output_dir"] = path(config.output_dir);
  j["mosaic"] = config.mosaic;
  j["lenient"] = config.lenient;
  j["contrasts"] = config.contrasts;
  j["features"] = config.features;
  j["interactions"] = config.interactions;
  j["target"] = config.target;
  j["min_count"] = config.min_count;
  return j.dump(2) + "\n";
}

int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  bool failed = false;
  const auto dir = prepare_output(config);
  const corpus::Corpus corpus = load(config, err, failed);

  std::string summary = "publisher_name\tarticle_name\ttokens\tcoref_chains\tattributions\n";
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_publisher;
  for (const auto& [key, article] : corpus.articles()) {
    summary += key.publisher_name + "\t" + key.article_name + "\t" +
               std::to_string(article.tokens().size()) + "\t" +
               std::to_string(article.coref_chains().size()) + "\t" +
               std::to_string(article.attributions().size()) + "\n";
    auto& p = per_publisher[key.publisher_name];
    ++p.first;
    p.second += article.attributions().size();
  }

  if (config.labels_csv) {
    const auto dataset = labels::read_labels_csv(*config.labels_csv);
    const auto report = labels::validate_against_corpus(dataset, corpus);
    for (const auto& f : report.findings) {
      err << (f.is_warning() ? "warning: " : "error: ") << f.key.str() << ": "
          << labels::to_string(f.kind) << ": " << f.message << "\n";
    }
    if (report.errors() > 0) failed = true;
  }

  out << "publisher_name\tarticles\tattributions\n";
  std::size_t articles = 0;
  std::size_t attributions = 0;
  for (const auto& [name, counts] : per_publisher) {
    out << name << "\t" << counts.first << "\t" << counts.second << "\n";
    articles += counts.first;
    attributions += counts.second;
  }
  out << "total\t" << articles << "\t" << attributions << "\n";
  if (dir) write_file(*dir / "summary.tsv", summary);
  return failed ? kExitData : kExitOk;
}

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  bool failed = false;
  const auto dir = prepare_output(config);
  const auto rules = rules_of(config);
  const corpus::Corpus corpus = load(config, err, failed);
  if (failed) return kExitData;

  std::vector<classify::ClassificationTrace> traces;
  if (config.labels_csv) {
    traces = classify::classify_dataset(labels::read_labels_csv(*config.labels_csv), corpus,
                                        rules);
  } else {
    traces = classify::classify_corpus(corpus, rules);
  }
  const std::string jsonl = traces_jsonl(traces);
  if (dir) {
    write_file(*dir / "traces.jsonl", jsonl);
    out << "classified " << traces.size() << " attributions\n";
  } else {
    out << jsonl;
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  bool failed = false;
  const auto dir = prepare_output(config);
  const auto rules = rules_of(config);
  const auto dataset = labels::read_labels_csv(require(config.labels_csv, "--labels"));
  const corpus::Corpus corpus = load(config, err, failed);
  if (failed) return kExitData;

  const auto traces = classify::classify_dataset(dataset, corpus, rules);
  const auto report = classify::evaluate_traces(traces, dataset);
  const std::string json = classify::eval_report_to_json(report);
  if (dir) {
    write_file(*dir / "traces.jsonl", traces_jsonl(traces));
    write_file(*dir / "eval.json", json + "\n");
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf), "accuracy\t%.6f\n", report.accuracy());
  out << buf;
  for (auto c : {classify::Candidate::kTrump, classify::Candidate::kClinton}) {
    std::snprintf(buf, sizeof(buf), "%s\tprecision %.6f\trecall %.6f\n",
                  std::string(classify::to_string(c)).c_str(), report.of(c).precision(),
                  report.of(c).recall());
    out << buf;
  }
  for (std::size_t b = 0; b < classify::kErrorBinCount; ++b) {
    const auto bin = static_cast<classify::ErrorBin>(b);
    out << "errors:" << classify::to_string(bin) << "\t" << report.error_bins[bin] << "\n";
  }
  return kExitOk;
}

int cmd_suite(const RunConfig& config, std::ostream& out, std::ostream& err) {
  stats::SuiteConfig suite = stats::default_suite_config();
  if (!config.contrasts.empty()) {
    suite.contrasts.clear();
    for (const auto& c : config.contrasts) suite.contrasts.push_back(stats::Contrast::parse(c));
  }
  if (!config.features.empty()) {
    suite.features.clear();
    for (const auto& f : config.features) {
      auto parsed = stats::parse_feature(f);
      if (!parsed) throw UsageError("unknown feature '" + f + "'");
      suite.features.push_back(*parsed);
    }
    // Naming features alone means no interaction tests unless asked for.
    if (config.interactions.empty()) suite.interactions.clear();
  }
  if (!config.interactions.empty()) {
    suite.interactions.clear();
    for (const auto& x : config.interactions)
      suite.interactions.push_back(stats::Interaction::parse(x));
  }
  suite.seed = config.seed;
  suite.threads = config.threads;
  if (config.mosaic && !config.output_dir) throw UsageError("--mosaic needs --out");

  const auto dir = prepare_output(config);
  const auto dataset = labels::read_labels_csv(require(config.labels_csv, "--labels"));
  const auto entries = stats::run_analysis_suite(dataset, suite);
  const std::string json = stats::suite_to_json(entries);

  std::size_t skipped = 0;
  for (const auto& e : entries) {
    if (!e.result) {
      ++skipped;
      err << "skipped: " << e.target << " vs " << e.contrast << " / " << e.factor << ": "
          << e.skip_reason << "\n";
    }
  }
  if (dir) {
    write_file(*dir / "suite.json", json);
    if (config.mosaic) {
      for (const auto& e : entries) {
        if (!e.table) continue;
        const auto layout = mosaic::layout(*e.table);
        mosaic::RenderOptions options;
        options.title = e.target + " vs " + e.contrast + ": " + e.factor;
        const std::string svg =
            mosaic::render_svg(layout, stats::pearson_residuals(*e.table), {}, options);
        write_file(*dir / ("mosaic_" + file_safe(e.target + "_vs_" + e.contrast) + "_" +
                           file_safe(e.factor) + ".svg"),
                   svg);
      }
    }
    out << entries.size() << " tests, " << skipped << " skipped\n";
  } else {
    out << json;
  }
  return kExitOk;
}

int cmd_high_yield(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto target = classify::parse_candidate(config.target);
  if (!target || *target == classify::Candidate::kOther) {
    err << "error: unsupported target '" << config.target << "' (expected trump or clinton)\n";
    return kExitData;
  }
  if (config.min_count == 0) throw UsageError("--min-count must be at least 1");
  bool failed = false;
  const auto dir = prepare_output(config);
  const auto rules = rules_of(config);
  const corpus::Corpus corpus = load(config, err, failed);
  if (failed) return kExitData;

  std::string tsv = "publisher_name\tarticle_name\tcount\n";
  for (const auto& h : classify::find_high_yield_articles(corpus, rules, *target,
                                                          config.min_count)) {
    tsv += h.key.publisher_name + "\t" + h.key.article_name + "\t" +
           std::to_string(h.count) + "\n";
  }
  if (dir) write_file(*dir / "high_yield.tsv", tsv);
  out << tsv;
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attribution corpus tools: ingest, classify, evaluate, statistics"};
  app.require_subcommand(1);
  RunConfig config;
  std::string corpus_dir, labels_csv, rules_file, output_dir;

  auto add_corpus = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--corpus", corpus_dir, "Corpus directory <publisher>/<article>.{txt,xml,attr}");
    if (required) opt->required();
    sub->add_flag("--lenient", config.lenient, "Skip unknown XML elements");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", output_dir, "Output directory");
  };
  auto add_rules = [&](CLI::App* sub) {
    sub->add_option("--rules", rules_file, "Match rule file (TSV)");
  };

  auto* ingest = app.add_subcommand("ingest", "Load and validate a corpus");
  add_corpus(ingest, true);
  add_common(ingest);
  ingest->add_option("--labels", labels_csv, "Labels CSV to validate against the corpus");

  auto* classify_cmd = app.add_subcommand("classify", "Classify attribution sources");
  add_corpus(classify_cmd, true);
  add_common(classify_cmd);
  add_rules(classify_cmd);
  classify_cmd->add_option("--labels", labels_csv, "Restrict to the keys of this labels CSV");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Classify and score against labels");
  add_corpus(evaluate_cmd, true);
  add_common(evaluate_cmd);
  add_rules(evaluate_cmd);
  evaluate_cmd->add_option("--labels", labels_csv, "Labels CSV")->required();

  auto* suite_cmd = app.add_subcommand("suite", "Run the hypothesis test suite");
  add_common(suite_cmd);
  suite_cmd->add_option("--labels", labels_csv, "Labels CSV")->required();
  suite_cmd->add_option("--seed", config.seed, "Random seed");
  suite_cmd->add_flag("--mosaic", config.mosaic, "Write one SVG mosaic per feature test");
  suite_cmd->add_option("--contrast", config.contrasts, "Population pair A:B (repeatable)");
  suite_cmd->add_option("--feature", config.features, "Feature to test (repeatable)");
  suite_cmd->add_option("--interaction", config.interactions,
                        "Feature pair F1xF2 for a log-linear test (repeatable)");
  suite_cmd->add_option("--threads", config.threads, "Worker threads (0 = all cores)");

  auto* high_yield = app.add_subcommand("high-yield", "Rank articles by attributions to a target");
  add_corpus(high_yield, true);
  add_common(high_yield);
  add_rules(high_yield);
  high_yield->add_option("--target", config.target, "trump or clinton")->required();
  high_yield->add_option("--min-count", config.min_count, "Minimum attributions per article");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (!corpus_dir.empty()) config.corpus_dir = corpus_dir;
  if (!labels_csv.empty()) config.labels_csv = labels_csv;
  if (!rules_file.empty()) config.rules_file = rules_file;
  if (!output_dir.empty()) config.output_dir = output_dir;

  try {
    if (*ingest) {
      config.command = "ingest";
      return cmd_ingest(config, out, err);
    }
    if (*classify_cmd) {
      config.command = "classify";
      return cmd_classify(config, out, err);
    }
    if (*evaluate_cmd) {
      config.command = "evaluate";
      return cmd_evaluate(config, out, err);
    }
    if (*suite_cmd) {
      config.command = "suite";
      return cmd_suite(config, out, err);
    }
    config.command = "high-yield";
    return cmd_high_yield(config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace attrib::cli
