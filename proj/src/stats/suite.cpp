#include "attrib/stats/suite.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <thread>

#include <json.hpp>

#include "attrib/errors.hpp"
#include "attrib/stats/random.hpp"
#include "attrib/stats/sampling.hpp"

namespace attrib::stats {

Contrast Contrast::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size() ||
      text.find(':', colon + 1) != std::string::npos)
    throw Error("contrast must look like A:B, got '" + text + "'");
  return {text.substr(0, colon), text.substr(colon + 1)};
}

Interaction Interaction::parse(const std::string& text) {
  // Feature names never contain 'x' followed by another feature name, so
  // try every split point.
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x') continue;
    auto a = parse_feature(text.substr(0, i));
    auto b = parse_feature(text.substr(i + 1));
    if (a && b) {
      if (*a == *b) throw Error("interaction needs two distinct features");
      return {*a, *b};
    }
  }
  throw Error("interaction must look like F1xF2, got '" + text + "'");
}

std::string Interaction::name() const {
  return std::string(to_string(first)) + "x" + std::string(to_string(second)) +
         "_interaction";
}

SuiteConfig default_suite_config() {
  SuiteConfig c;
  c.contrasts = {
      {"trump", "clinton"},
      {"trump", "non_trump"},
      {"trump", "non_trump_or_clinton"},
      {"clinton", "non_clinton"},
      {"clinton", "non_trump_or_clinton"},
      {"clinton-breitbart", "clinton-huffpost"},
      {"trump-breitbart", "clinton-breitbart"},
      {"trump-huffpost", "clinton-huffpost"},
  };
  c.features = all_features();
  c.interactions = {{Feature::kStanceType, Feature::kCueValence},
                    {Feature::kStanceType, Feature::kAttrType}};
  return c;
}

CrossClassification interaction_counts(const Rows& rows_a, const Rows& rows_b,
                                       const Interaction& interaction,
                                       const std::string& name_a,
                                       const std::string& name_b) {
  Rows all(rows_a);
  all.insert(all.end(), rows_b.begin(), rows_b.end());
  CrossClassification cc;
  cc.factor_names = {"population", std::string(to_string(interaction.first)),
                     std::string(to_string(interaction.second))};
  cc.levels.push_back({name_a, name_b});
  for (Feature f : {interaction.first, interaction.second}) {
    std::map<std::string, std::size_t> seen;
    for (const auto* r : all) ++seen[feature_value(*r, f)];
    std::vector<std::string> kept;
    for (const auto& level : feature_levels(f, all)) {
      if (seen.count(level)) kept.push_back(level);
    }
    if (kept.size() < 2)
      throw DegenerateTable(std::string(to_string(f)) + " has fewer than 2 observed levels");
    cc.levels.push_back(std::move(kept));
  }
  std::map<std::string, std::size_t> idx1;
  std::map<std::string, std::size_t> idx2;
  for (std::size_t i = 0; i < cc.levels[1].size(); ++i) idx1[cc.levels[1][i]] = i;
  for (std::size_t i = 0; i < cc.levels[2].size(); ++i) idx2[cc.levels[2][i]] = i;
  const std::size_t n1 = cc.levels[1].size();
  const std::size_t n2 = cc.levels[2].size();
  cc.counts.assign(2 * n1 * n2, 0.0);
  for (std::size_t p = 0; p < 2; ++p) {
    for (const auto* r : (p == 0 ? rows_a : rows_b)) {
      const auto i = idx1.at(feature_value(*r, interaction.first));
      const auto j = idx2.at(feature_value(*r, interaction.second));
      cc.counts[(p * n1 + i) * n2 + j] += 1.0;
    }
  }
  return cc;
}

TestResult interaction_test(const CrossClassification& cc) {
  const Design full = make_design(cc, {{0}, {1}, {2}, {1, 2}});
  const Design reduced = make_design(cc, {{0}, {1}, {2}});
  return interaction_test(cc.counts, full, reduced);
}

TestResult feature_test(const ContingencyTable& table, const FisherConfig& fisher) {
  const TestRecommendation rec = test_selection(table);
  TestResult out = rec.use_fisher ? fisher_exact(table, fisher) : chi_square_test(table);
  out.method_note = rec.note + "; " + out.method_note;
  return out;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

struct Task {
  std::size_t contrast;
  std::optional<Feature> feature;
  std::optional<Interaction> interaction;
};

struct ContrastData {
  std::optional<PopulationSpec> a;
  std::optional<PopulationSpec> b;
  Rows sample_a, sample_b;
  Rows full_a, full_b;
  std::string error;
};

SuiteEntry run_task(const Task& task, const Contrast& contrast, const ContrastData& data,
                    const SuiteConfig& config) {
  SuiteEntry e;
  e.target = contrast.target;
  e.contrast = contrast.contrast;
  e.is_interaction = task.interaction.has_value();
  e.factor = task.feature ? std::string(to_string(*task.feature)) : task.interaction->name();
  if (!data.error.empty()) {
    e.skip_reason = data.error;
    return e;
  }
  try {
    if (task.feature) {
      ContingencyTable table = build_table(data.sample_a, data.sample_b, *task.feature,
                                           contrast.target, contrast.contrast);
      FisherConfig fisher = config.fisher;
      fisher.seed = Rng(config.seed, "fisher:" + contrast.name() + ":" + e.factor).next();
      TestResult r = feature_test(table, fisher);
      r.method_note = "sampled " + std::to_string(data.sample_a.size()) + " per side; " +
                      r.method_note;
      if (!table.dropped_cols().empty())
        r.method_note += "; dropped empty labels: " + join(table.dropped_cols());
      e.result = std::move(r);
      e.table = std::move(table);
    } else {
      const auto cc = interaction_counts(data.full_a, data.full_b, *task.interaction,
                                         contrast.target, contrast.contrast);
      TestResult r = interaction_test(cc);
      r.method_note = "full populations " + std::to_string(data.full_a.size()) + " vs " +
                      std::to_string(data.full_b.size()) + "; " + r.method_note;
      e.result = std::move(r);
    }
    e.significant = e.result->p_value < config.alpha;
  } catch (const Error& err) {
    e.result.reset();
    e.table.reset();
    e.skip_reason = err.what();
  }
  return e;
}

}  // namespace

std::vector<SuiteEntry> run_analysis_suite(const labels::Dataset& dataset,
                                           const SuiteConfig& config) {
  const auto publishers = publishers_of(dataset);
  std::vector<ContrastData> data(config.contrasts.size());
  for (std::size_t i = 0; i < config.contrasts.size(); ++i) {
    const Contrast& c = config.contrasts[i];
    ContrastData& d = data[i];
    try {
      d.a = PopulationSpec::parse(c.target, publishers);
      d.b = PopulationSpec::parse(c.contrast, publishers);
      d.full_a = d.a->select(dataset);
      d.full_b = d.b->select(dataset);
      auto [sa, sb] = sample_populations(dataset, *d.a, *d.b, config.seed);
      d.sample_a = std::move(sa);
      d.sample_b = std::move(sb);
    } catch (const Error& err) {
      d.error = err.what();
    }
  }

  std::vector<Task> tasks;
  for (std::size_t i = 0; i < config.contrasts.size(); ++i) {
    for (Feature f : config.features) tasks.push_back({i, f, std::nullopt});
    for (const auto& x : config.interactions) tasks.push_back({i, std::nullopt, x});
  }

  std::vector<SuiteEntry> entries(tasks.size());
  unsigned workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(tasks.size())));
  std::vector<std::future<void>> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t t = w; t < tasks.size(); t += workers) {
        const Task& task = tasks[t];
        entries[t] = run_task(task, config.contrasts[task.contrast], data[task.contrast],
                              config);
      }
    }));
  }
  for (auto& f : pool) f.get();
  return entries;
}

std::string suite_to_json(const std::vector<SuiteEntry>& entries) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["target_population_label"] = e.target;
    j["contrast_population_label"] = e.contrast;
    if (e.result) {
      const TestResult& r = *e.result;
      j["test_type"] = to_string(r.test);
      j["test_factor"] = e.factor;
      j["statistic"] = r.statistic ? nlohmann::ordered_json(*r.statistic) : nullptr;
      j["df"] = r.df ? nlohmann::ordered_json(*r.df) : nullptr;
      j["p_value"] = r.p_value;
      j["significant_at_0_05"] = e.significant;
      j["method_note"] = r.method_note;
      j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nullptr;
    } else {
      j["test_type"] = "skipped";
      j["test_factor"] = e.factor;
      j["statistic"] = nullptr;
      j["df"] = nullptr;
      j["p_value"] = nullptr;
      j["significant_at_0_05"] = false;
      j["method_note"] = "skipped: " + e.skip_reason;
      j["seed"] = nullptr;
    }
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

}  // namespace attrib::stats
