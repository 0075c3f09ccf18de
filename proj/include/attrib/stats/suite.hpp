#pragma once

// The contrast-by-feature hypothesis test suite and its JSON report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attrib/label_store.hpp"
#include "attrib/stats/contingency.hpp"
#include "attrib/stats/fisher.hpp"
#include "attrib/stats/glm.hpp"

namespace attrib::stats {

struct Contrast {
  std::string target;
  std::string contrast;
  // "A:B"
  static Contrast parse(const std::string& text);
  std::string name() const { return target + "_vs_" + contrast; }
};

struct Interaction {
  Feature first;
  Feature second;
  // "F1xF2"
  static Interaction parse(const std::string& text);
  std::string name() const;  // "F1xF2_interaction"
};

struct SuiteConfig {
  std::vector<Contrast> contrasts;
  std::vector<Feature> features;
  std::vector<Interaction> interactions;
  std::uint64_t seed = 0;
  FisherConfig fisher;
  double alpha = 0.05;
  // Worker threads; 0 picks the hardware concurrency. Output order does not
  // depend on it.
  unsigned threads = 0;
};

// Contrasts, all features and the two stance interactions.
SuiteConfig default_suite_config();

struct SuiteEntry {
  std::string target;
  std::string contrast;
  std::string factor;
  bool is_interaction = false;
  std::optional<TestResult> result;  // absent when skipped
  std::string skip_reason;
  bool significant = false;
  std::optional<ContingencyTable> table;  // feature tests only
};

// 3-way counts: population x first x second over the unsampled populations,
// dropping levels with no observations. Throws DegenerateTable when a factor
// keeps fewer than two levels.
CrossClassification interaction_counts(const Rows& rows_a, const Rows& rows_b,
                                       const Interaction& interaction,
                                       const std::string& name_a,
                                       const std::string& name_b);

// Main effects plus the named two-way interaction vs main effects only.
TestResult interaction_test(const CrossClassification& cc);

// Picks chi-square or Fisher per test_selection and runs it.
TestResult feature_test(const ContingencyTable& table, const FisherConfig& fisher);

// One entry per (contrast, feature) then one per (contrast, interaction), in
// configuration order.
std::vector<SuiteEntry> run_analysis_suite(const labels::Dataset& dataset,
                                           const SuiteConfig& config);

std::string suite_to_json(const std::vector<SuiteEntry>& entries);

}  // namespace attrib::stats
