#pragma once

// 2 x L contingency tables over labeled-attribution features, chi-square
// tests, Pearson residuals and test selection.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/label_store.hpp"

namespace attrib::stats {

enum class TestKind {
  kChiSqYates,
  kChiSqPlain,
  kFisherExact,
  kFisherMonteCarlo,
  kLoglinearLr,
};

std::string_view to_string(TestKind kind);

struct TestResult {
  TestKind test = TestKind::kChiSqPlain;
  std::optional<double> statistic;  // absent for exact tests
  std::optional<int> df;
  double p_value = 1.0;
  std::string method_note;
  std::optional<std::uint64_t> seed;
};

// Two populations (rows) by L labels (columns).
class ContingencyTable {
 public:
  ContingencyTable(std::array<std::string, 2> row_names,
                   std::vector<std::string> col_names,
                   std::array<std::vector<std::int64_t>, 2> counts,
                   std::vector<std::string> dropped_cols = {});

  // Generic names r0/r1 and c0..c{L-1}.
  static ContingencyTable from_counts(const std::vector<std::int64_t>& row0,
                                      const std::vector<std::int64_t>& row1);

  const std::array<std::string, 2>& row_names() const { return row_names_; }
  const std::vector<std::string>& col_names() const { return col_names_; }
  const std::vector<std::string>& dropped_cols() const { return dropped_; }

  std::size_t cols() const { return col_names_.size(); }
  std::int64_t at(std::size_t row, std::size_t col) const {
    return counts_[row][col];
  }
  const std::vector<std::int64_t>& row(std::size_t r) const { return counts_[r]; }
  std::int64_t row_total(std::size_t r) const { return row_totals_[r]; }
  std::int64_t col_total(std::size_t c) const { return col_totals_[c]; }
  std::int64_t total() const { return total_; }

  // row_total(i) * col_total(j) / total()
  double expected(std::size_t row, std::size_t col) const;

  ContingencyTable swapped_rows() const;
  ContingencyTable permuted_cols(const std::vector<std::size_t>& order) const;

 private:
  std::array<std::string, 2> row_names_;
  std::vector<std::string> col_names_;
  std::array<std::vector<std::int64_t>, 2> counts_;
  std::vector<std::string> dropped_;
  std::array<std::int64_t, 2> row_totals_{};
  std::vector<std::int64_t> col_totals_;
  std::int64_t total_ = 0;
};

// Per-attribution features a table can be built over.
enum class Feature {
  kHonorificText,
  kSourceValence,
  kCueValence,
  kAttrType,
  kStanceType,
  kMedium,
  kIsDirectQuote,
};

std::string_view to_string(Feature feature);
std::optional<Feature> parse_feature(std::string_view name);
std::vector<Feature> all_features();

// Lowercased, whitespace-collapsed, trailing periods removed; "absent" when
// there is no honorific.
std::string normalize_honorific(const std::optional<std::string>& text);

// Column label of `row` under `feature`.
std::string feature_value(const labels::LabeledAttribution& row, Feature feature);

// Column order for a feature: enum declaration order for closed sets,
// lexicographic for open ones.
std::vector<std::string> feature_levels(Feature feature,
                                        const std::vector<const labels::LabeledAttribution*>& rows);

using Rows = std::vector<const labels::LabeledAttribution*>;

// Cross-tabulates the two populations. A label is dropped iff both its cells
// are zero; throws DegenerateTable when fewer than two labels remain.
ContingencyTable build_table(const Rows& rows_a, const Rows& rows_b,
                             Feature feature, std::string name_a = "a",
                             std::string name_b = "b");

// Yates-corrected for 2x2 (|O-E|-0.5 floored at 0), plain Pearson otherwise.
// Throws ZeroExpected if any expected count is 0.
TestResult chi_square_test(const ContingencyTable& table);
// Uncorrected Pearson statistic regardless of shape.
TestResult chi_square_plain(const ContingencyTable& table);

// (O - E) / sqrt(E) under independence, [row][col].
std::vector<std::vector<double>> pearson_residuals(const ContingencyTable& table);

struct TestRecommendation {
  bool use_fisher = false;
  double min_expected = 0.0;
  std::string note;
};

// Fisher when any expected count is below 5, chi-square otherwise.
TestRecommendation test_selection(const ContingencyTable& table);

}  // namespace attrib::stats
