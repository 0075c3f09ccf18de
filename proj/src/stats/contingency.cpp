#include "attrib/stats/contingency.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "attrib/errors.hpp"
#include "attrib/stats/distributions.hpp"

namespace attrib::stats {

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kChiSqYates:
      return "chi_sq_yates";
    case TestKind::kChiSqPlain:
      return "chi_sq_plain";
    case TestKind::kFisherExact:
      return "fisher_exact";
    case TestKind::kFisherMonteCarlo:
      return "fisher_monte_carlo";
    case TestKind::kLoglinearLr:
      return "loglinear_lr";
  }
  return "";
}

ContingencyTable::ContingencyTable(std::array<std::string, 2> row_names,
                                   std::vector<std::string> col_names,
                                   std::array<std::vector<std::int64_t>, 2> counts,
                                   std::vector<std::string> dropped_cols)
    : row_names_(std::move(row_names)),
      col_names_(std::move(col_names)),
      counts_(std::move(counts)),
      dropped_(std::move(dropped_cols)),
      col_totals_(col_names_.size(), 0) {
  for (std::size_t r = 0; r < 2; ++r) {
    if (counts_[r].size() != col_names_.size())
      throw DimensionMismatch("row " + std::to_string(r) + " has " +
                              std::to_string(counts_[r].size()) + " cells for " +
                              std::to_string(col_names_.size()) + " columns");
    for (std::size_t c = 0; c < col_names_.size(); ++c) {
      const auto v = counts_[r][c];
      if (v < 0) throw Error("negative cell count");
      row_totals_[r] += v;
      col_totals_[c] += v;
      total_ += v;
    }
  }
}

ContingencyTable ContingencyTable::from_counts(const std::vector<std::int64_t>& row0,
                                               const std::vector<std::int64_t>& row1) {
  std::vector<std::string> cols;
  for (std::size_t c = 0; c < row0.size(); ++c) cols.push_back("c" + std::to_string(c));
  return ContingencyTable({"r0", "r1"}, std::move(cols), {row0, row1});
}

double ContingencyTable::expected(std::size_t row, std::size_t col) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(row_totals_[row]) *
         static_cast<double>(col_totals_[col]) / static_cast<double>(total_);
}

ContingencyTable ContingencyTable::swapped_rows() const {
  return ContingencyTable({row_names_[1], row_names_[0]}, col_names_,
                          {counts_[1], counts_[0]}, dropped_);
}

ContingencyTable ContingencyTable::permuted_cols(
    const std::vector<std::size_t>& order) const {
  if (order.size() != cols()) throw DimensionMismatch("bad column permutation");
  std::vector<std::string> names;
  std::array<std::vector<std::int64_t>, 2> counts;
  for (std::size_t c : order) {
    names.push_back(col_names_.at(c));
    counts[0].push_back(counts_[0].at(c));
    counts[1].push_back(counts_[1].at(c));
  }
  return ContingencyTable(row_names_, std::move(names), std::move(counts), dropped_);
}

// ---------------------------------------------------------------------------
// Features

namespace {

constexpr std::array<std::pair<Feature, std::string_view>, 7> kFeatureNames = {{
    {Feature::kHonorificText, "honorific_text"},
    {Feature::kSourceValence, "source_valence"},
    {Feature::kCueValence, "cue_valence"},
    {Feature::kAttrType, "attr_type"},
    {Feature::kStanceType, "stance_type"},
    {Feature::kMedium, "medium"},
    {Feature::kIsDirectQuote, "is_direct_quote"},
}};

template <typename E>
std::vector<std::string> closed_levels() {
  std::vector<std::string> out;
  for (auto name : labels::enum_names<E>()) out.emplace_back(name);
  return out;
}

}  // namespace

std::string_view to_string(Feature feature) {
  for (const auto& [f, name] : kFeatureNames) {
    if (f == feature) return name;
  }
  return "";
}

std::optional<Feature> parse_feature(std::string_view name) {
  for (const auto& [f, n] : kFeatureNames) {
    if (n == name) return f;
  }
  return std::nullopt;
}

std::vector<Feature> all_features() {
  std::vector<Feature> out;
  for (const auto& [f, name] : kFeatureNames) out.push_back(f);
  return out;
}

std::string normalize_honorific(const std::optional<std::string>& text) {
  if (!text) return "absent";
  std::string out;
  bool space = false;
  for (unsigned char c : *text) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  while (!out.empty() && out.back() == '.') out.pop_back();
  return out.empty() ? "absent" : out;
}

std::string feature_value(const labels::LabeledAttribution& row, Feature feature) {
  switch (feature) {
    case Feature::kHonorificText:
      return normalize_honorific(row.honorific_text);
    case Feature::kSourceValence:
      return std::string(labels::to_string(row.source_valence));
    case Feature::kCueValence:
      return std::string(labels::to_string(row.cue_valence));
    case Feature::kAttrType:
      return std::string(labels::to_string(row.attr_type));
    case Feature::kStanceType:
      return std::string(labels::to_string(row.stance_type));
    case Feature::kMedium:
      return row.medium;
    case Feature::kIsDirectQuote:
      return row.is_direct_quote ? "true" : "false";
  }
  return "";
}

std::vector<std::string> feature_levels(Feature feature, const Rows& rows) {
  switch (feature) {
    case Feature::kSourceValence:
    case Feature::kCueValence:
      return closed_levels<labels::Valence>();
    case Feature::kAttrType:
      return closed_levels<labels::AttrType>();
    case Feature::kStanceType:
      return closed_levels<labels::StanceType>();
    case Feature::kIsDirectQuote:
      return {"false", "true"};
    case Feature::kHonorificText:
    case Feature::kMedium:
      break;
  }
  std::set<std::string> seen;
  for (const auto* r : rows) seen.insert(feature_value(*r, feature));
  return {seen.begin(), seen.end()};
}

ContingencyTable build_table(const Rows& rows_a, const Rows& rows_b,
                             Feature feature, std::string name_a,
                             std::string name_b) {
  Rows all(rows_a);
  all.insert(all.end(), rows_b.begin(), rows_b.end());
  const auto levels = feature_levels(feature, all);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < levels.size(); ++i) index[levels[i]] = i;

  std::array<std::vector<std::int64_t>, 2> full{
      std::vector<std::int64_t>(levels.size(), 0),
      std::vector<std::int64_t>(levels.size(), 0)};
  for (std::size_t r = 0; r < 2; ++r) {
    for (const auto* row : (r == 0 ? rows_a : rows_b))
      ++full[r][index.at(feature_value(*row, feature))];
  }

  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  std::array<std::vector<std::int64_t>, 2> counts;
  for (std::size_t c = 0; c < levels.size(); ++c) {
    if (full[0][c] == 0 && full[1][c] == 0) {
      dropped.push_back(levels[c]);
      continue;
    }
    kept.push_back(levels[c]);
    counts[0].push_back(full[0][c]);
    counts[1].push_back(full[1][c]);
  }
  if (kept.size() < 2)
    throw DegenerateTable(std::string(to_string(feature)) + " has " +
                          std::to_string(kept.size()) +
                          " non-empty label(s); need at least 2");
  return ContingencyTable({std::move(name_a), std::move(name_b)}, std::move(kept),
                          std::move(counts), std::move(dropped));
}

// ---------------------------------------------------------------------------
// Chi-square

namespace {

void require_positive_expected(const ContingencyTable& table) {
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (!(table.expected(r, c) > 0.0))
        throw ZeroExpected("expected count is zero in cell (" + std::to_string(r) +
                           ", " + table.col_names()[c] + ")");
    }
  }
}

TestResult pearson(const ContingencyTable& table, bool yates) {
  require_positive_expected(table);
  if (table.cols() < 2) throw DegenerateTable("chi-square needs at least 2 columns");
  double stat = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const double e = table.expected(r, c);
      double d = std::fabs(static_cast<double>(table.at(r, c)) - e);
      if (yates) d = std::max(0.0, d - 0.5);
      stat += d * d / e;
    }
  }
  TestResult out;
  out.test = yates ? TestKind::kChiSqYates : TestKind::kChiSqPlain;
  out.statistic = stat;
  out.df = static_cast<int>(table.cols()) - 1;
  out.p_value = chi_square_upper_tail(stat, *out.df);
  return out;
}

}  // namespace

TestResult chi_square_test(const ContingencyTable& table) {
  const bool yates = table.cols() == 2;
  TestResult out = pearson(table, yates);
  out.method_note = yates ? "Pearson chi-square with Yates continuity correction (2x2)"
                          : "Pearson chi-square without continuity correction (2x" +
                                std::to_string(table.cols()) + ")";
  return out;
}

TestResult chi_square_plain(const ContingencyTable& table) {
  TestResult out = pearson(table, false);
  out.method_note = "Pearson chi-square without continuity correction";
  return out;
}

std::vector<std::vector<double>> pearson_residuals(const ContingencyTable& table) {
  require_positive_expected(table);
  std::vector<std::vector<double>> out(2, std::vector<double>(table.cols()));
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      const double e = table.expected(r, c);
      out[r][c] = (static_cast<double>(table.at(r, c)) - e) / std::sqrt(e);
    }
  }
  return out;
}

TestRecommendation test_selection(const ContingencyTable& table) {
  TestRecommendation rec;
  double min_e = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c)
      min_e = std::min(min_e, table.expected(r, c));
  }
  rec.min_expected = table.cols() == 0 ? 0.0 : min_e;
  rec.use_fisher = rec.min_expected < 5.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", rec.min_expected);
  rec.note = std::string(rec.use_fisher ? "fisher selected" : "chi-square selected") +
             ": min expected count " + buf + (rec.use_fisher ? " < 5" : " >= 5");
  return rec;
}

}  // namespace attrib::stats
