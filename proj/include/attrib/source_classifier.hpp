#pragma once

// Heuristic attribution-source classifier: coreference-backed lookup of the
// representative mention, five-token truncation, exclusion-first regular
// expression matching. Also the evaluation harness and error binning.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/corpus_model.hpp"
#include "attrib/label_store.hpp"

namespace attrib::classify {

using corpus::ArticleKey;
using corpus::AttributionKey;

enum class Candidate { kTrump, kClinton, kOther };

std::string_view to_string(Candidate c);
std::optional<Candidate> parse_candidate(std::string_view name);
// trump/clinton map to themselves; every other source label is other.
Candidate collapse(labels::SourceLabel label);

inline constexpr std::size_t kMaxMatchTokens = 5;

struct Rule {
  enum class Kind { kExclude, kTrump, kClinton };
  Kind kind;
  std::string pattern;
  std::string note;
  std::regex regex;
};

class MatchRuleSet {
 public:
  // Built-in rules; identical to data/default_rules.tsv.
  static MatchRuleSet defaults();
  // Rule file: `exclude|trump|clinton<TAB>pattern<TAB>note` per line, `#`
  // comments, blank lines ignored. Throws RuleError.
  static MatchRuleSet parse(std::string_view text);
  static MatchRuleSet load(const std::filesystem::path& path);

  // Exclusions in file order.
  const std::vector<Rule>& exclusions() const { return exclusions_; }
  // Trump and Clinton rules interleaved in file order; first match wins.
  const std::vector<Rule>& candidates() const { return candidates_; }

  std::string serialize() const;

 private:
  std::vector<Rule> exclusions_;
  std::vector<Rule> candidates_;
};

std::string_view default_rules_text();

struct ClassificationTrace {
  AttributionKey key;
  bool used_representative_mention = false;
  std::string matched_text;  // at most kMaxMatchTokens tokens
  std::optional<std::string> fired_rule;
  Candidate label = Candidate::kOther;

  bool operator==(const ClassificationTrace&) const = default;
};

// First `n` whitespace-delimited tokens of `text`, joined by single spaces.
std::string first_tokens(std::string_view text, std::size_t n = kMaxMatchTokens);

// Representative mention text of the coreference chain whose mentions best
// overlap the attribution's source tokens: most overlapping tokens wins,
// ties go to the lower chain id. Absent when no mention overlaps.
std::optional<std::string> representative_source_text(
    const corpus::ConsolidatedArticle& article,
    const corpus::SpanTriple& attribution);

// Steps after coreference lookup: truncate, exclusions, candidates, fallback.
ClassificationTrace classify_text(std::string_view source_text,
                                  const std::optional<std::string>& representative,
                                  const MatchRuleSet& rules);

ClassificationTrace classify_source(const corpus::ConsolidatedArticle& article,
                                    const corpus::SpanTriple& attribution,
                                    const MatchRuleSet& rules);

// Every attribution of every article, in corpus order.
std::vector<ClassificationTrace> classify_corpus(const corpus::Corpus& corpus,
                                                 const MatchRuleSet& rules);

// One trace per dataset row, in dataset order. Throws UnresolvedKey.
std::vector<ClassificationTrace> classify_dataset(const labels::Dataset& dataset,
                                                  const corpus::Corpus& corpus,
                                                  const MatchRuleSet& rules);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  // Both are 1.0 when their denominator is empty.
  double precision() const;
  double recall() const;
  std::size_t total() const { return tp + fp + fn + tn; }
};

enum class ErrorBin {
  kCorefFailure,
  kAmbiguousSource,
  kTrickyNonTarget,
  kInadequateCoref,
  kLogistical,
};
inline constexpr std::size_t kErrorBinCount = 5;
std::string_view to_string(ErrorBin bin);

struct ErrorBins {
  std::array<std::size_t, kErrorBinCount> counts{};

  std::size_t operator[](ErrorBin bin) const {
    return counts[static_cast<std::size_t>(bin)];
  }
  std::size_t total() const;
};

struct EvalReport {
  std::size_t rows = 0;
  std::size_t correct = 0;
  // gold x predicted, indexed by Candidate.
  std::array<std::array<std::size_t, 3>, 3> matrix{};
  // One-vs-rest per candidate, indexed by Candidate.
  std::array<Confusion, 3> binarized{};
  ErrorBins error_bins;

  // 1.0 on an empty dataset.
  double accuracy() const;
  const Confusion& of(Candidate c) const {
    return binarized[static_cast<std::size_t>(c)];
  }
};

// Which bin a misclassified row falls into, or nullopt when correct.
std::optional<ErrorBin> error_bin(const ClassificationTrace& trace,
                                  const labels::LabeledAttribution& gold);
ErrorBins bin_errors(const std::vector<ClassificationTrace>& traces,
                     const labels::Dataset& dataset);

EvalReport evaluate_traces(const std::vector<ClassificationTrace>& traces,
                           const labels::Dataset& dataset);
EvalReport evaluate(const labels::Dataset& dataset, const corpus::Corpus& corpus,
                    const MatchRuleSet& rules);

struct HighYield {
  ArticleKey key;
  std::size_t count = 0;
  bool operator==(const HighYield&) const = default;
};

// Articles with at least `min_count` attributions classified as `target`,
// by descending count then key. Throws Error when min_count is 0.
std::vector<HighYield> find_high_yield_articles(const corpus::Corpus& corpus,
                                                const MatchRuleSet& rules,
                                                Candidate target,
                                                std::size_t min_count);

// One JSON object, no trailing newline.
std::string trace_to_json(const ClassificationTrace& trace);
std::string eval_report_to_json(const EvalReport& report);

}  // namespace attrib::classify
