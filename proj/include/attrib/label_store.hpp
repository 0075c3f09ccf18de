#pragma once

// Label taxonomies for annotated attributions, the labeled-attributions CSV,
// dataset assembly and inter-annotator agreement.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/corpus_model.hpp"

namespace attrib::labels {

using corpus::AttributionKey;

enum class SourceLabel {
  kTrump,
  kClinton,
  kSanders,
  kCruz,
  kOtherPerson,
  kOrganization,
  kUnknown,
};

enum class Valence { kPositive, kNegative, kNeutral };

enum class AttrType {
  kHeadline,
  kPoliticalPlatform,
  kPersonalStance,
  kSpeechSnippet,
  kTrumpCallout,
  kClintonCallout,
  kSandersCallout,
  kCruzCallout,
  kGroupCallout,
  kOtherCallout,
};

enum class StanceType {
  kFavoursTrump,
  kFavoursClinton,
  kFavoursOther,
  kAgainstTrump,
  kAgainstClinton,
  kAgainstOther,
  kFavoursBoth,
  kAgainstBoth,
  kNeutralBoth,
};

// Canonical lowercase names, in declaration order.
template <typename E>
std::span<const std::string_view> enum_names();

template <>
std::span<const std::string_view> enum_names<SourceLabel>();
template <>
std::span<const std::string_view> enum_names<Valence>();
template <>
std::span<const std::string_view> enum_names<AttrType>();
template <>
std::span<const std::string_view> enum_names<StanceType>();

template <typename E>
std::string_view to_string(E value) {
  return enum_names<E>()[static_cast<std::size_t>(value)];
}

template <typename E>
std::optional<E> parse_enum(std::string_view text) {
  const auto names = enum_names<E>();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

template <typename E>
std::vector<E> enum_values() {
  std::vector<E> out;
  for (std::size_t i = 0; i < enum_names<E>().size(); ++i)
    out.push_back(static_cast<E>(i));
  return out;
}

// Media the codebook lists; anything else only draws a warning.
std::span<const std::string_view> recommended_media();

struct LabeledAttribution {
  AttributionKey key;
  SourceLabel source_label = SourceLabel::kUnknown;
  std::optional<std::string> honorific_text;
  Valence source_valence = Valence::kNeutral;
  Valence cue_valence = Valence::kNeutral;
  AttrType attr_type = AttrType::kOtherCallout;
  StanceType stance_type = StanceType::kNeutralBoth;
  std::string medium = "unknown";
  bool is_direct_quote = false;
  // Optional free-text reviewer note; "ambiguous" marks an ambiguous source.
  std::optional<std::string> annotator_note;

  bool operator==(const LabeledAttribution&) const = default;
  bool source_is_ambiguous() const;
};

// The labeled-attributions dataset: rows ordered by key, unique keys.
class Dataset {
 public:
  Dataset() = default;
  // Throws DuplicateKey. Rows are re-ordered by key.
  explicit Dataset(std::vector<LabeledAttribution> rows);

  const std::vector<LabeledAttribution>& rows() const { return rows_; }
  const LabeledAttribution* find(const AttributionKey& key) const;
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  bool has_notes() const { return has_notes_; }

 private:
  std::vector<LabeledAttribution> rows_;
  std::map<AttributionKey, std::size_t> index_;
  bool has_notes_ = false;
};

inline constexpr std::string_view kCsvHeader =
    "publisher_name,article_name,attr_id,source_label,honorific_text,"
    "source_valence,cue_valence,attr_type,stance_type,medium,is_direct_quote";
inline constexpr std::string_view kNoteColumn = "annotator_note";

// RFC-4180 field splitting; records may span lines inside quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

Dataset read_labels_csv_string(std::string_view text);
Dataset read_labels_csv(const std::filesystem::path& path);
// Canonical form: header, rows by key, `\n` line endings. The note column is
// written only when some row carries a note.
std::string write_labels_csv_string(const Dataset& dataset);
void write_labels_csv(const Dataset& dataset, const std::filesystem::path& path);

struct Finding {
  enum class Kind { kUnresolvableKey, kHonorificNotInSource, kUnknownMedium };
  Kind kind;
  AttributionKey key;
  std::string message;
  bool is_warning() const { return kind == Kind::kUnknownMedium; }
};

std::string_view to_string(Finding::Kind kind);

struct ValidationReport {
  std::vector<Finding> findings;
  std::size_t errors() const;
  std::size_t warnings() const;
};

ValidationReport validate_against_corpus(const Dataset& dataset,
                                         const corpus::Corpus& corpus);

struct PublisherBreakdown {
  std::string publisher_name;
  std::size_t articles = 0;
  std::size_t trump = 0;
  std::size_t clinton = 0;
  std::size_t other = 0;

  bool operator==(const PublisherBreakdown&) const = default;
  std::size_t rows() const { return trump + clinton + other; }
};

struct Breakdown {
  std::vector<PublisherBreakdown> publishers;  // sorted by name
  PublisherBreakdown totals{"totals"};
};

Breakdown breakdown_table(const Dataset& dataset);

struct Agreement {
  double percent_agreement = 1.0;
  double kappa = 1.0;
  std::size_t rows = 0;
};

// Label columns that agreement can be computed over.
std::span<const std::string_view> label_columns();
// Value of a label column as its canonical CSV string.
std::string column_value(const LabeledAttribution& row, std::string_view column);

// Percent agreement and Cohen's kappa over `column`. Throws KeyMismatch when
// the two key sets differ. Kappa is 1 when both annotators use one identical
// constant label (chance agreement is total and observed agreement too).
Agreement inter_annotator_agreement(const Dataset& a, const Dataset& b,
                                    std::string_view column);

}  // namespace attrib::labels
