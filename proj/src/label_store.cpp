#include "attrib/label_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "attrib/errors.hpp"

namespace attrib::labels {

namespace {

constexpr std::array<std::string_view, 7> kSourceLabelNames = {
    "trump",       "clinton",      "sanders", "cruz",
    "other_person", "organization", "unknown"};
constexpr std::array<std::string_view, 3> kValenceNames = {
    "positive", "negative", "neutral"};
constexpr std::array<std::string_view, 10> kAttrTypeNames = {
    "headline",       "political_platform", "personal_stance",
    "speech_snippet", "trump_callout",      "clinton_callout",
    "sanders_callout", "cruz_callout",      "group_callout",
    "other_callout"};
constexpr std::array<std::string_view, 9> kStanceTypeNames = {
    "favours_trump",  "favours_clinton", "favours_other",
    "against_trump",  "against_clinton", "against_other",
    "favours_both",   "against_both",    "neutral_both"};
constexpr std::array<std::string_view, 8> kMedia = {
    "tweet",  "formal_speech", "interview", "debate",
    "rally",  "press_release", "statement", "unknown"};
constexpr std::array<std::string_view, 8> kLabelColumns = {
    "source_label", "honorific_text", "source_valence", "cue_valence",
    "attr_type",    "stance_type",    "medium",         "is_direct_quote"};

constexpr std::size_t kColumns = 11;

}  // namespace

template <>
std::span<const std::string_view> enum_names<SourceLabel>() {
  return kSourceLabelNames;
}
template <>
std::span<const std::string_view> enum_names<Valence>() {
  return kValenceNames;
}
template <>
std::span<const std::string_view> enum_names<AttrType>() {
  return kAttrTypeNames;
}
template <>
std::span<const std::string_view> enum_names<StanceType>() {
  return kStanceTypeNames;
}

std::span<const std::string_view> recommended_media() { return kMedia; }
std::span<const std::string_view> label_columns() { return kLabelColumns; }

bool LabeledAttribution::source_is_ambiguous() const {
  if (!annotator_note) return false;
  std::string lower = *annotator_note;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower.find("ambiguous") != std::string::npos;
}

Dataset::Dataset(std::vector<LabeledAttribution> rows) : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(),
            [](const auto& a, const auto& b) { return a.key < b.key; });
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!index_.emplace(rows_[i].key, i).second)
      throw DuplicateKey("duplicate attribution key " + rows_[i].key.str());
    if (rows_[i].annotator_note) has_notes_ = true;
  }
}

const LabeledAttribution* Dataset::find(const AttributionKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw ParseError(line, "quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field += c;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError(line, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string join_header(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

template <typename E>
E cell_enum(const std::vector<std::string>& cells, std::size_t col,
            std::size_t row, std::string_view name) {
  auto v = parse_enum<E>(cells[col]);
  if (!v) throw EnumParseError(row, std::string(name), cells[col]);
  return *v;
}

}  // namespace

Dataset read_labels_csv_string(std::string_view text) {
  auto records = parse_csv(text);
  if (records.empty()) throw HeaderMismatch("missing header");
  const std::string header = join_header(records.front());
  bool with_notes = false;
  if (header == kCsvHeader) {
    with_notes = false;
  } else if (header == std::string(kCsvHeader) + "," + std::string(kNoteColumn)) {
    with_notes = true;
  } else {
    throw HeaderMismatch("unexpected header '" + header + "'");
  }
  const std::size_t width = kColumns + (with_notes ? 1 : 0);

  std::vector<LabeledAttribution> rows;
  std::set<AttributionKey> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& cells = records[r];
    if (cells.size() != width)
      throw ParseError(r + 1, "expected " + std::to_string(width) +
                                  " cells, got " + std::to_string(cells.size()));
    LabeledAttribution row;
    row.key.publisher_name = cells[0];
    row.key.article_name = cells[1];
    {
      const auto& s = cells[2];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row.key.attr_id);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw EnumParseError(r, "attr_id", s);
    }
    if (row.key.publisher_name.empty() || row.key.article_name.empty())
      throw ParseError(r + 1, "empty article key");
    row.source_label = cell_enum<SourceLabel>(cells, 3, r, "source_label");
    if (!cells[4].empty()) row.honorific_text = cells[4];
    row.source_valence = cell_enum<Valence>(cells, 5, r, "source_valence");
    row.cue_valence = cell_enum<Valence>(cells, 6, r, "cue_valence");
    row.attr_type = cell_enum<AttrType>(cells, 7, r, "attr_type");
    row.stance_type = cell_enum<StanceType>(cells, 8, r, "stance_type");
    row.medium = cells[9];
    if (row.medium.empty()) throw EnumParseError(r, "medium", cells[9]);
    if (cells[10] == "true") {
      row.is_direct_quote = true;
    } else if (cells[10] != "false") {
      throw EnumParseError(r, "is_direct_quote", cells[10]);
    }
    if (with_notes && !cells[11].empty()) row.annotator_note = cells[11];
    if (!seen.insert(row.key).second)
      throw DuplicateKey("duplicate attribution key " + row.key.str() +
                         " at row " + std::to_string(r));
    rows.push_back(std::move(row));
  }
  return Dataset(std::move(rows));
}

Dataset read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = std::move(buf).str();
  corpus::validate_utf8(text);
  return read_labels_csv_string(text);
}

std::string column_value(const LabeledAttribution& row, std::string_view column) {
  if (column == "source_label") return std::string(to_string(row.source_label));
  if (column == "honorific_text") return row.honorific_text.value_or("");
  if (column == "source_valence") return std::string(to_string(row.source_valence));
  if (column == "cue_valence") return std::string(to_string(row.cue_valence));
  if (column == "attr_type") return std::string(to_string(row.attr_type));
  if (column == "stance_type") return std::string(to_string(row.stance_type));
  if (column == "medium") return row.medium;
  if (column == "is_direct_quote") return row.is_direct_quote ? "true" : "false";
  throw Error("unknown label column '" + std::string(column) + "'");
}

std::string write_labels_csv_string(const Dataset& dataset) {
  std::string out(kCsvHeader);
  if (dataset.has_notes()) {
    out += ',';
    out += kNoteColumn;
  }
  out += '\n';
  for (const auto& row : dataset.rows()) {
    out += csv_escape(row.key.publisher_name);
    out += ',';
    out += csv_escape(row.key.article_name);
    out += ',';
    out += std::to_string(row.key.attr_id);
    for (std::string_view col : kLabelColumns) {
      out += ',';
      out += csv_escape(column_value(row, col));
    }
    if (dataset.has_notes()) {
      out += ',';
      out += csv_escape(row.annotator_note.value_or(""));
    }
    out += '\n';
  }
  return out;
}

void write_labels_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << write_labels_csv_string(dataset);
}

// ---------------------------------------------------------------------------
// Validation and reporting

std::string_view to_string(Finding::Kind kind) {
  switch (kind) {
    case Finding::Kind::kUnresolvableKey:
      return "unresolvable_key";
    case Finding::Kind::kHonorificNotInSource:
      return "honorific_not_in_source";
    case Finding::Kind::kUnknownMedium:
      return "unknown_medium";
  }
  return "";
}

std::size_t ValidationReport::errors() const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [](const Finding& f) { return !f.is_warning(); }));
}

std::size_t ValidationReport::warnings() const {
  return findings.size() - errors();
}

ValidationReport validate_against_corpus(const Dataset& dataset,
                                         const corpus::Corpus& corpus) {
  ValidationReport report;
  const auto media = recommended_media();
  for (const auto& row : dataset.rows()) {
    if (std::find(media.begin(), media.end(), row.medium) == media.end())
      report.findings.push_back({Finding::Kind::kUnknownMedium, row.key,
                                 "unrecognized medium '" + row.medium + "'"});
    const corpus::ConsolidatedArticle* article = corpus.find(row.key.article());
    const corpus::SpanTriple* triple = corpus.find(row.key);
    if (!article || !triple) {
      report.findings.push_back({Finding::Kind::kUnresolvableKey, row.key,
                                 "no such attribution in corpus"});
      continue;
    }
    if (row.honorific_text) {
      const std::string source = article->role_text(*triple, corpus::Role::kSource);
      if (row.honorific_text->empty() ||
          source.find(*row.honorific_text) == std::string::npos)
        report.findings.push_back(
            {Finding::Kind::kHonorificNotInSource, row.key,
             "honorific '" + *row.honorific_text + "' not found in source '" +
                 source + "'"});
    }
  }
  return report;
}

Breakdown breakdown_table(const Dataset& dataset) {
  std::map<std::string, PublisherBreakdown> by_pub;
  std::map<std::string, std::set<std::string>> articles;
  for (const auto& row : dataset.rows()) {
    auto& b = by_pub[row.key.publisher_name];
    b.publisher_name = row.key.publisher_name;
    articles[row.key.publisher_name].insert(row.key.article_name);
    switch (row.source_label) {
      case SourceLabel::kTrump:
        ++b.trump;
        break;
      case SourceLabel::kClinton:
        ++b.clinton;
        break;
      default:
        ++b.other;
    }
  }
  Breakdown out;
  for (auto& [name, b] : by_pub) {
    b.articles = articles[name].size();
    out.totals.articles += b.articles;
    out.totals.trump += b.trump;
    out.totals.clinton += b.clinton;
    out.totals.other += b.other;
    out.publishers.push_back(b);
  }
  return out;
}

Agreement inter_annotator_agreement(const Dataset& a, const Dataset& b,
                                    std::string_view column) {
  if (std::find(kLabelColumns.begin(), kLabelColumns.end(), column) ==
      kLabelColumns.end())
    throw Error("unknown label column '" + std::string(column) + "'");
  if (a.size() != b.size())
    throw KeyMismatch("annotators cover " + std::to_string(a.size()) + " and " +
                      std::to_string(b.size()) + " keys");
  Agreement out;
  out.rows = a.size();
  if (a.empty()) return out;

  std::map<std::string, double> freq_a;
  std::map<std::string, double> freq_b;
  std::size_t agree = 0;
  // Both datasets are key-ordered, so rows pair up positionally.
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& ra = a.rows()[i];
    const auto& rb = b.rows()[i];
    if (ra.key != rb.key)
      throw KeyMismatch("key " + ra.key.str() + " not labeled by both");
    const auto va = column_value(ra, column);
    const auto vb = column_value(rb, column);
    if (va == vb) ++agree;
    freq_a[va] += 1;
    freq_b[vb] += 1;
  }
  const double n = static_cast<double>(a.size());
  const double p_o = agree / n;
  double p_e = 0;
  for (const auto& [label, count] : freq_a) {
    auto it = freq_b.find(label);
    if (it != freq_b.end()) p_e += (count / n) * (it->second / n);
  }
  out.percent_agreement = p_o;
  out.kappa = p_e >= 1.0 ? 1.0 : (p_o - p_e) / (1.0 - p_e);
  return out;
}

}  // namespace attrib::labels
