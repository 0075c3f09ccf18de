#include "attrib/source_classifier.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "attrib/errors.hpp"

namespace attrib::classify {

std::string_view to_string(Candidate c) {
  switch (c) {
    case Candidate::kTrump:
      return "trump";
    case Candidate::kClinton:
      return "clinton";
    case Candidate::kOther:
      return "other";
  }
  return "";
}

std::optional<Candidate> parse_candidate(std::string_view name) {
  if (name == "trump") return Candidate::kTrump;
  if (name == "clinton") return Candidate::kClinton;
  if (name == "other") return Candidate::kOther;
  return std::nullopt;
}

Candidate collapse(labels::SourceLabel label) {
  switch (label) {
    case labels::SourceLabel::kTrump:
      return Candidate::kTrump;
    case labels::SourceLabel::kClinton:
      return Candidate::kClinton;
    default:
      return Candidate::kOther;
  }
}

// ---------------------------------------------------------------------------
// Rules

std::string_view default_rules_text() {
  return "# Exclusions run first; any hit labels the source other.\n"
         "exclude\t\\bBill Clinton\\b\tbill_clinton\n"
         "exclude\t\\bClinton Administration\\b\tclinton_administration\n"
         "exclude\t\\bTrump Jr\\.?\\b\ttrump_jr\n"
         "exclude\t\\bChelsea Clinton\\b\tchelsea_clinton\n"
         "exclude\t\\bMelania Trump\\b\tmelania_trump\n"
         "exclude\t\\bIvanka Trump\\b\tivanka_trump\n"
         "# Candidate patterns, first match wins.\n"
         "trump\t\\bTrump\\b\ttrump\n"
         "trump\t\\bDonald J(ohn)?\\.? Trump\\b\tdonald_trump\n"
         "trump\t\\bTrump Campaign\\b\ttrump_campaign\n"
         "clinton\t\\bClinton\\b\tclinton\n"
         "clinton\t\\bHillary\\b\thillary\n"
         "clinton\t\\bClinton Campaign\\b\tclinton_campaign\n";
}

MatchRuleSet MatchRuleSet::defaults() { return parse(default_rules_text()); }

MatchRuleSet MatchRuleSet::parse(std::string_view text) {
  MatchRuleSet set;
  std::size_t trump = 0;
  std::size_t clinton = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      auto tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    const std::string where = "rule line " + std::to_string(line_no) + ": ";
    if (fields.size() != 3)
      throw RuleError(where + "expected class<TAB>pattern<TAB>note");
    Rule rule;
    if (fields[0] == "exclude") {
      rule.kind = Rule::Kind::kExclude;
    } else if (fields[0] == "trump") {
      rule.kind = Rule::Kind::kTrump;
      ++trump;
    } else if (fields[0] == "clinton") {
      rule.kind = Rule::Kind::kClinton;
      ++clinton;
    } else {
      throw RuleError(where + "unknown class '" + fields[0] + "'");
    }
    if (fields[1].empty()) throw RuleError(where + "empty pattern");
    rule.pattern = fields[1];
    rule.note = fields[2].empty() ? fields[1] : fields[2];
    try {
      rule.regex = std::regex(rule.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw RuleError(where + "bad pattern '" + rule.pattern + "': " + e.what());
    }
    if (rule.kind == Rule::Kind::kExclude) {
      set.exclusions_.push_back(std::move(rule));
    } else {
      set.candidates_.push_back(std::move(rule));
    }
  }
  if (set.exclusions_.empty() || trump == 0 || clinton == 0)
    throw RuleError("rule set needs at least one exclude, trump and clinton rule");
  return set;
}

MatchRuleSet MatchRuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string MatchRuleSet::serialize() const {
  auto kind_name = [](Rule::Kind k) {
    switch (k) {
      case Rule::Kind::kExclude:
        return "exclude";
      case Rule::Kind::kTrump:
        return "trump";
      case Rule::Kind::kClinton:
        return "clinton";
    }
    return "";
  };
  std::string out;
  for (const auto* list : {&exclusions_, &candidates_}) {
    for (const Rule& r : *list) {
      out += kind_name(r.kind);
      out += '\t' + r.pattern + '\t' + r.note + '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

std::string first_tokens(std::string_view text, std::size_t n) {
  std::string out;
  std::size_t taken = 0;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size() && taken < n) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (taken) out += ' ';
    out += text.substr(start, i - start);
    ++taken;
  }
  return out;
}

std::optional<std::string> representative_source_text(
    const corpus::ConsolidatedArticle& article,
    const corpus::SpanTriple& attribution) {
  const auto source_tokens = article.tokens_of(attribution.source_spans);
  if (source_tokens.empty()) return std::nullopt;

  const corpus::CorefChain* best = nullptr;
  std::size_t best_overlap = 0;
  // Chains are sorted by id, so a strict improvement keeps the lower id on ties.
  for (const corpus::CorefChain& chain : article.coref_chains()) {
    for (const corpus::Mention& m : chain.mentions) {
      const auto lo = std::lower_bound(source_tokens.begin(), source_tokens.end(),
                                       m.token_start);
      const auto hi = std::lower_bound(lo, source_tokens.end(), m.token_end);
      const auto overlap = static_cast<std::size_t>(hi - lo);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = &chain;
      }
    }
  }
  if (!best) return std::nullopt;
  const corpus::Mention& rep = best->representative();
  return std::string(article.token_range_text(rep.token_start, rep.token_end));
}

ClassificationTrace classify_text(std::string_view source_text,
                                  const std::optional<std::string>& representative,
                                  const MatchRuleSet& rules) {
  ClassificationTrace trace;
  trace.used_representative_mention = representative.has_value();
  trace.matched_text =
      first_tokens(representative ? std::string_view(*representative) : source_text);

  for (const Rule& r : rules.exclusions()) {
    if (std::regex_search(trace.matched_text, r.regex)) {
      trace.fired_rule = r.note;
      trace.label = Candidate::kOther;
      return trace;
    }
  }
  for (const Rule& r : rules.candidates()) {
    if (std::regex_search(trace.matched_text, r.regex)) {
      trace.fired_rule = r.note;
      trace.label =
          r.kind == Rule::Kind::kTrump ? Candidate::kTrump : Candidate::kClinton;
      return trace;
    }
  }
  trace.label = Candidate::kOther;
  return trace;
}

ClassificationTrace classify_source(const corpus::ConsolidatedArticle& article,
                                    const corpus::SpanTriple& attribution,
                                    const MatchRuleSet& rules) {
  const auto rep = representative_source_text(article, attribution);
  const std::string source = article.role_text(attribution, corpus::Role::kSource);
  ClassificationTrace trace = classify_text(source, rep, rules);
  trace.key = {article.key().publisher_name, article.key().article_name,
               attribution.attr_id};
  return trace;
}

std::vector<ClassificationTrace> classify_corpus(const corpus::Corpus& corpus,
                                                 const MatchRuleSet& rules) {
  std::vector<ClassificationTrace> out;
  for (const auto& [key, article] : corpus.articles()) {
    for (const auto& a : article.attributions())
      out.push_back(classify_source(article, a, rules));
  }
  return out;
}

std::vector<ClassificationTrace> classify_dataset(const labels::Dataset& dataset,
                                                  const corpus::Corpus& corpus,
                                                  const MatchRuleSet& rules) {
  std::vector<ClassificationTrace> out;
  out.reserve(dataset.size());
  for (const auto& row : dataset.rows()) {
    const auto* article = corpus.find(row.key.article());
    const auto* triple = corpus.find(row.key);
    if (!article || !triple)
      throw UnresolvedKey("attribution " + row.key.str() + " not in corpus");
    out.push_back(classify_source(*article, *triple, rules));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

double Confusion::precision() const {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Confusion::recall() const {
  return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::string_view to_string(ErrorBin bin) {
  switch (bin) {
    case ErrorBin::kCorefFailure:
      return "coref_failure";
    case ErrorBin::kAmbiguousSource:
      return "ambiguous_source";
    case ErrorBin::kTrickyNonTarget:
      return "tricky_non_target";
    case ErrorBin::kInadequateCoref:
      return "inadequate_coref";
    case ErrorBin::kLogistical:
      return "logistical";
  }
  return "";
}

std::size_t ErrorBins::total() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

double EvalReport::accuracy() const {
  return rows == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(rows);
}

std::optional<ErrorBin> error_bin(const ClassificationTrace& trace,
                                  const labels::LabeledAttribution& gold) {
  if (collapse(gold.source_label) == trace.label) return std::nullopt;
  if (!trace.used_representative_mention) return ErrorBin::kCorefFailure;
  if (gold.source_is_ambiguous()) return ErrorBin::kAmbiguousSource;
  if (!trace.fired_rule) return ErrorBin::kInadequateCoref;
  if (gold.source_label == labels::SourceLabel::kOrganization ||
      gold.source_label == labels::SourceLabel::kOtherPerson)
    return ErrorBin::kTrickyNonTarget;
  return ErrorBin::kLogistical;
}

namespace {

const labels::LabeledAttribution& gold_for(const ClassificationTrace& t,
                                           const labels::Dataset& dataset) {
  const auto* row = dataset.find(t.key);
  if (!row) throw UnresolvedKey("trace " + t.key.str() + " has no gold label");
  return *row;
}

}  // namespace

ErrorBins bin_errors(const std::vector<ClassificationTrace>& traces,
                     const labels::Dataset& dataset) {
  ErrorBins bins;
  for (const auto& t : traces) {
    if (auto bin = error_bin(t, gold_for(t, dataset)))
      ++bins.counts[static_cast<std::size_t>(*bin)];
  }
  return bins;
}

EvalReport evaluate_traces(const std::vector<ClassificationTrace>& traces,
                           const labels::Dataset& dataset) {
  EvalReport report;
  for (const auto& t : traces) {
    const auto gold = collapse(gold_for(t, dataset).source_label);
    ++report.rows;
    if (gold == t.label) ++report.correct;
    ++report.matrix[static_cast<std::size_t>(gold)][static_cast<std::size_t>(t.label)];
  }
  for (std::size_t c = 0; c < 3; ++c) {
    Confusion& cm = report.binarized[c];
    for (std::size_t g = 0; g < 3; ++g) {
      for (std::size_t p = 0; p < 3; ++p) {
        const auto n = report.matrix[g][p];
        if (g == c && p == c) {
          cm.tp += n;
        } else if (p == c) {
          cm.fp += n;
        } else if (g == c) {
          cm.fn += n;
        } else {
          cm.tn += n;
        }
      }
    }
  }
  report.error_bins = bin_errors(traces, dataset);
  return report;
}

EvalReport evaluate(const labels::Dataset& dataset, const corpus::Corpus& corpus,
                    const MatchRuleSet& rules) {
  return evaluate_traces(classify_dataset(dataset, corpus, rules), dataset);
}

std::vector<HighYield> find_high_yield_articles(const corpus::Corpus& corpus,
                                                const MatchRuleSet& rules,
                                                Candidate target,
                                                std::size_t min_count) {
  if (min_count == 0) throw Error("min_count must be at least 1");
  std::vector<HighYield> out;
  for (const auto& [key, article] : corpus.articles()) {
    std::size_t n = 0;
    for (const auto& a : article.attributions()) {
      if (classify_source(article, a, rules).label == target) ++n;
    }
    if (n >= min_count) out.push_back({key, n});
  }
  std::stable_sort(out.begin(), out.end(), [](const HighYield& a, const HighYield& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string trace_to_json(const ClassificationTrace& trace) {
  nlohmann::ordered_json j;
  j["key"] = {{"publisher_name", trace.key.publisher_name},
              {"article_name", trace.key.article_name},
              {"attr_id", trace.key.attr_id}};
  j["used_representative_mention"] = trace.used_representative_mention;
  j["matched_text"] = trace.matched_text;
  j["fired_rule"] = trace.fired_rule ? nlohmann::ordered_json(*trace.fired_rule)
                                     : nlohmann::ordered_json(nullptr);
  j["label"] = to_string(trace.label);
  return j.dump();
}

std::string eval_report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["rows"] = report.rows;
  j["correct"] = report.correct;
  j["accuracy"] = report.accuracy();
  auto& per = j["binarized"];
  for (Candidate c : {Candidate::kTrump, Candidate::kClinton, Candidate::kOther}) {
    const auto& cm = report.of(c);
    per[std::string(to_string(c))] = {{"tp", cm.tp},
                                      {"fp", cm.fp},
                                      {"fn", cm.fn},
                                      {"tn", cm.tn},
                                      {"precision", cm.precision()},
                                      {"recall", cm.recall()}};
  }
  auto& matrix = j["confusion_gold_by_predicted"];
  for (std::size_t g = 0; g < 3; ++g) {
    auto& row = matrix[std::string(to_string(static_cast<Candidate>(g)))];
    for (std::size_t p = 0; p < 3; ++p)
      row[std::string(to_string(static_cast<Candidate>(p)))] = report.matrix[g][p];
  }
  auto& bins = j["error_bins"];
  for (std::size_t b = 0; b < kErrorBinCount; ++b)
    bins[std::string(to_string(static_cast<ErrorBin>(b)))] = report.error_bins.counts[b];
  j["misclassified"] = report.error_bins.total();
  return j.dump(2);
}

}  // namespace attrib::classify
