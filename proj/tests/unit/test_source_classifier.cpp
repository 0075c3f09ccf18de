#include <doctest.h>

#include <random>

#include <json.hpp>

#include "attrib/errors.hpp"
#include "attrib/source_classifier.hpp"
#include "test_support.hpp"

using namespace attrib;
using namespace attrib::classify;

namespace {

// Whitespace-tokenized single-sentence article.
std::vector<corpus::Token> tokenize(const std::string& raw) {
  std::vector<corpus::Token> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] == ' ') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && raw[j] != ' ') ++j;
    out.push_back({out.size(), 0, i, j, raw.substr(i, j - i)});
    i = j;
  }
  return out;
}

corpus::CharSpan span_of(const std::string& raw, const std::string& needle) {
  const auto at = raw.find(needle);
  REQUIRE(at != std::string::npos);
  return {at, at + needle.size()};
}

struct MentionSpec {
  std::int64_t chain;
  std::size_t start, end;
  bool rep;
};

corpus::ConsolidatedArticle article_with(const std::string& raw, const std::string& source,
                                         const std::vector<MentionSpec>& mentions) {
  std::map<std::int64_t, corpus::CorefChain> chains;
  for (const auto& m : mentions) {
    auto& c = chains[m.chain];
    c.chain_id = m.chain;
    c.mentions.push_back({m.chain, m.start, m.end, m.rep});
  }
  std::vector<corpus::CorefChain> list;
  for (auto& [id, c] : chains) list.push_back(c);
  corpus::SpanTriple t;
  t.attr_id = 0;
  t.source_spans = {span_of(raw, source)};
  t.content_spans = {{raw.size() - 1, raw.size()}};
  return corpus::consolidate({"pub", "art"}, raw, tokenize(raw), list, {t});
}

Candidate classify_plain(const std::string& source) {
  return classify_text(source, std::nullopt, MatchRuleSet::defaults()).label;
}

}  // namespace

TEST_CASE("worked examples") {
  CHECK(classify_plain("Bill Clinton") == Candidate::kOther);
  CHECK(classify_plain("Donald Trump Jr.") == Candidate::kOther);
  CHECK(classify_plain("The Clinton Campaign") == Candidate::kClinton);
  CHECK(classify_plain("The Clinton Administration") == Candidate::kOther);

  const auto long_mention = classify_text("Hillary Clinton, wife of former president Bill Clinton",
                                          std::nullopt, MatchRuleSet::defaults());
  CHECK(long_mention.matched_text == "Hillary Clinton, wife of former");
  CHECK(long_mention.label == Candidate::kClinton);
  CHECK(long_mention.fired_rule == std::optional<std::string>("clinton"));
}

TEST_CASE("candidate rules") {
  CHECK(classify_plain("Trump") == Candidate::kTrump);
  CHECK(classify_plain("Mr. Donald John Trump") == Candidate::kTrump);
  CHECK(classify_plain("Hillary") == Candidate::kClinton);
  CHECK(classify_plain("Melania Trump") == Candidate::kOther);
  CHECK(classify_plain("Chelsea Clinton") == Candidate::kOther);
  CHECK(classify_plain("he") == Candidate::kOther);
  // Surname matching is case-sensitive.
  CHECK(classify_plain("a trump card") == Candidate::kOther);
  // Five tokens only: the surname here is the sixth.
  CHECK(classify_plain("hopeful future president Mr. Donald John Trump") == Candidate::kOther);
  const auto t = classify_text("he", std::nullopt, MatchRuleSet::defaults());
  CHECK_FALSE(t.fired_rule.has_value());
  CHECK_FALSE(t.used_representative_mention);
}

TEST_CASE("first_tokens") {
  CHECK(first_tokens("  a   b\tc\nd e f g ") == "a b c d e");
  CHECK(first_tokens("") == "");
  CHECK(first_tokens("one two", 1) == "one");
}

TEST_CASE("representative mention lookup") {
  const std::string raw = "Donald Trump spoke . He said it .";
  SUBCASE("pronoun resolves to the representative") {
    const auto a = article_with(raw, "He", {{0, 4, 5, false}, {0, 0, 2, true}});
    CHECK(representative_source_text(a, a.attributions()[0]) ==
          std::optional<std::string>("Donald Trump"));
    const auto trace = classify_source(a, a.attributions()[0], MatchRuleSet::defaults());
    CHECK(trace.used_representative_mention);
    CHECK(trace.label == Candidate::kTrump);
    CHECK(trace.key == corpus::AttributionKey{"pub", "art", 0});
  }
  SUBCASE("no overlapping chain") {
    const auto a = article_with(raw, "He", {{0, 0, 2, true}});
    CHECK_FALSE(representative_source_text(a, a.attributions()[0]).has_value());
  }
  SUBCASE("largest overlap wins") {
    const std::string r2 = "Bill Clinton and Hillary Clinton met . Hillary Clinton aides said no .";
    // Source "Hillary Clinton aides" (tokens 7..9): chain 1 covers 1 token, chain 2 covers 2.
    const auto a = article_with(r2, "Hillary Clinton aides",
                                {{1, 0, 2, true}, {1, 8, 9, false}, {2, 3, 5, true}, {2, 7, 9, false}});
    CHECK(representative_source_text(a, a.attributions()[0]) ==
          std::optional<std::string>("Hillary Clinton"));
  }
  SUBCASE("ties go to the lower chain id") {
    const std::string r2 = "Bill Clinton and Hillary Clinton met . Clinton said no .";
    const auto a = article_with(r2, "Clinton said",
                                {{7, 3, 5, true}, {7, 7, 8, false}, {4, 0, 2, true}, {4, 7, 8, false}});
    CHECK(representative_source_text(a, a.attributions()[0]) ==
          std::optional<std::string>("Bill Clinton"));
    CHECK(classify_source(a, a.attributions()[0], MatchRuleSet::defaults()).label ==
          Candidate::kOther);
  }
}

TEST_CASE("exclusions take precedence over any surrounding text") {
  const auto rules = MatchRuleSet::defaults();
  const std::vector<std::string> excluded = {"Bill Clinton", "Clinton Administration",
                                             "Trump Jr.", "Melania Trump"};
  const std::vector<std::string> words = {"Trump", "Clinton", "said", "the", "Hillary", "aide", ","};
  std::mt19937_64 gen(9);
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const std::size_t before = gen() % 3;
    for (std::size_t k = 0; k < before; ++k) text += words[gen() % words.size()] + " ";
    text += excluded[gen() % excluded.size()];
    for (std::size_t k = 0; k < 3; ++k) text += " " + words[gen() % words.size()];
    const auto trace = classify_text(text, std::nullopt, rules);
    bool hit = false;
    for (const auto& r : rules.exclusions()) hit |= std::regex_search(trace.matched_text, r.regex);
    if (hit) CHECK(trace.label == Candidate::kOther);
  }
}

TEST_CASE("truncation is idempotent without a representative") {
  const auto rules = MatchRuleSet::defaults();
  const std::vector<std::string> words = {"Trump", "Clinton", "Bill", "said", "Jr.", "Hillary",
                                          "the", "Campaign", "Administration"};
  std::mt19937_64 gen(21);
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const std::size_t n = 1 + gen() % 9;
    for (std::size_t k = 0; k < n; ++k) text += (k ? " " : "") + words[gen() % words.size()];
    CHECK(classify_text(text, std::nullopt, rules) ==
          classify_text(first_tokens(text), std::nullopt, rules));
  }
}

TEST_CASE("rule files") {
  const std::string shipped =
      attrib::testing::read_text(std::filesystem::path(ATTRIB_SOURCE_DIR) / "data" / "default_rules.tsv");
  CHECK(shipped == default_rules_text());
  CHECK(MatchRuleSet::parse(shipped).serialize() == MatchRuleSet::defaults().serialize());
  CHECK(MatchRuleSet::defaults().exclusions().size() == 6);
  CHECK(MatchRuleSet::defaults().candidates().size() == 6);

  CHECK_THROWS_AS(MatchRuleSet::parse("trump\t\\bTrump\\b\n"), RuleError);
  CHECK_THROWS_AS(MatchRuleSet::parse("maybe\tx\tnote\n"), RuleError);
  CHECK_THROWS_AS(MatchRuleSet::parse("trump\t(unclosed\tnote\nclinton\tC\tc\n"), RuleError);
  // Needs at least one exclusion and one pattern per candidate class.
  CHECK_THROWS_AS(MatchRuleSet::parse("exclude\tX\tx\ntrump\tTrump\tt\n"), RuleError);
  CHECK_THROWS_AS(MatchRuleSet::parse("trump\tTrump\tt\nclinton\tC\tc\n"), RuleError);
  CHECK_THROWS_AS(MatchRuleSet::load("/nonexistent/rules.tsv"), IoError);

  // File order decides between candidate classes.
  const auto custom = MatchRuleSet::parse("exclude\tNobody\tn\nclinton\tTrump\tfirst\ntrump\tTrump\tsecond\n");
  const auto t = classify_text("Trump", std::nullopt, custom);
  CHECK(t.label == Candidate::kClinton);
  CHECK(t.fired_rule == std::optional<std::string>("first"));
}

namespace {

labels::LabeledAttribution gold(std::size_t id, labels::SourceLabel label) {
  labels::LabeledAttribution r;
  r.key = {"pub", "art", id};
  r.source_label = label;
  return r;
}

ClassificationTrace predicted(std::size_t id, Candidate c, bool rep = true,
                              std::optional<std::string> rule = "r") {
  ClassificationTrace t;
  t.key = {"pub", "art", id};
  t.label = c;
  t.used_representative_mention = rep;
  t.fired_rule = std::move(rule);
  return t;
}

}  // namespace

TEST_CASE("evaluation arithmetic") {
  using labels::SourceLabel;
  const labels::Dataset d({gold(0, SourceLabel::kTrump), gold(1, SourceLabel::kTrump),
                           gold(2, SourceLabel::kClinton), gold(3, SourceLabel::kOrganization)});
  const std::vector<ClassificationTrace> traces = {
      predicted(0, Candidate::kTrump), predicted(1, Candidate::kOther),
      predicted(2, Candidate::kClinton), predicted(3, Candidate::kOther)};
  const EvalReport r = evaluate_traces(traces, d);
  CHECK(r.accuracy() == doctest::Approx(0.75));
  CHECK(r.of(Candidate::kTrump).precision() == 1.0);
  CHECK(r.of(Candidate::kTrump).recall() == 0.5);
  CHECK(r.of(Candidate::kClinton).precision() == 1.0);
  CHECK(r.of(Candidate::kClinton).recall() == 1.0);
  std::size_t cells = 0;
  for (const auto& row : r.matrix)
    for (auto v : row) cells += v;
  CHECK(cells == 4);
  for (const auto& c : r.binarized) CHECK(c.total() == 4);

  const EvalReport empty = evaluate_traces({}, labels::Dataset{});
  CHECK(empty.accuracy() == 1.0);
  CHECK(empty.of(Candidate::kTrump).precision() == 1.0);
  CHECK(empty.of(Candidate::kTrump).recall() == 1.0);

  CHECK_THROWS_AS(evaluate_traces({predicted(9, Candidate::kTrump)}, d), UnresolvedKey);
}

TEST_CASE("error bins") {
  using labels::SourceLabel;
  auto ambiguous = gold(1, SourceLabel::kOtherPerson);
  ambiguous.annotator_note = "ambiguous: campaign spokesperson";
  CHECK(error_bin(predicted(0, Candidate::kOther, false, std::nullopt),
                  gold(0, SourceLabel::kTrump)) == ErrorBin::kCorefFailure);
  CHECK(error_bin(predicted(1, Candidate::kTrump), ambiguous) == ErrorBin::kAmbiguousSource);
  CHECK(error_bin(predicted(2, Candidate::kOther, true, std::nullopt),
                  gold(2, SourceLabel::kTrump)) == ErrorBin::kInadequateCoref);
  CHECK(error_bin(predicted(3, Candidate::kClinton), gold(3, SourceLabel::kOtherPerson)) ==
        ErrorBin::kTrickyNonTarget);
  CHECK(error_bin(predicted(4, Candidate::kClinton), gold(4, SourceLabel::kOrganization)) ==
        ErrorBin::kTrickyNonTarget);
  CHECK(error_bin(predicted(5, Candidate::kOther, true, "melania_trump"),
                  gold(5, SourceLabel::kTrump)) == ErrorBin::kLogistical);
  CHECK_FALSE(error_bin(predicted(6, Candidate::kOther), gold(6, SourceLabel::kCruz)).has_value());

  // "the leader" as representative matches nothing.
  const auto t = classify_text("he", std::string("the leader"), MatchRuleSet::defaults());
  CHECK(error_bin(t, gold(0, SourceLabel::kTrump)) == ErrorBin::kInadequateCoref);
  // A 2008 Clinton Veteran, predicted clinton.
  const auto v = classify_text("A 2008 Clinton Veteran", std::string("A 2008 Clinton Veteran"),
                               MatchRuleSet::defaults());
  CHECK(v.label == Candidate::kClinton);
  CHECK(error_bin(v, gold(0, SourceLabel::kOtherPerson)) == ErrorBin::kTrickyNonTarget);
}

TEST_CASE("fixture evaluation agrees with a linear scan") {
  const auto corpus = corpus::load_corpus(attrib::testing::fixture_corpus()).corpus;
  const auto d = labels::read_labels_csv(attrib::testing::fixture_labels());
  const auto rules = MatchRuleSet::defaults();
  const auto traces = classify_dataset(d, corpus, rules);
  REQUIRE(traces.size() == d.size());
  std::size_t agree = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    CHECK(traces[i].key == d.rows()[i].key);
    if (traces[i].label == collapse(d.rows()[i].source_label)) ++agree;
  }
  const EvalReport r = evaluate(d, corpus, rules);
  CHECK(r.accuracy() == doctest::Approx(static_cast<double>(agree) / d.size()).epsilon(1e-15));
  CHECK(r.error_bins.total() == d.size() - agree);
  for (std::size_t b = 0; b < kErrorBinCount; ++b) CHECK(r.error_bins.counts[b] > 0);

  // Classifying the whole corpus yields the same traces in the same order.
  CHECK(classify_corpus(corpus, rules) == traces);

  std::vector<labels::LabeledAttribution> missing(d.rows().begin(), d.rows().end());
  missing.push_back(gold(0, labels::SourceLabel::kTrump));
  CHECK_THROWS_AS(classify_dataset(labels::Dataset(missing), corpus, rules), UnresolvedKey);
}

TEST_CASE("high-yield articles") {
  const auto corpus = corpus::load_corpus(attrib::testing::fixture_corpus()).corpus;
  const auto rules = MatchRuleSet::defaults();
  const auto all = find_high_yield_articles(corpus, rules, Candidate::kTrump, 1);
  REQUIRE(all.size() > 1);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const bool ordered = all[i - 1].count > all[i].count ||
                         (all[i - 1].count == all[i].count && all[i - 1].key < all[i].key);
    CHECK(ordered);
  }
  const auto top = find_high_yield_articles(corpus, rules, Candidate::kTrump, all.front().count);
  CHECK(top.front() == all.front());
  for (const auto& h : top) CHECK(h.count >= all.front().count);
  CHECK(find_high_yield_articles(corpus, rules, Candidate::kTrump, 100000).empty());
  CHECK_THROWS_AS(find_high_yield_articles(corpus, rules, Candidate::kTrump, 0), Error);
  CHECK(find_high_yield_articles(corpus::Corpus{}, rules, Candidate::kClinton, 1).empty());
}

TEST_CASE("trace json fields") {
  ClassificationTrace t;
  t.key = {"nyt", "a1", 3};
  t.used_representative_mention = true;
  t.matched_text = "Donald Trump";
  t.fired_rule = "trump";
  t.label = Candidate::kTrump;
  const auto j = nlohmann::json::parse(trace_to_json(t));
  CHECK(j["key"]["publisher_name"] == "nyt");
  CHECK(j["key"]["attr_id"] == 3);
  CHECK(j["used_representative_mention"] == true);
  CHECK(j["matched_text"] == "Donald Trump");
  CHECK(j["fired_rule"] == "trump");
  CHECK(j["label"] == "trump");
  t.fired_rule.reset();
  CHECK(nlohmann::json::parse(trace_to_json(t))["fired_rule"].is_null());
}
