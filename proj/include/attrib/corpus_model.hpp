#pragma once

// Article bundles: raw text, a CoreNLP-style token/coreference XML subset,
// and a standoff attribution span file, consolidated per article.
//
// All offsets into raw text are UTF-8 byte offsets. Token ids are
// document-global and 0-based; mention ranges are token-id ranges with an
// exclusive end.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace attrib::corpus {

struct ArticleKey {
  std::string publisher_name;
  std::string article_name;

  auto operator<=>(const ArticleKey&) const = default;
  bool operator==(const ArticleKey&) const = default;
  std::string str() const { return publisher_name + "/" + article_name; }
};

struct AttributionKey {
  std::string publisher_name;
  std::string article_name;
  std::size_t attr_id = 0;

  auto operator<=>(const AttributionKey&) const = default;
  bool operator==(const AttributionKey&) const = default;
  ArticleKey article() const { return {publisher_name, article_name}; }
  std::string str() const {
    return publisher_name + "/" + article_name + "#" + std::to_string(attr_id);
  }
};

struct Token {
  std::size_t id = 0;
  std::size_t sentence_id = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string surface;
};

struct Mention {
  std::int64_t chain_id = 0;
  std::size_t token_start = 0;
  std::size_t token_end = 0;  // exclusive
  bool is_representative = false;
};

struct CorefChain {
  std::int64_t chain_id = 0;
  std::vector<Mention> mentions;

  const Mention& representative() const;
};

// Half-open byte range [start, end).
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const CharSpan&) const = default;
  bool operator==(const CharSpan&) const = default;
};

enum class Role { kSource, kCue, kContent };

std::string_view role_name(Role role);

struct SpanTriple {
  std::size_t attr_id = 0;
  std::vector<CharSpan> source_spans;
  std::vector<CharSpan> cue_spans;
  std::vector<CharSpan> content_spans;

  bool operator==(const SpanTriple&) const = default;
  const std::vector<CharSpan>& spans(Role role) const;
  std::vector<CharSpan>& spans(Role role);
};

struct TokenXml {
  std::vector<Token> tokens;
  std::vector<CorefChain> chains;  // sorted by chain_id
};

struct XmlOptions {
  // Skip unknown elements instead of raising SchemaError.
  bool lenient = false;
};

// Maps character spans to the tokens that cover them.
class TokenIndex {
 public:
  TokenIndex() = default;
  explicit TokenIndex(std::span<const Token> tokens);

  // Ids of every token whose byte range intersects `span`, ascending.
  std::vector<std::size_t> covering(CharSpan span) const;

 private:
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> ends_;
};

class ConsolidatedArticle {
 public:
  ConsolidatedArticle(ArticleKey key, std::string raw_text,
                      std::vector<Token> tokens,
                      std::vector<CorefChain> chains,
                      std::vector<SpanTriple> attributions);

  const ArticleKey& key() const { return key_; }
  const std::string& raw_text() const { return raw_text_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<CorefChain>& coref_chains() const { return chains_; }
  const std::vector<SpanTriple>& attributions() const { return attributions_; }
  const TokenIndex& token_index() const { return index_; }

  std::string_view slice(CharSpan span) const;
  // Text of the given role; discontiguous spans are joined by one space.
  std::string role_text(const SpanTriple& attribution, Role role) const;
  // Raw text covered by tokens [token_start, token_end).
  std::string_view token_range_text(std::size_t token_start,
                                    std::size_t token_end) const;
  std::vector<std::size_t> tokens_of(std::span<const CharSpan> spans) const;

 private:
  ArticleKey key_;
  std::string raw_text_;
  std::vector<Token> tokens_;
  std::vector<CorefChain> chains_;
  std::vector<SpanTriple> attributions_;
  TokenIndex index_;
};

std::string parse_raw_text(const std::filesystem::path& path);

// Throws EncodingError on the first malformed sequence.
void validate_utf8(std::string_view bytes);

TokenXml parse_token_xml_string(std::string_view xml, std::string_view raw_text,
                                XmlOptions options = {});
TokenXml parse_token_xml(const std::filesystem::path& path,
                         std::string_view raw_text, XmlOptions options = {});

std::vector<SpanTriple> parse_attribution_string(std::string_view text);
std::vector<SpanTriple> parse_attribution_file(const std::filesystem::path& path);

// Canonical standoff serialization: attributions by id, roles in
// source/cue/content order, spans ascending.
std::string write_attribution_string(std::span<const SpanTriple> triples);

ConsolidatedArticle consolidate(ArticleKey key, std::string raw_text,
                                std::vector<Token> tokens,
                                std::vector<CorefChain> chains,
                                std::vector<SpanTriple> span_triples);

struct LoadIssue {
  ArticleKey key;
  std::string message;
};

class Corpus {
 public:
  void add(ConsolidatedArticle article);

  const ConsolidatedArticle* find(const ArticleKey& key) const;
  const SpanTriple* find(const AttributionKey& key) const;

  const std::map<ArticleKey, ConsolidatedArticle>& articles() const {
    return articles_;
  }
  std::size_t size() const { return articles_.size(); }
  bool empty() const { return articles_.empty(); }

 private:
  std::map<ArticleKey, ConsolidatedArticle> articles_;
};

struct CorpusLoad {
  Corpus corpus;
  std::vector<LoadIssue> issues;  // one per article that failed to load
};

// Reads `<dir>/<publisher>/<article>.{txt,xml,attr}`. Articles that fail are
// listed in `issues` and skipped; the rest are loaded.
CorpusLoad load_corpus(const std::filesystem::path& dir,
                       XmlOptions options = {});

}  // namespace attrib::corpus
