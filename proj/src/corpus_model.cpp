#include "attrib/corpus_model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "attrib/errors.hpp"

namespace attrib::corpus {

namespace pt = boost::property_tree;

const Mention& CorefChain::representative() const {
  for (const auto& m : mentions) {
    if (m.is_representative) return m;
  }
  throw ChainError("chain " + std::to_string(chain_id) +
                   " has no representative mention");
}

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kSource:
      return "source";
    case Role::kCue:
      return "cue";
    case Role::kContent:
      return "content";
  }
  return "";
}

const std::vector<CharSpan>& SpanTriple::spans(Role role) const {
  switch (role) {
    case Role::kSource:
      return source_spans;
    case Role::kCue:
      return cue_spans;
    case Role::kContent:
      break;
  }
  return content_spans;
}

std::vector<CharSpan>& SpanTriple::spans(Role role) {
  return const_cast<std::vector<CharSpan>&>(
      static_cast<const SpanTriple&>(*this).spans(role));
}

// ---------------------------------------------------------------------------
// Raw text

void validate_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto fail = [&](const char* why) {
    throw EncodingError("invalid UTF-8 at byte " + std::to_string(i) + ": " +
                        why);
  };
  while (i < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      fail("bad lead byte");
    }
    if (i + len > n) fail("truncated sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) fail("bad continuation byte");
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000))
      fail("overlong encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      fail("invalid code point");
    i += len;
  }
}

namespace {

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(buf).str();
}

template <typename T>
T parse_number(std::string_view text, const std::string& what) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw SchemaError("bad integer '" + std::string(text) + "' for " + what);
  return value;
}

const pt::ptree& attrs_of(const pt::ptree& node, const std::string& element) {
  auto it = node.find("<xmlattr>");
  if (it == node.not_found())
    throw SchemaError("<" + element + "> has no attributes");
  return it->second;
}

std::string required_attr(const pt::ptree& node, const std::string& element,
                          const std::string& name) {
  const auto& attrs = attrs_of(node, element);
  auto it = attrs.find(name);
  if (it == attrs.not_found())
    throw SchemaError("<" + element + "> missing attribute '" + name + "'");
  return it->second.data();
}

bool is_meta(const std::string& name) {
  return name == "<xmlattr>" || name == "<xmlcomment>" || name == "<xmltext>";
}

void unknown_element(const std::string& name, const std::string& parent,
                     const XmlOptions& options) {
  if (!options.lenient)
    throw SchemaError("unknown element <" + name + "> inside <" + parent +
                      ">");
}

}  // namespace

std::string parse_raw_text(const std::filesystem::path& path) {
  std::string bytes = read_bytes(path);
  validate_utf8(bytes);
  return bytes;
}

// ---------------------------------------------------------------------------
// Token / coreference XML

TokenXml parse_token_xml_string(std::string_view xml, std::string_view raw_text,
                                XmlOptions options) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw SchemaError(std::string("malformed XML: ") + e.what());
  }

  const pt::ptree* document = nullptr;
  for (const auto& [name, child] : tree) {
    if (name == "document") {
      if (document) throw SchemaError("more than one <document>");
      document = &child;
    } else if (!is_meta(name)) {
      unknown_element(name, "root", options);
    }
  }
  if (!document) throw SchemaError("missing <document> root");

  TokenXml out;
  bool saw_sentences = false;
  std::set<std::size_t> sentence_ids;

  for (const auto& [name, section] : *document) {
    if (name == "sentences") {
      saw_sentences = true;
      for (const auto& [sname, sentence] : section) {
        if (is_meta(sname)) continue;
        if (sname != "sentence") {
          unknown_element(sname, "sentences", options);
          continue;
        }
        const auto sid = parse_number<std::size_t>(
            required_attr(sentence, "sentence", "id"), "sentence id");
        if (!sentence_ids.insert(sid).second)
          throw SchemaError("duplicate sentence id " + std::to_string(sid));
        for (const auto& [tname, token] : sentence) {
          if (is_meta(tname)) continue;
          if (tname != "token") {
            unknown_element(tname, "sentence", options);
            continue;
          }
          Token t;
          t.id = parse_number<std::size_t>(required_attr(token, "token", "id"),
                                           "token id");
          t.sentence_id = sid;
          t.char_start = parse_number<std::size_t>(
              required_attr(token, "token", "start"), "token start");
          t.char_end = parse_number<std::size_t>(
              required_attr(token, "token", "end"), "token end");
          t.surface = token.data();
          out.tokens.push_back(std::move(t));
        }
      }
    } else if (name == "coreference") {
      for (const auto& [cname, chain] : section) {
        if (is_meta(cname)) continue;
        if (cname != "chain") {
          unknown_element(cname, "coreference", options);
          continue;
        }
        CorefChain c;
        c.chain_id = parse_number<std::int64_t>(
            required_attr(chain, "chain", "id"), "chain id");
        for (const auto& [mname, mention] : chain) {
          if (is_meta(mname)) continue;
          if (mname != "mention") {
            unknown_element(mname, "chain", options);
            continue;
          }
          Mention m;
          m.chain_id = c.chain_id;
          m.token_start = parse_number<std::size_t>(
              required_attr(mention, "mention", "start"), "mention start");
          m.token_end = parse_number<std::size_t>(
              required_attr(mention, "mention", "end"), "mention end");
          const auto rep = required_attr(mention, "mention", "representative");
          if (rep == "true") {
            m.is_representative = true;
          } else if (rep != "false") {
            throw SchemaError("representative must be true|false, got '" +
                              rep + "'");
          }
          c.mentions.push_back(m);
        }
        out.chains.push_back(std::move(c));
      }
    } else if (!is_meta(name)) {
      unknown_element(name, "document", options);
    }
  }
  if (!saw_sentences) throw SchemaError("missing <sentences>");

  std::sort(out.tokens.begin(), out.tokens.end(),
            [](const Token& a, const Token& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    const Token& t = out.tokens[i];
    if (t.id != i)
      throw SchemaError("token ids must be dense from 0; expected " +
                        std::to_string(i) + ", got " + std::to_string(t.id));
    if (t.char_start >= t.char_end)
      throw SchemaError("token " + std::to_string(t.id) + " has empty span");
    if (i > 0 && t.char_start < out.tokens[i - 1].char_end)
      throw SchemaError("token " + std::to_string(t.id) +
                        " overlaps or precedes its predecessor");
    if (t.char_end > raw_text.size())
      throw OffsetMismatch("token " + std::to_string(t.id) +
                           " ends past the raw text");
    const auto slice = raw_text.substr(t.char_start, t.char_end - t.char_start);
    if (slice != t.surface)
      throw OffsetMismatch("token " + std::to_string(t.id) + " surface '" +
                           t.surface + "' but raw text has '" +
                           std::string(slice) + "'");
  }

  std::sort(out.chains.begin(), out.chains.end(),
            [](const CorefChain& a, const CorefChain& b) {
              return a.chain_id < b.chain_id;
            });
  for (std::size_t i = 0; i < out.chains.size(); ++i) {
    const CorefChain& c = out.chains[i];
    if (i > 0 && out.chains[i - 1].chain_id == c.chain_id)
      throw SchemaError("duplicate chain id " + std::to_string(c.chain_id));
    const auto reps = std::count_if(
        c.mentions.begin(), c.mentions.end(),
        [](const Mention& m) { return m.is_representative; });
    if (reps != 1)
      throw ChainError("chain " + std::to_string(c.chain_id) + " has " +
                       std::to_string(reps) +
                       " representative mentions, expected 1");
    for (const Mention& m : c.mentions) {
      if (m.token_start >= m.token_end || m.token_end > out.tokens.size())
        throw SchemaError("chain " + std::to_string(c.chain_id) +
                          " has a mention outside the token range");
    }
  }
  return out;
}

TokenXml parse_token_xml(const std::filesystem::path& path,
                         std::string_view raw_text, XmlOptions options) {
  const std::string xml = read_bytes(path);
  validate_utf8(xml);
  return parse_token_xml_string(xml, raw_text, options);
}

// ---------------------------------------------------------------------------
// Standoff attribution file

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

std::optional<std::size_t> to_index(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

struct SpanLine {
  CharSpan span;
  std::size_t line;
};

}  // namespace

std::vector<SpanTriple> parse_attribution_string(std::string_view text) {
  std::map<std::size_t, SpanTriple> by_id;
  std::map<std::pair<std::size_t, Role>, std::vector<SpanLine>> lines_of;
  std::size_t line_no = 0;
  std::optional<std::size_t> current_id;
  std::set<std::size_t> closed_ids;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (nl == text.size()) break;
      continue;
    }

    const auto fields = split_tabs(line);
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    const auto id = to_index(fields[0]);
    if (!id) throw ParseError(line_no, "bad attr_id '" + std::string(fields[0]) + "'");
    Role role;
    if (fields[1] == "source") {
      role = Role::kSource;
    } else if (fields[1] == "cue") {
      role = Role::kCue;
    } else if (fields[1] == "content") {
      role = Role::kContent;
    } else {
      throw ParseError(line_no, "unknown role '" + std::string(fields[1]) + "'");
    }
    const auto start = to_index(fields[2]);
    const auto end = to_index(fields[3]);
    if (!start || !end) throw ParseError(line_no, "bad span offsets");
    if (*start >= *end) throw ParseError(line_no, "empty or inverted span");

    if (current_id != id) {
      if (closed_ids.count(*id))
        throw DuplicateAttrId("line " + std::to_string(line_no) + ": attr_id " +
                              std::to_string(*id) +
                              " redeclared after another attribution");
      if (current_id) closed_ids.insert(*current_id);
      current_id = id;
    }
    by_id[*id].attr_id = *id;
    lines_of[{*id, role}].push_back({{*start, *end}, line_no});
    if (nl == text.size()) break;
  }

  for (auto& [k, spans] : lines_of) {
    std::sort(spans.begin(), spans.end(),
              [](const SpanLine& a, const SpanLine& b) { return a.span < b.span; });
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].span.start < spans[i - 1].span.end)
        throw ParseError(std::max(spans[i].line, spans[i - 1].line),
                         "overlapping " + std::string(role_name(k.second)) +
                             " spans in attr_id " + std::to_string(k.first));
    }
    auto& dst = by_id[k.first].spans(k.second);
    for (const auto& s : spans) dst.push_back(s.span);
  }

  std::vector<SpanTriple> out;
  out.reserve(by_id.size());
  for (auto& [id, triple] : by_id) {
    if (id != out.size())
      throw ParseError(line_no, "attr_ids must be dense from 0; missing " +
                                    std::to_string(out.size()));
    if (triple.source_spans.empty())
      throw MissingField("attr_id " + std::to_string(id) + " has no source span");
    if (triple.content_spans.empty())
      throw MissingField("attr_id " + std::to_string(id) +
                         " has no content span");
    out.push_back(std::move(triple));
  }
  return out;
}

std::vector<SpanTriple> parse_attribution_file(
    const std::filesystem::path& path) {
  const std::string text = read_bytes(path);
  validate_utf8(text);
  return parse_attribution_string(text);
}

std::string write_attribution_string(std::span<const SpanTriple> triples) {
  std::vector<const SpanTriple*> order;
  for (const auto& t : triples) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](auto* a, auto* b) { return a->attr_id < b->attr_id; });
  std::string out;
  for (const SpanTriple* t : order) {
    for (Role role : {Role::kSource, Role::kCue, Role::kContent}) {
      auto spans = t->spans(role);
      std::sort(spans.begin(), spans.end());
      for (const CharSpan& s : spans) {
        out += std::to_string(t->attr_id);
        out += '\t';
        out += role_name(role);
        out += '\t';
        out += std::to_string(s.start);
        out += '\t';
        out += std::to_string(s.end);
        out += '\n';
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Consolidation

TokenIndex::TokenIndex(std::span<const Token> tokens) {
  starts_.reserve(tokens.size());
  ends_.reserve(tokens.size());
  for (const Token& t : tokens) {
    starts_.push_back(t.char_start);
    ends_.push_back(t.char_end);
  }
}

std::vector<std::size_t> TokenIndex::covering(CharSpan span) const {
  std::vector<std::size_t> ids;
  if (span.start >= span.end) return ids;
  // Tokens are disjoint and ordered, so ends are ascending too.
  auto it = std::upper_bound(ends_.begin(), ends_.end(), span.start);
  for (auto i = static_cast<std::size_t>(it - ends_.begin());
       i < starts_.size() && starts_[i] < span.end; ++i) {
    ids.push_back(i);
  }
  return ids;
}

ConsolidatedArticle::ConsolidatedArticle(ArticleKey key, std::string raw_text,
                                         std::vector<Token> tokens,
                                         std::vector<CorefChain> chains,
                                         std::vector<SpanTriple> attributions)
    : key_(std::move(key)),
      raw_text_(std::move(raw_text)),
      tokens_(std::move(tokens)),
      chains_(std::move(chains)),
      attributions_(std::move(attributions)),
      index_(tokens_) {}

std::string_view ConsolidatedArticle::slice(CharSpan span) const {
  return std::string_view(raw_text_).substr(span.start, span.end - span.start);
}

std::string ConsolidatedArticle::role_text(const SpanTriple& attribution,
                                           Role role) const {
  std::string out;
  for (const CharSpan& s : attribution.spans(role)) {
    if (!out.empty()) out += ' ';
    out += slice(s);
  }
  return out;
}

std::string_view ConsolidatedArticle::token_range_text(
    std::size_t token_start, std::size_t token_end) const {
  if (token_start >= token_end || token_end > tokens_.size()) return {};
  return slice({tokens_[token_start].char_start,
                tokens_[token_end - 1].char_end});
}

std::vector<std::size_t> ConsolidatedArticle::tokens_of(
    std::span<const CharSpan> spans) const {
  std::vector<std::size_t> ids;
  for (const CharSpan& s : spans) {
    auto part = index_.covering(s);
    ids.insert(ids.end(), part.begin(), part.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

ConsolidatedArticle consolidate(ArticleKey key, std::string raw_text,
                                std::vector<Token> tokens,
                                std::vector<CorefChain> chains,
                                std::vector<SpanTriple> span_triples) {
  if (key.publisher_name.empty() || key.article_name.empty())
    throw ValidationError("article key components must be nonempty");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.id != i || t.char_start >= t.char_end || t.char_end > raw_text.size())
      throw BoundsError("token " + std::to_string(t.id) + " of " + key.str() +
                        " is out of bounds");
  }
  for (const CorefChain& c : chains) {
    for (const Mention& m : c.mentions) {
      if (m.token_start >= m.token_end || m.token_end > tokens.size())
        throw ValidationError("chain " + std::to_string(c.chain_id) + " of " +
                              key.str() + " references missing tokens");
    }
  }
  for (std::size_t i = 0; i < span_triples.size(); ++i) {
    const SpanTriple& t = span_triples[i];
    if (t.attr_id != i)
      throw ValidationError("attr_id " + std::to_string(t.attr_id) + " of " +
                            key.str() + " out of sequence");
    if (t.source_spans.empty() || t.content_spans.empty())
      throw ValidationError("attr_id " + std::to_string(t.attr_id) + " of " +
                            key.str() + " lacks source or content");
    for (Role role : {Role::kSource, Role::kCue, Role::kContent}) {
      for (const CharSpan& s : t.spans(role)) {
        if (s.start >= s.end || s.end > raw_text.size())
          throw BoundsError("attr_id " + std::to_string(t.attr_id) + " of " +
                            key.str() + ": " + std::string(role_name(role)) +
                            " span [" + std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") outside text of " +
                            std::to_string(raw_text.size()) + " bytes");
      }
    }
  }
  return ConsolidatedArticle(std::move(key), std::move(raw_text),
                             std::move(tokens), std::move(chains),
                             std::move(span_triples));
}

// ---------------------------------------------------------------------------
// Corpus

void Corpus::add(ConsolidatedArticle article) {
  const ArticleKey key = article.key();
  auto [it, inserted] = articles_.emplace(key, std::move(article));
  if (!inserted) throw ValidationError("duplicate article " + key.str());
}

const ConsolidatedArticle* Corpus::find(const ArticleKey& key) const {
  auto it = articles_.find(key);
  return it == articles_.end() ? nullptr : &it->second;
}

const SpanTriple* Corpus::find(const AttributionKey& key) const {
  const ConsolidatedArticle* a = find(key.article());
  if (!a || key.attr_id >= a->attributions().size()) return nullptr;
  return &a->attributions()[key.attr_id];
}

CorpusLoad load_corpus(const std::filesystem::path& dir, XmlOptions options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

  CorpusLoad result;
  std::vector<fs::path> publishers;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) publishers.push_back(entry.path());
  }
  std::sort(publishers.begin(), publishers.end());

  for (const auto& pub_dir : publishers) {
    const std::string publisher = pub_dir.filename().string();
    std::map<std::string, std::set<std::string>> parts;
    for (const auto& entry : fs::directory_iterator(pub_dir)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension().string();
      if (ext == ".txt" || ext == ".xml" || ext == ".attr")
        parts[entry.path().stem().string()].insert(ext);
    }
    for (const auto& [name, exts] : parts) {
      ArticleKey key{publisher, name};
      std::string missing;
      for (const char* ext : {".txt", ".xml", ".attr"}) {
        if (!exts.count(ext)) missing += missing.empty() ? ext : std::string(", ") + ext;
      }
      if (!missing.empty()) {
        result.issues.push_back({key, "missing " + missing});
        continue;
      }
      const fs::path base = pub_dir / name;
      try {
        std::string raw = parse_raw_text(fs::path(base).concat(".txt"));
        TokenXml xml =
            parse_token_xml(fs::path(base).concat(".xml"), raw, options);
        auto triples = parse_attribution_file(fs::path(base).concat(".attr"));
        result.corpus.add(consolidate(key, std::move(raw), std::move(xml.tokens),
                                      std::move(xml.chains), std::move(triples)));
      } catch (const Error& e) {
        result.issues.push_back({key, e.what()});
      }
    }
  }
  return result;
}

}  // namespace attrib::corpus
