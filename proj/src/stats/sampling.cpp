#include "attrib/stats/sampling.hpp"

#include <algorithm>
#include <numeric>

#include "attrib/errors.hpp"
#include "attrib/stats/random.hpp"

namespace attrib::stats {

namespace {

using labels::SourceLabel;

std::bitset<7> bit(SourceLabel l) {
  std::bitset<7> b;
  b.set(static_cast<std::size_t>(l));
  return b;
}

std::optional<std::bitset<7>> source_group(const std::string& name) {
  const auto trump = bit(SourceLabel::kTrump);
  const auto clinton = bit(SourceLabel::kClinton);
  const std::bitset<7> all((1u << 7) - 1);
  if (name == "non_trump") return all & ~trump;
  if (name == "non_clinton") return all & ~clinton;
  if (name == "non_trump_or_clinton" || name == "other") return all & ~trump & ~clinton;
  if (auto l = labels::parse_enum<SourceLabel>(name)) return bit(*l);
  return std::nullopt;
}

}  // namespace

PopulationSpec PopulationSpec::parse(const std::string& name,
                                     const std::set<std::string>& publishers) {
  PopulationSpec spec;
  spec.name_ = name;
  if (auto g = source_group(name)) {
    spec.sources_ = *g;
    return spec;
  }
  if (publishers.count(name)) {
    spec.sources_.set();
    spec.publisher_ = name;
    return spec;
  }
  const auto dash = name.find('-');
  if (dash != std::string::npos) {
    auto g = source_group(name.substr(0, dash));
    const std::string pub = name.substr(dash + 1);
    if (g && publishers.count(pub)) {
      spec.sources_ = *g;
      spec.publisher_ = pub;
      return spec;
    }
  }
  throw Error("unknown population '" + name + "'");
}

bool PopulationSpec::matches(const labels::LabeledAttribution& row) const {
  if (publisher_ && row.key.publisher_name != *publisher_) return false;
  return sources_.test(static_cast<std::size_t>(row.source_label));
}

Rows PopulationSpec::select(const labels::Dataset& dataset) const {
  Rows out;
  for (const auto& row : dataset.rows()) {
    if (matches(row)) out.push_back(&row);
  }
  return out;
}

std::set<std::string> publishers_of(const labels::Dataset& dataset) {
  std::set<std::string> out;
  for (const auto& row : dataset.rows()) out.insert(row.key.publisher_name);
  return out;
}

std::size_t sample_size(std::size_t size_a, std::size_t size_b, bool involves_publisher) {
  const std::size_t m = std::min(size_a, size_b);
  if (involves_publisher) return (3 * m) / 4;
  return std::min<std::size_t>(100, m);
}

Rows draw_without_replacement(const Rows& rows, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, rows.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  Rows out;
  out.reserve(k);
  for (auto i : idx) out.push_back(rows[i]);
  return out;
}

std::pair<Rows, Rows> sample_populations(const labels::Dataset& dataset,
                                         const PopulationSpec& a,
                                         const PopulationSpec& b,
                                         std::uint64_t seed) {
  const Rows all_a = a.select(dataset);
  const Rows all_b = b.select(dataset);
  if (all_a.empty()) throw EmptyPopulation("population '" + a.name() + "' is empty");
  if (all_b.empty()) throw EmptyPopulation("population '" + b.name() + "' is empty");
  const std::size_t n = sample_size(all_a.size(), all_b.size(),
                                    a.involves_publisher() || b.involves_publisher());
  Rng rng(seed, "sample:" + a.name() + ":" + b.name());
  Rows sa = draw_without_replacement(all_a, n, rng);
  Rows sb = draw_without_replacement(all_b, n, rng);
  return {std::move(sa), std::move(sb)};
}

}  // namespace attrib::stats
