#pragma once

// Named attribution populations and the contrast sampling rule.
//
// A population name is a source group (`trump`, `clinton`, `non_trump`,
// `non_clinton`, `non_trump_or_clinton`, `other`, or any single source
// label), a publisher, or `<source group>-<publisher>`.

#include <bitset>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "attrib/label_store.hpp"
#include "attrib/stats/contingency.hpp"
#include "attrib/stats/random.hpp"

namespace attrib::stats {

class PopulationSpec {
 public:
  // Throws Error for names that resolve to nothing.
  static PopulationSpec parse(const std::string& name,
                              const std::set<std::string>& publishers);

  const std::string& name() const { return name_; }
  bool involves_publisher() const { return publisher_.has_value(); }
  bool matches(const labels::LabeledAttribution& row) const;
  Rows select(const labels::Dataset& dataset) const;

 private:
  std::string name_;
  std::bitset<7> sources_;  // indexed by SourceLabel
  std::optional<std::string> publisher_;
};

std::set<std::string> publishers_of(const labels::Dataset& dataset);

// Per-side draw size: min(100, |A|, |B|) when both populations are pure
// source groups, floor(0.75 * min(|A|, |B|)) when either involves a
// publisher.
std::size_t sample_size(std::size_t size_a, std::size_t size_b, bool involves_publisher);

// Draws without replacement, independently seeded per contrast. Samples
// come back in dataset (key) order. Throws EmptyPopulation.
std::pair<Rows, Rows> sample_populations(const labels::Dataset& dataset,
                                         const PopulationSpec& a,
                                         const PopulationSpec& b,
                                         std::uint64_t seed);

// Uniform k-subset of `rows` by partial Fisher-Yates, returned in input order.
Rows draw_without_replacement(const Rows& rows, std::size_t k, Rng& rng);

}  // namespace attrib::stats
