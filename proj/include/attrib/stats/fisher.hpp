#pragma once

// Fisher's exact test for 2 x L tables (Freeman-Halton for L > 2).
//
// The two-sided p-value sums the point probabilities of every table sharing
// the observed margins whose probability does not exceed the observed one.
// Past `max_tables` margin-consistent tables the p-value is estimated by
// Monte Carlo over margin-fixed tables instead.

#include <cstdint>

#include "attrib/stats/contingency.hpp"
#include "attrib/stats/random.hpp"

namespace attrib::stats {

struct FisherConfig {
  double max_tables = 1e7;
  std::uint64_t n_sim = 1'000'000;
  std::uint64_t seed = 0;
  // Relative slack on "probability <= observed".
  double tolerance = 1e-12;
};

// Number of 2 x L tables with the table's margins.
double count_margin_tables(const ContingencyTable& table);

// ln P(table | margins) under the multivariate hypergeometric null.
double log_point_probability(const ContingencyTable& table);

TestResult fisher_exact(const ContingencyTable& table, const FisherConfig& config = {});

// Exhaustive enumeration regardless of table count.
TestResult fisher_enumerate(const ContingencyTable& table, double tolerance = 1e-12);

// Monte Carlo estimate with `n_sim` margin-fixed random tables.
TestResult fisher_monte_carlo(const ContingencyTable& table, std::uint64_t n_sim,
                              std::uint64_t seed, double tolerance = 1e-12);

// One draw of row-0 counts with the table's margins, sequential
// hypergeometric fill across columns.
std::vector<std::int64_t> sample_first_row(const ContingencyTable& table, Rng& rng);

}  // namespace attrib::stats
