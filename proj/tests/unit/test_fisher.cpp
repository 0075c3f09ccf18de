#include <doctest.h>

#include <cmath>
#include <random>

#include "attrib/stats/fisher.hpp"
#include "test_support.hpp"

using namespace attrib::stats;
using attrib::testing::fisher_oracle;

TEST_CASE("fisher spot values") {
  const auto a = fisher_exact(ContingencyTable::from_counts({3, 1}, {1, 3}));
  CHECK(a.test == TestKind::kFisherExact);
  CHECK_FALSE(a.statistic.has_value());
  CHECK(a.p_value == doctest::Approx(34.0 / 70.0).epsilon(1e-14));

  const auto b = fisher_exact(ContingencyTable::from_counts({0, 5}, {5, 0}));
  CHECK(b.p_value == doctest::Approx(2.0 / 252.0).epsilon(1e-14));

  CHECK(fisher_exact(ContingencyTable::from_counts({2, 2}, {2, 2})).p_value == 1.0);
  CHECK(count_margin_tables(ContingencyTable::from_counts({3, 1}, {1, 3})) == 5.0);
  CHECK(std::exp(log_point_probability(ContingencyTable::from_counts({3, 1}, {1, 3}))) ==
        doctest::Approx(16.0 / 70.0));
}

TEST_CASE("fisher matches the integer oracle on random small tables") {
  std::mt19937_64 gen(1234);
  for (int i = 0; i < 2000; ++i) {
    const auto t = attrib::testing::random_table(gen, 2 + i % 2, 40);
    const double p = fisher_exact(t).p_value;
    const double ref = fisher_oracle(t);
    CHECK(std::fabs(p - ref) <= 1e-12 * ref);
  }
}

TEST_CASE("fisher is invariant to row and column permutation") {
  std::mt19937_64 gen(77);
  for (int i = 0; i < 300; ++i) {
    const auto t = attrib::testing::random_table(gen, 3, 30);
    const double p = fisher_exact(t).p_value;
    CHECK(fisher_exact(t.swapped_rows()).p_value == doctest::Approx(p).epsilon(1e-12));
    CHECK(fisher_exact(t.permuted_cols({2, 0, 1})).p_value == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("table counting") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 200; ++i) {
    const auto t = attrib::testing::random_table(gen, 2 + i % 3, 25);
    std::int64_t count = 0;
    std::vector<std::int64_t> x(t.cols(), 0);
    auto walk = [&](auto&& self, std::size_t j, std::int64_t left) -> void {
      if (j == t.cols()) {
        count += left == 0;
        return;
      }
      for (std::int64_t v = 0; v <= std::min(t.col_total(j), left); ++v) self(self, j + 1, left - v);
    };
    walk(walk, 0, t.row_total(0));
    CHECK(count_margin_tables(t) == static_cast<double>(count));
  }
}

TEST_CASE("monte carlo fallback") {
  const auto t = ContingencyTable::from_counts({30, 40, 30}, {45, 25, 30});
  const double exact = fisher_enumerate(t).p_value;

  FisherConfig cfg;
  cfg.max_tables = 10;
  cfg.n_sim = 20000;
  cfg.seed = 42;
  const auto mc = fisher_exact(t, cfg);
  CHECK(mc.test == TestKind::kFisherMonteCarlo);
  CHECK(mc.seed == std::optional<std::uint64_t>(42));
  CHECK(mc.p_value == fisher_exact(t, cfg).p_value);
  CHECK(mc.p_value > 0.0);
  CHECK(mc.p_value <= 1.0);

  int within = 0;
  const int runs = 40;
  const double band = 3.0 * std::sqrt(exact * (1 - exact) / static_cast<double>(cfg.n_sim));
  for (int s = 0; s < runs; ++s) {
    const double p = fisher_monte_carlo(t, cfg.n_sim, 1000 + s).p_value;
    within += std::fabs(p - exact) <= band;
  }
  CHECK(within >= runs - 1);
}

TEST_CASE("sampled first rows respect the margins") {
  const auto t = ContingencyTable::from_counts({3, 0, 7, 2}, {1, 5, 2, 9});
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto row = sample_first_row(t, rng);
    std::int64_t s = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      CHECK(row[j] >= 0);
      CHECK(row[j] <= t.col_total(j));
      s += row[j];
    }
    CHECK(s == t.row_total(0));
  }
}
