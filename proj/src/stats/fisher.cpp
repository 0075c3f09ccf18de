#include "attrib/stats/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "attrib/errors.hpp"
#include "attrib/stats/distributions.hpp"

namespace attrib::stats {

namespace {

// Shared pieces of the hypergeometric point probability for fixed margins.
struct MarginModel {
  std::int64_t n = 0;
  std::int64_t r0 = 0;
  std::vector<std::int64_t> cols;
  LogFactorial lf;
  double log_const = 0.0;

  explicit MarginModel(const ContingencyTable& t)
      : n(t.total()), r0(t.row_total(0)), lf(static_cast<std::size_t>(t.total())) {
    for (std::size_t c = 0; c < t.cols(); ++c) cols.push_back(t.col_total(c));
    log_const = lf(r0) + lf(n - r0) - lf(n);
    for (auto c : cols) log_const += lf(c);
  }

  // ln of the cell-factorial term for x items of column j in row 0.
  double cell_term(std::size_t j, std::int64_t x) const {
    return lf(x) + lf(cols[j] - x);
  }

  double log_prob(const std::vector<std::int64_t>& first_row) const {
    double s = log_const;
    for (std::size_t j = 0; j < cols.size(); ++j) s -= cell_term(j, first_row[j]);
    return s;
  }
};

std::string format_count(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.0f", v);
  return buf;
}

}  // namespace

double count_margin_tables(const ContingencyTable& table) {
  const auto r0 = static_cast<std::size_t>(table.row_total(0));
  std::vector<double> ways(r0 + 1, 0.0);
  ways[0] = 1.0;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    const auto cap = static_cast<std::size_t>(table.col_total(c));
    // next[s] = sum_{x=0..cap} ways[s - x], via a running window sum.
    std::vector<double> next(r0 + 1, 0.0);
    double window = 0.0;
    for (std::size_t s = 0; s <= r0; ++s) {
      window += ways[s];
      if (s > cap) window -= ways[s - cap - 1];
      next[s] = window;
    }
    ways.swap(next);
  }
  return ways[r0];
}

double log_point_probability(const ContingencyTable& table) {
  const MarginModel m(table);
  return m.log_prob(table.row(0));
}

TestResult fisher_enumerate(const ContingencyTable& table, double tolerance) {
  const MarginModel m(table);
  const std::size_t L = m.cols.size();
  const double log_obs = m.log_prob(table.row(0));
  const double threshold = log_obs + std::log1p(tolerance);

  // suffix[j] = total of columns j..L-1, to bound the remaining row-0 budget.
  std::vector<std::int64_t> suffix(L + 1, 0);
  for (std::size_t j = L; j-- > 0;) suffix[j] = suffix[j + 1] + m.cols[j];

  long double p = 0.0L;
  long double mass = 0.0L;
  std::uint64_t visited = 0;
  std::vector<std::int64_t> x(L, 0);
  std::vector<double> partial(L + 1, 0.0);
  partial[0] = m.log_const;

  // Depth-first walk over row-0 vectors with the required sum.
  auto walk = [&](auto&& self, std::size_t j, std::int64_t remaining) -> void {
    if (j + 1 == L || L == 0) {
      if (L == 0) {
        ++visited;
        p += 1.0L;
        mass += 1.0L;
        return;
      }
      const double lp = partial[j] - m.cell_term(j, remaining);
      const long double prob = std::exp(static_cast<long double>(lp));
      ++visited;
      mass += prob;
      if (lp <= threshold) p += prob;
      return;
    }
    const std::int64_t lo = std::max<std::int64_t>(0, remaining - suffix[j + 1]);
    const std::int64_t hi = std::min(m.cols[j], remaining);
    for (std::int64_t v = lo; v <= hi; ++v) {
      x[j] = v;
      partial[j + 1] = partial[j] - m.cell_term(j, v);
      self(self, j + 1, remaining - v);
    }
  };
  walk(walk, 0, m.r0);

  TestResult out;
  out.test = TestKind::kFisherExact;
  // Dividing by the enumerated mass cancels rounding in the shared constant.
  out.p_value = std::clamp(static_cast<double>(p / mass), 0.0, 1.0);
  out.method_note = "Fisher exact, two-sided by point probability; enumerated " +
                    std::to_string(visited) + " margin-consistent tables" +
                    (L > 2 ? " (Freeman-Halton)" : "");
  return out;
}

namespace {

// Sequential hypergeometric fill of row 0 into `row`.
void draw_first_row(const MarginModel& m, Rng& rng, std::vector<std::int64_t>& row) {
  const auto& lf = m.lf;
  row.assign(m.cols.size(), 0);
  std::int64_t N = m.n;
  std::int64_t K = m.r0;
  for (std::size_t j = 0; j < m.cols.size(); ++j) {
    const std::int64_t draws = m.cols[j];
    if (j + 1 == m.cols.size()) {
      row[j] = K;
      break;
    }
    const std::int64_t lo = std::max<std::int64_t>(0, draws - (N - K));
    const std::int64_t hi = std::min(draws, K);
    std::int64_t pick = lo;
    if (hi > lo) {
      // Inverse CDF over the hypergeometric support, expanding outward from
      // the mode so the walk length scales with the standard deviation.
      const auto dN = static_cast<double>(N);
      std::int64_t mode = static_cast<std::int64_t>(
          std::floor((draws + 1.0) * (K + 1.0) / (dN + 2.0)));
      mode = std::clamp(mode, lo, hi);
      const double p_mode =
          std::exp(lf(K) - lf(mode) - lf(K - mode) + lf(N - K) - lf(draws - mode) -
                   lf(N - K - draws + mode) - lf(N) + lf(draws) + lf(N - draws));
      double u = rng.unit() - p_mode;
      pick = mode;
      std::int64_t down = mode;
      std::int64_t up = mode;
      double p_down = p_mode;
      double p_up = p_mode;
      while (u > 0.0 && (down > lo || up < hi)) {
        if (up < hi) {
          const double x = static_cast<double>(up);
          p_up *= (K - x) * (draws - x) / ((x + 1.0) * (dN - K - draws + x + 1.0));
          ++up;
          u -= p_up;
          if (u <= 0.0) {
            pick = up;
            break;
          }
        }
        if (down > lo) {
          const double x = static_cast<double>(down);
          p_down *= x * (dN - K - draws + x) / ((K - x + 1.0) * (draws - x + 1.0));
          --down;
          u -= p_down;
          if (u <= 0.0) {
            pick = down;
            break;
          }
        }
      }
      // Rounding can leave u barely positive after the whole support.
      if (u > 0.0) pick = up;
    }
    row[j] = pick;
    K -= pick;
    N -= draws;
  }
}

}  // namespace

std::vector<std::int64_t> sample_first_row(const ContingencyTable& table, Rng& rng) {
  const MarginModel m(table);
  std::vector<std::int64_t> row;
  draw_first_row(m, rng, row);
  return row;
}

TestResult fisher_monte_carlo(const ContingencyTable& table, std::uint64_t n_sim,
                              std::uint64_t seed, double tolerance) {
  if (n_sim == 0) throw Error("Monte Carlo Fisher needs n_sim >= 1");
  const MarginModel m(table);
  const double threshold = m.log_prob(table.row(0)) + std::log1p(tolerance);
  Rng rng(seed, "fisher_monte_carlo");
  std::uint64_t hits = 0;
  std::vector<std::int64_t> row;
  for (std::uint64_t i = 0; i < n_sim; ++i) {
    draw_first_row(m, rng, row);
    if (m.log_prob(row) <= threshold) ++hits;
  }
  TestResult out;
  out.test = TestKind::kFisherMonteCarlo;
  out.p_value = static_cast<double>(hits + 1) / static_cast<double>(n_sim + 1);
  out.seed = seed;
  out.method_note = "Fisher exact by Monte Carlo, " + std::to_string(n_sim) +
                    " margin-fixed tables, p = (1 + hits) / (1 + n_sim)";
  return out;
}

TestResult fisher_exact(const ContingencyTable& table, const FisherConfig& config) {
  const double count = count_margin_tables(table);
  if (count > config.max_tables) {
    TestResult out = fisher_monte_carlo(table, config.n_sim, config.seed, config.tolerance);
    out.method_note += "; enumeration skipped (" + format_count(count) +
                       " tables exceed budget " + format_count(config.max_tables) + ")";
    return out;
  }
  return fisher_enumerate(table, config.tolerance);
}

}  // namespace attrib::stats
