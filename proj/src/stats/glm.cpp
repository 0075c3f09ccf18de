#include "attrib/stats/glm.hpp"

#include <algorithm>
#include <cmath>

#include "attrib/errors.hpp"
#include "attrib/stats/distributions.hpp"

namespace attrib::stats {

std::size_t CrossClassification::cell_count() const {
  std::size_t n = 1;
  for (const auto& l : levels) n *= l.size();
  return n;
}

std::vector<std::size_t> CrossClassification::level_indices(std::size_t cell) const {
  std::vector<std::size_t> idx(levels.size(), 0);
  for (std::size_t f = levels.size(); f-- > 0;) {
    idx[f] = cell % levels[f].size();
    cell /= levels[f].size();
  }
  return idx;
}

CrossClassification cross_classification(const ContingencyTable& table) {
  CrossClassification cc;
  cc.factor_names = {"population", "label"};
  cc.levels = {{table.row_names()[0], table.row_names()[1]}, table.col_names()};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c)
      cc.counts.push_back(static_cast<double>(table.at(r, c)));
  }
  return cc;
}

Design make_design(const CrossClassification& cc, const std::vector<Term>& terms) {
  const std::size_t n = cc.cell_count();
  if (cc.counts.size() != n)
    throw DimensionMismatch("cross-classification has " +
                            std::to_string(cc.counts.size()) + " counts for " +
                            std::to_string(n) + " cells");
  std::vector<std::vector<std::size_t>> cell_levels(n);
  for (std::size_t i = 0; i < n; ++i) cell_levels[i] = cc.level_indices(i);

  std::vector<std::string> labels{"(intercept)"};
  std::vector<Eigen::VectorXd> columns{Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n))};

  for (const Term& term : terms) {
    if (term.empty()) continue;
    for (auto f : term) {
      if (f >= cc.levels.size()) throw Error("term references unknown factor");
    }
    // Enumerate non-baseline level combinations of the member factors.
    std::vector<std::size_t> combo(term.size(), 1);
    bool any = true;
    for (auto f : term) any = any && cc.levels[f].size() > 1;
    while (any) {
      std::string label;
      Eigen::VectorXd col(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < term.size(); ++k) {
        if (k) label += ":";
        label += cc.factor_names[term[k]] + "=" + cc.levels[term[k]][combo[k]];
      }
      for (std::size_t i = 0; i < n; ++i) {
        bool on = true;
        for (std::size_t k = 0; k < term.size(); ++k)
          on = on && cell_levels[i][term[k]] == combo[k];
        col[static_cast<Eigen::Index>(i)] = on ? 1.0 : 0.0;
      }
      labels.push_back(std::move(label));
      columns.push_back(std::move(col));
      // Odometer increment, last member fastest.
      std::size_t k = term.size();
      while (k-- > 0) {
        if (++combo[k] < cc.levels[term[k]].size()) break;
        combo[k] = 1;
        if (k == 0) any = false;
      }
    }
  }

  Design d;
  d.labels = std::move(labels);
  d.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j)
    d.matrix.col(static_cast<Eigen::Index>(j)) = columns[j];
  return d;
}

Design independence_design(const CrossClassification& cc) {
  std::vector<Term> terms;
  for (std::size_t f = 0; f < cc.levels.size(); ++f) terms.push_back({f});
  return make_design(cc, terms);
}

Design saturated_design(const CrossClassification& cc) {
  const std::size_t k = cc.levels.size();
  std::vector<Term> terms;
  // All non-empty factor subsets, by size then lexicographically.
  for (std::size_t size = 1; size <= k; ++size) {
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
      Term t;
      for (std::size_t f = 0; f < k; ++f) {
        if (mask & (std::size_t{1} << f)) t.push_back(f);
      }
      if (t.size() == size) terms.push_back(std::move(t));
    }
  }
  return make_design(cc, terms);
}

std::size_t design_rank(const Eigen::MatrixXd& x) {
  if (x.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  return static_cast<std::size_t>(qr.rank());
}

double poisson_deviance(std::span<const double> observed,
                        std::span<const double> fitted) {
  if (observed.size() != fitted.size())
    throw DimensionMismatch("deviance needs aligned observed and fitted counts");
  double d = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double y = observed[i];
    const double mu = fitted[i];
    if (y > 0.0) d += y * std::log(y / mu);
    d -= y - mu;
  }
  return std::max(0.0, 2.0 * d);
}

GlmFit fit_loglinear(std::span<const double> cells, const Design& design,
                     const IrlsOptions& options) {
  const auto n = static_cast<Eigen::Index>(cells.size());
  const Eigen::MatrixXd& X = design.matrix;
  if (X.rows() != n)
    throw DimensionMismatch("design has " + std::to_string(X.rows()) + " rows for " +
                            std::to_string(cells.size()) + " cells");
  if (design_rank(X) < static_cast<std::size_t>(X.cols()))
    throw RankDeficientDesign("design with " + std::to_string(X.cols()) +
                              " columns has rank " + std::to_string(design_rank(X)));
  for (double y : cells) {
    if (!(y >= 0.0) || !std::isfinite(y)) throw Error("cell counts must be finite and >= 0");
  }

  const Eigen::Map<const Eigen::VectorXd> y(cells.data(), n);
  Eigen::VectorXd mu = y.array() + 0.5;
  Eigen::VectorXd eta = mu.array().log();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  auto deviance_of = [&](const Eigen::VectorXd& m) {
    return poisson_deviance(cells, std::span<const double>(m.data(), cells.size()));
  };
  double dev = deviance_of(mu);

  GlmFit fit;
  fit.design_labels = design.labels;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd z = eta.array() + (y - mu).array() / mu.array();
    const Eigen::VectorXd sw = mu.array().sqrt();
    const Eigen::MatrixXd A = sw.asDiagonal() * X;
    const Eigen::VectorXd b = sw.cwiseProduct(z);
    const Eigen::VectorXd next = A.colPivHouseholderQr().solve(b);
    if (!next.allFinite()) throw NonFiniteIterate("IRLS produced non-finite coefficients");

    eta = X * next;
    mu = eta.array().exp();
    if (!mu.allFinite()) throw NonFiniteIterate("IRLS produced non-finite fitted counts");
    const double next_dev = deviance_of(mu);

    const double step = (next - beta).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, next.lpNorm<Eigen::Infinity>());
    const bool small_dev = std::fabs(next_dev - dev) < options.deviance_tol;
    const bool small_step = it > 1 && step / scale < options.beta_rel_tol;
    beta = next;
    dev = next_dev;
    fit.iterations = it;
    if (small_dev || small_step) {
      fit.converged = true;
      break;
    }
  }

  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.fitted_counts.assign(mu.data(), mu.data() + mu.size());
  fit.deviance = dev;
  return fit;
}

namespace {

bool column_space_contains(const Eigen::MatrixXd& outer, const Eigen::MatrixXd& inner) {
  if (inner.cols() == 0) return true;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(outer);
  const Eigen::MatrixXd coef = qr.solve(inner);
  const double resid = (outer * coef - inner).norm();
  return resid <= 1e-8 * std::max(1.0, inner.norm());
}

}  // namespace

TestResult interaction_test(std::span<const double> cells, const Design& full,
                            const Design& reduced, const IrlsOptions& options) {
  if (full.matrix.rows() != reduced.matrix.rows())
    throw DimensionMismatch("designs cover different cells");
  if (!column_space_contains(full.matrix, reduced.matrix))
    throw NotNested("reduced design is not nested in the full design");
  const GlmFit f = fit_loglinear(cells, full, options);
  const GlmFit r = fit_loglinear(cells, reduced, options);
  const int df = static_cast<int>(design_rank(full.matrix)) -
                 static_cast<int>(design_rank(reduced.matrix));

  TestResult out;
  out.test = TestKind::kLoglinearLr;
  out.statistic = std::max(0.0, r.deviance - f.deviance);
  out.p_value = df > 0 ? chi_square_upper_tail(*out.statistic, df) : 1.0;
  if (df > 0) out.df = df;
  out.method_note = "Poisson log-linear likelihood ratio: deviance " +
                    std::to_string(r.deviance) + " (reduced, " +
                    std::to_string(reduced.matrix.cols()) + " terms) vs " +
                    std::to_string(f.deviance) + " (full, " +
                    std::to_string(full.matrix.cols()) + " terms)";
  if (!f.converged || !r.converged) out.method_note += "; IRLS hit the iteration cap";
  return out;
}

std::vector<double> pearson_residuals(std::span<const double> cells, const GlmFit& fit) {
  if (cells.size() != fit.fitted_counts.size())
    throw DimensionMismatch("residuals need aligned cells and fitted counts");
  std::vector<double> out(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double mu = fit.fitted_counts[i];
    if (!(mu > 0.0)) throw ZeroExpected("fitted count is zero");
    out[i] = (cells[i] - mu) / std::sqrt(mu);
  }
  return out;
}

}  // namespace attrib::stats
