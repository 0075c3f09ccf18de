#pragma once

// Poisson log-linear models over cross-classified counts, fitted by
// iteratively reweighted least squares, and likelihood-ratio (deviance
// difference) tests between nested designs.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "attrib/stats/contingency.hpp"

namespace attrib::stats {

// Counts over the cartesian product of factor levels, row-major: the last
// factor varies fastest.
struct CrossClassification {
  std::vector<std::string> factor_names;
  std::vector<std::vector<std::string>> levels;
  std::vector<double> counts;

  std::size_t cell_count() const;
  // Level index of every factor for cell `cell`.
  std::vector<std::size_t> level_indices(std::size_t cell) const;
};

CrossClassification cross_classification(const ContingencyTable& table);

struct Design {
  std::vector<std::string> labels;  // one per column
  Eigen::MatrixXd matrix;           // cells x terms
};

// A model term: the set of factors it interacts (empty = intercept).
using Term = std::vector<std::size_t>;

// Intercept plus the given terms, treatment-coded with the first level of
// each factor as baseline. Interaction columns are products of the member
// factors' indicator columns.
Design make_design(const CrossClassification& cc, const std::vector<Term>& terms);
Design independence_design(const CrossClassification& cc);
Design saturated_design(const CrossClassification& cc);

struct IrlsOptions {
  double deviance_tol = 1e-10;
  double beta_rel_tol = 1e-8;
  int max_iterations = 100;
};

struct GlmFit {
  std::vector<std::string> design_labels;
  std::vector<double> coefficients;
  std::vector<double> fitted_counts;
  double deviance = 0.0;
  int iterations = 0;
  bool converged = false;
};

std::size_t design_rank(const Eigen::MatrixXd& x);

// 2 * sum[y ln(y / mu) - (y - mu)] with 0 ln 0 = 0.
double poisson_deviance(std::span<const double> observed,
                        std::span<const double> fitted);

// Throws RankDeficientDesign, NonFiniteIterate.
GlmFit fit_loglinear(std::span<const double> cells, const Design& design,
                     const IrlsOptions& options = {});

// Deviance(reduced) - deviance(full) against chi-square with
// rank(full) - rank(reduced) df. Throws NotNested.
TestResult interaction_test(std::span<const double> cells, const Design& full,
                            const Design& reduced, const IrlsOptions& options = {});

// (O - mu) / sqrt(mu) per cell. Throws ZeroExpected.
std::vector<double> pearson_residuals(std::span<const double> cells,
                                      const GlmFit& fit);

}  // namespace attrib::stats
