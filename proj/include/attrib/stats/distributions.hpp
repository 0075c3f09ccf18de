#pragma once

#include <cstddef>
#include <vector>

namespace attrib::stats {

// Regularized lower/upper incomplete gamma P(a, x), Q(a, x) for a > 0,
// x >= 0. Series below x = a + 1, Lentz continued fraction above.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail P(X >= x) of a chi-square distribution with `df` degrees of
// freedom.
double chi_square_upper_tail(double x, double df);

// ln(k!) for k in [0, n], tabulated once.
class LogFactorial {
 public:
  explicit LogFactorial(std::size_t n);
  double operator()(std::size_t k) const { return table_[k]; }
  std::size_t max() const { return table_.size() - 1; }

 private:
  std::vector<double> table_;
};

}  // namespace attrib::stats
