#include "attrib/stats/distributions.hpp"

#include <cmath>
#include <limits>

#include "attrib/errors.hpp"

namespace attrib::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// exp(-x + a ln x - ln Gamma(a))
double gamma_prefactor(double a, double x) {
  return std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double series_p(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * gamma_prefactor(a, x);
}

double continued_fraction_q(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return gamma_prefactor(a, x) * h;
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x))
    throw Error("incomplete gamma needs a > 0 and x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return series_p(a, x);
  return 1.0 - continued_fraction_q(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - series_p(a, x);
  return continued_fraction_q(a, x);
}

double chi_square_upper_tail(double x, double df) {
  if (!(df > 0.0)) throw Error("chi-square needs df > 0");
  if (std::isnan(x)) throw Error("chi-square statistic is NaN");
  if (x <= 0.0) return 1.0;
  const double q = regularized_gamma_q(0.5 * df, 0.5 * x);
  return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

LogFactorial::LogFactorial(std::size_t n) : table_(n + 1, 0.0) {
  for (std::size_t k = 2; k <= n; ++k)
    table_[k] = std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace attrib::stats
