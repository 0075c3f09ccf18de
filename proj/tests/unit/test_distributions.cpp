#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "attrib/stats/distributions.hpp"

using namespace attrib::stats;

TEST_CASE("chi-square upper tail matches an independent incomplete gamma") {
  for (int df = 1; df <= 20; ++df) {
    for (double x = 0.0; x <= 100.0; x += 0.25) {
      const double ours = chi_square_upper_tail(x, df);
      const double ref = boost::math::gamma_q(df / 2.0, x / 2.0);
      CHECK(std::fabs(ours - ref) <= 1e-10 * std::max(1.0, ref));
    }
  }
}

TEST_CASE("chi-square tail landmarks") {
  CHECK(chi_square_upper_tail(0.0, 1) == 1.0);
  CHECK(chi_square_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_upper_tail(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("regularized gamma halves sum to one") {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double x : {0.1, 1.0, 3.0, 11.0, 40.0}) {
      CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) ==
            doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("log factorial table") {
  const LogFactorial lf(200);
  CHECK(lf.max() == 200);
  CHECK(lf(0) == 0.0);
  CHECK(lf(1) == 0.0);
  CHECK(lf(5) == doctest::Approx(std::log(120.0)));
  for (std::size_t k = 0; k <= 200; k += 7)
    CHECK(lf(k) == doctest::Approx(std::lgamma(static_cast<double>(k) + 1.0)).epsilon(1e-12));
}
