#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "trunctest/errors.hpp"
#include "trunctest/normal.hpp"

using namespace trunctest;

TEST_SUITE_BEGIN("normal");

TEST_CASE("std::erf agrees with independent series / continued-fraction oracles") {
  for (double x = 0.05; x <= 2.0; x += 0.05) {
    const double ref = oracles::erf_series(x);
    CHECK(std::abs(std::erf(x) - ref) <= 1e-14 * std::abs(ref));
  }
  for (double x = 1.0; x <= 8.0; x += 0.25) {
    const double ref = oracles::erfc_continued_fraction(x);
    CHECK(std::abs(std::erfc(x) - ref) <= 2e-14 * ref);
  }
}

TEST_CASE("erf_inv hits frozen high-precision values") {
  // Digits derived once by root-finding the series/continued-fraction erf
  // oracle to 30 significant digits, then frozen.
  struct Spot {
    double p, x;
  };
  const Spot spots[] = {
      {0.6, 0.5951160814499948500},  {0.8, 0.9061938024368232201},
      {0.9, 1.1630871536766740867},  {0.96, 1.4522197815622468501},
      {0.98, 1.6449763571331870502}, {0.99, 1.8213863677184496730},
  };
  for (const auto& s : spots) {
    CHECK(std::abs(erf_inv(s.p) - s.x) <= 1e-14 * s.x);
    CHECK(std::abs(erf_inv(-s.p) + s.x) <= 1e-14 * s.x);
  }
}

TEST_CASE("erf_inv round-trips through std::erf to 1e-14 relative") {
  for (double p = -0.9999; p < 1.0; p += 0.01230173) {
    const double x = erf_inv(p);
    CHECK(std::erf(x) == doctest::Approx(p).epsilon(1e-14));
  }
  // tiny arguments go through the series branch
  for (double p : {1e-9, 1e-8, -3e-8}) {
    CHECK(std::erf(erf_inv(p)) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("normal_cdf_inv round-trips and hits the 0.99 quantile") {
  // The 0.99 quantile, derived by bisecting a CDF built from the
  // continued-fraction erfc oracle.
  const double q99 = oracles::bisect_inverse(
      [](double x) { return 1.0 - 0.5 * oracles::erfc_continued_fraction(x / 1.4142135623730951); },
      0.99, 2.0, 3.0);
  CHECK(q99 == doctest::Approx(2.3263478740408408).epsilon(1e-12));
  CHECK(normal_cdf_inv(0.99) == doctest::Approx(q99).epsilon(1e-12));
  CHECK(normal_cdf_inv(0.99) == doctest::Approx(2.3263478740408408).epsilon(1e-14));
  CHECK(normal_cdf_inv(0.995) == doctest::Approx(2.5758293035489008).epsilon(1e-14));
  CHECK(normal_cdf_inv(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  for (double p = 1e-10; p < 1.0; p = p * 1.7 + 0.013) {
    CHECK(normal_cdf(normal_cdf_inv(p)) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(normal_cdf_inv(0.0), PreconditionError);
  CHECK_THROWS_AS(normal_cdf_inv(1.0), PreconditionError);
  CHECK_THROWS_AS(erf_inv(1.0), PreconditionError);
  CHECK_THROWS_AS(erf_inv(-1.5), PreconditionError);
}

TEST_CASE("truncated moments of the lower tail match quadrature") {
  // mean and variance of N(0,1) | x <= b against the Simpson oracle
  for (double b : {-1.0, 0.0, 0.8416212335729142, 2.3263478740408408}) {
    const double mass = oracles::simpson_lower_tail(
        [](double x) { return std::exp(-0.5 * x * x) / 2.5066282746310002; }, b, 1e-14);
    const double m1 = oracles::simpson_lower_tail(
        [](double x) { return x * std::exp(-0.5 * x * x) / 2.5066282746310002; }, b, 1e-14);
    const double m2 = oracles::simpson_lower_tail(
        [](double x) { return x * x * std::exp(-0.5 * x * x) / 2.5066282746310002; }, b, 1e-14);
    const auto tm = lower_truncated_moments(b);
    CHECK(tm.mean == doctest::Approx(m1 / mass).epsilon(1e-8));
    const double var = m2 / mass - (m1 / mass) * (m1 / mass);
    CHECK(tm.var == doctest::Approx(var).epsilon(1e-8));
  }
}

TEST_SUITE_END();
