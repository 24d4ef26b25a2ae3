#include <doctest.h>

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "support/oracles.hpp"
#include "trunctest/errors.hpp"
#include "trunctest/hardinstance.hpp"
#include "trunctest/normal.hpp"
#include "trunctest/sampling.hpp"
#include "trunctest/statistics.hpp"
#include "trunctest/truncation.hpp"

using namespace trunctest;

namespace {
constexpr double kEpsLadder[] = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
double phi(double x) { return std::exp(-0.5 * x * x) / 2.5066282746310002; }
}  // namespace

TEST_SUITE_BEGIN("hardinstance");

TEST_CASE("calibration solves both the quantile and the zero-mean equations") {
  for (double eps : kEpsLadder) {
    const auto inst = calibrate_hard_instance(eps);
    // mass of (-inf, b] under N(alpha, 1) is 1 - eps
    const double m = normal_cdf(inst.b - inst.alpha);
    CHECK(std::abs(m - (1.0 - eps)) <= 1e-10);
    // E[A] = 0 by quadrature
    const double mass_o =
        oracles::simpson_lower_tail([&](double x) { return phi(x - inst.alpha); }, inst.b, 1e-14);
    const double m1_o = oracles::simpson_lower_tail(
        [&](double x) { return x * phi(x - inst.alpha); }, inst.b, 1e-14);
    CHECK(std::abs(m1_o / mass_o) <= 1e-10);
  }
  CHECK_THROWS_AS(calibrate_hard_instance(0.0), PreconditionError);
  CHECK_THROWS_AS(calibrate_hard_instance(0.25), PreconditionError);
}

TEST_CASE("eps = 0.1 alpha matches the explicit identity") {
  const auto inst = calibrate_hard_instance(0.1);
  const double t = erf_inv(0.8);
  CHECK(inst.alpha ==
        doctest::Approx(std::exp(-t * t) / (2.5066282746310002 * 0.9)).epsilon(1e-15));
  CHECK(inst.alpha == doctest::Approx(0.194998146591652).epsilon(1e-12));
  CHECK(inst.b == doctest::Approx(1.4765497121362525).epsilon(1e-12));
}

TEST_CASE("alpha and b are monotone along a decreasing eps ladder") {
  double prev_alpha = std::numeric_limits<double>::infinity();
  double prev_b = -std::numeric_limits<double>::infinity();
  for (double eps = 0.2; eps >= 1e-4; eps *= 0.5) {
    const auto inst = calibrate_hard_instance(eps);
    CHECK(inst.alpha < prev_alpha);  // alpha -> 0
    CHECK(inst.b > prev_b);          // b -> +inf
    prev_alpha = inst.alpha;
    prev_b = inst.b;
  }
}

TEST_CASE("realized alpha ratio sits inside the frozen bracket") {
  for (double eps : kEpsLadder) {
    const auto inst = calibrate_hard_instance(eps);
    const double ratio = inst.alpha / (eps * std::sqrt(std::log(1.0 / eps)));
    CHECK(ratio >= 0.3);
    CHECK(ratio <= 3.0);
  }
}

TEST_CASE("chi-square closed form vs adaptive quadrature, and the 2(eps+alpha^2) cap") {
  for (double eps : kEpsLadder) {
    const auto inst = calibrate_hard_instance(eps);
    const double closed = chi_square_closed_form(inst);
    // chi^2 = int (A density)^2 / phi - 1 on (-inf, b]
    const double a = inst.alpha;
    const double scale = 1.0 / (1.0 - eps);
    const double quad = oracles::simpson_lower_tail(
                            [&](double x) {
                              const double da = phi(x - a) * scale;
                              return da * da / phi(x);
                            },
                            inst.b, 1e-12) -
                        1.0;
    CHECK(std::abs(closed - quad) <= 1e-8);
    CHECK(closed <= 2.0 * (eps + a * a));
    CHECK(closed > 0.0);
  }
}

TEST_CASE("chi-square of the untruncated zero-mean instance is exactly zero") {
  const HardInstance1D ident{0.0, 0.0, std::numeric_limits<double>::infinity()};
  CHECK(chi_square_closed_form(ident) == 0.0);
  CHECK(sample_complexity_floor(ident, 5) == std::numeric_limits<double>::infinity());
}

TEST_CASE("sample complexity floor composes and scales linearly in d") {
  const auto inst = calibrate_hard_instance(0.1);
  const double chi2 = chi_square_closed_form(inst);
  CHECK(sample_complexity_floor(inst, 32) == doctest::Approx(32.0 / (8.0 * chi2)));
  CHECK(sample_complexity_floor(inst, 64) / sample_complexity_floor(inst, 32) ==
        doctest::Approx(2.0));
}

TEST_CASE("embed: unit direction, d = 1 reduces to A itself") {
  const auto inst = calibrate_hard_instance(0.1);
  const auto emb1 = embed(inst, 1, 9);
  CHECK(std::abs(std::abs(emb1.direction[0]) - 1.0) <= 1e-12);

  const auto emb = embed(inst, 24, 10);
  CHECK(std::abs(emb.direction.norm() - 1.0) <= 1e-12);

  const auto spec = to_sampling_spec(emb);
  CHECK(spec.set.kind() == SetKind::HalfSpaceTail);
  CHECK(spec.mu.isApprox(inst.alpha * emb.direction));
}

TEST_CASE("embedded factorization: marginal along v is A, orthogonal is N(0,1)") {
  const auto inst = calibrate_hard_instance(0.1);
  const auto emb = embed(inst, 8, 1234);
  const auto spec = to_sampling_spec(emb);
  const auto batch = sample_truncated(spec, 40'000, 555);

  // KS of <v, x> against the A CDF (quadrature oracle)
  const double mass_o =
      oracles::simpson_lower_tail([&](double x) { return phi(x - inst.alpha); }, inst.b, 1e-13);
  std::vector<double> along(static_cast<std::size_t>(batch.n()));
  for (std::int64_t i = 0; i < batch.n(); ++i) {
    along[static_cast<std::size_t>(i)] = emb.direction.dot(batch.data.row(i).transpose());
  }
  const double d_along = oracles::ks_against_density(
      std::move(along), [&](double x) { return phi(x - inst.alpha); }, inst.b - 60.0, mass_o);
  CHECK(d_along < ks_critical_value(batch.n(), 0.01));

  // KS of <u, x> for u orthogonal to v against N(0,1): membership depends only
  // on <v, x>, so this marginal is exactly standard normal.
  Vec u = Vec::Zero(8);
  u[0] = 1.0;
  u -= emb.direction * emb.direction[0];
  u.normalize();
  std::vector<double> ortho(static_cast<std::size_t>(batch.n()));
  for (std::int64_t i = 0; i < batch.n(); ++i) {
    ortho[static_cast<std::size_t>(i)] = u.dot(batch.data.row(i).transpose());
  }
  CHECK(ks_statistic(std::move(ortho), [](double t) { return normal_cdf(t); }) <
        ks_critical_value(batch.n(), 0.01));
}

TEST_CASE("first-moment fooling: the embedded truncated mean is the zero vector") {
  const auto inst = calibrate_hard_instance(0.1);
  const auto emb = embed(inst, 16, 77);
  const auto spec = to_sampling_spec(emb);
  const auto est = truncated_mean(spec.mu, spec.set);
  CHECK(est.value.norm() <= 1e-10);  // analytic half-space path: exactly zero by calibration
}

TEST_CASE("json round trip") {
  const auto inst = calibrate_hard_instance(0.05);
  const auto emb = embed(inst, 6, 42);
  const auto back = embedded_from_json(to_json(emb));
  CHECK(back.one_d.alpha == emb.one_d.alpha);
  CHECK(back.one_d.b == emb.one_d.b);
  CHECK((back.direction - emb.direction).norm() == 0.0);
}

TEST_SUITE_END();
