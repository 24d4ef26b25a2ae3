#include "trunctest/hardinstance.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "trunctest/errors.hpp"
#include "trunctest/normal.hpp"
#include "trunctest/rng.hpp"

namespace trunctest {

HardInstance1D calibrate_hard_instance(double eps) {
  if (!(eps > 0.0 && eps <= 0.2)) {
    throw PreconditionError("calibrate_hard_instance: eps must lie in (0, 0.2]");
  }
  const double t = erf_inv(1.0 - 2.0 * eps);
  const double alpha = std::exp(-t * t) / (2.5066282746310002 * (1.0 - eps));
  const double b = alpha + 1.4142135623730951 * t;
  return HardInstance1D{eps, alpha, b};
}

double chi_square_closed_form(const HardInstance1D& inst) {
  const double one_minus = 1.0 - inst.eps;
  return normal_cdf(inst.b - 2.0 * inst.alpha) * std::exp(inst.alpha * inst.alpha) /
             (one_minus * one_minus) -
         1.0;
}

double sample_complexity_floor(const HardInstance1D& inst, int d) {
  if (d < 1) throw PreconditionError("sample_complexity_floor: d must be >= 1");
  const double chi2 = chi_square_closed_form(inst);
  if (chi2 <= 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(d) / (8.0 * chi2);
}

EmbeddedHardInstance embed(const HardInstance1D& inst, int d, std::uint64_t seed) {
  if (d < 1) throw PreconditionError("embed: d must be >= 1");
  // Normalized Gaussian vector: exactly uniform on the sphere.
  SplitRng rng(seed);
  Vec v(d);
  double norm2 = 0.0;
  do {
    for (int k = 0; k < d; ++k) v[k] = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);
  v /= std::sqrt(norm2);
  return EmbeddedHardInstance{inst, std::move(v)};
}

TruncatedGaussianSpec to_sampling_spec(const EmbeddedHardInstance& inst) {
  Vec mu = inst.one_d.alpha * inst.direction;
  return TruncatedGaussianSpec(std::move(mu),
                               TruncationSet::half_space_tail(inst.direction, inst.one_d.b));
}

nlohmann::json to_json(const EmbeddedHardInstance& inst) {
  return nlohmann::json{
      {"eps", inst.one_d.eps},
      {"alpha", inst.one_d.alpha},
      {"b", inst.one_d.b},
      {"dim", inst.dim()},
      {"direction",
       std::vector<double>(inst.direction.data(), inst.direction.data() + inst.direction.size())}};
}

EmbeddedHardInstance embedded_from_json(const nlohmann::json& j) {
  HardInstance1D one_d{j.at("eps").get<double>(), j.at("alpha").get<double>(),
                       j.at("b").get<double>()};
  const auto dir = j.at("direction").get<std::vector<double>>();
  Vec v = Eigen::Map<const Vec>(dir.data(), static_cast<Eigen::Index>(dir.size()));
  if (std::abs(v.norm() - 1.0) > 1e-12) {
    throw PreconditionError("embedded_from_json: direction is not unit length");
  }
  return EmbeddedHardInstance{one_d, std::move(v)};
}

}  // namespace trunctest
