#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "trunctest/truncation.hpp"
#include "trunctest/types.hpp"

namespace trunctest {

/// 1-D lower-bound instance: A = N(alpha, 1, (-inf, b]) with truncated mass
/// eps, calibrated so that E[A] = 0. alpha follows from the explicit identity
///   alpha = exp(-(erfinv(1-2eps))^2) / (sqrt(2 pi) (1-eps)),
/// and b = alpha + sqrt(2) erfinv(1-2eps).
struct HardInstance1D {
  double eps;
  double alpha;
  double b;
};

/// Builds the calibrated instance. Valid for 0 < eps <= 0.2; beyond that the
/// eps <~ alpha regime assumption fails.
HardInstance1D calibrate_hard_instance(double eps);

/// chi^2(A, N(0,1)) = Phi(b - 2 alpha) exp(alpha^2) / (1-eps)^2 - 1.
double chi_square_closed_form(const HardInstance1D& inst);

/// d / (8 chi^2): below this sample count no tester can succeed with
/// probability 2/3. Returns +inf when chi^2 == 0.
double sample_complexity_floor(const HardInstance1D& inst, int d);

/// The 1-D instance placed along a uniformly random unit direction; standard
/// normal on the orthogonal complement.
struct EmbeddedHardInstance {
  HardInstance1D one_d;
  Vec direction;

  int dim() const { return static_cast<int>(direction.size()); }
};

EmbeddedHardInstance embed(const HardInstance1D& inst, int d, std::uint64_t seed);

/// Realize the embedded distribution for sampling: N(alpha v, I_d, S_v) with
/// S_v = { x : <v, x> <= b }, a HalfSpaceTail.
TruncatedGaussianSpec to_sampling_spec(const EmbeddedHardInstance& inst);

nlohmann::json to_json(const EmbeddedHardInstance& inst);
EmbeddedHardInstance embedded_from_json(const nlohmann::json& j);

}  // namespace trunctest
