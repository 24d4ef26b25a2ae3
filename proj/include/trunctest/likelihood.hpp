#pragma once

#include <cstdint>

#include "trunctest/truncation.hpp"
#include "trunctest/types.hpp"

namespace trunctest {

enum class EvalMode { Quadrature, MonteCarlo };

/// Population negative log-likelihood context: data comes from N(mu, I_d, S).
struct LikelihoodContext {
  TruncationSet set;
  Vec data_mean_mu;
  EvalMode mode = EvalMode::Quadrature;
  double quad_tol = 1e-10;
  std::int64_t mc_budget = 1'000'000;
  std::uint64_t seed = 0x11eeb00f;
  double beta_floor = 0.05;          // required lower bound on mass(mu, S)
  double strong_convexity_C = 1.0;   // the lemma's unnamed universal constant

  LikelihoodContext(TruncationSet set_in, Vec mu_in);
};

/// lbar(v) = E_{x~N(mu,I,S)}[x'x/2 - v'x] + log int_S exp(-z'z/2 + v'z) dz.
/// Quadrature mode: adaptive tensor quadrature, d <= 3, analytic-section set
/// kinds only (std_error reports the tolerance). Monte-Carlo mode: any d,
/// std_error is the estimated stderr.
ScalarEstimate neg_log_likelihood(const LikelihoodContext& ctx, const Vec& v);

/// grad lbar(v) = -E_{x~N(mu,I,S)}[x] + E_{z~N(v,I,S)}[z]; zero at v = mu.
VectorEstimate grad_neg_log_likelihood(const LikelihoodContext& ctx, const Vec& v);

/// mu'_S = E_{x~N(0,I_d,S)}[x] to the requested l2 accuracy. Analytic for
/// FullSpace/HalfSpaceTail; Monte-Carlo with an auto-sized budget otherwise.
VectorEstimate null_truncated_mean(const TruncationSet& set, double accuracy,
                                   std::uint64_t seed = 0x6d755f73);

/// Strong-convexity lower bound on the Hessian of lbar:
/// lambda0 = 2^-13 (beta/C)^4 min{1/4, 1/(16 ||mu||^2 + 1)}.
double strong_convexity_floor(const LikelihoodContext& ctx);

struct GapCheck {
  double gap;    // ||mu'_S - mu''_S||^2
  double floor;  // (lambda0/2)^2 ||mu2||^2
};

/// Gap of the truncated means between the null and an alternative mu2, with
/// the strong-convexity floor it must dominate. `beta` bounds the truncated
/// mass: requires mass(mu2, set) >= 1 - beta.
GapCheck mean_gap_lower_bound_check(const TruncationSet& set, const Vec& mu2, double beta,
                                    double accuracy = 1e-4, std::uint64_t seed = 0x676170);

}  // namespace trunctest
