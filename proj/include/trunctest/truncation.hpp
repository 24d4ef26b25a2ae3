#pragma once

#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "trunctest/types.hpp"

namespace trunctest {

enum class SetKind { FullSpace, HalfSpaceTail, BallComplementCap, OracleOnly };

std::string to_string(SetKind kind);

/// Truncation region S of R^d: a membership oracle, plus closed-form mass and
/// moment facilities for the analytic kinds. Immutable after construction.
class TruncationSet {
 public:
  static TruncationSet full_space(int dim);
  /// S = { x : <direction, x> <= cutoff }. direction must have unit norm
  /// within 1e-12.
  static TruncationSet half_space_tail(Vec direction, double cutoff);
  /// S = R^d minus the open ball B(center, radius).
  static TruncationSet ball_complement(Vec center, double radius);
  /// Pure membership oracle; carries no analytic facilities.
  static TruncationSet oracle(int dim, std::function<bool(const Vec&)> predicate,
                              std::string label = "oracle");

  SetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool contains(const Vec& x) const;

  // HalfSpaceTail accessors (throw for other kinds).
  const Vec& direction() const;
  double cutoff() const;
  // BallComplementCap accessors.
  const Vec& center() const;
  double radius() const;

  nlohmann::json to_json() const;
  static TruncationSet from_json(const nlohmann::json& j);

 private:
  TruncationSet(SetKind kind, int dim) : kind_(kind), dim_(dim) {}

  SetKind kind_;
  int dim_;
  Vec vec_;      // direction or center
  double scal_ = 0.0;  // cutoff or radius
  std::shared_ptr<const std::function<bool(const Vec&)>> predicate_;
  std::string label_;
};

/// N(mu, I_d, S); covariance fixed to identity.
struct TruncatedGaussianSpec {
  Vec mu;
  TruncationSet set;

  TruncatedGaussianSpec(Vec mu_in, TruncationSet set_in);
  int dim() const { return set.dim(); }
};

/// Probability of S under N(mu, I_d). Closed form for FullSpace and
/// HalfSpaceTail; Monte-Carlo with reported standard error otherwise.
ScalarEstimate mass(const Vec& mu, const TruncationSet& set, const MonteCarloOptions& mc = {});

/// Truncated mean mu_S. Analytic for FullSpace/HalfSpaceTail, Monte-Carlo over
/// `mc.budget` accepted samples otherwise.
VectorEstimate truncated_mean(const Vec& mu, const TruncationSet& set,
                              const MonteCarloOptions& mc = {});

/// Monte-Carlo estimate of ||Sigma_S - I_d||_F (property-suite diagnostic).
ScalarEstimate truncated_covariance_frobenius_gap(const Vec& mu, const TruncationSet& set,
                                                  const MonteCarloOptions& mc = {});

/// Half space along `direction` whose mass under N(mu, I_d) is exactly 1-eps:
/// cutoff = <direction, mu> + Phi^-1(1-eps). eps == 0 degenerates to FullSpace.
TruncationSet half_space_for_mass(const Vec& mu, const Vec& direction, double eps);

}  // namespace trunctest
