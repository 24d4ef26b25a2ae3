#include "trunctest/truncation.hpp"

#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "trunctest/errors.hpp"
#include "trunctest/normal.hpp"
#include "trunctest/numeric.hpp"
#include "trunctest/rng.hpp"
#include "trunctest/sampling.hpp"

namespace trunctest {

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::FullSpace: return "full_space";
    case SetKind::HalfSpaceTail: return "half_space_tail";
    case SetKind::BallComplementCap: return "ball_complement_cap";
    case SetKind::OracleOnly: return "oracle_only";
  }
  return "unknown";
}

TruncationSet TruncationSet::full_space(int dim) {
  if (dim < 1) throw PreconditionError("full_space: dim must be >= 1");
  return TruncationSet(SetKind::FullSpace, dim);
}

TruncationSet TruncationSet::half_space_tail(Vec direction, double cutoff) {
  if (direction.size() < 1) throw PreconditionError("half_space_tail: empty direction");
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw PreconditionError("half_space_tail: direction must have unit norm within 1e-12");
  }
  TruncationSet s(SetKind::HalfSpaceTail, static_cast<int>(direction.size()));
  s.vec_ = std::move(direction);
  s.scal_ = cutoff;
  return s;
}

TruncationSet TruncationSet::ball_complement(Vec center, double radius) {
  if (center.size() < 1) throw PreconditionError("ball_complement: empty center");
  if (!(radius > 0.0)) throw PreconditionError("ball_complement: radius must be positive");
  TruncationSet s(SetKind::BallComplementCap, static_cast<int>(center.size()));
  s.vec_ = std::move(center);
  s.scal_ = radius;
  return s;
}

TruncationSet TruncationSet::oracle(int dim, std::function<bool(const Vec&)> predicate,
                                    std::string label) {
  if (dim < 1) throw PreconditionError("oracle: dim must be >= 1");
  if (!predicate) throw PreconditionError("oracle: empty predicate");
  TruncationSet s(SetKind::OracleOnly, dim);
  s.predicate_ = std::make_shared<const std::function<bool(const Vec&)>>(std::move(predicate));
  s.label_ = std::move(label);
  return s;
}

bool TruncationSet::contains(const Vec& x) const {
  if (x.size() != dim_) {
    throw PreconditionError("contains: point dimension " + std::to_string(x.size()) +
                            " does not match set dimension " + std::to_string(dim_));
  }
  switch (kind_) {
    case SetKind::FullSpace:
      return true;
    case SetKind::HalfSpaceTail:
      return vec_.dot(x) <= scal_;
    case SetKind::BallComplementCap:
      return (x - vec_).norm() >= scal_;
    case SetKind::OracleOnly:
      return (*predicate_)(x);
  }
  return false;
}

const Vec& TruncationSet::direction() const {
  if (kind_ != SetKind::HalfSpaceTail) throw PreconditionError("direction: not a half-space set");
  return vec_;
}

double TruncationSet::cutoff() const {
  if (kind_ != SetKind::HalfSpaceTail) throw PreconditionError("cutoff: not a half-space set");
  return scal_;
}

const Vec& TruncationSet::center() const {
  if (kind_ != SetKind::BallComplementCap) throw PreconditionError("center: not a ball-complement set");
  return vec_;
}

double TruncationSet::radius() const {
  if (kind_ != SetKind::BallComplementCap) throw PreconditionError("radius: not a ball-complement set");
  return scal_;
}

nlohmann::json TruncationSet::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  j["dim"] = dim_;
  switch (kind_) {
    case SetKind::HalfSpaceTail:
      j["direction"] = std::vector<double>(vec_.data(), vec_.data() + vec_.size());
      j["cutoff"] = scal_;
      break;
    case SetKind::BallComplementCap:
      j["center"] = std::vector<double>(vec_.data(), vec_.data() + vec_.size());
      j["radius"] = scal_;
      break;
    case SetKind::OracleOnly:
      j["label"] = label_;
      break;
    case SetKind::FullSpace:
      break;
  }
  return j;
}

TruncationSet TruncationSet::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.at("dim").get<int>();
  if (kind == "full_space") return full_space(dim);
  if (kind == "half_space_tail") {
    const auto dir = j.at("direction").get<std::vector<double>>();
    Vec v = Eigen::Map<const Vec>(dir.data(), static_cast<Eigen::Index>(dir.size()));
    return half_space_tail(std::move(v), j.at("cutoff").get<double>());
  }
  if (kind == "ball_complement_cap") {
    const auto c = j.at("center").get<std::vector<double>>();
    Vec v = Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size()));
    return ball_complement(std::move(v), j.at("radius").get<double>());
  }
  throw PreconditionError("from_json: cannot reconstruct a set of kind '" + kind +
                          "' (oracle predicates are not serializable)");
}

TruncatedGaussianSpec::TruncatedGaussianSpec(Vec mu_in, TruncationSet set_in)
    : mu(std::move(mu_in)), set(std::move(set_in)) {
  if (mu.size() != set.dim()) {
    throw PreconditionError("TruncatedGaussianSpec: dim(mu) != set.dim");
  }
}

ScalarEstimate mass(const Vec& mu, const TruncationSet& set, const MonteCarloOptions& mc) {
  if (mu.size() != set.dim()) throw PreconditionError("mass: dim(mu) != set.dim");
  switch (set.kind()) {
    case SetKind::FullSpace:
      return {1.0, 0.0, 0};
    case SetKind::HalfSpaceTail:
      return {normal_cdf(set.cutoff() - set.direction().dot(mu)), 0.0, 0};
    default:
      break;
  }
  // Monte-Carlo over mc.budget proposals from N(mu, I_d).
  SplitRng rng(mc.seed);
  Vec x(mu.size());
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < mc.budget; ++i) {
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = mu[k] + rng.normal();
    if (set.contains(x)) ++hits;
  }
  if (hits == 0) {
    throw NullSetError("mass: set appears null under N(mu, I_d) after " +
                           std::to_string(mc.budget) + " proposals",
                       mc.budget);
  }
  const double p = static_cast<double>(hits) / static_cast<double>(mc.budget);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(mc.budget));
  return {p, se, mc.budget};
}

VectorEstimate truncated_mean(const Vec& mu, const TruncationSet& set,
                              const MonteCarloOptions& mc) {
  if (mu.size() != set.dim()) throw PreconditionError("truncated_mean: dim(mu) != set.dim");
  const auto d = mu.size();
  switch (set.kind()) {
    case SetKind::FullSpace:
      return {mu, Vec::Zero(d), 0};
    case SetKind::HalfSpaceTail: {
      // 1-D tail formula along the truncation direction; orthogonal components
      // of the mean are unchanged.
      const Vec& v = set.direction();
      const double shifted = set.cutoff() - v.dot(mu);
      Vec out = mu - v * lower_tail_mean_ratio(shifted);
      return {std::move(out), Vec::Zero(d), 0};
    }
    default:
      break;
  }
  SampleBatch batch = sample_truncated(TruncatedGaussianSpec(mu, set), mc.budget, mc.seed);
  Vec mean = Vec::Zero(d);
  for (std::int64_t i = 0; i < batch.n(); ++i) mean += batch.data.row(i).transpose();
  mean /= static_cast<double>(batch.n());
  Vec se(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double s2 = 0.0;
    for (std::int64_t i = 0; i < batch.n(); ++i) {
      const double dlt = batch.data(i, k) - mean[k];
      s2 += dlt * dlt;
    }
    se[k] = std::sqrt(s2 / static_cast<double>(batch.n() - 1) / static_cast<double>(batch.n()));
  }
  return {std::move(mean), std::move(se), batch.proposals_used};
}

ScalarEstimate truncated_covariance_frobenius_gap(const Vec& mu, const TruncationSet& set,
                                                  const MonteCarloOptions& mc) {
  if (mu.size() != set.dim()) throw PreconditionError("frobenius_gap: dim(mu) != set.dim");
  // Monte-Carlo by contract for every kind, FullSpace included. Blocked
  // estimator: k blocks give a crude standard error for the gap.
  constexpr int kBlocks = 8;
  const std::int64_t per_block = std::max<std::int64_t>(mc.budget / kBlocks, 2);
  const auto d = mu.size();
  std::vector<double> gaps;
  gaps.reserve(kBlocks);
  std::int64_t proposals = 0;
  for (int blk = 0; blk < kBlocks; ++blk) {
    SampleBatch batch = sample_truncated(TruncatedGaussianSpec(mu, set), per_block,
                                         derive_stream_seed(mc.seed, static_cast<std::uint64_t>(blk)));
    proposals += batch.proposals_used;
    Vec mean = Vec::Zero(d);
    for (std::int64_t i = 0; i < batch.n(); ++i) mean += batch.data.row(i).transpose();
    mean /= static_cast<double>(batch.n());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (std::int64_t i = 0; i < batch.n(); ++i) {
      const Vec c = batch.data.row(i).transpose() - mean;
      cov.noalias() += c * c.transpose();
    }
    cov /= static_cast<double>(batch.n() - 1);
    gaps.push_back((cov - Eigen::MatrixXd::Identity(d, d)).norm());
  }
  RunningMoments rm;
  for (double g : gaps) rm.add(g);
  return {rm.mean(), rm.std_error(), proposals};
}

TruncationSet half_space_for_mass(const Vec& mu, const Vec& direction, double eps) {
  if (eps < 0.0 || eps >= 1.0) throw PreconditionError("half_space_for_mass: eps must be in [0, 1)");
  if (eps == 0.0) return TruncationSet::full_space(static_cast<int>(mu.size()));
  const double cutoff = direction.dot(mu) + normal_cdf_inv(1.0 - eps);
  return TruncationSet::half_space_tail(direction, cutoff);
}

}  // namespace trunctest
