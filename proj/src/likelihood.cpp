#include "trunctest/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "trunctest/errors.hpp"
#include "trunctest/normal.hpp"
#include "trunctest/numeric.hpp"
#include "trunctest/quadrature.hpp"
#include "trunctest/rng.hpp"
#include "trunctest/sampling.hpp"

namespace trunctest {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kBoxHalf = 15.0;  // phi mass outside 15 sigma is ~1e-50

struct Interval {
  double lo;
  double hi;
};

// 1-D section of S along `axis` with the remaining coordinates fixed.
// Analytic for FullSpace / HalfSpaceTail / BallComplementCap.
std::vector<Interval> section(const TruncationSet& set, int axis, const Vec& point,
                              double lo_clip, double hi_clip) {
  switch (set.kind()) {
    case SetKind::FullSpace:
      return {{lo_clip, hi_clip}};
    case SetKind::HalfSpaceTail: {
      const Vec& u = set.direction();
      double partial = 0.0;
      for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (j != axis) partial += u[j] * point[j];
      }
      const double ua = u[axis];
      if (std::abs(ua) < 1e-14) {
        if (partial <= set.cutoff()) return {{lo_clip, hi_clip}};
        return {};
      }
      const double c = (set.cutoff() - partial) / ua;
      if (ua > 0.0) {
        if (c <= lo_clip) return {};
        return {{lo_clip, std::min(c, hi_clip)}};
      }
      if (c >= hi_clip) return {};
      return {{std::max(c, lo_clip), hi_clip}};
    }
    case SetKind::BallComplementCap: {
      const Vec& cen = set.center();
      double perp2 = 0.0;
      for (Eigen::Index j = 0; j < cen.size(); ++j) {
        if (j != axis) {
          const double dj = point[j] - cen[j];
          perp2 += dj * dj;
        }
      }
      const double r2 = set.radius() * set.radius();
      if (perp2 >= r2) return {{lo_clip, hi_clip}};
      const double s = std::sqrt(r2 - perp2);
      const double ex_lo = cen[axis] - s;
      const double ex_hi = cen[axis] + s;
      std::vector<Interval> out;
      if (ex_lo > lo_clip) out.push_back({lo_clip, std::min(ex_lo, hi_clip)});
      if (ex_hi < hi_clip) out.push_back({std::max(ex_hi, lo_clip), hi_clip});
      return out;
    }
    case SetKind::OracleOnly:
      throw PreconditionError(
          "likelihood quadrature: oracle-only sets carry no analytic facilities; "
          "use Monte-Carlo mode");
  }
  return {};
}

// Pick the innermost axis so half-space sectioning stays well conditioned.
int pick_inner_axis(const TruncationSet& set) {
  if (set.kind() != SetKind::HalfSpaceTail) return 0;
  int best = 0;
  const Vec& u = set.direction();
  for (Eigen::Index j = 1; j < u.size(); ++j) {
    if (std::abs(u[j]) > std::abs(u[best])) best = static_cast<int>(j);
  }
  return best;
}

// integral over S of g(x) * phi_d(x - m) dx by nested adaptive quadrature.
// Axis order: inner_axis last (membership handled there by exact sectioning).
class TensorIntegrator {
 public:
  TensorIntegrator(const TruncationSet& set, Vec m, double tol)
      : set_(set), m_(std::move(m)), tol_(tol), inner_axis_(pick_inner_axis(set)) {
    const int d = set_.dim();
    axes_.reserve(d);
    for (int j = 0; j < d; ++j) {
      if (j != inner_axis_) axes_.push_back(j);
    }
    axes_.push_back(inner_axis_);  // recursion peels from the front
    point_ = Vec::Zero(d);
  }

  double run(const std::function<double(const Vec&)>& g) {
    g_ = &g;
    return recurse(0);
  }

 private:
  double recurse(std::size_t depth) {
    const int axis = axes_[depth];
    const double lo = m_[axis] - kBoxHalf;
    const double hi = m_[axis] + kBoxHalf;
    if (depth + 1 == axes_.size()) {
      const auto pieces = section(set_, axis, point_, lo, hi);
      double total = 0.0;
      for (const auto& piece : pieces) {
        total += integrate(
                     [&](double t) {
                       point_[axis] = t;
                       return (*g_)(point_)*weight();
                     },
                     piece.lo, piece.hi, tol_ * 0.1)
                     .value;
      }
      return total;
    }
    return integrate(
               [&](double t) {
                 point_[axis] = t;
                 return recurse(depth + 1);
               },
               lo, hi, tol_)
        .value;
  }

  double weight() const {
    double q = 0.0;
    for (Eigen::Index j = 0; j < m_.size(); ++j) {
      const double dj = point_[j] - m_[j];
      q += dj * dj;
    }
    return std::exp(-0.5 * q) * std::pow(kTwoPi, -0.5 * static_cast<double>(m_.size()));
  }

  const TruncationSet& set_;
  Vec m_;
  double tol_;
  int inner_axis_;
  std::vector<int> axes_;
  Vec point_;
  const std::function<double(const Vec&)>* g_ = nullptr;
};

struct QuadMoments {
  double mass;
  Vec mean;
  double second;  // E ||x||^2
};

QuadMoments quad_truncated_moments(const TruncationSet& set, const Vec& m, double tol,
                                   bool want_second) {
  const int d = set.dim();
  QuadMoments out;
  switch (set.kind()) {
    case SetKind::FullSpace:
      out.mass = 1.0;
      out.mean = m;
      out.second = static_cast<double>(d) + m.squaredNorm();
      return out;
    case SetKind::HalfSpaceTail: {
      // The truncated law factorizes: a 1-D truncated normal along the
      // direction times an untruncated normal on the complement, so the
      // moment integrals are one-dimensional.
      const Vec& u = set.direction();
      const double mu_u = u.dot(m);
      const double b = set.cutoff();
      auto g1 = [&](double t) { return normal_pdf(t - mu_u); };
      const double mass1 = integrate_lower_tail(g1, b, tol).value;
      if (mass1 <= 0.0) {
        throw NullSetError("likelihood quadrature: set has numerically zero mass", 0);
      }
      const double m1 =
          integrate_lower_tail([&](double t) { return t * g1(t); }, b, tol).value / mass1;
      out.mass = mass1;
      out.mean = m + u * (m1 - mu_u);
      if (want_second) {
        const double m2 =
            integrate_lower_tail([&](double t) { return t * t * g1(t); }, b, tol).value / mass1;
        out.second = m2 + static_cast<double>(d - 1) + m.squaredNorm() - mu_u * mu_u;
      }
      return out;
    }
    default:
      break;
  }
  TensorIntegrator ti(set, m, tol);
  out.mass = ti.run([](const Vec&) { return 1.0; });
  if (out.mass <= 0.0) {
    throw NullSetError("likelihood quadrature: set has numerically zero mass", 0);
  }
  out.mean = Vec::Zero(d);
  for (int j = 0; j < d; ++j) {
    out.mean[j] = ti.run([j](const Vec& x) { return x[j]; }) / out.mass;
  }
  out.second =
      want_second ? ti.run([](const Vec& x) { return x.squaredNorm(); }) / out.mass : 0.0;
  return out;
}

void require_quadrature_dim(const LikelihoodContext& ctx) {
  if (ctx.set.dim() > 3) {
    throw PreconditionError(
        "likelihood: quadrature mode supports d <= 3 (use Monte-Carlo mode)");
  }
}

}  // namespace

LikelihoodContext::LikelihoodContext(TruncationSet set_in, Vec mu_in)
    : set(std::move(set_in)), data_mean_mu(std::move(mu_in)) {
  if (data_mean_mu.size() != set.dim()) {
    throw PreconditionError("LikelihoodContext: dim(mu) != set.dim");
  }
  const ScalarEstimate m = mass(data_mean_mu, set, {100'000, 0xc7c7});
  if (m.value < beta_floor) {
    throw PreconditionError("LikelihoodContext: mass(mu, S) below the configured beta floor");
  }
}

ScalarEstimate neg_log_likelihood(const LikelihoodContext& ctx, const Vec& v) {
  if (v.size() != ctx.set.dim()) throw PreconditionError("neg_log_likelihood: dim(v) != d");
  const int d = ctx.set.dim();
  if (ctx.mode == EvalMode::Quadrature) {
    require_quadrature_dim(ctx);
    const QuadMoments data = quad_truncated_moments(ctx.set, ctx.data_mean_mu, ctx.quad_tol, true);
    const double mass_v = quad_truncated_moments(ctx.set, v, ctx.quad_tol, false).mass;
    // log int_S exp(-z'z/2 + v'z) dz = ||v||^2/2 + (d/2) log(2 pi) + log N(v,I,S).
    const double log_partition = 0.5 * v.squaredNorm() +
                                 0.5 * static_cast<double>(d) * std::log(kTwoPi) +
                                 std::log(mass_v);
    const double value = 0.5 * data.second - v.dot(data.mean) + log_partition;
    return {value, ctx.quad_tol, 0};
  }
  // Monte-Carlo: data expectation from accepted samples, partition mass from
  // proposals at v.
  SampleBatch batch =
      sample_truncated(TruncatedGaussianSpec(ctx.data_mean_mu, ctx.set), ctx.mc_budget, ctx.seed);
  RunningMoments rm;
  for (std::int64_t i = 0; i < batch.n(); ++i) {
    const auto row = batch.data.row(i);
    rm.add(0.5 * row.squaredNorm() - row.dot(v.transpose()));
  }
  const ScalarEstimate mass_v = mass(v, ctx.set, {ctx.mc_budget, derive_stream_seed(ctx.seed, 1)});
  const double log_partition = 0.5 * v.squaredNorm() +
                               0.5 * static_cast<double>(d) * std::log(kTwoPi) +
                               std::log(mass_v.value);
  const double se_log_mass = mass_v.std_error > 0.0 ? mass_v.std_error / mass_v.value : 0.0;
  const double se = std::sqrt(rm.std_error() * rm.std_error() + se_log_mass * se_log_mass);
  return {rm.mean() + log_partition, se, batch.proposals_used + mass_v.draws_used};
}

VectorEstimate grad_neg_log_likelihood(const LikelihoodContext& ctx, const Vec& v) {
  if (v.size() != ctx.set.dim()) throw PreconditionError("grad_neg_log_likelihood: dim(v) != d");
  const int d = ctx.set.dim();
  if (ctx.mode == EvalMode::Quadrature) {
    require_quadrature_dim(ctx);
    const QuadMoments data = quad_truncated_moments(ctx.set, ctx.data_mean_mu, ctx.quad_tol, false);
    const QuadMoments at_v = quad_truncated_moments(ctx.set, v, ctx.quad_tol, false);
    VectorEstimate out;
    out.value = at_v.mean - data.mean;
    out.std_error = Vec::Constant(d, ctx.quad_tol);
    return out;
  }
  const VectorEstimate data = truncated_mean(ctx.data_mean_mu, ctx.set, {ctx.mc_budget, ctx.seed});
  const VectorEstimate at_v =
      truncated_mean(v, ctx.set, {ctx.mc_budget, derive_stream_seed(ctx.seed, 1)});
  VectorEstimate out;
  out.value = at_v.value - data.value;
  out.std_error = (data.std_error.array().square() + at_v.std_error.array().square()).sqrt();
  out.draws_used = data.draws_used + at_v.draws_used;
  return out;
}

VectorEstimate null_truncated_mean(const TruncationSet& set, double accuracy, std::uint64_t seed) {
  if (!(accuracy > 0.0)) throw PreconditionError("null_truncated_mean: accuracy must be positive");
  const int d = set.dim();
  const Vec zero = Vec::Zero(d);
  switch (set.kind()) {
    case SetKind::FullSpace:
      return {zero, zero, 0};
    case SetKind::HalfSpaceTail: {
      Vec v = -set.direction() * lower_tail_mean_ratio(set.cutoff());
      return {std::move(v), zero, 0};
    }
    default:
      break;
  }
  // Monte-Carlo with a pilot-sized budget so the l2 stderr meets `accuracy`.
  constexpr std::int64_t kPilot = 4096;
  constexpr std::int64_t kMaxBudget = 50'000'000;
  const VectorEstimate pilot = truncated_mean(zero, set, {kPilot, seed});
  const double pilot_l2_se = pilot.std_error.norm();
  if (pilot_l2_se <= accuracy) return pilot;
  const double scale = pilot_l2_se / accuracy;
  const auto needed = static_cast<std::int64_t>(std::ceil(static_cast<double>(kPilot) * scale * scale));
  if (needed > kMaxBudget) {
    const double achievable =
        pilot_l2_se * std::sqrt(static_cast<double>(kPilot) / static_cast<double>(kMaxBudget));
    throw PreconditionError(
        "null_truncated_mean: budget infeasible for requested accuracy (achievable ~" +
        std::to_string(achievable) + ")");
  }
  return truncated_mean(zero, set, {needed, derive_stream_seed(seed, 1)});
}

double strong_convexity_floor(const LikelihoodContext& ctx) {
  const double beta = mass(ctx.data_mean_mu, ctx.set, {1'000'000, ctx.seed}).value;
  const double ratio = beta / ctx.strong_convexity_C;
  const double mu2 = ctx.data_mean_mu.squaredNorm();
  const double mins = std::min(0.25, 1.0 / (16.0 * mu2 + 1.0));
  return std::pow(2.0, -13.0) * std::pow(ratio, 4.0) * mins;
}

GapCheck mean_gap_lower_bound_check(const TruncationSet& set, const Vec& mu2, double beta,
                                    double accuracy, std::uint64_t seed) {
  if (mu2.size() != set.dim()) throw PreconditionError("mean_gap_lower_bound_check: dim mismatch");
  const ScalarEstimate m2 = mass(mu2, set, {1'000'000, seed});
  if (m2.value < 1.0 - beta - 3.0 * m2.std_error) {
    throw PreconditionError("mean_gap_lower_bound_check: mass(mu2, S) below 1 - beta");
  }
  const VectorEstimate null_mean = null_truncated_mean(set, accuracy, seed);
  const VectorEstimate alt_mean =
      truncated_mean(mu2, set, {4'000'000, derive_stream_seed(seed, 7)});
  const double gap = (null_mean.value - alt_mean.value).squaredNorm();
  // This operation's beta is the allowed truncated mass, so the
  // strong-convexity bound applies with mass floor 1 - beta (and C = 1).
  const double ratio = 1.0 - beta;
  const double mins = std::min(0.25, 1.0 / (16.0 * mu2.squaredNorm() + 1.0));
  const double lambda0 = std::pow(2.0, -13.0) * std::pow(ratio, 4.0) * mins;
  const double floor = 0.25 * lambda0 * lambda0 * mu2.squaredNorm();
  return {gap, floor};
}

}  // namespace trunctest
