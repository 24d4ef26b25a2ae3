#include "trunctest/instances.hpp"

#include <cmath>

#include "trunctest/errors.hpp"
#include "trunctest/hardinstance.hpp"
#include "trunctest/normal.hpp"

namespace trunctest {

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::FullSpaceNull: return "full_space_null";
    case InstanceKind::HalfSpaceNull: return "half_space_null";
    case InstanceKind::HalfSpaceWorstSoundness: return "half_space_worst_soundness";
    case InstanceKind::HardSetNull: return "hard_set_null";
    case InstanceKind::HardEmbeddedSoundness: return "hard_embedded_soundness";
    case InstanceKind::SlabRemovedNull: return "slab_removed_null";
    case InstanceKind::SlabRemovedSoundness: return "slab_removed_soundness";
  }
  return "unknown";
}

InstanceKind instance_kind_from_string(const std::string& s) {
  if (s == "full_space_null") return InstanceKind::FullSpaceNull;
  if (s == "half_space_null") return InstanceKind::HalfSpaceNull;
  if (s == "half_space_worst_soundness") return InstanceKind::HalfSpaceWorstSoundness;
  if (s == "hard_set_null") return InstanceKind::HardSetNull;
  if (s == "hard_embedded_soundness") return InstanceKind::HardEmbeddedSoundness;
  if (s == "slab_removed_null") return InstanceKind::SlabRemovedNull;
  if (s == "slab_removed_soundness") return InstanceKind::SlabRemovedSoundness;
  throw PreconditionError("unknown instance kind: " + s);
}

namespace {

Vec random_unit_vector(int d, SplitRng& rng) {
  Vec v(d);
  double norm2 = 0.0;
  do {
    for (int k = 0; k < d; ++k) v[k] = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);
  return v / std::sqrt(norm2);
}

TruncationSet slab_removed_set(const Vec& v, double l, double r) {
  return TruncationSet::oracle(
      static_cast<int>(v.size()),
      [v, l, r](const Vec& x) {
        const double t = v.dot(x);
        return t <= l || t >= r;
      },
      "slab_removed");
}

}  // namespace

SlabRemoval calibrate_slab_removal(double alpha, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError("slab removal: eps must be in (0, 0.5)");
  if (!(alpha > 0.0 && alpha <= 2.0 * eps)) {
    throw PreconditionError("slab removal: requires 0 < alpha <= 2 eps (removed centroid alpha/eps)");
  }
  // Solve for the removed interval (l, r) under N(alpha, 1):
  //   Phi(r-a) - Phi(l-a) = eps          (mass)
  //   phi(l-a) - phi(r-a) = alpha(1-eps) (zero post-truncation mean)
  const double c = alpha / eps;
  double w = eps / (2.0 * normal_pdf(c - alpha));
  double l = c - w, r = c + w;
  for (int it = 0; it < 60; ++it) {
    const double pl = normal_pdf(l - alpha), pr = normal_pdf(r - alpha);
    const double f1 = normal_cdf(r - alpha) - normal_cdf(l - alpha) - eps;
    const double f2 = pl - pr - alpha * (1.0 - eps);
    // Jacobian [[-pl, pr], [-(l-a) pl, (r-a) pr]]
    const double j11 = -pl, j12 = pr;
    const double j21 = -(l - alpha) * pl, j22 = (r - alpha) * pr;
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300) break;
    const double dl = (f1 * j22 - f2 * j12) / det;
    const double dr = (f2 * j11 - f1 * j21) / det;
    l -= dl;
    r -= dr;
    if (std::abs(dl) + std::abs(dr) < 1e-14) break;
  }
  const double mass_res = normal_cdf(r - alpha) - normal_cdf(l - alpha) - eps;
  const double mean_res = normal_pdf(l - alpha) - normal_pdf(r - alpha) - alpha * (1.0 - eps);
  if (std::abs(mass_res) > 1e-10 || std::abs(mean_res) > 1e-10) {
    throw PreconditionError("slab removal: calibration did not converge for these parameters");
  }
  return SlabRemoval{l, r};
}

Instance make_instance(InstanceKind kind, int d, double alpha, double eps, SplitRng& rng) {
  if (d < 1) throw PreconditionError("make_instance: d must be >= 1");
  switch (kind) {
    case InstanceKind::FullSpaceNull: {
      Vec mu = Vec::Zero(d);
      return Instance{TruncatedGaussianSpec(mu, TruncationSet::full_space(d)),
                      true, alpha, 0.0, to_string(kind), std::nullopt};
    }
    case InstanceKind::HalfSpaceNull: {
      const Vec v = random_unit_vector(d, rng);
      Vec mu = Vec::Zero(d);
      return Instance{TruncatedGaussianSpec(mu, half_space_for_mass(mu, v, eps)),
                      true, alpha, eps, to_string(kind), std::nullopt};
    }
    case InstanceKind::HalfSpaceWorstSoundness: {
      const Vec v = random_unit_vector(d, rng);
      Vec mu = alpha * v;
      return Instance{TruncatedGaussianSpec(mu, half_space_for_mass(mu, v, eps)),
                      false, alpha, eps, to_string(kind), std::nullopt};
    }
    case InstanceKind::HardSetNull: {
      const HardInstance1D one_d = calibrate_hard_instance(eps);
      const Vec v = random_unit_vector(d, rng);
      Vec mu = Vec::Zero(d);
      return Instance{TruncatedGaussianSpec(mu, TruncationSet::half_space_tail(v, one_d.b)),
                      true, one_d.alpha, eps, to_string(kind), std::nullopt};
    }
    case InstanceKind::HardEmbeddedSoundness: {
      const HardInstance1D one_d = calibrate_hard_instance(eps);
      const Vec v = random_unit_vector(d, rng);
      Vec mu = one_d.alpha * v;
      return Instance{TruncatedGaussianSpec(mu, TruncationSet::half_space_tail(v, one_d.b)),
                      false, one_d.alpha, eps, to_string(kind), std::nullopt};
    }
    case InstanceKind::SlabRemovedNull:
    case InstanceKind::SlabRemovedSoundness: {
      const SlabRemoval slab = calibrate_slab_removal(alpha, eps);
      const Vec v = random_unit_vector(d, rng);
      const bool null_case = kind == InstanceKind::SlabRemovedNull;
      Vec mu = null_case ? Vec(Vec::Zero(d)) : Vec(alpha * v);
      // The harness built the set, so it knows mu'_S in closed form even
      // though the set itself is exposed as a membership oracle.
      const double removed = normal_cdf(slab.r) - normal_cdf(slab.l);
      const double eta = -(normal_pdf(slab.l) - normal_pdf(slab.r)) / (1.0 - removed);
      Instance inst{TruncatedGaussianSpec(mu, slab_removed_set(v, slab.l, slab.r)),
                    null_case, alpha, eps, to_string(kind), std::nullopt};
      inst.mu_s_null = Vec(eta * v);
      return inst;
    }
  }
  throw PreconditionError("make_instance: bad kind");
}

}  // namespace trunctest
