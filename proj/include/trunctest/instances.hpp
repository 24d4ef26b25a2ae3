#pragma once

#include <optional>
#include <string>

#include "trunctest/rng.hpp"
#include "trunctest/truncation.hpp"
#include "trunctest/types.hpp"

namespace trunctest {

/// Instance families realized by the experiment grids.
enum class InstanceKind {
  FullSpaceNull,            // mu = 0, S = R^d
  HalfSpaceNull,            // mu = 0, worst-direction tail of mass eps
  HalfSpaceWorstSoundness,  // ||mu|| = alpha, tail along mu of mass eps
  HardSetNull,              // mu = 0 on the calibrated hard-instance set
  HardEmbeddedSoundness,    // the calibrated hard instance (fools first moments)
  SlabRemovedNull,          // mu = 0 on a slab-removal set (oracle membership)
  SlabRemovedSoundness      // alpha <= eps regime: slab removal zeroes the mean
};

std::string to_string(InstanceKind kind);
InstanceKind instance_kind_from_string(const std::string& s);

struct Instance {
  TruncatedGaussianSpec spec;
  bool is_null;
  double alpha;  // effective accuracy (hard kinds derive it from eps)
  double eps;
  std::string name;
  // Centering the harness can hand to the known-truncation tester when it
  // built the set itself and knows mu'_S in closed form.
  std::optional<Vec> mu_s_null;
};

/// Build one trial instance. The direction is drawn from `rng`, so distinct
/// trials get independent embeddings.
Instance make_instance(InstanceKind kind, int d, double alpha, double eps, SplitRng& rng);

/// Interval (l, r) removed along the direction so that N(alpha, 1) restricted
/// to the complement has mass 1-eps and mean exactly zero. Requires the
/// removed centroid alpha/eps to be reachable; valid in the alpha <~ eps regime.
struct SlabRemoval {
  double l;
  double r;
};
SlabRemoval calibrate_slab_removal(double alpha, double eps);

}  // namespace trunctest
