#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feller/state_space.hpp"

namespace feller {

struct Probe {
  std::string name;
  GridFunction f;
  bool random = false;
  bool continuous = true;  // false for the single-point indicator
};

/// Deterministic test functions plus `n_random` seeded random ones.
///
/// Profiles are evaluated on the grid coordinates, or on pseudo-coordinates
/// spread over [-3, 3] for spaces without coordinates: constant (compact
/// spaces only), Gaussian bump, shifted Gaussian, tent, smoothed step,
/// single-point indicator, sine taper and one random smooth profile. Random
/// probes are sums of Gaussian bumps on grids and uniform values on finite
/// chains. Every probe has sup-norm at most 1.
std::vector<Probe> standard_probes(const SpacePtr& space, std::uint64_t seed,
                                   int n_random = 20);

/// Smoothed step 0.5 (1 + tanh(x / 0.3)) exp(-(x - 1)^2 / 4.5); rises by 1
/// across x = 0.
double smoothed_step(double x);

/// Largest adjacent increment over h among the continuous deterministic
/// probes; 1 on spaces without coordinates.
double lipschitz_scale(const std::vector<Probe>& probes);

}  // namespace feller
