#include "feller/probes.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

namespace feller {

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

std::vector<double> abscissae(const StateSpace& space) {
  if (space.has_coordinates()) return space.coordinates();
  std::vector<double> x(space.size(), 0.0);
  if (space.size() == 1) return x;
  for (std::size_t i = 0; i < space.size(); ++i)
    x[i] = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(space.size() - 1);
  return x;
}

std::function<double(double)> random_bumps(std::mt19937_64& rng) {
  struct Bump { double centre, width, amplitude; };
  std::vector<Bump> bumps;
  for (int k = 0; k < 4; ++k)
    bumps.push_back({uniform(rng, -3.0, 3.0), uniform(rng, 0.5, 1.0), uniform(rng, -0.25, 0.25)});
  return [bumps](double x) {
    double s = 0.0;
    for (const auto& b : bumps) {
      const double u = (x - b.centre) / b.width;
      s += b.amplitude * std::exp(-0.5 * u * u);
    }
    return s;
  };
}

GridFunction sample(const SpacePtr& space, const std::vector<double>& x,
                    const std::function<double(double)>& profile) {
  Vector v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = profile(x[i]);
  return GridFunction(space, std::move(v));
}

}  // namespace

double smoothed_step(double x) {
  return 0.5 * (1.0 + std::tanh(x / 0.3)) * std::exp(-(x - 1.0) * (x - 1.0) / 4.5);
}

std::vector<Probe> standard_probes(const SpacePtr& space, std::uint64_t seed,
                                   int n_random) {
  const std::vector<double> x = abscissae(*space);
  std::vector<Probe> out;
  if (space->boundary_band() == 0)
    out.push_back({"constant", GridFunction::constant(space, 1.0)});
  out.push_back({"gaussian", sample(space, x, [](double u) { return std::exp(-u * u); })});
  out.push_back({"shifted-gaussian",
                 sample(space, x, [](double u) { return std::exp(-(u - 1.5) * (u - 1.5)); })});
  out.push_back({"tent", sample(space, x, [](double u) { return std::max(0.0, 1.0 - std::abs(u) / 3.0); })});
  out.push_back({"smoothed-step", sample(space, x, smoothed_step)});
  {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space->size()));
    v[static_cast<Eigen::Index>((space->size() - 1) / 2)] = 1.0;
    out.push_back({"indicator", GridFunction(space, std::move(v)), false, false});
  }
  out.push_back({"sine-taper",
                 sample(space, x, [](double u) { return std::sin(u) * std::exp(-u * u / 8.0); })});

  std::mt19937_64 rng(seed);
  out.push_back({"random-lipschitz", sample(space, x, random_bumps(rng))});
  for (int k = 0; k < n_random; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "random-%02d", k);
    if (space->has_coordinates()) {
      out.push_back({name, sample(space, x, random_bumps(rng)), true});
    } else {
      Vector v(static_cast<Eigen::Index>(space->size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng, -1.0, 1.0);
      out.push_back({name, GridFunction(space, std::move(v)), true});
    }
  }
  return out;
}

double lipschitz_scale(const std::vector<Probe>& probes) {
  double scale = 0.0;
  for (const auto& p : probes) {
    if (p.random || !p.continuous || !p.f.space().has_coordinates()) continue;
    const Vector& v = p.f.values();
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i)
      scale = std::max(scale, std::abs(v[i + 1] - v[i]) / p.f.space().spacing());
  }
  return scale > 0.0 ? scale : 1.0;
}

}  // namespace feller
