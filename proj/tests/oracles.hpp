#pragma once

// Reference computations written independently of the library code paths.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Taylor series (60 terms) in long double after scaling by 2^-k, then k
// squarings.
inline Matrix expm_taylor(const Matrix& a) {
  const long double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int k = 0;
  while (norm / std::ldexp(1.0L, k) > 0.5L) ++k;
  const LMatrix x = a.cast<long double>() / std::ldexp(1.0L, k);
  LMatrix term = LMatrix::Identity(a.rows(), a.cols());
  LMatrix sum = term;
  for (int n = 1; n <= 60; ++n) {
    term = term * x / static_cast<long double>(n);
    sum += term;
  }
  for (int i = 0; i < k; ++i) sum = sum * sum;
  return sum.cast<double>();
}

// Q = [[-a, a], [b, -b]].
inline Matrix two_state_u(double a, double b, double t) {
  const double s = a + b, e = std::exp(-s * t);
  Matrix u(2, 2);
  u << b + a * e, a - a * e, b - b * e, a + b * e;
  return u / s;
}

inline Matrix two_state_r(double a, double b, double lambda) {
  Matrix r(2, 2);
  r << lambda + b, a, b, lambda + a;
  return r / (lambda * (lambda + a + b));
}

// int e^{-a|x-y|} exp(-y^2/2) dy, a = sqrt(2 lambda), divided by a: the
// Brownian resolvent applied to exp(-y^2/2).
inline double brownian_resolvent_gaussian(double lambda, double x) {
  const double a = std::sqrt(2.0 * lambda);
  const double r = 1.0 / std::numbers::sqrt2;
  const double c = std::sqrt(std::numbers::pi / 2.0);
  // e^{a^2/2 - a x} erfc((a - x)/sqrt2) + e^{a^2/2 + a x} erfc((a + x)/sqrt2)
  const double left = std::exp(0.5 * a * a - a * x) * std::erfc((a - x) * r);
  const double right = std::exp(0.5 * a * a + a * x) * std::erfc((a + x) * r);
  return c * (left + right) / a;
}

// Heat semigroup on exp(-x^2/2): variance 1 + t, amplitude (1 + t)^{-1/2}.
inline double heat_gaussian(double t, double x) {
  return std::exp(-x * x / (2.0 * (1.0 + t))) / std::sqrt(1.0 + t);
}

// Drift resolvent on exp(-x^2): x > 0 gives e^{lambda x} int_x^inf e^{-lambda y - y^2} dy.
inline double drift_resolvent_gaussian(double lambda, double x) {
  if (x <= 0.0) return std::exp(-x * x) / lambda;
  const double z = x + lambda / 2.0;
  // e^{lambda x + lambda^2/4} sqrt(pi)/2 erfc(z), rewritten as exp(-x^2) *
  // erfcx(z) to stay finite: lambda x + lambda^2/4 - z^2 = -x^2.
  double erfcx;
  if (z < 25.0) {
    erfcx = std::exp(z * z) * std::erfc(z);
  } else {
    const double u = 1.0 / (2.0 * z * z);
    erfcx = (1.0 - u + 3.0 * u * u - 15.0 * u * u * u) / (z * std::sqrt(std::numbers::pi));
  }
  return std::exp(-x * x) * std::sqrt(std::numbers::pi) / 2.0 * erfcx;
}

// Inversion series for two-state a = b = 1, f = (1, 0), in binary128:
// f = 1/2 (1,1) + 1/2 (1,-1) with Q(1,-1) = -2 (1,-1), so the series splits
// into two scalar sums. Returns the sup-error against U_t f.
inline double two_state_inversion_error(double lambda, double t) {
  using quad = __float128;
  const quad x = std::exp(static_cast<long double>(lambda) * t);
  quad s0 = 0, s2 = 0, power = 1, fact = 1;
  for (int n = 1; n < 2000; ++n) {
    power *= x;
    fact *= n;
    const quad term = power / fact;
    const quad sign = (n % 2) ? 1 : -1;
    s0 += sign * term;
    s2 += sign * term * (n * lambda) / (n * lambda + 2.0);
    if (n > 10 && term < static_cast<quad>(1e-40)) break;
  }
  const double e0 = static_cast<double>(s0 - 1);
  const double e2 = static_cast<double>(s2 - static_cast<quad>(std::exp(-2.0 * t)));
  return 0.5 * (std::abs(e0) + std::abs(e2));
}

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  // Random sub-Markov rate matrix: sparse nonnegative off-diagonals, optional killing.
  Matrix generator(int n, double max_rate = 3.0) {
    Matrix q = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (i != j && coin(0.6)) q(i, j) = uniform(0.0, max_rate);
      q(i, i) = -q.row(i).sum() - (coin(0.3) ? uniform(0.0, 1.0) : 0.0);
    }
    return q;
  }

  Vector vector(int n, double scale = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
