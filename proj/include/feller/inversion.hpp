#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "feller/operators.hpp"

namespace feller {

enum class Summation { plain, compensated };

std::string to_string(Summation s);
Summation parse_summation(const std::string& s);

/// Settings for reconstructing U_t f from the resolvents R_{n lambda} f via
///   U^lambda_t f = sum_{n>=1} (-1)^{n+1}/n! * n lambda * e^{n lambda t} * R_{n lambda} f.
struct InversionConfig {
  double lambda = 1.0;
  double t = 0.0;
  int max_terms = 400;
  double term_tol = 1e-12;  // cutoff on e^{n lambda t}/n! * |f|
  Summation summation = Summation::compensated;
  double lt_cap = 4.0;  // largest admissible lambda * t
  bool allow_over_cap = false;
};

struct InversionResult {
  GridFunction value;
  int terms_used = 0;
  double cancellation_magnitude = 0.0;  // largest sup-norm of a single term
  double tail_bound = 0.0;              // |f| * sum_{n > terms_used} e^{n lambda t}/n!
};

/// Raised when the alternating terms would grow past what the working
/// precision can cancel.
class CancellationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest term magnitude |f| * max_{1<=n<=max_terms} e^{n lambda t}/n! the
/// series may reach. Generator backings sum in binary128 and accept peaks up
/// to 1e24; quadrature resolvents are double precision and stop at 1e12.
double cancellation_limit(bool extended_precision);
double series_peak_bound(double lambda_t, int max_terms);
double series_tail_bound(double lambda_t, int terms);

InversionResult inversion_apply(const OperatorFamily& fam,
                                const InversionConfig& cfg,
                                const GridFunction& f);
/// Batched form sharing one factorisation per term across all functions.
std::vector<InversionResult> inversion_apply(const OperatorFamily& fam,
                                             const InversionConfig& cfg,
                                             const std::vector<GridFunction>& fs);

struct SweepPoint {
  double lambda = 0.0;
  double sup_error = 0.0;
  int terms_used = 0;
  double cancellation_magnitude = 0.0;
  double tail_bound = 0.0;
};

/// Error of the inversion series against semigroup_apply for each lambda,
/// ascending. Kernel backings measure the error off the boundary band.
std::vector<SweepPoint> inversion_convergence_sweep(const OperatorFamily& fam,
                                                    double t,
                                                    const GridFunction& f,
                                                    std::vector<double> lambdas,
                                                    InversionConfig base = {});

}  // namespace feller
