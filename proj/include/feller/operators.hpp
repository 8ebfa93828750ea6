#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "feller/state_space.hpp"

namespace feller {

/// Rate matrix Q: off-diagonal entries >= 0 and row sums <= 0. Rows with a
/// negative sum kill mass; the semigroup is e^{tQ}.
class Generator {
 public:
  explicit Generator(Matrix q);

  const Matrix& matrix() const { return q_; }
  std::size_t size() const { return static_cast<std::size_t>(q_.rows()); }
  bool conservative(double tol = 1e-12) const;

 private:
  Matrix q_;
};

struct ResolventEstimate {
  Matrix value;
  double error_estimate = 0.0;
};

/// Transition kernel acting on grid functions. Implementations evaluate a
/// closed-form kernel with quadrature weights on the grid.
class KernelSemigroup {
 public:
  virtual ~KernelSemigroup() = default;

  virtual std::string name() const = 0;
  /// Applies U_t (t > 0) to each column.
  virtual Matrix apply(double t, const Matrix& columns) const = 0;
  /// Time step when U_t is only defined on multiples of it.
  virtual std::optional<double> time_lattice() const { return std::nullopt; }
  /// Kernel-specific Laplace transform; nullopt selects the generic
  /// Gauss-Legendre rule over apply().
  virtual std::optional<ResolventEstimate> laplace(double /*lambda*/,
                                                   const Matrix& /*columns*/) const {
    return std::nullopt;
  }
  /// Transition matrix of U_t for kernels stored densely; lets quadrature
  /// resolvents be assembled once and reused across inputs.
  virtual bool is_dense() const { return false; }
  virtual std::optional<Matrix> dense(double /*t*/) const { return std::nullopt; }
  /// Slack for truncation mass loss in the contraction/positivity checks.
  virtual double kernel_tol() const { return 1e-2; }
};

/// Quadrature resolvent settings. `t_max <= 0` and `n_nodes <= 0` select
/// the defaults max(40/lambda, 10 * mixing guess) and 64.
struct QuadratureOptions {
  double t_max = 0.0;
  int n_nodes = 0;
};

/// Quadrature resolvent as a matrix: the fine rule, the half-panel rule used
/// for the error estimate, and the e^{-lambda t_max}/lambda tail factor.
struct ResolventOperator {
  Matrix fine;
  Matrix coarse;
  double tail = 0.0;

  ResolventEstimate apply(const Matrix& columns) const;
};

/// Semigroup/resolvent pair backed by a generator or a transition kernel.
class OperatorFamily {
 public:
  OperatorFamily(SpacePtr space, Generator generator);
  OperatorFamily(SpacePtr space, std::shared_ptr<const KernelSemigroup> kernel);

  const StateSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  bool has_exact_resolvent() const { return generator() != nullptr; }
  const Generator* generator() const { return std::get_if<Generator>(&backing_); }
  const KernelSemigroup* kernel() const;

  double kernel_tol() const;
  std::optional<double> time_lattice() const;
  /// 10x this is the floor for the default Laplace truncation point.
  double mixing_time_guess() const;

  /// Column-batched primitives; every column is one function on the space.
  Matrix semigroup(double t, const Matrix& columns) const;
  Matrix resolvent_exact(double lambda, const Matrix& columns) const;
  ResolventEstimate resolvent_quadrature(double lambda, const Matrix& columns,
                                         QuadratureOptions opts = {}) const;
  /// Assembled quadrature resolvent; nullopt unless the kernel is dense.
  std::optional<ResolventOperator> resolvent_operator(double lambda,
                                                      QuadratureOptions opts = {}) const;
  /// Exact when available, otherwise the default quadrature.
  ResolventEstimate resolvent(double lambda, const Matrix& columns) const;

  double default_t_max(double lambda) const;

 private:
  void check_columns(const Matrix& columns) const;

  SpacePtr space_;
  std::variant<Generator, std::shared_ptr<const KernelSemigroup>> backing_;
};

GridFunction semigroup_apply(const OperatorFamily& fam, double t,
                             const GridFunction& f);
GridFunction resolvent_apply_exact(const OperatorFamily& fam, double lambda,
                                   const GridFunction& f);

struct QuadratureResolvent {
  GridFunction value;
  double error_estimate;
};
QuadratureResolvent resolvent_apply_quadrature(const OperatorFamily& fam,
                                               double lambda,
                                               const GridFunction& f,
                                               double t_max, int n_nodes);

/// sup |(R_l - R_m) f - (m - l) R_l R_m f|
double resolvent_identity_residual(const OperatorFamily& fam, double lambda,
                                   double mu, const GridFunction& f);
/// sup |U_{t+s} f - U_t U_s f|
double semigroup_law_residual(const OperatorFamily& fam, double t, double s,
                              const GridFunction& f);
/// sup |U_t R_l f - R_l U_t f|
double commutation_residual(const OperatorFamily& fam, double t,
                            double lambda, const GridFunction& f);

}  // namespace feller
