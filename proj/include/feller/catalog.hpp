#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "feller/operators.hpp"

namespace feller {

/// Brownian motion on a truncated grid. Each row of the transition matrix
/// holds the Gaussian probability of the quadrature cell around each grid
/// point (cell width h, half cells at the ends). Mass that leaves [-L, L]
/// is lost, never renormalised.
class HeatKernel final : public KernelSemigroup {
 public:
  explicit HeatKernel(SpacePtr grid);
  std::string name() const override { return "heat-kernel"; }
  Matrix apply(double t, const Matrix& columns) const override;
  /// Transition matrix of U_t on the grid.
  Matrix transition_matrix(double t) const;
  bool is_dense() const override { return true; }
  std::optional<Matrix> dense(double t) const override { return transition_matrix(t); }

 private:
  SpacePtr grid_;
};

/// Deterministic motion that stands still on x <= 0 and drifts right at unit
/// speed on x > 0. U_t is an exact index shift, so t must be a multiple of
/// the grid spacing; values shifted in from beyond L are 0.
class ShiftDrift final : public KernelSemigroup {
 public:
  explicit ShiftDrift(SpacePtr grid);
  std::string name() const override { return "non-feller-drift"; }
  Matrix apply(double t, const Matrix& columns) const override;
  std::optional<double> time_lattice() const override { return grid_->spacing(); }
  /// Laplace transform of the shift acting on the piecewise-linear
  /// interpolant of each column, integrated exactly cell by cell.
  std::optional<ResolventEstimate> laplace(double lambda,
                                           const Matrix& columns) const override;

  /// Number of lattice steps in t; throws unless t is a multiple of h.
  long steps(double t) const;

 private:
  SpacePtr grid_;
};

OperatorFamily make_two_state(double a, double b);
OperatorFamily make_birth_death(std::size_t n, double birth, double death);
OperatorFamily make_killed_chain(std::size_t n, double kill_rate);
OperatorFamily make_heat_kernel(double half_width, double h);
OperatorFamily make_non_feller_drift(double half_width, double h);

struct CatalogEntry {
  std::string name;
  std::vector<std::pair<std::string, double>> parameters;
  bool expected_feller = true;
  std::string closed_form_notes;
};

struct Process {
  CatalogEntry entry;
  OperatorFamily family;
};

/// Optional overrides for the builder parameters of a catalog entry.
struct ProcessParams {
  std::optional<std::size_t> n;
  std::optional<double> half_width;
  std::optional<double> h;
};

/// Catalog entries with their default parameters, sorted by name.
std::vector<CatalogEntry> catalog_entries();
bool is_catalog_name(const std::string& name);
/// Builds a catalog process; throws std::invalid_argument for unknown names
/// or invalid parameters.
Process build_process(const std::string& name, const ProcessParams& params = {});

}  // namespace feller
