#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace feller {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite set of states, optionally carrying uniformly spaced real
/// coordinates. The first and last `boundary_band()` points stand in for a
/// neighbourhood of infinity on truncated grids.
class StateSpace {
 public:
  /// Unlabelled finite state space (a Markov chain). Compact, so no band.
  static StateSpace finite(std::size_t n);

  /// Symmetric grid on [-half_width, half_width] with spacing h. The number
  /// of cells 2L/h must be an integer; `band_fraction` of the points at each
  /// end form the boundary band.
  static StateSpace uniform_grid(double half_width, double h,
                                 double band_fraction = 0.05);

  std::size_t size() const { return size_; }
  bool has_coordinates() const { return spacing_ > 0.0; }
  /// Grid spacing, or 0 for a space without coordinates.
  double spacing() const { return spacing_; }
  double half_width() const;
  double coordinate(std::size_t i) const;
  std::vector<double> coordinates() const;
  std::size_t boundary_band() const { return band_; }
  bool in_band(std::size_t i) const {
    return i < band_ || i + band_ >= size_;
  }
  /// Index of the coordinate 0 when it is a grid point.
  std::size_t origin_index() const;

  bool operator==(const StateSpace&) const = default;

  std::string summary() const;

 private:
  StateSpace(std::size_t n, double spacing, std::size_t band);

  std::size_t size_ = 0;
  double spacing_ = 0.0;
  std::size_t band_ = 0;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

inline SpacePtr share(StateSpace s) {
  return std::make_shared<const StateSpace>(std::move(s));
}

/// Real function on a state space; the values are always finite.
class GridFunction {
 public:
  GridFunction(SpacePtr space, Vector values);
  GridFunction(SpacePtr space, const std::vector<double>& values);

  static GridFunction zeros(SpacePtr space);
  static GridFunction constant(SpacePtr space, double c);

  const StateSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  SpacePtr space_;
  Vector values_;
};

double sup_norm(const Eigen::Ref<const Vector>& v);
inline double sup_norm(const GridFunction& f) { return sup_norm(f.values()); }

struct C0Verdict {
  bool is_c0 = true;
  double decay_defect = 0.0;       // max |f| on the boundary band
  double continuity_defect = 0.0;  // max |f(x_{i+1}) - f(x_i)|
};

/// Discrete membership test for continuous functions vanishing at infinity.
C0Verdict c0_verdict(const Eigen::Ref<const Vector>& values,
                     const StateSpace& space, double decay_tol,
                     double continuity_tol);
C0Verdict c0_verdict(const GridFunction& f, double decay_tol,
                     double continuity_tol);
/// Same, but throws std::invalid_argument unless f lives on `expected`.
C0Verdict c0_verdict(const GridFunction& f, const StateSpace& expected,
                     double decay_tol, double continuity_tol);

}  // namespace feller
