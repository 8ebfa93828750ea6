#include "feller/state_space.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace feller {

StateSpace::StateSpace(std::size_t n, double spacing, std::size_t band)
    : size_(n), spacing_(spacing), band_(band) {
  if (n == 0) throw std::invalid_argument("state space must be non-empty");
  if (2 * band >= n)
    throw std::invalid_argument("boundary band must cover less than half the points");
}

StateSpace StateSpace::finite(std::size_t n) { return StateSpace(n, 0.0, 0); }

StateSpace StateSpace::uniform_grid(double half_width, double h,
                                    double band_fraction) {
  if (!(half_width > 0.0) || !(h > 0.0) || !std::isfinite(half_width) ||
      !std::isfinite(h))
    throw std::invalid_argument("grid half-width and spacing must be positive");
  if (!(band_fraction >= 0.0 && band_fraction < 0.5))
    throw std::invalid_argument("band fraction must lie in [0, 0.5)");
  const double cells = 2.0 * half_width / h;
  const double rounded = std::round(cells);
  if (rounded < 2.0 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
    throw std::invalid_argument("2L/h must be an integer number of cells (>= 2)");
  const auto n = static_cast<std::size_t>(rounded) + 1;
  std::size_t band = static_cast<std::size_t>(std::floor(band_fraction * static_cast<double>(n)));
  if (band_fraction > 0.0 && band == 0 && n >= 3) band = 1;
  return StateSpace(n, h, band);
}

double StateSpace::half_width() const {
  return 0.5 * static_cast<double>(size_ - 1) * spacing_;
}

double StateSpace::coordinate(std::size_t i) const {
  if (!has_coordinates()) throw std::logic_error("state space has no coordinates");
  // Symmetric construction keeps the centre point at exactly 0.
  return (static_cast<double>(i) - 0.5 * static_cast<double>(size_ - 1)) * spacing_;
}

std::vector<double> StateSpace::coordinates() const {
  std::vector<double> x;
  if (!has_coordinates()) return x;
  x.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) x.push_back(coordinate(i));
  return x;
}

std::size_t StateSpace::origin_index() const {
  if (!has_coordinates() || (size_ - 1) % 2 != 0)
    throw std::logic_error("0 is not a grid point of this state space");
  return (size_ - 1) / 2;
}

std::string StateSpace::summary() const {
  std::ostringstream os;
  os << size_ << " states";
  if (has_coordinates()) os << " on [-" << half_width() << ", " << half_width() << "], h=" << spacing_;
  os << ", boundary band " << band_;
  return os.str();
}

GridFunction::GridFunction(SpacePtr space, Vector values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw std::invalid_argument("grid function needs a state space");
  if (static_cast<std::size_t>(values_.size()) != space_->size())
    throw std::invalid_argument("grid function length does not match the state space");
  if (!values_.allFinite())
    throw std::invalid_argument("grid function values must be finite");
}

GridFunction::GridFunction(SpacePtr space, const std::vector<double>& values)
    : GridFunction(std::move(space),
                   Vector(Eigen::Map<const Vector>(values.data(),
                                                   static_cast<Eigen::Index>(values.size())))) {}

GridFunction GridFunction::zeros(SpacePtr space) {
  const auto n = static_cast<Eigen::Index>(space->size());
  return GridFunction(std::move(space), Vector::Zero(n));
}

GridFunction GridFunction::constant(SpacePtr space, double c) {
  const auto n = static_cast<Eigen::Index>(space->size());
  return GridFunction(std::move(space), Vector::Constant(n, c));
}

double sup_norm(const Eigen::Ref<const Vector>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

C0Verdict c0_verdict(const Eigen::Ref<const Vector>& values,
                     const StateSpace& space, double decay_tol,
                     double continuity_tol) {
  if (!(decay_tol > 0.0) || !(continuity_tol > 0.0))
    throw std::invalid_argument("C0 tolerances must be positive");
  if (static_cast<std::size_t>(values.size()) != space.size())
    throw std::invalid_argument("function length does not match the state space");
  C0Verdict v;
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i)
    if (space.in_band(i))
      v.decay_defect = std::max(v.decay_defect, std::abs(values[static_cast<Eigen::Index>(i)]));
  if (space.has_coordinates()) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      v.continuity_defect = std::max(v.continuity_defect, std::abs(values[k + 1] - values[k]));
    }
  }
  v.is_c0 = v.decay_defect <= decay_tol && v.continuity_defect <= continuity_tol;
  return v;
}

C0Verdict c0_verdict(const GridFunction& f, double decay_tol,
                     double continuity_tol) {
  return c0_verdict(f.values(), f.space(), decay_tol, continuity_tol);
}

C0Verdict c0_verdict(const GridFunction& f, const StateSpace& expected,
                     double decay_tol, double continuity_tol) {
  if (!(f.space() == expected))
    throw std::invalid_argument("function is defined on a different state space");
  return c0_verdict(f, decay_tol, continuity_tol);
}

}  // namespace feller
