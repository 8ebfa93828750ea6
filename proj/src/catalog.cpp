#include "feller/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace feller {

namespace {

constexpr double kKillRate = 0.5;
constexpr std::size_t kDefaultChainSize = 50;
constexpr double kDefaultHalfWidth = 10.0;
constexpr double kHeatSpacing = 0.05;
constexpr double kDriftSpacing = 0.01;

// P(lo < Z < hi) for a standard normal Z, accurate in both tails.
double normal_interval(double lo, double hi) {
  constexpr double r = 1.0 / std::numbers::sqrt2;
  if (lo >= 0.0) return 0.5 * (std::erfc(lo * r) - std::erfc(hi * r));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi * r) - std::erfc(-lo * r));
  return 1.0 - 0.5 * std::erfc(-lo * r) - 0.5 * std::erfc(hi * r);
}

void check_rate(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument(std::string(what) + " must be a positive finite rate");
}

Matrix birth_death_matrix(std::size_t n, double birth, double death) {
  if (n < 2) throw std::invalid_argument("birth-death chain needs n >= 2");
  if (n > 500) throw std::invalid_argument("birth-death chain supports n <= 500");
  check_rate(birth, "birth");
  check_rate(death, "death");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix q = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i + 1 < m) q(i, i + 1) = birth;
    if (i > 0) q(i, i - 1) = death;
    q(i, i) = -(q.row(i).sum());
  }
  return q;
}

void check_grid(double half_width, double h, double max_ratio) {
  if (!(half_width > 0.0) || !(h > 0.0) || !std::isfinite(half_width) || !std::isfinite(h))
    throw std::invalid_argument("grid needs L > 0 and h > 0");
  if (half_width / h > max_ratio)
    throw std::invalid_argument("grid too fine: L/h exceeds " + std::to_string(max_ratio));
}

}  // namespace

HeatKernel::HeatKernel(SpacePtr grid) : grid_(std::move(grid)) {
  if (!grid_ || !grid_->has_coordinates())
    throw std::invalid_argument("heat kernel needs a coordinate grid");
}

Matrix HeatKernel::transition_matrix(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("heat kernel needs t > 0");
  const auto n = static_cast<Eigen::Index>(grid_->size());
  const double scale = grid_->spacing() / std::sqrt(t);
  // Interior cells depend only on the index offset d = j - i.
  std::vector<double> interior(static_cast<std::size_t>(2 * n - 1));
  for (Eigen::Index d = -(n - 1); d <= n - 1; ++d)
    interior[static_cast<std::size_t>(d + n - 1)] =
        normal_interval((d - 0.5) * scale, (d + 0.5) * scale);
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 1; j + 1 < n; ++j)
      k(i, j) = interior[static_cast<std::size_t>(j - i + n - 1)];
    k(i, 0) = normal_interval(static_cast<double>(-i) * scale, (0.5 - static_cast<double>(i)) * scale);
    const double far = static_cast<double>(n - 1 - i);
    k(i, n - 1) = normal_interval((far - 0.5) * scale, far * scale);
  }
  return k;
}

Matrix HeatKernel::apply(double t, const Matrix& columns) const {
  return transition_matrix(t) * columns;
}

ShiftDrift::ShiftDrift(SpacePtr grid) : grid_(std::move(grid)) {
  if (!grid_ || !grid_->has_coordinates())
    throw std::invalid_argument("drift kernel needs a coordinate grid");
  (void)grid_->origin_index();  // 0 must be a grid point
}

long ShiftDrift::steps(double t) const {
  const double ratio = t / grid_->spacing();
  const double k = std::round(ratio);
  if (!(t >= 0.0) || std::abs(ratio - k) > 1e-6 * std::max(1.0, ratio))
    throw std::invalid_argument("drift semigroup needs t to be a multiple of h");
  return static_cast<long>(k);
}

Matrix ShiftDrift::apply(double t, const Matrix& columns) const {
  const long k = steps(t);
  const auto n = columns.rows();
  const auto origin = static_cast<Eigen::Index>(grid_->origin_index());
  Matrix out = columns;
  for (Eigen::Index i = origin + 1; i < n; ++i) {
    const Eigen::Index src = i + k;
    if (src < n) out.row(i) = columns.row(src);
    else out.row(i).setZero();
  }
  return out;
}

std::optional<ResolventEstimate> ShiftDrift::laplace(double lambda,
                                                     const Matrix& columns) const {
  const double h = grid_->spacing();
  const double z = lambda * h;
  const double decay = std::exp(-z);
  const double mass = h * (-std::expm1(-z)) / z;  // int_0^h e^{-lambda u} du
  double right;                                   // int_0^h e^{-lambda u} u/h du
  if (z < 0.1) {
    double term = 1.0, sum = 0.0, fact = 1.0;
    for (int k = 0; k < 20; ++k) {
      if (k > 0) { term *= -z; fact *= k; }
      sum += term / (fact * (k + 2));
    }
    right = h * sum;
  } else {
    right = (1.0 - decay * (1.0 + z)) / (h * lambda * lambda);
  }
  const double left = mass - right;

  const auto n = columns.rows();
  const auto origin = static_cast<Eigen::Index>(grid_->origin_index());
  ResolventEstimate out;
  out.value = columns / lambda;
  Matrix coarse = out.value;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    double acc = 0.0, acc_step = 0.0;
    for (Eigen::Index i = n - 1; i > origin; --i) {
      const double next = i + 1 < n ? columns(i + 1, c) : 0.0;
      acc = left * columns(i, c) + right * next + decay * acc;
      acc_step = mass * columns(i, c) + decay * acc_step;
      out.value(i, c) = acc;
      coarse(i, c) = acc_step;
    }
  }
  out.error_estimate = (out.value - coarse).cwiseAbs().maxCoeff();
  return out;
}

OperatorFamily make_two_state(double a, double b) {
  check_rate(a, "a");
  check_rate(b, "b");
  Matrix q(2, 2);
  q << -a, a, b, -b;
  return OperatorFamily(share(StateSpace::finite(2)), Generator(std::move(q)));
}

OperatorFamily make_birth_death(std::size_t n, double birth, double death) {
  Matrix q = birth_death_matrix(n, birth, death);
  return OperatorFamily(share(StateSpace::finite(n)), Generator(std::move(q)));
}

OperatorFamily make_killed_chain(std::size_t n, double kill_rate) {
  if (!(kill_rate >= 0.0) || !std::isfinite(kill_rate))
    throw std::invalid_argument("kill rate must be finite and >= 0");
  Matrix q = birth_death_matrix(n, 1.0, 1.0);
  q.diagonal().array() -= kill_rate;
  return OperatorFamily(share(StateSpace::finite(n)), Generator(std::move(q)));
}

OperatorFamily make_heat_kernel(double half_width, double h) {
  check_grid(half_width, h, 2000.0);
  auto grid = share(StateSpace::uniform_grid(half_width, h));
  return OperatorFamily(grid, std::make_shared<const HeatKernel>(grid));
}

OperatorFamily make_non_feller_drift(double half_width, double h) {
  check_grid(half_width, h, 20000.0);
  auto grid = share(StateSpace::uniform_grid(half_width, h));
  return OperatorFamily(grid, std::make_shared<const ShiftDrift>(grid));
}

std::vector<CatalogEntry> catalog_entries() {
  std::vector<CatalogEntry> entries = {
      {"birth-death",
       {{"n", static_cast<double>(kDefaultChainSize)}, {"birth", 1.0}, {"death", 1.0}},
       true,
       "tridiagonal conservative generator with reflecting ends; U_t 1 = 1"},
      {"heat-kernel",
       {{"L", kDefaultHalfWidth}, {"h", kHeatSpacing}},
       true,
       "Gaussian convolution widens exp(-x^2/2) to variance 1+t; resolvent kernel "
       "(2 lambda)^{-1/2} exp(-sqrt(2 lambda)|x-y|)"},
      {"killed-chain",
       {{"n", static_cast<double>(kDefaultChainSize)}, {"kill_rate", kKillRate}},
       true,
       "U_t 1 = exp(-kill_rate t); R_lambda 1 = 1/(lambda + kill_rate)"},
      {"non-feller-drift",
       {{"L", kDefaultHalfWidth}, {"h", kDriftSpacing}},
       false,
       "U_t f(x) = f(x + t) for x > 0 and f(x) for x <= 0; images jump at x = 0"},
      {"two-state",
       {{"a", 1.0}, {"b", 1.0}},
       true,
       "U_t = (1 +/- exp(-2t))/2 entries; R_lambda from the symbolic 2x2 inverse"},
  };
  std::sort(entries.begin(), entries.end(),
            [](const CatalogEntry& x, const CatalogEntry& y) { return x.name < y.name; });
  return entries;
}

bool is_catalog_name(const std::string& name) {
  for (const auto& e : catalog_entries())
    if (e.name == name) return true;
  return false;
}

Process build_process(const std::string& name, const ProcessParams& params) {
  for (auto entry : catalog_entries()) {
    if (entry.name != name) continue;
    auto set = [&](const std::string& key, double value) {
      for (auto& [k, v] : entry.parameters)
        if (k == key) { v = value; return; }
      throw std::invalid_argument("process '" + name + "' has no parameter " + key);
    };
    auto get = [&](const std::string& key) {
      for (const auto& [k, v] : entry.parameters)
        if (k == key) return v;
      throw std::logic_error("missing catalog parameter " + key);
    };
    if (params.n) set("n", static_cast<double>(*params.n));
    if (params.half_width) set("L", *params.half_width);
    if (params.h) set("h", *params.h);

    if (name == "two-state")
      return {entry, make_two_state(get("a"), get("b"))};
    if (name == "birth-death")
      return {entry, make_birth_death(static_cast<std::size_t>(get("n")), get("birth"), get("death"))};
    if (name == "killed-chain")
      return {entry, make_killed_chain(static_cast<std::size_t>(get("n")), get("kill_rate"))};
    if (name == "heat-kernel")
      return {entry, make_heat_kernel(get("L"), get("h"))};
    return {entry, make_non_feller_drift(get("L"), get("h"))};
  }
  throw std::invalid_argument("unknown process '" + name + "'");
}

}  // namespace feller
