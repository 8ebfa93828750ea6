#include "feller/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "feller/linalg.hpp"

namespace feller {

namespace {

constexpr int kDefaultNodes = 64;
constexpr int kPanelOrder = 8;

double column_sup(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Composite Gauss-Legendre approximation of int_0^tmax e^{-lambda t} A(t) dt,
// where at(t) returns A(t) with the given shape.
template <class At>
Matrix composite_laplace(At&& at, Eigen::Index rows, Eigen::Index cols, double lambda,
                         double t_max, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = t_max / panels;
  Matrix acc = Matrix::Zero(rows, cols);
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = a + 0.5 * width * (rule.nodes[k] + 1.0);
      const double w = 0.5 * width * rule.weights[k] * std::exp(-lambda * t);
      acc.noalias() += w * at(t);
    }
  }
  return acc;
}

// Panel layout shared by the column and matrix forms: the fine rule and the
// coarser one whose difference is the error estimate.
struct Layout {
  double t_max;
  int panels;
  int coarse_panels;
  int coarse_order;
};

Layout layout(const OperatorFamily& fam, double lambda, QuadratureOptions opts) {
  const double t_max = opts.t_max > 0.0 ? opts.t_max : fam.default_t_max(lambda);
  const int n_nodes = opts.n_nodes > 0 ? opts.n_nodes : kDefaultNodes;
  if (!std::isfinite(t_max)) throw std::invalid_argument("t_max must be finite");
  if (n_nodes < kPanelOrder) throw std::invalid_argument("quadrature needs at least 8 nodes");
  const int panels = n_nodes / kPanelOrder;
  if (panels >= 2) return {t_max, panels, panels / 2, kPanelOrder};
  return {t_max, panels, 1, kPanelOrder / 2};
}

}  // namespace

Generator::Generator(Matrix q) : q_(std::move(q)) {
  if (q_.rows() != q_.cols() || q_.rows() == 0)
    throw std::invalid_argument("generator must be a non-empty square matrix");
  if (!q_.allFinite()) throw std::invalid_argument("generator entries must be finite");
  for (Eigen::Index i = 0; i < q_.rows(); ++i) {
    double scale = 0.0;
    for (Eigen::Index j = 0; j < q_.cols(); ++j) {
      scale += std::abs(q_(i, j));
      if (i != j && q_(i, j) < 0.0)
        throw std::invalid_argument("generator off-diagonal entries must be >= 0");
    }
    if (q_.row(i).sum() > 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("generator row sums must be <= 0");
  }
}

bool Generator::conservative(double tol) const {
  for (Eigen::Index i = 0; i < q_.rows(); ++i)
    if (std::abs(q_.row(i).sum()) > tol) return false;
  return true;
}

OperatorFamily::OperatorFamily(SpacePtr space, Generator generator)
    : space_(std::move(space)), backing_(std::move(generator)) {
  if (!space_) throw std::invalid_argument("operator family needs a state space");
  if (std::get<Generator>(backing_).size() != space_->size())
    throw std::invalid_argument("generator size does not match the state space");
}

OperatorFamily::OperatorFamily(SpacePtr space,
                               std::shared_ptr<const KernelSemigroup> kernel)
    : space_(std::move(space)), backing_(std::move(kernel)) {
  if (!space_) throw std::invalid_argument("operator family needs a state space");
  if (!std::get<std::shared_ptr<const KernelSemigroup>>(backing_))
    throw std::invalid_argument("operator family needs a kernel");
}

const KernelSemigroup* OperatorFamily::kernel() const {
  const auto* k = std::get_if<std::shared_ptr<const KernelSemigroup>>(&backing_);
  return k ? k->get() : nullptr;
}

double OperatorFamily::kernel_tol() const {
  return kernel() ? kernel()->kernel_tol() : 0.0;
}

std::optional<double> OperatorFamily::time_lattice() const {
  return kernel() ? kernel()->time_lattice() : std::nullopt;
}

double OperatorFamily::mixing_time_guess() const {
  // Slowest mean holding time of the chain; kernels do not mix.
  const Generator* g = generator();
  if (!g) return 0.0;
  double slowest = 0.0;
  for (Eigen::Index i = 0; i < g->matrix().rows(); ++i) {
    const double rate = -g->matrix()(i, i);
    if (rate > 0.0) slowest = std::max(slowest, 1.0 / rate);
  }
  return slowest;
}

double OperatorFamily::default_t_max(double lambda) const {
  return std::max(40.0 / lambda, 10.0 * mixing_time_guess());
}

void OperatorFamily::check_columns(const Matrix& columns) const {
  if (static_cast<std::size_t>(columns.rows()) != space_->size())
    throw std::invalid_argument("function length does not match the state space");
}

Matrix OperatorFamily::semigroup(double t, const Matrix& columns) const {
  check_columns(columns);
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument("semigroup time must be finite and >= 0");
  if (t == 0.0) return columns;
  if (const Generator* g = generator()) return expm(t * g->matrix()) * columns;
  return kernel()->apply(t, columns);
}

Matrix OperatorFamily::resolvent_exact(double lambda, const Matrix& columns) const {
  check_columns(columns);
  const Generator* g = generator();
  if (!g) throw std::invalid_argument("exact resolvent needs a generator backing");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("resolvent parameter must be > 0");
  const auto n = g->matrix().rows();
  const Matrix a = lambda * Matrix::Identity(n, n) - g->matrix();
  Eigen::PartialPivLU<Matrix> lu(a);
  // Strict diagonal dominance rules this out; reaching it is a bug.
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0)
    throw std::logic_error("lambda I - Q is singular");
  return lu.solve(columns);
}

ResolventEstimate OperatorFamily::resolvent_quadrature(double lambda,
                                                       const Matrix& columns,
                                                       QuadratureOptions opts) const {
  check_columns(columns);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("resolvent parameter must be > 0");
  if (const KernelSemigroup* k = kernel()) {
    if (auto own = k->laplace(lambda, columns)) return *own;
  }
  if (auto op = resolvent_operator(lambda, opts)) return op->apply(columns);
  const Layout l = layout(*this, lambda, opts);
  auto at = [&](double t) { return semigroup(t, columns); };
  ResolventEstimate out;
  out.value = composite_laplace(at, columns.rows(), columns.cols(), lambda, l.t_max, l.panels, kPanelOrder);
  const Matrix coarse =
      composite_laplace(at, columns.rows(), columns.cols(), lambda, l.t_max, l.coarse_panels, l.coarse_order);
  const double tail = std::exp(-lambda * l.t_max) * column_sup(columns) / lambda;
  out.error_estimate = column_sup(out.value - coarse) + tail;
  return out;
}

std::optional<ResolventOperator> OperatorFamily::resolvent_operator(double lambda,
                                                                   QuadratureOptions opts) const {
  const KernelSemigroup* k = kernel();
  if (!k || !k->is_dense()) return std::nullopt;
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("resolvent parameter must be > 0");
  const Layout l = layout(*this, lambda, opts);
  const auto n = static_cast<Eigen::Index>(space_->size());
  auto at = [&](double t) { return *k->dense(t); };
  ResolventOperator op;
  op.fine = composite_laplace(at, n, n, lambda, l.t_max, l.panels, kPanelOrder);
  op.coarse = composite_laplace(at, n, n, lambda, l.t_max, l.coarse_panels, l.coarse_order);
  op.tail = std::exp(-lambda * l.t_max) / lambda;
  return op;
}

ResolventEstimate ResolventOperator::apply(const Matrix& columns) const {
  ResolventEstimate out;
  out.value = fine * columns;
  out.error_estimate = column_sup(out.value - coarse * columns) + tail * column_sup(columns);
  return out;
}


ResolventEstimate OperatorFamily::resolvent(double lambda, const Matrix& columns) const {
  if (has_exact_resolvent()) return {resolvent_exact(lambda, columns), 0.0};
  return resolvent_quadrature(lambda, columns);
}

GridFunction semigroup_apply(const OperatorFamily& fam, double t,
                             const GridFunction& f) {
  if (!(f.space() == fam.space()))
    throw std::invalid_argument("function is defined on a different state space");
  if (t == 0.0) return f;
  return GridFunction(fam.space_ptr(), Vector(fam.semigroup(t, f.values())));
}

GridFunction resolvent_apply_exact(const OperatorFamily& fam, double lambda,
                                   const GridFunction& f) {
  if (!(f.space() == fam.space()))
    throw std::invalid_argument("function is defined on a different state space");
  return GridFunction(fam.space_ptr(), Vector(fam.resolvent_exact(lambda, f.values())));
}

QuadratureResolvent resolvent_apply_quadrature(const OperatorFamily& fam,
                                               double lambda,
                                               const GridFunction& f,
                                               double t_max, int n_nodes) {
  if (!(f.space() == fam.space()))
    throw std::invalid_argument("function is defined on a different state space");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
  if (n_nodes < kPanelOrder) throw std::invalid_argument("quadrature needs at least 8 nodes");
  auto est = fam.resolvent_quadrature(lambda, f.values(), {t_max, n_nodes});
  return {GridFunction(fam.space_ptr(), Vector(est.value)), est.error_estimate};
}

double resolvent_identity_residual(const OperatorFamily& fam, double lambda,
                                   double mu, const GridFunction& f) {
  if (!(f.space() == fam.space()))
    throw std::invalid_argument("function is defined on a different state space");
  const Matrix rl = fam.resolvent(lambda, f.values()).value;
  const Matrix rm = fam.resolvent(mu, f.values()).value;
  const Matrix rlrm = fam.resolvent(lambda, rm).value;
  return column_sup((rl - rm) - (mu - lambda) * rlrm);
}

double semigroup_law_residual(const OperatorFamily& fam, double t, double s,
                              const GridFunction& f) {
  if (!(f.space() == fam.space()))
    throw std::invalid_argument("function is defined on a different state space");
  const Matrix joint = fam.semigroup(t + s, f.values());
  const Matrix composed = fam.semigroup(t, fam.semigroup(s, f.values()));
  return column_sup(joint - composed);
}

double commutation_residual(const OperatorFamily& fam, double t, double lambda,
                            const GridFunction& f) {
  if (!(f.space() == fam.space()))
    throw std::invalid_argument("function is defined on a different state space");
  const Matrix ur = fam.semigroup(t, fam.resolvent(lambda, f.values()).value);
  const Matrix ru = fam.resolvent(lambda, fam.semigroup(t, f.values())).value;
  return column_sup(ur - ru);
}

}  // namespace feller
