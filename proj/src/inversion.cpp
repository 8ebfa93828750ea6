#include "feller/inversion.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>

#include "feller/linalg.hpp"

namespace feller {

namespace {

using quad = __float128;

template <class T>
struct Arith;

template <>
struct Arith<double> {
  static double abs(double x) { return std::abs(x); }
  static double exp(double x) { return std::exp(x); }
  static double lgamma(double x) { return std::lgamma(x); }
};

template <>
struct Arith<quad> {
  static quad abs(quad x) { return fabsq(x); }
  static quad exp(quad x) { return expq(x); }
  static quad lgamma(quad x) { return lgammaq(x); }
};

// Running sum of column-major blocks, optionally with Neumaier compensation.
template <class T>
class Accumulator {
 public:
  Accumulator(std::size_t size, Summation mode) : sum_(size, T(0)), carry_(size, T(0)), mode_(mode) {}

  void add(const std::vector<T>& x) {
    for (std::size_t i = 0; i < sum_.size(); ++i) {
      if (mode_ == Summation::plain) {
        sum_[i] += x[i];
        continue;
      }
      const T s = sum_[i] + x[i];
      if (Arith<T>::abs(sum_[i]) >= Arith<T>::abs(x[i]))
        carry_[i] += (sum_[i] - s) + x[i];
      else
        carry_[i] += (x[i] - s) + sum_[i];
      sum_[i] = s;
    }
  }

  T value(std::size_t i) const { return sum_[i] + carry_[i]; }

 private:
  std::vector<T> sum_, carry_;
  Summation mode_;
};

// log(e^{n lambda t}/n!)
double log_term_bound(double lambda_t, int n) {
  return n * lambda_t - std::lgamma(n + 1.0);
}

void validate(const InversionConfig& cfg) {
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda))
    throw std::invalid_argument("inversion needs lambda > 0");
  if (!(cfg.t >= 0.0) || !std::isfinite(cfg.t))
    throw std::invalid_argument("inversion needs t >= 0");
  if (cfg.max_terms < 1) throw std::invalid_argument("inversion needs max_terms >= 1");
  if (!(cfg.term_tol > 0.0)) throw std::invalid_argument("inversion needs term_tol > 0");
  if (!cfg.allow_over_cap && cfg.lambda * cfg.t > cfg.lt_cap)
    throw std::invalid_argument("lambda * t = " + std::to_string(cfg.lambda * cfg.t) +
                                " exceeds the cap " + std::to_string(cfg.lt_cap));
}

// Resolvent source for term n, writing R_{n lambda} F column-major into out.
template <class T>
class TermResolvent;

template <>
class TermResolvent<quad> {
 public:
  TermResolvent(const OperatorFamily& fam, const Matrix& columns)
      : q_(fam.generator()->matrix()), columns_(columns) {}

  std::vector<quad> operator()(double shift) const {
    const auto n = static_cast<std::size_t>(q_.rows());
    std::vector<quad> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a[i * n + j] = -static_cast<quad>(q_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += static_cast<quad>(shift);
    DenseLU<quad> lu(std::move(a), n);
    const auto cols = static_cast<std::size_t>(columns_.cols());
    std::vector<quad> b(n * cols);
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t i = 0; i < n; ++i)
        b[c * n + i] = columns_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    lu.solve(b, cols);
    return b;
  }

 private:
  const Matrix& q_;
  const Matrix& columns_;
};

template <>
class TermResolvent<double> {
 public:
  TermResolvent(const OperatorFamily& fam, const Matrix& columns) : fam_(fam), columns_(columns) {}

  std::vector<double> operator()(double shift) const {
    const Matrix r = fam_.resolvent(shift, columns_).value;
    return std::vector<double>(r.data(), r.data() + r.size());
  }

 private:
  const OperatorFamily& fam_;
  const Matrix& columns_;
};

template <class T>
std::vector<InversionResult> run_series(const OperatorFamily& fam,
                                        const InversionConfig& cfg,
                                        const std::vector<GridFunction>& fs,
                                        bool extended) {
  const auto rows = static_cast<Eigen::Index>(fam.space().size());
  const auto cols = static_cast<Eigen::Index>(fs.size());
  Matrix columns(rows, cols);
  std::vector<double> norms(fs.size());
  double max_norm = 0.0;
  for (std::size_t c = 0; c < fs.size(); ++c) {
    if (!(fs[c].space() == fam.space()))
      throw std::invalid_argument("function is defined on a different state space");
    columns.col(static_cast<Eigen::Index>(c)) = fs[c].values();
    norms[c] = sup_norm(fs[c]);
    max_norm = std::max(max_norm, norms[c]);
  }

  const double lt = cfg.lambda * cfg.t;
  if (max_norm > 0.0) {
    const double peak = max_norm * series_peak_bound(lt, cfg.max_terms);
    if (!(peak <= cancellation_limit(extended)))
      throw CancellationError("inversion terms peak near " + std::to_string(peak) +
                              "; lower lambda * t (currently " + std::to_string(lt) + ")");
  }

  const std::size_t block = static_cast<std::size_t>(rows * cols);
  Accumulator<T> acc(block, cfg.summation);
  TermResolvent<T> resolvent(fam, columns);
  std::vector<double> cancellation(fs.size(), 0.0);
  std::vector<T> term;
  int below = 0;
  int n = 1;
  const double peak_index = std::exp(lt);
  for (;; ++n) {
    const double shift = n * cfg.lambda;
    term = resolvent(shift);
    // (-1)^{n+1} * n lambda * e^{n lambda t} / n!, formed in log space.
    T coef = static_cast<T>(shift) *
             Arith<T>::exp(static_cast<T>(n) * static_cast<T>(lt) - Arith<T>::lgamma(static_cast<T>(n + 1)));
    if (n % 2 == 0) coef = -coef;
    for (std::size_t c = 0; c < fs.size(); ++c) {
      T mag = T(0);
      for (Eigen::Index i = 0; i < rows; ++i) {
        T& v = term[c * static_cast<std::size_t>(rows) + static_cast<std::size_t>(i)];
        v *= coef;
        mag = std::max(mag, Arith<T>::abs(v));
      }
      cancellation[c] = std::max(cancellation[c], static_cast<double>(mag));
    }
    acc.add(term);

    const double bound = max_norm * std::exp(log_term_bound(lt, n));
    below = (bound < cfg.term_tol && n >= peak_index) ? below + 1 : 0;
    if (below >= 3 || n >= cfg.max_terms) break;
  }

  const double tail = series_tail_bound(lt, n);
  std::vector<InversionResult> out;
  out.reserve(fs.size());
  for (std::size_t c = 0; c < fs.size(); ++c) {
    Vector v(rows);
    for (Eigen::Index i = 0; i < rows; ++i)
      v[i] = static_cast<double>(acc.value(c * static_cast<std::size_t>(rows) + static_cast<std::size_t>(i)));
    out.push_back({GridFunction(fam.space_ptr(), std::move(v)), n, cancellation[c], norms[c] * tail});
  }
  return out;
}

}  // namespace

std::string to_string(Summation s) {
  return s == Summation::plain ? "plain" : "compensated";
}

Summation parse_summation(const std::string& s) {
  if (s == "plain") return Summation::plain;
  if (s == "compensated") return Summation::compensated;
  throw std::invalid_argument("summation must be plain or compensated, got '" + s + "'");
}

double cancellation_limit(bool extended_precision) {
  return extended_precision ? 1e24 : 1e12;
}

double series_peak_bound(double lambda_t, int max_terms) {
  // e^{n lt}/n! increases while n < e^{lt}, so the peak sits at floor(e^{lt}).
  const double x = std::exp(lambda_t);
  const int top = static_cast<int>(std::min<double>(std::max(1.0, std::floor(x)), max_terms));
  double best = log_term_bound(lambda_t, top);
  if (top + 1 <= max_terms) best = std::max(best, log_term_bound(lambda_t, top + 1));
  return std::exp(best);
}

double series_tail_bound(double lambda_t, int terms) {
  const double x = std::exp(lambda_t);
  quad sum = 0;
  for (int n = terms + 1; n < terms + 100000; ++n) {
    const quad term = expq(static_cast<quad>(n) * static_cast<quad>(lambda_t) - lgammaq(static_cast<quad>(n + 1)));
    sum += term;
    if (n > x && term < sum * static_cast<quad>(1e-30)) break;
  }
  return static_cast<double>(sum);
}

std::vector<InversionResult> inversion_apply(const OperatorFamily& fam,
                                             const InversionConfig& cfg,
                                             const std::vector<GridFunction>& fs) {
  validate(cfg);
  if (fs.empty()) return {};
  if (fam.has_exact_resolvent()) return run_series<quad>(fam, cfg, fs, true);
  return run_series<double>(fam, cfg, fs, false);
}

InversionResult inversion_apply(const OperatorFamily& fam,
                                const InversionConfig& cfg,
                                const GridFunction& f) {
  return inversion_apply(fam, cfg, std::vector<GridFunction>{f}).front();
}

std::vector<SweepPoint> inversion_convergence_sweep(const OperatorFamily& fam,
                                                    double t,
                                                    const GridFunction& f,
                                                    std::vector<double> lambdas,
                                                    InversionConfig base) {
  std::sort(lambdas.begin(), lambdas.end());
  const GridFunction reference = semigroup_apply(fam, t, f);
  std::vector<SweepPoint> out;
  for (double lambda : lambdas) {
    InversionConfig cfg = base;
    cfg.lambda = lambda;
    cfg.t = t;
    const InversionResult r = inversion_apply(fam, cfg, f);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!fam.has_exact_resolvent() && fam.space().in_band(i)) continue;
      err = std::max(err, std::abs(r.value[i] - reference[i]));
    }
    out.push_back({lambda, err, r.terms_used, r.cancellation_magnitude, r.tail_bound});
  }
  return out;
}

}  // namespace feller
