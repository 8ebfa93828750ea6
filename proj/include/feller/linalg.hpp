#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "feller/state_space.hpp"

namespace feller {

/// Matrix exponential by scaling and squaring with the degree-13 Pade
/// approximant. The squaring count comes from the 1-norm of `a`.
Matrix expm(const Matrix& a);

/// Number of squarings expm() uses for `a`.
int expm_squarings(const Matrix& a);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

/// Dense LU with partial pivoting in an arbitrary field type. Exact zeros are
/// skipped during elimination, so banded inputs factor in near-banded time.
template <class T>
class DenseLU {
 public:
  DenseLU(std::vector<T> a, std::size_t n) : lu_(std::move(a)), perm_(n), n_(n) {
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      T best = magnitude(at(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        const T m = magnitude(at(i, k));
        if (m > best) { best = m; piv = i; }
      }
      if (best == T(0)) throw std::logic_error("singular matrix in LU factorisation");
      if (piv != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(piv, j));
        std::swap(perm_[k], perm_[piv]);
      }
      const T pivot = at(k, k);
      for (std::size_t i = k + 1; i < n_; ++i) {
        if (at(i, k) == T(0)) continue;
        const T mult = at(i, k) / pivot;
        at(i, k) = mult;
        for (std::size_t j = k + 1; j < n_; ++j)
          if (at(k, j) != T(0)) at(i, j) -= mult * at(k, j);
      }
    }
  }

  /// Solves in place for a column-major block of `cols` right-hand sides.
  void solve(std::vector<T>& b, std::size_t cols) const {
    std::vector<T> tmp(n_);
    for (std::size_t c = 0; c < cols; ++c) {
      T* col = b.data() + c * n_;
      for (std::size_t i = 0; i < n_; ++i) tmp[i] = col[perm_[i]];
      for (std::size_t i = 0; i < n_; ++i) {
        T s = tmp[i];
        for (std::size_t j = 0; j < i; ++j)
          if (at(i, j) != T(0)) s -= at(i, j) * tmp[j];
        tmp[i] = s;
      }
      for (std::size_t ii = n_; ii-- > 0;) {
        T s = tmp[ii];
        for (std::size_t j = ii + 1; j < n_; ++j)
          if (at(ii, j) != T(0)) s -= at(ii, j) * tmp[j];
        tmp[ii] = s / at(ii, ii);
      }
      for (std::size_t i = 0; i < n_; ++i) col[i] = tmp[i];
    }
  }

 private:
  static T magnitude(const T& x) { return x < T(0) ? -x : x; }
  T& at(std::size_t i, std::size_t j) { return lu_[i * n_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return lu_[i * n_ + j]; }

  std::vector<T> lu_;  // row-major
  std::vector<std::size_t> perm_;
  std::size_t n_;
};

}  // namespace feller
