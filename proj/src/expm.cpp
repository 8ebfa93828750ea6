#include <array>
#include <cmath>

#include "feller/linalg.hpp"

namespace feller {

namespace {

// Higham (2005) degree-13 Pade coefficients and the matching 1-norm bound.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

double norm1(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

int expm_squarings(const Matrix& a) {
  const double nrm = norm1(a);
  if (!(nrm > kTheta13)) return 0;
  return static_cast<int>(std::ceil(std::log2(nrm / kTheta13)));
}

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm needs a square matrix");
  if (!a.allFinite()) throw std::invalid_argument("expm needs finite entries");
  const auto n = a.rows();
  if (norm1(a) == 0.0) return Matrix::Identity(n, n);
  const int s = expm_squarings(a);
  const Matrix as = a / std::ldexp(1.0, s);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const auto& b = kPade13;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                         b[5] * a4 + b[3] * a2 + b[1] * id;
  const Matrix u = as * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = (r * r).eval();
  return r;
}

}  // namespace feller
