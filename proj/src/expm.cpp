#include <cmath>

#include "semigroup/error.hpp"
#include "semigroup/linalg.hpp"

namespace semigroup {

namespace {

// Pade [13/13] coefficients and the scaling threshold from Higham (2005).
constexpr double kPade13[14] = {64764752532480000.0,
                                32382376266240000.0,
                                7771770303897600.0,
                                1187353796428800.0,
                                129060195264000.0,
                                10559470521600.0,
                                670442572800.0,
                                33522128640.0,
                                1323241920.0,
                                40840800.0,
                                960960.0,
                                16380.0,
                                182.0,
                                1.0};
constexpr double kTheta13 = 5.371920351148152;

Matrix combine(const Matrix& a6, const Matrix& a4, const Matrix& a2, double c6, double c4,
               double c2) {
  Matrix r = c6 * a6;
  r += c4 * a4;
  r += c2 * a2;
  return r;
}

}  // namespace

Matrix expm(const Matrix& a, double t, const Tolerances& tol) {
  if (!a.is_square()) throw Error(ErrorCode::DimensionMismatch, "expm needs a square matrix");
  const std::size_t n = a.rows();
  const Matrix ta = Complex{t, 0.0} * a;
  const double norm = ta.norm_1();
  if (!std::isfinite(norm) || norm > tol.expm_norm_bound) {
    throw Error(ErrorCode::Overflow,
                "||tA||_1 = " + std::to_string(norm) + " exceeds the configured bound");
  }
  if (norm == 0.0) return Matrix::identity(n);

  int squarings = 0;
  if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  const Matrix b = Complex{std::ldexp(1.0, -squarings), 0.0} * ta;

  const Matrix ident = Matrix::identity(n);
  const Matrix b2 = b * b;
  const Matrix b4 = b2 * b2;
  const Matrix b6 = b4 * b2;
  const double* c = kPade13;

  Matrix u_inner = b6 * combine(b6, b4, b2, c[13], c[11], c[9]);
  u_inner += combine(b6, b4, b2, c[7], c[5], c[3]);
  u_inner += c[1] * ident;
  const Matrix u = b * u_inner;

  Matrix v = b6 * combine(b6, b4, b2, c[12], c[10], c[8]);
  v += combine(b6, b4, b2, c[6], c[4], c[2]);
  v += c[0] * ident;

  const LuFactorization lu(v - u, tol);
  const Matrix rhs = v + u;
  Matrix x(n, n);
  Vector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = rhs(i, j);
    const Vector s = lu.solve(col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = s[i];
  }
  for (int k = 0; k < squarings; ++k) x = x * x;
  return x;
}

}  // namespace semigroup
