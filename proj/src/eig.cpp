#include <algorithm>
#include <cmath>
#include <numeric>

#include "semigroup/error.hpp"
#include "semigroup/linalg.hpp"

namespace semigroup {

namespace {

struct RealSym {
  std::size_t n;
  std::vector<double> a;
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

SymEig jacobi(const Matrix& m, const Tolerances& tol, bool want_vectors) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "sym_eig needs a square matrix");
  const std::size_t n = m.rows();
  const double scale = std::max(m.max_abs(), 1e-300);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(m(i, j).imag()) > tol.symmetry * scale ||
          std::abs(m(i, j) - m(j, i)) > tol.symmetry * scale) {
        throw Error(ErrorCode::NotSymmetric, "entry (" + std::to_string(i) + "," +
                                                 std::to_string(j) + ") breaks symmetry");
      }
    }
  }

  RealSym a{n, std::vector<double>(n * n)};
  RealSym v{n, std::vector<double>(want_vectors ? n * n : 0, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (want_vectors) v(i, i) = 1.0;
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j).real() + m(j, i).real());
  }

  double fro = 0.0;
  for (double x : a.a) fro += x * x;
  fro = std::sqrt(fro);

  for (int sweep = 0; sweep < tol.jacobi_max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-17 * fro || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Off-diagonal entries below the diagonal's precision are dropped.
        const double g100 = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g100 == std::abs(app) &&
            std::abs(aqq) + g100 == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double g = a(k, p);
          const double h = a(k, q);
          const double kp = c * g - s * h;
          const double kq = s * g + c * h;
          a(k, p) = kp;
          a(p, k) = kp;
          a(k, q) = kq;
          a(q, k) = kq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; want_vectors && k < n; ++k) {
          const double g = v(k, p);
          const double h = v(k, q);
          v(k, p) = c * g - s * h;
          v(k, q) = s * g + c * h;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymEig out;
  out.values.resize(n);
  if (want_vectors) out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    if (!want_vectors) continue;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace

SymEig sym_eig(const Matrix& m, const Tolerances& tol) { return jacobi(m, tol, true); }

std::vector<double> hermitian_eigvals(const Matrix& h, const Tolerances& tol) {
  if (!h.is_square()) throw Error(ErrorCode::DimensionMismatch, "hermitian_eigvals");
  const double scale = std::max(h.max_abs(), 1e-300);
  if (h.is_real(tol.symmetry * scale)) return jacobi(h, tol, false).values;

  const std::size_t n = h.rows();
  Matrix e(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(h(i, j) - std::conj(h(j, i))) > tol.symmetry * scale) {
        throw Error(ErrorCode::NotSymmetric, "matrix is not Hermitian");
      }
      e(i, j) = h(i, j).real();
      e(i + n, j + n) = h(i, j).real();
      e(i, j + n) = -h(i, j).imag();
      e(i + n, j) = h(i, j).imag();
    }
  }
  const auto doubled = jacobi(e, tol, false).values;
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = 0.5 * (doubled[2 * k] + doubled[2 * k + 1]);
  return values;
}

}  // namespace semigroup
