#include "semigroup/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semigroup/error.hpp"

namespace semigroup {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NotCoercive: return "NotCoercive";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularExtension: return "SingularExtension";
    case ErrorCode::OutsideWindow: return "OutsideWindow";
    case ErrorCode::InvalidBC: return "InvalidBC";
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::SingularStep: return "SingularStep";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::DimensionMismatch, "ragged initializer list");
    }
    for (double v : r) data_.emplace_back(v, 0.0);
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::diagonal(std::span<const Complex> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

Matrix Matrix::transpose() const {
  Matrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw Error(ErrorCode::DimensionMismatch, "block out of range");
  }
  Matrix m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
  return m;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
    throw Error(ErrorCode::DimensionMismatch, "block out of range");
  }
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

double Matrix::norm_1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Matrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Matrix::norm_fro() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::is_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

bool Matrix::is_real(double tol) const {
  return std::all_of(data_.begin(), data_.end(),
                     [tol](const Complex& v) { return std::abs(v.imag()) <= tol; });
}

bool Matrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && (*this)(i, j) != Complex{}) return false;
  return true;
}

Matrix& Matrix::operator+=(const Matrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) {
    throw Error(ErrorCode::DimensionMismatch, "matrix sum");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += b.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) {
    throw Error(ErrorCode::DimensionMismatch, "matrix difference");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= b.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Complex s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix product");
  }
  Matrix c(a.rows(), b.cols());
  // i-k-j order; each c(i, j) still accumulates over k in increasing order
  // starting from an exact zero.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      if (aik.imag() == 0.0) {
        const double r = aik.real();
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += r * b(k, j);
      } else {
        for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  }
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    const auto r = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "max_abs_diff shapes differ");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

double norm2(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "dot");
  Complex s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * std::conj(y[i]);
  return s;
}

Vector subtract(std::span<const Complex> x, std::span<const Complex> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "subtract");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

Vector real_vector(std::span<const double> x) { return Vector(x.begin(), x.end()); }

Matrix weighted_similarity(const Matrix& a, std::span<const double> weights) {
  if (!a.is_square() || weights.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "weighted_similarity");
  }
  Matrix b(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      b(i, j) = a(i, j) * std::sqrt(weights[i] / weights[j]);
  return b;
}

Matrix weighted_symmetric_part(const Matrix& a, std::span<const double> weights) {
  if (!a.is_square() || weights.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "weighted_symmetric_part");
  }
  const std::size_t n = a.rows();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex wa = weights[i] * a(i, j) + std::conj(a(j, i)) * weights[j];
      g(i, j) = 0.5 * wa / std::sqrt(weights[i] * weights[j]);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// LU

LuFactorization::LuFactorization(const Matrix& a, const Tolerances& tol)
    : n_(a.rows()), lu_(a), perm_(a.rows()), norm1_(a.norm_1()) {
  if (!a.is_square()) throw Error(ErrorCode::DimensionMismatch, "LU needs a square matrix");
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = a.norm_inf();
  const double floor = tol.singular_pivot * (scale > 0.0 ? scale : 1.0);
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best >= floor) || best == 0.0) {
      throw Error(ErrorCode::SingularMatrix,
                  "pivot " + std::to_string(best) + " below threshold at column " +
                      std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const Complex d = lu_(k, k);
    for (std::size_t i = k + 1; i < n_; ++i) {
      const Complex l = lu_(i, k) / d;
      lu_(i, k) = l;
      if (l == Complex{}) continue;
      for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= l * lu_(k, j);
    }
  }
}

Vector LuFactorization::solve(std::span<const Complex> b) const {
  if (b.size() != n_) throw Error(ErrorCode::DimensionMismatch, "LU solve rhs");
  Vector x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n_; ++i) {
    Complex s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n_; i-- > 0;) {
    Complex s = x[i];
    for (std::size_t j = i + 1; j < n_; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Vector LuFactorization::solve_adjoint(std::span<const Complex> b) const {
  // P A = L U  =>  A^H = U^H L^H P, so solve U^H y = b, L^H z = y, x = P^T z.
  if (b.size() != n_) throw Error(ErrorCode::DimensionMismatch, "LU adjoint rhs");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    Complex s = y[i];
    for (std::size_t j = 0; j < i; ++j) s -= std::conj(lu_(j, i)) * y[j];
    y[i] = s / std::conj(lu_(i, i));
  }
  for (std::size_t i = n_; i-- > 0;) {
    Complex s = y[i];
    for (std::size_t j = i + 1; j < n_; ++j) s -= std::conj(lu_(j, i)) * y[j];
    y[i] = s;
  }
  Vector x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[perm_[i]] = y[i];
  return x;
}

double LuFactorization::condition_estimate() const {
  if (n_ == 0) return 0.0;
  // Hager's 1-norm estimator for ||A^-1||_1.
  Vector x(n_, Complex{1.0 / static_cast<double>(n_), 0.0});
  double est = 0.0;
  std::size_t last = n_;
  for (int iter = 0; iter < 5; ++iter) {
    const Vector y = solve(x);
    double ny = 0.0;
    for (const auto& v : y) ny += std::abs(v);
    if (iter > 0 && ny <= est) break;
    est = ny;
    Vector xi(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double m = std::abs(y[i]);
      xi[i] = m > 0.0 ? y[i] / m : Complex{1.0, 0.0};
    }
    const Vector z = solve_adjoint(xi);
    std::size_t jmax = 0;
    double zmax = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (std::abs(z[i]) > zmax) {
        zmax = std::abs(z[i]);
        jmax = i;
      }
    }
    if (jmax == last) break;
    last = jmax;
    std::fill(x.begin(), x.end(), Complex{});
    x[jmax] = 1.0;
  }
  return norm1_ * est;
}

Matrix LuFactorization::inverse() const {
  Matrix inv(n_, n_);
  Vector e(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    std::fill(e.begin(), e.end(), Complex{});
    e[j] = 1.0;
    const Vector col = solve(e);
    for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
  }
  return inv;
}

SolveReport lu_solve(const Matrix& a, std::span<const Complex> b, const Tolerances& tol) {
  if (!a.is_square() || a.rows() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "lu_solve");
  }
  const LuFactorization lu(a, tol);
  SolveReport report;
  report.solution = lu.solve(b);
  report.residual_norm = norm2(subtract(a * report.solution, b));
  report.condition_estimate = lu.condition_estimate();
  return report;
}

Matrix inverse(const Matrix& a, const Tolerances& tol) { return LuFactorization(a, tol).inverse(); }

}  // namespace semigroup
