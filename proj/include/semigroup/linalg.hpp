#pragma once

// Dense complex matrix kernel: LU with partial pivoting, Jacobi symmetric
// eigensolver, scaling-and-squaring exponential, operator p-norm estimation.
// Sizes are small (a few hundred), so every routine is a plain O(n^3) loop.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "semigroup/tolerances.hpp"

namespace semigroup {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  /// Real entries, row by row.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix diagonal(std::span<const Complex> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const Complex> data() const noexcept { return data_; }

  Matrix adjoint() const;
  Matrix transpose() const;

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

  double norm_1() const;    // max column sum
  double norm_inf() const;  // max row sum
  double norm_fro() const;
  double max_abs() const;
  bool is_finite() const;
  bool is_real(double tol = 0.0) const;
  bool is_diagonal() const;

  Matrix& operator+=(const Matrix& b);
  Matrix& operator-=(const Matrix& b);
  Matrix& operator*=(Complex s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Complex s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const Complex> x);

/// max_ij |a_ij - b_ij|; DimensionMismatch when shapes differ.
double max_abs_diff(const Matrix& a, const Matrix& b);

// Vector helpers (Euclidean, unweighted).
double norm2(std::span<const Complex> x);
Complex dot(std::span<const Complex> x, std::span<const Complex> y);  // sum x_i conj(y_i)
Vector subtract(std::span<const Complex> x, std::span<const Complex> y);
Vector real_vector(std::span<const double> x);

/// Similarity D^{1/2} A D^{-1/2} for positive diagonal weights; maps the
/// weighted 2-norm onto the Euclidean one.
Matrix weighted_similarity(const Matrix& a, std::span<const double> weights);

/// (W A + A^H W) / 2 pulled back by W^{-1/2}: the symmetric part of A in the
/// W-weighted inner product, as a Hermitian matrix in Euclidean coordinates.
Matrix weighted_symmetric_part(const Matrix& a, std::span<const double> weights);

struct SolveReport {
  Vector solution;
  double residual_norm = 0.0;       // ||Ax - b||_2, recomputed
  double condition_estimate = 0.0;  // kappa_1 estimate
};

/// LU factorization with partial pivoting, reusable for many right-hand sides.
class LuFactorization {
 public:
  explicit LuFactorization(const Matrix& a, const Tolerances& tol = {});

  std::size_t size() const noexcept { return n_; }
  Vector solve(std::span<const Complex> b) const;
  /// Solves A^H x = b.
  Vector solve_adjoint(std::span<const Complex> b) const;
  /// Hager/Higham estimate of ||A||_1 ||A^-1||_1.
  double condition_estimate() const;
  Matrix inverse() const;

 private:
  std::size_t n_ = 0;
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double norm1_ = 0.0;
};

SolveReport lu_solve(const Matrix& a, std::span<const Complex> b, const Tolerances& tol = {});
Matrix inverse(const Matrix& a, const Tolerances& tol = {});

struct SymEig {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi for real symmetric input. NotSymmetric on asymmetry above
/// tol.symmetry * ||A|| or on non-negligible imaginary parts.
SymEig sym_eig(const Matrix& a, const Tolerances& tol = {});

/// Ascending eigenvalues of a Hermitian matrix. Complex input is handled by
/// the real embedding [[Re, -Im], [Im, Re]], whose spectrum doubles each value.
std::vector<double> hermitian_eigvals(const Matrix& a, const Tolerances& tol = {});

/// exp(tA) by scaling and squaring around a degree-13 Pade approximant.
/// Overflow when ||tA||_1 exceeds tol.expm_norm_bound.
Matrix expm(const Matrix& a, double t, const Tolerances& tol = {});

struct PNormEstimate {
  double value = 0.0;
  bool exact = false;  // false: lower bound from sampling and power ascent
};

/// Operator norm of A on weighted l^p (same weights on domain and range).
/// Exact for diagonal A and for p = 1; otherwise the best of several
/// Higham-Boyd power iterations, reported as a lower bound.
PNormEstimate op_pnorm(const Matrix& a, double p, std::span<const double> weights,
                       unsigned seed = 7, int starts = 8);

/// ||A||_1^{1/p} ||A||_inf^{1-1/p} on the weight-transformed matrix
/// (Riesz-Thorin upper bound for the weighted p-norm).
double riesz_thorin_bound(const Matrix& a, double p, std::span<const double> weights);

}  // namespace semigroup
