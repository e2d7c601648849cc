#include <algorithm>
#include <cmath>
#include <random>

#include "semigroup/error.hpp"
#include "semigroup/linalg.hpp"

namespace semigroup {

namespace {

// B = W^{1/p} A W^{-1/p}: the weighted l^p operator norm of A equals the
// standard l^p operator norm of B.
Matrix p_transform(const Matrix& a, double p, std::span<const double> weights) {
  if (!a.is_square() || weights.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "op_pnorm weights");
  }
  Matrix b(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      b(i, j) = a(i, j) * std::pow(weights[i] / weights[j], 1.0 / p);
  return b;
}

double lp(std::span<const Complex> x, double p) {
  double s = 0.0;
  for (const auto& v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

Complex phase(const Complex& v) {
  const double m = std::abs(v);
  return m > 0.0 ? v / m : Complex{0.0, 0.0};
}

// Normalized dual vector: |y_i|^{p-1} sgn(y_i) / ||y||_p^{p-1}.
Vector dual(std::span<const Complex> y, double p) {
  const double ny = lp(y, p);
  Vector d(y.size());
  if (ny == 0.0) return d;
  for (std::size_t i = 0; i < y.size(); ++i)
    d[i] = std::pow(std::abs(y[i]) / ny, p - 1.0) * phase(y[i]);
  return d;
}

double power_ascent(const Matrix& b, const Matrix& bh, Vector x, double p, int max_iter) {
  const double q = p / (p - 1.0);
  const double nx = lp(x, p);
  if (nx == 0.0) return 0.0;
  for (auto& v : x) v /= nx;
  double best = 0.0;
  double previous = -1.0;
  int stalled = 0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector y = b * x;
    const double gamma = lp(y, p);
    best = std::max(best, gamma);
    if (gamma == 0.0) break;
    const Vector z = bh * dual(y, p);
    const double nz = lp(z, q);
    double zx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) zx += (std::conj(z[i]) * x[i]).real();
    if (nz <= zx * (1.0 + 1e-15)) break;
    if (gamma - previous <= 1e-15 * gamma) {
      if (++stalled > 3) break;
    } else {
      stalled = 0;
    }
    previous = gamma;
    x = dual(z, q);
  }
  return best;
}

}  // namespace

PNormEstimate op_pnorm(const Matrix& a, double p, std::span<const double> weights, unsigned seed,
                       int starts) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "op_pnorm needs p >= 1");
  if (a.is_diagonal()) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, i)));
    return {m, true};
  }
  const Matrix b = p_transform(a, p, weights);
  if (p == 1.0) return {b.norm_1(), true};

  const Matrix bh = b.adjoint();
  const std::size_t n = b.rows();
  double best = 0.0;

  // Column-norm seed: the column with the largest p-norm is a natural start.
  std::size_t jbest = 0;
  double cbest = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(b(i, j)), p);
    if (s > cbest) {
      cbest = s;
      jbest = j;
    }
  }
  Vector e(n);
  e[jbest] = 1.0;
  best = std::max(best, power_ascent(b, bh, e, p, 2000));
  best = std::max(best, power_ascent(b, bh, Vector(n, Complex{1.0, 0.0}), p, 2000));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < starts; ++s) {
    Vector x(n);
    for (auto& v : x) v = gauss(rng);
    best = std::max(best, power_ascent(b, bh, std::move(x), p, 2000));
  }
  return {best, false};
}

double riesz_thorin_bound(const Matrix& a, double p, std::span<const double> weights) {
  const Matrix b = p_transform(a, p, weights);
  return std::pow(b.norm_1(), 1.0 / p) * std::pow(b.norm_inf(), 1.0 - 1.0 / p);
}

}  // namespace semigroup
