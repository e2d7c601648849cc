#include "semigroup/dissipativity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "semigroup/error.hpp"

namespace semigroup {

namespace {

Vector draw(std::mt19937_64& rng, std::size_t n, bool complex_values) {
  std::normal_distribution<double> gauss;
  Vector v(n);
  for (auto& c : v) c = complex_values ? Complex{gauss(rng), gauss(rng)} : Complex{gauss(rng), 0.0};
  return v;
}

struct Extremum {
  double value = 0.0;
  std::size_t samples = 0;
};

// Sampled extremum of a scale-invariant objective, refined by coordinate
// search from the best draw: each step perturbs one coordinate by +/- delta,
// keeps improvements, and halves delta after a full pass without progress.
Extremum sampled_extremum(std::size_t n, const std::function<double(const Vector&)>& objective,
                          const Sampler& sampler, bool maximize, int refine_steps) {
  const double sign = maximize ? 1.0 : -1.0;
  std::mt19937_64 rng(sampler.seed);
  Vector best_x;
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t count = std::max<std::size_t>(sampler.count, 1);
  // coordinate vectors first (up to half the budget), then random draws
  const std::size_t basis = std::min(n, count / 2);
  for (std::size_t k = 0; k < count; ++k) {
    Vector x(n);
    if (k < basis) {
      x[k] = 1.0;
    } else {
      x = draw(rng, n, sampler.complex_values);
    }
    const double v = sign * objective(x);
    if (std::isfinite(v) && v > best) {
      best = v;
      best_x = std::move(x);
    }
  }
  if (best_x.empty()) return {0.0, count};

  double scale = 0.0;
  for (const auto& c : best_x) scale = std::max(scale, std::abs(c));
  for (auto& c : best_x) c /= scale;

  const std::size_t dims = sampler.complex_values ? 2 * n : n;
  double delta = 0.5;
  std::size_t since_improvement = 0;
  for (int step = 0; step < refine_steps; ++step) {
    const std::size_t d = static_cast<std::size_t>(step) % dims;
    const Complex unit = d < n ? Complex{1.0, 0.0} : Complex{0.0, 1.0};
    const std::size_t i = d % n;
    bool improved = false;
    for (double s : {delta, -delta}) {
      Vector trial = best_x;
      trial[i] += s * unit;
      const double v = sign * objective(trial);
      if (std::isfinite(v) && v > best) {
        best = v;
        best_x = std::move(trial);
        improved = true;
        break;
      }
    }
    since_improvement = improved ? 0 : since_improvement + 1;
    if (since_improvement >= dims) {
      delta *= 0.5;
      since_improvement = 0;
    }
  }
  return {sign * best, count};
}

Matrix shifted(const Matrix& a, double lambda) {
  Matrix m = Complex{-1.0, 0.0} * a;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += lambda;
  return m;
}

}  // namespace

Margin dissipativity_margin(const Matrix& a, const Space& space, const Sampler& sampler,
                            const Tolerances& tol) {
  if (!a.is_square() || a.rows() != dim(space)) {
    throw Error(ErrorCode::DimensionMismatch, "operator does not act on the space");
  }
  if (is_hilbert(space)) {
    const auto values = hermitian_eigvals(weighted_symmetric_part(a, weights(space)), tol);
    return {values.empty() ? 0.0 : values.back(), true, 0};
  }
  const auto quotient = [&](const Vector& x) {
    const double nx = norm(space, x);
    if (nx == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sip(space, a * x, x, tol.zero_threshold).real() / (nx * nx);
  };
  const auto e = sampled_extremum(a.rows(), quotient, sampler, true, tol.ascent_steps);
  return {e.value, false, e.samples};
}

NormCheck norm_dissipativity_check(const Matrix& a, const Space& space,
                                   const std::vector<double>& lambdas,
                                   const std::vector<Vector>& samples, const Tolerances& tol) {
  NormCheck check;
  check.worst_ratio = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
    const Matrix m = shifted(a, lambda);
    for (const auto& x : samples) {
      const double nx = norm(space, x);
      if (nx == 0.0) continue;
      const double ratio = norm(space, m * x) / (lambda * nx);
      if (ratio < check.worst_ratio) {
        check.worst_ratio = ratio;
        check.worst_lambda = lambda;
      }
    }
  }
  check.holds = check.worst_ratio >= 1.0 - tol.margin;
  return check;
}

NormCheck norm_dissipativity_check(const Matrix& a, const Space& space,
                                   const std::vector<double>& lambdas, const Sampler& sampler,
                                   const Tolerances& tol) {
  std::mt19937_64 rng(sampler.seed);
  std::vector<Vector> samples;
  samples.reserve(sampler.count);
  for (std::size_t k = 0; k < sampler.count; ++k) {
    samples.push_back(draw(rng, dim(space), sampler.complex_values));
  }
  NormCheck check = norm_dissipativity_check(a, space, lambdas, samples, tol);
  check.margin = dissipativity_margin(a, space, sampler, tol);
  check.consistent_with_margin = !(check.margin.value <= tol.margin && !check.holds);
  return check;
}

CoercivityReport coercivity_report(const Matrix& s, const GridSpace& space, const Sampler& sampler,
                                   const Tolerances& tol) {
  if (!s.is_square() || s.rows() != space.n) {
    throw Error(ErrorCode::DimensionMismatch, "S does not act on X2");
  }
  Matrix s_inv;
  try {
    s_inv = inverse(s, tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::Singular, e.what());
  }

  CoercivityReport r;
  const auto w = space.weights();
  if (space.p == 2.0) {
    r.m2 = hermitian_eigvals(weighted_symmetric_part(s, w), tol).front();
    r.shift_constant = hermitian_eigvals(weighted_symmetric_part(s_inv, w), tol).front();
    r.certified = true;
  } else {
    const auto coercive = [&](const Vector& x) {
      const double nx = space.norm(x);
      if (nx == 0.0) return std::numeric_limits<double>::quiet_NaN();
      return lp_sip(space, x, s * x, tol.zero_threshold).real() / (nx * nx);
    };
    const auto inverse_quotient = [&](const Vector& x) {
      const double nx = space.norm(x);
      if (nx == 0.0) return std::numeric_limits<double>::quiet_NaN();
      return lp_sip(space, s_inv * x, x, tol.zero_threshold).real() / (nx * nx);
    };
    const auto m2 = sampled_extremum(space.n, coercive, sampler, false, tol.ascent_steps);
    const auto shift = sampled_extremum(space.n, inverse_quotient, sampler, false, tol.ascent_steps);
    r.m2 = m2.value;
    r.shift_constant = shift.value;
    r.samples = m2.samples;
  }
  // rounding-level positives count as zero
  if (!(r.m2 > tol.margin * s.max_abs())) {
    throw Error(ErrorCode::NotCoercive, "inf Re[x, Sx]/||x||^2 = " + std::to_string(r.m2));
  }
  const auto sn = op_pnorm(s, space.p, w);
  r.s_norm = sn.value;
  r.s_norm_exact = sn.exact;
  r.window_upper = r.m2 / (r.s_norm * r.s_norm);
  return r;
}

double hilbert_coercivity(const Matrix& s, const GridSpace& space, const Tolerances& tol) {
  if (!s.is_square() || s.rows() != space.n) {
    throw Error(ErrorCode::DimensionMismatch, "S does not act on X2");
  }
  return 2.0 * hermitian_eigvals(weighted_symmetric_part(s, space.weights()), tol).front();
}

GenerationCertificate generation_certificate(const Matrix& a, const Space& space, double lambda,
                                             const Sampler& sampler, const Tolerances& tol) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  GenerationCertificate cert;
  cert.lambda_used = lambda;
  cert.margin = dissipativity_margin(a, space, sampler, tol);
  cert.dissipative = cert.margin.value <= tol.margin;

  const std::size_t n = a.rows();
  const Matrix m = shifted(a, lambda);
  try {
    const LuFactorization lu(m, tol);
    std::mt19937_64 rng(sampler.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto probe = [&](const Vector& g) {
      const Vector x = lu.solve(g);
      const double res = norm2(subtract(m * x, g)) / norm2(g);
      cert.range_residual = std::max(cert.range_residual, res);
      ++cert.probes;
    };
    Vector e(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::fill(e.begin(), e.end(), Complex{});
      e[j] = 1.0;
      probe(e);
    }
    for (int k = 0; k < 8; ++k) probe(draw(rng, n, sampler.complex_values));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularMatrix) throw;
    cert.range_residual = std::numeric_limits<double>::infinity();
  }
  cert.range_condition = cert.range_residual <= tol.range;

  std::vector<double> t_grid;
  for (int k = 1; k <= 20; ++k) t_grid.push_back(0.1 * k);
  cert.growth = growth_bound_fit(a, t_grid, weights(space), tol);
  return cert;
}

}  // namespace semigroup
