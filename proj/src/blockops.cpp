#include "semigroup/blockops.hpp"

#include <algorithm>
#include <cmath>

#include "semigroup/error.hpp"

namespace semigroup {

BlockExt assemble_ext(Matrix a1, Matrix a2, const GridSpace& x1, const GridSpace& x2) {
  const std::size_t n1 = x1.n;
  const std::size_t n2 = x2.n;
  if (a1.rows() != n1 || a1.cols() != n1 + n2) {
    throw Error(ErrorCode::DimensionMismatch, "A1 must map X1 x X2 to X1");
  }
  if (a2.rows() != n2 || a2.cols() != n1) {
    throw Error(ErrorCode::DimensionMismatch, "A2 must map X1 to X2");
  }
  Matrix assembled(n1 + n2, n1 + n2);
  assembled.set_block(0, 0, a1);
  assembled.set_block(n1, 0, a2);
  return BlockExt{std::move(a1), std::move(a2), std::move(assembled), x1, x2};
}

Closure make_closure(Matrix s, const GridSpace& x2, const Sampler& sampler,
                     const Tolerances& tol) {
  if (!s.is_square() || s.rows() != x2.n) {
    throw Error(ErrorCode::DimensionMismatch, "S must act on X2");
  }
  Matrix s_inv;
  try {
    s_inv = inverse(s, tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::Singular, e.what());
  }
  const double defect = max_abs_diff(s * s_inv, Matrix::identity(s.rows()));
  if (defect > tol.closure_inverse) {
    throw Error(ErrorCode::Singular, "||S S^-1 - I|| = " + std::to_string(defect));
  }
  auto report = coercivity_report(s, x2, sampler, tol);
  return Closure{std::move(s), std::move(s_inv), report};
}

Matrix build_as(const BlockExt& ext, const Matrix& s) {
  if (!s.is_square() || s.rows() != ext.n2()) {
    throw Error(ErrorCode::DimensionMismatch, "S must act on X2");
  }
  const std::size_t n1 = ext.n1();
  Matrix lift(n1 + ext.n2(), n1);
  lift.set_block(0, 0, Matrix::identity(n1));
  lift.set_block(n1, 0, s * ext.a2);
  return ext.a1 * lift;
}

Matrix build_as(const BlockExt& ext, const Closure& closure) { return build_as(ext, closure.s); }

IdentityResidual dissipation_identity_residual(const BlockExt& ext, const Closure& closure,
                                               const DiscreteFunction& x,
                                               const Tolerances& tol) {
  if (!(x.space == ext.x1)) throw Error(ErrorCode::SpaceMismatch, "x must lie in X1");
  const double z = tol.zero_threshold;
  const Matrix as = build_as(ext, closure);
  const Vector a2x = ext.a2 * x.values;
  const Vector y = closure.s * a2x;

  Vector xy(x.values);
  xy.insert(xy.end(), y.begin(), y.end());

  const Complex lhs = lp_sip(ext.x1, as * x.values, x.values, z);
  const Complex ext_term = product_sip(ext.product(), ext.assembled * xy, xy, z);
  const Complex closure_term = lp_sip(ext.x2, a2x, y, z);

  IdentityResidual r;
  r.absolute = std::abs(lhs - (ext_term - closure_term));
  r.scale = std::abs(lhs) + std::abs(ext_term) + std::abs(closure_term);
  return r;
}

Matrix perturbation_p(const Closure& closure, double lambda, std::size_t x1_dim) {
  const std::size_t n2 = closure.s.rows();
  Matrix p(x1_dim + n2, x1_dim + n2);
  Matrix lower = Complex{-1.0, 0.0} * closure.s_inv;
  for (std::size_t i = 0; i < n2; ++i) lower(i, i) += lambda;
  p.set_block(x1_dim, x1_dim, lower);
  return p;
}

ResolventResult resolvent_via_extension(const BlockExt& ext, const Closure& closure,
                                        const ResolventQuery& query, ResolventMode mode,
                                        const Tolerances& tol) {
  const double lambda = query.lambda;
  if (!(query.g.space == ext.x1)) throw Error(ErrorCode::SpaceMismatch, "g must lie in X1");
  const bool in_window = closure.report.in_window(lambda);
  if (mode == ResolventMode::Certified && !in_window) {
    throw Error(ErrorCode::OutsideWindow,
                "lambda = " + std::to_string(lambda) + " outside (0, " +
                    std::to_string(closure.report.window_upper) + "]");
  }
  const std::size_t n1 = ext.n1();
  const std::size_t n2 = ext.n2();

  Matrix m = Complex{-1.0, 0.0} * (ext.assembled + perturbation_p(closure, lambda, n1));
  for (std::size_t i = 0; i < n1 + n2; ++i) m(i, i) += lambda;

  Vector rhs(n1 + n2);
  std::copy(query.g.values.begin(), query.g.values.end(), rhs.begin());

  Vector sol;
  try {
    sol = LuFactorization(m, tol).solve(rhs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularMatrix) throw;
    throw Error(ErrorCode::SingularExtension, e.what());
  }

  ResolventResult out;
  out.x1.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n1));
  out.x2.assign(sol.begin() + static_cast<std::ptrdiff_t>(n1), sol.end());

  auto& d = out.diagnostics;
  d.in_window = in_window;
  d.x2_norm = norm2(out.x2);
  d.closure_residual = norm2(subtract(out.x2, closure.s * (ext.a2 * out.x1)));

  const Matrix as = build_as(ext, closure);
  Matrix shifted = Complex{-1.0, 0.0} * as;
  for (std::size_t i = 0; i < n1; ++i) shifted(i, i) += lambda;
  const double ng = norm2(query.g.values);
  const double gscale = ng > 0.0 ? ng : 1.0;
  d.resolvent_residual = norm2(subtract(shifted * out.x1, query.g.values)) / gscale;

  const auto direct = lu_solve(shifted, query.g.values, tol);
  const double nd = norm2(direct.solution);
  d.direct_agreement = norm2(subtract(out.x1, direct.solution)) / (nd > 0.0 ? nd : 1.0);
  return out;
}

SquareGroup square_group_op(const Matrix& a12, const Matrix& a21, const Matrix& s) {
  const std::size_t n1 = a12.rows();
  const std::size_t n2 = a12.cols();
  if (a21.rows() != n2 || a21.cols() != n1 || !s.is_square() || s.rows() != n2) {
    throw Error(ErrorCode::DimensionMismatch, "A12: X2->X1, A21: X1->X2, S on X2 required");
  }
  SquareGroup out;
  const Matrix s_a21 = s * a21;
  out.cal_a = Matrix(n1 + n2, n1 + n2);
  out.cal_a.set_block(0, n1, a12);
  out.cal_a.set_block(n1, 0, s_a21);
  out.cal_a_sq = out.cal_a * out.cal_a;
  out.ul_block = a12 * s_a21;

  const Matrix zero_ur(n1, n2);
  const Matrix zero_ll(n2, n1);
  out.off_diagonal_zero = out.cal_a_sq.block(0, n1, n1, n2) == zero_ur &&
                          out.cal_a_sq.block(n1, 0, n2, n1) == zero_ll;
  out.ul_mismatch = max_abs_diff(out.ul_block, out.cal_a_sq.block(0, 0, n1, n1));
  return out;
}

std::optional<std::pair<Matrix, Matrix>> split_special_form(const BlockExt& ext) {
  const std::size_t n1 = ext.n1();
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      if (ext.a1(i, j) != Complex{}) return std::nullopt;
  return std::make_pair(ext.a1.block(0, n1, n1, ext.n2()), ext.a2);
}

BlockExt counterexample_ext() {
  const auto line = GridSpace::uniform(1, 1.0, 2.0);
  return assemble_ext(Matrix{{0.0, 0.0}}, Matrix{{1.0}}, line, line);
}

}  // namespace semigroup
