#include <doctest.h>

#include <cmath>
#include <numbers>

#include "semigroup/blockops.hpp"
#include "semigroup/error.hpp"
#include "semigroup/models.hpp"
#include "support.hpp"

using namespace semigroup;
using testing_support::random_matrix;
using testing_support::random_vector;

namespace {

GridSpace line(double p = 2.0) { return GridSpace::uniform(1, 1.0, p); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no throw");
  return ErrorCode::InvalidArgument;
}

Closure profile_closure(const WaveModel& m, const LambdaProfile& profile) {
  return multiplication_s(profile.midpoint_samples(m.cells), m.blocks.x2);
}

}  // namespace

TEST_CASE("assemble_ext scalar blocks") {
  const auto ext = assemble_ext(Matrix{{0.0, 1.0}}, Matrix{{1.0}}, line(), line());
  CHECK(ext.assembled == (Matrix{{0.0, 1.0}, {1.0, 0.0}}));
  const auto cx = counterexample_ext();
  CHECK(cx.assembled == (Matrix{{0.0, 0.0}, {1.0, 0.0}}));
}

TEST_CASE("assemble_ext dimension checks") {
  const auto a = GridSpace::midpoints(3, 2.0);
  const auto b = GridSpace::midpoints(2, 2.0);
  CHECK(code_of([&] { assemble_ext(Matrix(3, 4), Matrix(2, 3), a, b); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { assemble_ext(Matrix(3, 5), Matrix(3, 2), a, b); }) ==
        ErrorCode::DimensionMismatch);
  const auto ok = assemble_ext(Matrix(3, 5), Matrix(2, 3), a, b);
  CHECK(ok.assembled.rows() == 5);
}

TEST_CASE("assembled action on (x; y)") {
  std::mt19937_64 rng(31);
  const auto x1 = GridSpace::nodes(4, 2.0);
  const auto x2 = GridSpace::midpoints(4, 2.0);
  const Matrix a1 = random_matrix(rng, 5, 9);
  const Matrix a2 = random_matrix(rng, 4, 5);
  const auto ext = assemble_ext(a1, a2, x1, x2);
  const Vector xy = random_vector(rng, 9);
  const Vector out = ext.assembled * xy;
  const Vector top = a1 * xy;
  const Vector bottom = a2 * std::span<const Complex>(xy).first(5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(out[i] - top[i]) < 1e-14);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(out[5 + i] - bottom[i]) < 1e-14);
}

TEST_CASE("wave blocks act as the staggered derivatives on interior nodes") {
  const std::size_t n = 8;
  const auto m = wave_ext(n, -1.0, -1.0);
  const auto d = staggered_derivatives(n);
  std::mt19937_64 rng(32);
  const Vector x = random_vector(rng, m.blocks.n1());
  const Vector y = random_vector(rng, m.blocks.n2());
  Vector xy(x);
  xy.insert(xy.end(), y.begin(), y.end());
  const Vector out = m.blocks.assembled * xy;
  const Vector dm = d.d_minus * y;
  const Vector dp = d.d_plus * x;
  for (std::size_t j = 1; j < n; ++j) CHECK(std::abs(out[j] - dm[j - 1]) < 1e-12);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(out[n + 1 + j] - dp[j]) < 1e-12);
}

TEST_CASE("build_as examples") {
  const auto cx = counterexample_ext();
  CHECK(build_as(cx, Matrix::identity(1)) == Matrix(1, 1));
  const auto ext = assemble_ext(Matrix{{0.0, 1.0}}, Matrix{{1.0}}, line(), line());
  CHECK(build_as(ext, Matrix{{2.5}}) == Matrix{{2.5}});
  CHECK(code_of([&] { build_as(ext, Matrix::identity(2)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("counterexample: non-dissipative extension, zero A_S") {
  const auto cx = counterexample_ext();
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double a = g(rng), b = g(rng);
    const Vector x = {a, b};
    CHECK(product_sip(cx.product(), cx.assembled * x, x).real() == a * b);
  }
  const Vector ones = {1.0, 1.0};
  CHECK(product_sip(cx.product(), cx.assembled * ones, ones) == Complex{1.0, 0.0});
  CHECK(dissipativity_margin(cx.assembled, cx.product()).value > 0.0);
}

TEST_CASE("make_closure") {
  const auto s = GridSpace::midpoints(3, 2.0);
  const auto c = make_closure(Matrix{{2.0, 0.0, 0.0}, {0.0, 1.0, 0.5}, {0.0, 0.0, 4.0}}, s);
  CHECK(max_abs_diff(c.s * c.s_inv, Matrix::identity(3)) <= 1e-10);
  CHECK(code_of([&] { make_closure(Matrix(3, 3), s); }) == ErrorCode::Singular);
  CHECK(code_of([&] { make_closure(Matrix::identity(2), s); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("dissipation identity") {
  std::mt19937_64 rng(34);
  for (double p : {2.0, 3.0, 1.5}) {
    CAPTURE(p);
    const auto m = wave_ext(16, 0.0, 0.5, p);
    const auto c = profile_closure(m, LambdaProfile::sinusoid(2.0, 1.0));
    const auto zero = dissipation_identity_residual(m.blocks, c, {m.blocks.x1, Vector(m.blocks.n1())});
    CHECK(zero.absolute == 0.0);
    for (int k = 0; k < 20; ++k) {
      const DiscreteFunction x{m.blocks.x1, random_vector(rng, m.blocks.n1())};
      const auto r = dissipation_identity_residual(m.blocks, c, x);
      CHECK(r.relative() <= (p == 2.0 ? 1e-10 : 1e-9));
    }
  }
  const auto m = wave_ext(4, 0.0, 0.0);
  const auto c = profile_closure(m, LambdaProfile::constant(1.0));
  CHECK(code_of([&] {
          dissipation_identity_residual(m.blocks, c, {m.blocks.x2, Vector(m.blocks.n2())});
        }) == ErrorCode::SpaceMismatch);
}

TEST_CASE("perturbation P") {
  const auto s = GridSpace::midpoints(2, 2.0);
  const auto c = make_closure(Complex{2.0, 0.0} * Matrix::identity(2), s);
  CHECK(c.report.window_upper == doctest::Approx(0.5));
  const Matrix p0 = perturbation_p(c, 0.5, 3);
  CHECK(p0 == Matrix(5, 5));
  const Matrix p1 = perturbation_p(c, 0.25, 3);
  CHECK(p1.block(0, 0, 3, 5) == Matrix(3, 5));
  CHECK(p1.block(3, 3, 2, 2) == Complex{-0.25, 0.0} * Matrix::identity(2));
  const ProductSpace ps{GridSpace::midpoints(3, 2.0), s};
  CHECK(dissipativity_margin(p1, ps).value <= 1e-15);

  const auto d = make_closure(Matrix{{1.0, 0.0}, {0.0, 4.0}}, s);
  CHECK(d.report.window_upper == doctest::Approx(1.0 / 16.0));
  const auto margin_at = [&](double lambda) {
    return dissipativity_margin(perturbation_p(d, lambda, 3), ps).value;
  };
  CHECK(margin_at(d.report.window_upper) <= 1e-12);
  CHECK(margin_at(d.report.shift_constant) <= 1e-12);
  CHECK(margin_at(2.0 * d.report.shift_constant) > 0.0);
}

TEST_CASE("window endpoint for a profile with ||S||^2 > m2") {
  const auto m = wave_ext(32, 0.0, 0.5);
  const auto c = profile_closure(m, LambdaProfile::sinusoid(2.0, 1.0));
  REQUIRE(c.report.s_norm * c.report.s_norm > c.report.m2);
  const auto ps = m.blocks.product();
  const double edge = c.report.window_upper;
  CHECK(dissipativity_margin(perturbation_p(c, edge, m.blocks.n1()), ps).value <= 1e-12);
  CHECK(dissipativity_margin(perturbation_p(c, 2.0 * edge, m.blocks.n1()), ps).value > 0.0);
}

TEST_CASE("resolvent via extension: trivial blocks") {
  const auto x1 = GridSpace::midpoints(3, 2.0);
  const auto x2 = GridSpace::midpoints(2, 2.0);
  const auto ext = assemble_ext(Matrix(3, 5), Matrix(2, 3), x1, x2);
  const auto c = make_closure(Matrix::identity(2), x2);
  const Vector g = {1.0, -2.0, 0.5};
  const auto r = resolvent_via_extension(ext, c, {1.0, {x1, g}}, ResolventMode::Certified);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.x1[i] - g[i]) < 1e-15);
  for (const auto& v : r.x2) CHECK(std::abs(v) < 1e-15);
  CHECK(r.diagnostics.passes(1e-8));
}

TEST_CASE("resolvent via extension on the wave/heat model") {
  const auto m = wave_ext(32, 0.0, 0.5);
  const auto c = profile_closure(m, LambdaProfile::sinusoid(2.0, 1.0));
  Vector g(m.blocks.n1());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = std::sin(std::numbers::pi * m.blocks.x1.coordinate(i));
  }
  const DiscreteFunction gf{m.blocks.x1, g};
  const double inside = 0.5 * c.report.window_upper;
  const auto r = resolvent_via_extension(m.blocks, c, {inside, gf}, ResolventMode::Certified);
  CHECK(r.diagnostics.in_window);
  CHECK(r.diagnostics.passes(1e-8));

  // independent oracle: solve (lambda - heat_direct) u = g
  const auto heat = heat_direct(32, LambdaProfile::sinusoid(2.0, 1.0).midpoint_samples(32), 0.0, 0.5);
  Matrix shifted = Complex{-1.0, 0.0} * heat.direct;
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) += inside;
  const auto direct = lu_solve(shifted, g);
  CHECK(norm2(subtract(r.x1, direct.solution)) <= 1e-8 * norm2(direct.solution));

  // outside the window: certified mode refuses, exploratory mode still solves
  const double outside = 10.0 * c.report.window_upper;
  CHECK(code_of([&] {
          resolvent_via_extension(m.blocks, c, {outside, gf}, ResolventMode::Certified);
        }) == ErrorCode::OutsideWindow);
  const auto e = resolvent_via_extension(m.blocks, c, {outside, gf}, ResolventMode::Exploratory);
  CHECK_FALSE(e.diagnostics.in_window);
  CHECK(e.diagnostics.passes(1e-8));
}

TEST_CASE("resolvent via extension: singular extended matrix") {
  // A_ext = diag(1, 0), S = 1: lambda - A_ext - P = diag(lambda - 1, 1)
  const auto l = line();
  const auto ext = assemble_ext(Matrix{{1.0, 0.0}}, Matrix{{0.0}}, l, l);
  const auto c = make_closure(Matrix{{1.0}}, l);
  const auto run = [&] {
    resolvent_via_extension(ext, c, {1.0, {l, Vector{1.0}}}, ResolventMode::Exploratory);
  };
  CHECK(code_of(run) == ErrorCode::SingularExtension);
}

TEST_CASE("square group: scalar fixture") {
  const auto g = square_group_op(Matrix{{1.0}}, Matrix{{2.0}}, Matrix{{3.0}});
  CHECK(g.cal_a_sq == (Matrix{{6.0, 0.0}, {0.0, 6.0}}));
  CHECK(g.off_diagonal_zero);
  CHECK(g.ul_block == Matrix{{6.0}});
  CHECK(g.ul_mismatch == 0.0);
  CHECK(code_of([&] { square_group_op(Matrix(2, 1), Matrix(2, 1), Matrix(1, 1)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("square group: lower-right block is S A21 A12") {
  std::mt19937_64 rng(35);
  const Matrix a12 = random_matrix(rng, 3, 2);
  const Matrix a21 = random_matrix(rng, 2, 3);
  const Matrix s = random_matrix(rng, 2, 2);
  const auto g = square_group_op(a12, a21, s);
  CHECK(g.off_diagonal_zero);
  CHECK(max_abs_diff(g.cal_a_sq.block(3, 3, 2, 2), s * a21 * a12) <= 1e-13);
}

TEST_CASE("square group on the wave blocks reproduces A_S") {
  for (auto [k1, k2] : {std::pair{-1.0, -1.0}, std::pair{1.0, -1.0}, std::pair{1.0, 1.0}}) {
    const auto m = wave_ext(16, k1, k2);
    const auto split = split_special_form(m.blocks);
    REQUIRE(split.has_value());
    const auto c = profile_closure(m, LambdaProfile::affine(1.0, 1.0));
    const auto g = square_group_op(split->first, split->second, c.s);
    CHECK(g.off_diagonal_zero);
    CHECK(g.ul_mismatch == 0.0);
    CHECK(max_abs_diff(g.ul_block, build_as(m.blocks, c)) <= 1e-12 * g.ul_block.max_abs());
  }
  CHECK_FALSE(split_special_form(wave_ext(16, 0.0, 0.5).blocks).has_value());
}

TEST_CASE("square group with S = I and A12 = -A21^T is negative semidefinite") {
  const auto m = wave_ext(12, -1.0, -1.0);
  const auto split = split_special_form(m.blocks);
  REQUIRE(split.has_value());
  // rescale to a Euclidean setting: B = W1^{1/2} A12 W2^{-1/2}
  const auto w1 = m.blocks.x1.weights();
  const auto w2 = m.blocks.x2.weights();
  Matrix b = split->first;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) *= std::sqrt(w1[i] / w2[j]);
  const Matrix a21 = Complex{-1.0, 0.0} * b.transpose();
  const auto g = square_group_op(b, a21, Matrix::identity(b.cols()));
  const auto e = sym_eig(g.ul_block);
  CHECK(e.values.back() <= 1e-10);
  CHECK(max_abs_diff(g.ul_block, g.ul_block.transpose()) == 0.0);
}

TEST_CASE("closure composite across the model zoo") {
  for (double k1 : {-1.0, 0.0, 0.5, 1.0}) {
    for (double k2 : {-1.0, 0.0, 0.5, 1.0}) {
      CAPTURE(k1);
      CAPTURE(k2);
      const auto m = wave_ext(16, k1, k2);
      const auto c = profile_closure(m, LambdaProfile::affine(1.0, 0.5));
      REQUIRE(c.report.m2 > 0.0);
      const auto ext_cert =
          generation_certificate(m.blocks.assembled, m.blocks.product(), 1.0);
      REQUIRE(ext_cert.passes());
      const auto as_cert = generation_certificate(build_as(m.blocks, c), m.blocks.x1, 1.0);
      CHECK(as_cert.passes());
    }
  }
}
