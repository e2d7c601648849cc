#include <doctest.h>

#include <cmath>

#include "semigroup/error.hpp"
#include "semigroup/sip.hpp"
#include "support.hpp"

using namespace semigroup;
using testing_support::random_vector;

namespace {

// Direct evaluation of sum_i w_i f_i conj(g_i) |g_i|^{p-2} ||g||^{2-p}.
Complex reference_sip(const GridSpace& s, const Vector& f, const Vector& g) {
  double ng = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) ng += s.weight(i) * std::pow(std::abs(g[i]), s.p);
  ng = std::pow(ng, 1.0 / s.p);
  Complex acc{};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == Complex{}) continue;
    acc += s.weight(i) * f[i] * std::conj(g[i]) * std::pow(std::abs(g[i]), s.p - 2.0);
  }
  return acc * std::pow(ng, 2.0 - s.p);
}

}  // namespace

TEST_CASE("grid spaces") {
  const auto mid = GridSpace::midpoints(8, 2.0);
  CHECK(mid.n == 8);
  CHECK(mid.h * mid.n == doctest::Approx(1.0));
  CHECK(mid.coordinate(0) == doctest::Approx(1.0 / 16));

  const auto nodes = GridSpace::nodes(8, 2.0);
  CHECK(nodes.n == 9);
  CHECK(nodes.h * (nodes.n - 1) == doctest::Approx(1.0));
  CHECK(nodes.weight(0) == doctest::Approx(nodes.h / 2));
  CHECK(nodes.weight(4) == doctest::Approx(nodes.h));
  CHECK(nodes.weight(8) == doctest::Approx(nodes.h / 2));

  const auto trimmed = GridSpace::nodes(8, 2.0, false, true);
  CHECK(trimmed.n == 8);
  CHECK(trimmed.coordinate(0) == doctest::Approx(1.0 / 8));
  CHECK(trimmed.weight(0) == doctest::Approx(trimmed.h));
  CHECK(trimmed.weight(7) == doctest::Approx(trimmed.h / 2));

  // trapezoid rule integrates 1 exactly
  double total = 0.0;
  for (double w : nodes.weights()) total += w;
  CHECK(total == doctest::Approx(1.0));

  CHECK_THROWS_AS(nodes.norm(Vector(3)), Error);
}

TEST_CASE("lp_sip examples") {
  const auto s3 = GridSpace::uniform(2, 1.0, 3.0);
  const Complex v = lp_sip(s3, Vector{1.0, 2.0}, Vector{1.0, 1.0});
  CHECK(v.real() == doctest::Approx(3.0 * std::pow(2.0, -1.0 / 3.0)).epsilon(1e-14));
  CHECK(v.real() == doctest::Approx(2.3811).epsilon(1e-4));
  CHECK(v.imag() == 0.0);

  std::mt19937_64 rng(1);
  const auto s2 = GridSpace::midpoints(16, 2.0);
  const Vector f = random_vector(rng, 16, true);
  const double nf = s2.norm(f);
  CHECK(lp_sip(s2, f, f).real() == doctest::Approx(nf * nf).epsilon(1e-14));

  const auto s15 = GridSpace::uniform(3, 0.5, 1.5);
  const Vector g = {0.0, 2.0, Complex{0.0, -1.0}};
  const Complex z = lp_sip(s15, Vector{5.0, 1.0, 1.0}, g);
  CHECK(std::isfinite(z.real()));
  CHECK(std::isfinite(z.imag()));
  CHECK(std::abs(z - reference_sip(s15, {5.0, 1.0, 1.0}, g)) < 1e-14);
  // first entry of f only meets the zero entry of g
  CHECK(std::abs(lp_sip(s15, Vector{1.0, 0.0, 0.0}, g)) == 0.0);
}

TEST_CASE("lp_sip matches the reference formula") {
  std::mt19937_64 rng(2);
  for (double p : {1.0, 1.25, 1.5, 2.0, 3.0, 4.5}) {
    const auto s = GridSpace::nodes(10, p);
    for (int k = 0; k < 20; ++k) {
      const Vector f = random_vector(rng, s.n, true);
      const Vector g = random_vector(rng, s.n, true);
      const Complex ref = reference_sip(s, f, g);
      CHECK(std::abs(lp_sip(s, f, g) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("sub-threshold entries count as zero") {
  const auto s = GridSpace::uniform(2, 1.0, 1.0);
  const Vector g = {1e-310, 1.0};
  const Complex v = lp_sip(s, Vector{1.0, 1.0}, g);
  CHECK(std::isfinite(v.real()));
  CHECK(v.real() == doctest::Approx(1.0));
}

TEST_CASE("space mismatch") {
  DiscreteFunction f{GridSpace::midpoints(4, 2.0), Vector(4, 1.0)};
  DiscreteFunction g{GridSpace::midpoints(4, 3.0), Vector(4, 1.0)};
  try {
    lp_sip(f, g);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpaceMismatch);
  }
  CHECK_THROWS_AS((DiscreteFunction{GridSpace::midpoints(4, 2.0), Vector(3)}), Error);
}

TEST_CASE("product SIP") {
  std::mt19937_64 rng(3);
  const ProductSpace ps{GridSpace::nodes(6, 3.0), GridSpace::midpoints(6, 3.0)};
  const Vector x1 = random_vector(rng, 7, true);
  const Vector x2 = random_vector(rng, 6, true);
  DiscreteFunction a{ps.first, x1};
  DiscreteFunction b{ps.second, x2};

  const double n1 = ps.first.norm(x1);
  const double n2 = ps.second.norm(x2);
  Vector xy(x1);
  xy.insert(xy.end(), x2.begin(), x2.end());
  CHECK(ps.norm(xy) == doctest::Approx(std::sqrt(n1 * n1 + n2 * n2)));
  CHECK(product_sip(a, b, a, b, ps).real() == doctest::Approx(n1 * n1 + n2 * n2));

  DiscreteFunction zero{ps.second, Vector(6)};
  const Vector y1 = random_vector(rng, 7, true);
  DiscreteFunction c{ps.first, y1};
  CHECK(std::abs(product_sip(c, zero, a, zero, ps) - lp_sip(c, a)) < 1e-14);

  DiscreteFunction wrong{ps.first, x1};
  CHECK_THROWS_AS(product_sip(a, wrong, a, b, ps), Error);
}

TEST_CASE("product SIP at p = 2 is the concatenated weighted dot product") {
  std::mt19937_64 rng(4);
  const ProductSpace ps{GridSpace::nodes(5, 2.0, true, false), GridSpace::midpoints(5, 2.0)};
  const auto w = ps.weights();
  for (int k = 0; k < 20; ++k) {
    const Vector x = random_vector(rng, ps.dim(), true);
    const Vector y = random_vector(rng, ps.dim(), true);
    Complex ref{};
    for (std::size_t i = 0; i < x.size(); ++i) ref += w[i] * x[i] * std::conj(y[i]);
    CHECK(std::abs(product_sip(ps, x, y) - ref) < 1e-13);
  }
}

TEST_CASE("axiom report") {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    CAPTURE(p);
    const auto r = sip_axiom_report(GridSpace::midpoints(32, p), 1000);
    CHECK(r.samples == 1000);
    CHECK(r.linearity_residual <= 1e-10);
    CHECK(r.definiteness_residual <= 1e-12);
    CHECK(r.cauchy_schwarz_violations == 0);
  }
}

TEST_CASE("axiom report is deterministic per seed") {
  const auto s = GridSpace::midpoints(16, 3.0);
  const auto a = sip_axiom_report(s, 50, 99);
  const auto b = sip_axiom_report(s, 50, 99);
  CHECK(a.linearity_residual == b.linearity_residual);
  CHECK(a.worst_cauchy_schwarz_excess == b.worst_cauchy_schwarz_excess);
}

TEST_CASE("duality functional") {
  std::mt19937_64 rng(5);
  const auto s2 = GridSpace::midpoints(8, 2.0);
  const Vector g = random_vector(rng, 8, true);
  const Vector w = duality_functional(DiscreteFunction{s2, g});
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(w[i] - s2.h * std::conj(g[i])) < 1e-15);

  for (double p : {1.0, 1.5, 3.0}) {
    const auto s = GridSpace::uniform(4, 1.0, p);
    const Vector e1 = {1.0, 0.0, 0.0, 0.0};
    const Vector we = duality_functional(DiscreteFunction{s, e1});
    CHECK(std::abs(we[0] - 1.0) < 1e-15);
    CHECK(std::abs(we[1]) == 0.0);
  }

  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    const auto s = GridSpace::nodes(12, p);
    const Vector gp = random_vector(rng, s.n, true);
    const Vector wp = duality_functional(DiscreteFunction{s, gp});
    const double ng = s.norm(gp);
    Complex pair{};
    for (std::size_t i = 0; i < s.n; ++i) pair += gp[i] * wp[i];
    CHECK(std::abs(pair - ng * ng) <= 1e-12 * ng * ng);
    CHECK(dual_norm(s, wp) == doctest::Approx(ng).epsilon(1e-12));

    const Vector f = random_vector(rng, s.n, true);
    Complex fw{};
    for (std::size_t i = 0; i < s.n; ++i) fw += f[i] * wp[i];
    CHECK(std::abs(fw - lp_sip(s, f, gp)) <= 1e-12 * std::max(1.0, std::abs(fw)));
  }
}

TEST_CASE("variant space helpers") {
  const Space a = GridSpace::midpoints(4, 2.0);
  const Space b = ProductSpace{GridSpace::nodes(4, 2.0), GridSpace::midpoints(4, 3.0)};
  CHECK(dim(a) == 4);
  CHECK(dim(b) == 9);
  CHECK(is_hilbert(a));
  CHECK_FALSE(is_hilbert(b));
  CHECK(weights(b).size() == 9);
}
