// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Tolerances are fixed here and never read from a config.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "semigroup/blockops.hpp"
#include "semigroup/dissipativity.hpp"
#include "semigroup/error.hpp"
#include "semigroup/evolve.hpp"
#include "semigroup/models.hpp"
#include "semigroup/sip.hpp"

using namespace semigroup;

namespace {

constexpr double kDefinitenessTol = 1e-12;
constexpr double kLinearityTol = 1e-10;
constexpr double kP2ReductionTol = 1e-12;
constexpr double kCoercivityTol = 1e-8;
constexpr double kWindowEdgeTol = 1e-12;
constexpr double kWaveMarginTol = 1e-10;
constexpr double kRangeTol = 1e-10;
constexpr double kStepSlack = 1e-10;
constexpr double kIdentityTol = 1e-12;
constexpr double kResolventTol = 1e-8;
constexpr double kDissipationTol = 1e-9;
constexpr double kIsometryTol = 1e-8;
constexpr double kSpectrumTol = 1e-10;
constexpr double kPdeTol = 0.05;

const std::vector<double> kBoundary = {-1.0, 0.0, 0.5, 1.0};

const std::vector<LambdaProfile> kProfiles = {
    LambdaProfile::constant(1.0),      LambdaProfile::affine(1.0, 1.0),
    LambdaProfile::affine(2.0, -1.0),  LambdaProfile::sinusoid(2.0, 1.0),
    LambdaProfile::sinusoid(1.0, 0.5), LambdaProfile::sinusoid(3.0, -1.0)};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Vector gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Outcome sip_axioms() {
  double def = 0.0, lin = 0.0;
  std::size_t violations = 0;
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const auto r = sip_axiom_report(GridSpace::midpoints(64, p), 1000);
    def = std::max(def, r.definiteness_residual);
    lin = std::max(lin, r.linearity_residual);
    violations += r.cauchy_schwarz_violations;
  }
  return {def <= kDefinitenessTol && lin <= kLinearityTol && violations == 0,
          "definiteness=" + fmt(def) + " linearity=" + fmt(lin) +
              " cs_violations=" + std::to_string(violations)};
}

Outcome p2_reduction() {
  const auto s = GridSpace::midpoints(64, 2.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    Vector f(s.n), h(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
      f[i] = {g(rng), g(rng)};
      h[i] = {g(rng), g(rng)};
    }
    Complex dot{};
    for (std::size_t i = 0; i < s.n; ++i) dot += s.h * f[i] * std::conj(h[i]);
    worst = std::max(worst, std::abs(lp_sip(s, f, h) - dot));
  }
  return {worst <= kP2ReductionTol, "max_diff=" + fmt(worst)};
}

Outcome coercivity_bound() {
  const auto profile = LambdaProfile::sinusoid(2.0, 1.0);
  const double bound = profile.coercivity_bound();
  const auto samples = profile.midpoint_samples(64);
  double worst = std::numeric_limits<double>::infinity();
  for (double p : {1.5, 2.0, 3.0}) {
    const auto r = multiplication_s(samples, GridSpace::midpoints(64, p)).report;
    worst = std::min(worst, r.m2);
  }
  return {worst >= bound - kCoercivityTol, "min_m2=" + fmt(worst) + " bound=" + fmt(bound)};
}

Outcome perturbation_window() {
  const auto model = wave_ext(64, -1.0, -1.0);
  const auto closure =
      multiplication_s(LambdaProfile::sinusoid(2.0, 1.0).midpoint_samples(64), model.blocks.x2);
  const auto& r = closure.report;
  const auto space = model.blocks.product();
  const auto margin = [&](double lambda) {
    return dissipativity_margin(perturbation_p(closure, lambda, model.blocks.n1()), space).value;
  };
  const double edge = margin(r.window_upper);
  const double twice = margin(2.0 * r.window_upper);
  const bool premise = r.s_norm * r.s_norm > r.m2;
  return {premise && edge <= kWindowEdgeTol && twice > 0.0,
          "margin_at_window=" + fmt(edge) + " margin_at_2window=" + fmt(twice)};
}

Outcome wave_certificate() {
  double margin = -1e300, range = 0.0, growth = -1e300;
  bool ok = true;
  for (double k1 : kBoundary) {
    for (double k2 : kBoundary) {
      const auto m = wave_ext(64, k1, k2);
      const Space space = m.blocks.product();
      const auto cert = generation_certificate(m.blocks.assembled, space, 1.0);
      std::mt19937_64 rng(11);
      const auto tr = implicit_euler_trace(m.blocks.assembled, gaussian(rng, dim(space)), 1.0,
                                           0.01, space);
      ok = ok && cert.margin.certified && tr.times.size() == 101;
      margin = std::max(margin, cert.margin.value);
      range = std::max(range, cert.range_residual);
      growth = std::max(growth, tr.max_step_growth());
    }
  }
  return {ok && margin <= kWaveMarginTol && range <= kRangeTol && growth <= kStepSlack,
          "max_margin=" + fmt(margin) + " max_range_residual=" + fmt(range) +
              " max_step_growth=" + fmt(growth)};
}

Outcome wave_heat_identity() {
  double worst = 0.0;
  for (std::size_t n : {16u, 64u, 256u}) {
    for (const auto& profile : kProfiles) {
      const auto samples = profile.midpoint_samples(n);
      const auto s = multiplication_s(samples, GridSpace::midpoints(n, 2.0));
      for (double k1 : kBoundary) {
        for (double k2 : kBoundary) {
          const auto m = wave_ext(n, k1, k2);
          const auto heat = heat_direct(n, samples, k1, k2);
          worst = std::max(worst, max_abs_diff(build_as(m.blocks, s), heat.direct));
        }
      }
    }
  }
  return {worst <= kIdentityTol, "max_abs_diff=" + fmt(worst)};
}

Outcome resolvent_extension() {
  const auto m = wave_ext(64, 0.0, 0.5);
  const auto closure =
      multiplication_s(LambdaProfile::sinusoid(2.0, 1.0).midpoint_samples(64), m.blocks.x2);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double closure_res = 0.0, res = 0.0, direct = 0.0;
  bool ok = true;
  for (int k = 0; k < 20; ++k) {
    const double lambda = closure.report.window_upper * u(rng);
    DiscreteFunction g{m.blocks.x1, gaussian(rng, m.blocks.n1())};
    const auto d =
        resolvent_via_extension(m.blocks, closure, {lambda, g}, ResolventMode::Certified)
            .diagnostics;
    ok = ok && d.in_window;
    closure_res = std::max(closure_res, d.closure_residual / std::max(d.x2_norm, 1.0));
    res = std::max(res, d.resolvent_residual);
    direct = std::max(direct, d.direct_agreement);
  }
  return {ok && closure_res <= kResolventTol && res <= kResolventTol && direct <= kResolventTol,
          "closure=" + fmt(closure_res) + " resolvent=" + fmt(res) + " direct=" + fmt(direct)};
}

Outcome dissipation_identity() {
  double worst = 0.0;
  std::mt19937_64 rng(17);
  for (double p : {2.0, 3.0}) {
    const auto m = wave_ext(64, 0.0, 0.5, p);
    const auto closure =
        multiplication_s(LambdaProfile::sinusoid(2.0, 1.0).midpoint_samples(64), m.blocks.x2);
    for (int k = 0; k < 100; ++k) {
      DiscreteFunction x{m.blocks.x1, gaussian(rng, m.blocks.n1())};
      worst = std::max(worst, dissipation_identity_residual(m.blocks, closure, x).relative());
    }
  }
  return {worst <= kDissipationTol, "max_relative_residual=" + fmt(worst)};
}

Outcome counterexample() {
  const auto ext = counterexample_ext();
  const Vector x = {1.0, 1.0};
  const Complex v = product_sip(ext.product(), ext.assembled * x, x);
  const Matrix as = build_as(ext, Matrix::identity(1));
  return {v == Complex{1.0, 0.0} && as == Matrix(1, 1),
          "sip=" + fmt(v.real()) + " a_s=" + fmt(as(0, 0).real())};
}

Outcome square_group() {
  bool offdiag = true;
  double ul = 0.0;
  const auto add = [&](const Matrix& a12, const Matrix& a21, const Matrix& s) {
    const auto g = square_group_op(a12, a21, s);
    offdiag = offdiag && g.off_diagonal_zero;
    ul = std::max(ul, g.ul_mismatch);
  };
  add(Matrix{{2.0}}, Matrix{{3.0}}, Matrix{{5.0}});
  add(Matrix{{-1.5}}, Matrix{{0.25}}, Matrix{{4.0}});
  std::size_t wave_cases = 0;
  for (double k1 : {-1.0, 1.0}) {
    for (double k2 : {-1.0, 1.0}) {
      const auto m = wave_ext(64, k1, k2);
      const auto split = split_special_form(m.blocks);
      if (!split) continue;
      add(split->first, split->second,
          Matrix::diagonal(LambdaProfile::sinusoid(2.0, 1.0).midpoint_samples(64)));
      ++wave_cases;
    }
  }
  return {offdiag && ul == 0.0 && wave_cases > 0,
          "offdiag_zero=" + std::string(offdiag ? "yes" : "no") + " ul_mismatch=" + fmt(ul) +
              " wave_fixtures=" + std::to_string(wave_cases)};
}

Outcome isometric_group() {
  const auto m = wave_ext(64, 1.0, 1.0);
  const auto w = m.blocks.product().weights();
  std::mt19937_64 rng(19);
  std::vector<Vector> samples;
  for (int k = 0; k < 20; ++k) samples.push_back(gaussian(rng, w.size()));
  const double dev = isometry_deviation(m.blocks.assembled, {0.1, -0.1, 1.0, -1.0}, samples, w);
  return {dev <= kIsometryTol, "max_deviation=" + fmt(dev)};
}

Outcome heat_spectra() {
  double top = -1e300;
  bool real = true;
  for (const auto& profile : kProfiles) {
    for (double k1 : kBoundary) {
      for (double k2 : kBoundary) {
        const auto spectrum = heat_spectrum(heat_direct(64, profile.midpoint_samples(64), k1, k2));
        real = real && spectrum.real;
        top = std::max(top, spectrum.eigenvalues.back());
      }
    }
  }
  bool simple_zero = true;
  double zero = 0.0, next = -1e300;
  for (const auto& profile : kProfiles) {
    const auto ev =
        heat_spectrum(heat_direct(64, profile.midpoint_samples(64), -1.0, -1.0)).eigenvalues;
    zero = std::max(zero, std::abs(ev.back()));
    next = std::max(next, ev[ev.size() - 2]);
    simple_zero = simple_zero && std::abs(ev.back()) <= kSpectrumTol && ev[ev.size() - 2] < -kSpectrumTol;
  }
  return {real && top <= kSpectrumTol && simple_zero,
          "max_eig=" + fmt(top) + " neumann_zero=" + fmt(zero) + " neumann_second=" + fmt(next)};
}

Outcome pde_sanity() {
  const std::size_t n = 64;
  const auto heat = heat_direct(n, std::vector<double>(n, 1.0), -1.0, -1.0);
  const auto& s = heat.space;
  Vector x0(s.n), exact(s.n);
  const double t = 0.1;
  for (std::size_t i = 0; i < s.n; ++i) {
    x0[i] = std::cos(std::numbers::pi * s.coordinate(i));
    exact[i] = std::exp(-std::numbers::pi * std::numbers::pi * t) * x0[i];
  }
  const auto tr = crank_nicolson_trace(heat.direct, x0, t, 1e-3, Space{s});
  const double err = s.norm(subtract(tr.final_state, exact)) / s.norm(exact);
  return {err <= kPdeTol, "relative_l2_error=" + fmt(err)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sip_axioms", sip_axioms},
      {"p2_reduction", p2_reduction},
      {"coercivity_bound", coercivity_bound},
      {"perturbation_window", perturbation_window},
      {"wave_generator_certificate", wave_certificate},
      {"wave_heat_identity", wave_heat_identity},
      {"resolvent_via_extension", resolvent_extension},
      {"dissipation_identity", dissipation_identity},
      {"counterexample", counterexample},
      {"square_group_structure", square_group},
      {"isometric_group", isometric_group},
      {"heat_spectrum", heat_spectra},
      {"pde_sanity", pde_sanity},
  };
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %2zu %-28s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d/%zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
