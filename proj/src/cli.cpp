#include "semigroup/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "semigroup/blockops.hpp"
#include "semigroup/dissipativity.hpp"
#include "semigroup/error.hpp"
#include "semigroup/evolve.hpp"

namespace semigroup::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// registry

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "sip-axioms", "coercivity",     "wave-cert", "wave2heat", "resolvent-check",
      "counterexample", "square-group", "evolve",   "isometry"};
  return names;
}

const std::map<std::string, CheckInfo>& check_registry() {
  static const std::map<std::string, CheckInfo> registry = {
      {"sip_definiteness", {"sip-axioms", 1e-12, "max |[x,x] - ||x||^2| / ||x||^2"}},
      {"sip_linearity", {"sip-axioms", 1e-10, "max |[x+cz,y] - [x,y] - c[z,y]|"}},
      {"sip_cauchy_schwarz", {"sip-axioms", 1e-10, "count of |[x,y]|^2 - [x,x][y,y] > tol"}},
      {"sip_p2_reduction", {"sip-axioms", 1e-12, "p = 2 SIP vs h-weighted dot product"}},
      {"coercivity_bound", {"coercivity", 1e-8, "m2 >= lambda_min^2 / lambda_max - tol"}},
      {"coercivity_window", {"coercivity", 1e-10, "shift constant >= m2 / ||S||^2 - tol"}},
      {"perturbation_window",
       {"coercivity", 1e-12, "margin of P at the window edge <= tol, > 0 past the shift"}},
      {"wave_dissipative", {"wave-cert", 1e-10, "dissipativity margin of A_ext"}},
      {"wave_range_condition", {"wave-cert", 1e-10, "range probe residual of lambda I - A_ext"}},
      {"wave_contraction", {"wave-cert", 1e-10, "implicit Euler per-step growth"}},
      {"wave_q_collocated", {"wave-cert", 1e-14, "Q (0 d; d 0) Q^-1 vs diag(d, -d), relative"}},
      {"wave_heat_identity", {"wave2heat", 1e-12, "max |A_S - heat_direct| / max |heat_direct|"}},
      {"heat_spectrum", {"wave2heat", 1e-10, "real spectrum <= tol, simple 0 when Neumann"}},
      {"resolvent_extension", {"resolvent-check", 1e-8, "closure, resolvent and direct residuals"}},
      {"dissipation_identity", {"resolvent-check", 1e-9, "relative residual of the SIP identity"}},
      {"counterexample_sip", {"counterexample", 0.0, "[A_ext x, x] = 1 at x = (1, 1)"}},
      {"counterexample_as_zero", {"counterexample", 0.0, "A_S = 0 for S = I"}},
      {"square_group_offdiag", {"square-group", 0.0, "off-diagonal blocks of cal_A^2 are zero"}},
      {"square_group_upper_left", {"square-group", 0.0, "upper-left block = A12 S A21"}},
      {"evolve_contraction", {"evolve", 1e-10, "per-step norm growth of the heat trace"}},
      {"evolve_pde_accuracy", {"evolve", 0.05, "relative l2 error vs e^{-lambda pi^2 t} cos"}},
      {"isometry_deviation", {"isometry", 1e-8, "max | ||e^{tA}x|| - ||x|| | / ||x||"}},
  };
  return registry;
}

double ExperimentConfig::threshold(const std::string& check) const {
  if (auto it = thresholds.find(check); it != thresholds.end()) return it->second;
  return check_registry().at(check).tolerance;
}

Tolerances ExperimentConfig::tolerances() const {
  Tolerances t;
  t.expm_norm_bound = expm_bound;
  return t;
}

json ExperimentConfig::to_json() const {
  json j;
  j["N"] = n;
  j["p"] = p;
  j["K1"] = k1;
  j["K2"] = k2;
  j["lambda"] = lambda.describe();
  j["dt"] = dt;
  j["T"] = t_end;
  j["seed"] = seed;
  j["samples"] = samples;
  j["scheme"] = scheme;
  j["x0"] = x0;
  j["snapshots"] = snapshots;
  j["expm_bound"] = expm_bound;
  j["thresholds"] = thresholds;
  return j;
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string normalize_key(std::string_view key) {
  std::string k = trim(key);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (auto& c : k) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-') c = '_';
  }
  return k;
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || !std::isfinite(out)) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

KeyValues defaults_for(std::string_view sub) {
  if (sub == "sip-axioms") return {{"samples", "1000"}};
  if (sub == "coercivity") return {{"samples", "500"}};
  if (sub == "wave-cert") return {{"samples", "500"}, {"k1", "0"}, {"k2", "0.5"}};
  if (sub == "resolvent-check") return {{"samples", "20"}, {"k1", "0"}, {"k2", "0.5"}};
  if (sub == "evolve") {
    return {{"lambda", "1"},   {"scheme", "crank-nicolson"}, {"x0", "cos"},
            {"dt", "0.001"}, {"t", "0.1"}};
  }
  if (sub == "isometry") return {{"samples", "20"}, {"k1", "1"}, {"k2", "1"}};
  return {};
}

void apply(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize_key(raw_key);
  const std::string v = unquote(trim(raw_value));
  if (key == "n") {
    c.n = parse_uint(raw_key, v);
  } else if (key == "p") {
    c.p = parse_double(raw_key, v);
  } else if (key == "k1") {
    c.k1 = parse_double(raw_key, v);
  } else if (key == "k2") {
    c.k2 = parse_double(raw_key, v);
  } else if (key == "lambda" || key == "profile") {
    try {
      c.lambda = LambdaProfile::parse(v);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "dt") {
    c.dt = parse_double(raw_key, v);
  } else if (key == "t" || key == "t_end") {
    c.t_end = parse_double(raw_key, v);
  } else if (key == "seed") {
    c.seed = parse_uint(raw_key, v);
  } else if (key == "samples") {
    c.samples = parse_uint(raw_key, v);
  } else if (key == "scheme") {
    c.scheme = v;
  } else if (key == "x0") {
    c.x0 = v;
  } else if (key == "snapshots") {
    c.snapshots = parse_uint(raw_key, v);
  } else if (key == "expm_bound") {
    c.expm_bound = parse_double(raw_key, v);
  } else if (key == "out" || key == "out_dir") {
    c.out_dir = v;
  } else if (key.rfind("tol.", 0) == 0) {
    const std::string check = key.substr(4);
    if (!check_registry().contains(check)) throw ConfigError("unknown check '" + check + "'");
    const double t = parse_double(raw_key, v);
    if (t < 0.0) throw ConfigError("tolerance for '" + check + "' must be >= 0");
    c.thresholds[check] = t;
  } else {
    throw ConfigError("unknown config key '" + raw_key + "'");
  }
}

void validate(const ExperimentConfig& c) {
  if (c.n < 2) throw ConfigError("N must be >= 2");
  if (c.n > 2048) throw ConfigError("N must be <= 2048 (dense matrices)");
  if (!(c.p >= 1.0)) throw ConfigError("p must be >= 1");
  if (!(std::abs(c.k1) <= 1.0) || !(std::abs(c.k2) <= 1.0)) {
    throw ConfigError("boundary parameters need |K1| <= 1 and |K2| <= 1");
  }
  if (!(c.lambda.min() > 0.0)) {
    throw ConfigError("lambda profile " + c.lambda.describe() + " is not positive on [0, 1]");
  }
  if (!(c.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(c.t_end >= c.dt)) throw ConfigError("T must be >= dt");
  if (!(c.expm_bound > 0.0)) throw ConfigError("expm_bound must be > 0");
  if (c.samples == 0) throw ConfigError("samples must be >= 1");
  if (c.scheme != "implicit-euler" && c.scheme != "crank-nicolson" && c.scheme != "expm") {
    throw ConfigError("scheme must be implicit-euler, crank-nicolson or expm");
  }
  if (c.x0 != "random" && c.x0 != "cos") throw ConfigError("x0 must be random or cos");
}

}  // namespace

KeyValues parse_config_text(std::string_view text) {
  KeyValues out;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    for (const auto& [k, v] : j.items()) {
      if (v.is_string()) {
        out.emplace_back(k, v.get<std::string>());
      } else if (v.is_number() || v.is_boolean()) {
        out.emplace_back(k, v.dump());
      } else if (k == "tol" && v.is_object()) {
        for (const auto& [check, t] : v.items()) {
          if (!t.is_number()) throw ConfigError("tol." + check + " must be a number");
          out.emplace_back("tol." + check, t.dump());
        }
      } else {
        throw ConfigError("config value for '" + k + "' must be a string or number");
      }
    }
    return out;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentConfig make_config(std::string_view subcommand, const std::vector<KeyValues>& layers) {
  const auto& subs = subcommands();
  if (std::find(subs.begin(), subs.end(), subcommand) == subs.end()) {
    throw ConfigError("unknown subcommand '" + std::string(subcommand) + "'");
  }
  ExperimentConfig c;
  for (const auto& [k, v] : defaults_for(subcommand)) apply(c, k, v);
  for (const auto& layer : layers)
    for (const auto& [k, v] : layer) apply(c, k, v);
  validate(c);
  return c;
}

// ---------------------------------------------------------------------------
// subcommands

namespace {

struct Context {
  const ExperimentConfig& config;
  json checks = json::array();
  json metrics = json::object();
  std::vector<std::pair<std::string, std::string>> csv;  // file name, contents

  void check(const std::string& name, bool pass, double value, json extra = json::object()) {
    json c = {{"name", name},
              {"pass", pass},
              {"value", value},
              {"tolerance", config.threshold(name)}};
    for (auto& [k, v] : extra.items()) c[k] = v;
    checks.push_back(std::move(c));
  }
  double tol(const std::string& name) const { return config.threshold(name); }
  Sampler sampler() const { return Sampler{config.seed, config.samples, false}; }
};

Vector gaussian_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j).real());
    rows.push_back(std::move(r));
  }
  return rows;
}

Closure closure_for(const ExperimentConfig& c, const GridSpace& x2, const Sampler& sampler) {
  return multiplication_s(c.lambda.midpoint_samples(c.n), x2, sampler);
}

void run_sip_axioms(Context& ctx) {
  const auto& c = ctx.config;
  const auto space = GridSpace::uniform(c.n, 1.0 / static_cast<double>(c.n), c.p);
  const auto report = sip_axiom_report(space, c.samples, c.seed, ctx.tol("sip_cauchy_schwarz"));
  ctx.check("sip_definiteness", report.definiteness_residual <= ctx.tol("sip_definiteness"),
            report.definiteness_residual);
  ctx.check("sip_linearity", report.linearity_residual <= ctx.tol("sip_linearity"),
            report.linearity_residual);
  ctx.check("sip_cauchy_schwarz", report.cauchy_schwarz_violations == 0,
            static_cast<double>(report.cauchy_schwarz_violations),
            {{"worst_excess", report.worst_cauchy_schwarz_excess}});

  // p = 2 against the weighted Hermitian dot product
  const auto hilbert = space.with_p(2.0);
  std::mt19937_64 rng(c.seed ^ 0x5eedULL);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    Vector f(c.n), h(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
      f[i] = {g(rng), g(rng)};
      h[i] = {g(rng), g(rng)};
    }
    Complex direct{};
    for (std::size_t i = 0; i < c.n; ++i) direct += hilbert.weight(i) * f[i] * std::conj(h[i]);
    worst = std::max(worst, std::abs(lp_sip(hilbert, f, h) - direct));
  }
  ctx.check("sip_p2_reduction", worst <= ctx.tol("sip_p2_reduction"), worst);
  ctx.metrics["samples"] = report.samples;
}

double p_margin(const Closure& closure, double lambda, const ProductSpace& space,
                const Sampler& sampler) {
  return dissipativity_margin(perturbation_p(closure, lambda, space.first.n), space, sampler)
      .value;
}

void run_coercivity(Context& ctx) {
  const auto& c = ctx.config;
  const auto model = wave_ext(c.n, c.k1, c.k2, c.p);
  const auto closure = closure_for(c, model.blocks.x2, ctx.sampler());
  const auto& r = closure.report;
  const double bound = c.lambda.coercivity_bound();
  ctx.check("coercivity_bound", r.m2 >= bound - ctx.tol("coercivity_bound"), r.m2,
            {{"bound", bound}});
  ctx.check("coercivity_window", r.shift_constant >= r.window_upper - ctx.tol("coercivity_window"),
            r.shift_constant, {{"window_upper", r.window_upper}});

  const auto space = model.blocks.product();
  const double edge = r.window_upper;
  const double at_edge = p_margin(closure, edge, space, ctx.sampler());
  const double at_double = p_margin(closure, 2.0 * edge, space, ctx.sampler());
  const bool past_shift = 2.0 * edge > r.shift_constant + ctx.tol("coercivity_window");
  const bool pass = at_edge <= ctx.tol("perturbation_window") && (!past_shift || at_double > 0.0);
  ctx.check("perturbation_window", pass, at_edge,
            {{"margin_at_double", at_double}, {"double_past_shift", past_shift}});

  ctx.metrics["m2"] = r.m2;
  ctx.metrics["s_norm"] = r.s_norm;
  ctx.metrics["s_norm_exact"] = r.s_norm_exact;
  ctx.metrics["window_upper"] = r.window_upper;
  ctx.metrics["shift_constant"] = r.shift_constant;
  ctx.metrics["certified"] = r.certified;
  ctx.metrics["lambda_min"] = c.lambda.min();
  ctx.metrics["lambda_max"] = c.lambda.max();
}

// Central difference with one-sided ends on a collocated grid of n points.
Matrix collocated_difference(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n - 1);
  Matrix d(n, n);
  d(0, 0) = -1.0 / h;
  d(0, 1) = 1.0 / h;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d(i, i - 1) = -0.5 / h;
    d(i, i + 1) = 0.5 / h;
  }
  d(n - 1, n - 2) = -1.0 / h;
  d(n - 1, n - 1) = 1.0 / h;
  return d;
}

void run_wave_cert(Context& ctx) {
  const auto& c = ctx.config;
  const auto model = wave_ext(c.n, c.k1, c.k2, c.p);
  const Space space = model.blocks.product();
  const auto cert = generation_certificate(model.blocks.assembled, space, 1.0, ctx.sampler());
  ctx.check("wave_dissipative", cert.margin.value <= ctx.tol("wave_dissipative"),
            cert.margin.value, {{"certified", cert.margin.certified}});
  ctx.check("wave_range_condition", cert.range_residual <= ctx.tol("wave_range_condition"),
            cert.range_residual, {{"probes", cert.probes}});

  std::mt19937_64 rng(c.seed);
  const Vector x0 = gaussian_vector(rng, dim(space));
  const auto trace = implicit_euler_trace(model.blocks.assembled, x0, c.t_end, c.dt, space,
                                          TraceOptions{c.snapshots});
  const double growth = trace.max_step_growth();
  ctx.check("wave_contraction", growth <= ctx.tol("wave_contraction"), growth,
            {{"steps", trace.times.size() - 1}});
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  ctx.csv.emplace_back("wave_trace.csv", csv.str());

  const std::size_t m = std::min<std::size_t>(c.n + 1, 64);
  const Matrix d = collocated_difference(m);
  const Matrix conj = q_conjugate_collocated(d);
  Matrix expected(2 * m, 2 * m);
  expected.set_block(0, 0, d);
  expected.set_block(m, m, Complex{-1.0, 0.0} * d);
  const double defect = max_abs_diff(conj, expected) / d.max_abs();
  ctx.check("wave_q_collocated", defect <= ctx.tol("wave_q_collocated"), defect);

  const auto qd = q_diagonalize(model);
  ctx.metrics["staggered_interior_offdiag_fro"] = qd.interior_offdiag_norm;
  ctx.metrics["staggered_smooth_offdiag"] = qd.smooth_offdiag;
  ctx.metrics["growth_m"] = cert.growth.m;
  ctx.metrics["growth_omega"] = cert.growth.omega;
  ctx.metrics["margin"] = cert.margin.value;
}

void run_wave2heat(Context& ctx) {
  const auto& c = ctx.config;
  const auto model = wave_ext(c.n, c.k1, c.k2, c.p);
  const auto samples = c.lambda.midpoint_samples(c.n);
  const auto closure = multiplication_s(samples, model.blocks.x2, ctx.sampler());
  const Matrix as = build_as(model.blocks, closure);
  const auto heat = heat_direct(c.n, samples, c.k1, c.k2, c.p);
  const double abs_diff = max_abs_diff(as, heat.direct);
  const double rel = abs_diff / std::max(heat.direct.max_abs(), 1e-300);
  ctx.check("wave_heat_identity", rel <= ctx.tol("wave_heat_identity"), rel,
            {{"absolute", abs_diff}});

  const auto spectrum = heat_spectrum(heat);
  const double tol = ctx.tol("heat_spectrum");
  bool pass = spectrum.real && !spectrum.eigenvalues.empty() && spectrum.eigenvalues.back() <= tol;
  json extra = {{"real", spectrum.real}, {"symmetry_defect", spectrum.symmetry_defect}};
  double top = spectrum.eigenvalues.empty() ? 0.0 : spectrum.eigenvalues.back();
  if (c.k1 == -1.0 && c.k2 == -1.0 && spectrum.eigenvalues.size() >= 2) {
    const double second = spectrum.eigenvalues[spectrum.eigenvalues.size() - 2];
    pass = pass && std::abs(top) <= tol && second < -tol;
    extra["second_eigenvalue"] = second;
  }
  ctx.check("heat_spectrum", pass, top, extra);
  ctx.metrics["lambda_min_sample"] = heat.lambda_min;
  ctx.metrics["lambda_max_sample"] = heat.lambda_max;
  ctx.metrics["unknowns"] = heat.space.n;
}

void run_resolvent_check(Context& ctx) {
  const auto& c = ctx.config;
  const auto model = wave_ext(c.n, c.k1, c.k2, c.p);
  const auto& ext = model.blocks;
  const auto closure = closure_for(c, ext.x2, ctx.sampler());
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);

  const double tol = ctx.tol("resolvent_extension");
  double worst_closure = 0.0, worst_res = 0.0, worst_direct = 0.0;
  bool all = true;
  for (std::size_t k = 0; k < c.samples; ++k) {
    const double lambda = closure.report.window_upper * u(rng);
    DiscreteFunction g{ext.x1, gaussian_vector(rng, ext.n1())};
    const auto r = resolvent_via_extension(ext, closure, {lambda, g}, ResolventMode::Certified);
    const auto& d = r.diagnostics;
    worst_closure = std::max(worst_closure, d.closure_residual / std::max(d.x2_norm, 1.0));
    worst_res = std::max(worst_res, d.resolvent_residual);
    worst_direct = std::max(worst_direct, d.direct_agreement);
    all = all && d.passes(tol);
  }
  ctx.check("resolvent_extension", all, std::max({worst_closure, worst_res, worst_direct}),
            {{"closure", worst_closure}, {"resolvent", worst_res}, {"direct", worst_direct}});

  double worst_identity = 0.0;
  for (int k = 0; k < 100; ++k) {
    DiscreteFunction x{ext.x1, gaussian_vector(rng, ext.n1())};
    worst_identity =
        std::max(worst_identity, dissipation_identity_residual(ext, closure, x).relative());
  }
  ctx.check("dissipation_identity", worst_identity <= ctx.tol("dissipation_identity"),
            worst_identity);
  ctx.metrics["window_upper"] = closure.report.window_upper;
  ctx.metrics["pairs"] = c.samples;
}

void run_counterexample(Context& ctx) {
  const auto ext = counterexample_ext();
  const Vector x = {1.0, 1.0};
  const double sip_value = product_sip(ext.product(), ext.assembled * x, x).real();
  const Matrix as = build_as(ext, Matrix::identity(1));
  const bool zero = as == Matrix(1, 1);
  ctx.check("counterexample_sip", sip_value == 1.0, sip_value);
  ctx.check("counterexample_as_zero", zero, as.max_abs());
  ctx.metrics["sip_value"] = sip_value;
  ctx.metrics["as_matrix"] = matrix_json(as);
  ctx.metrics["ext_margin"] = dissipativity_margin(ext.assembled, ext.product()).value;
}

void run_square_group(Context& ctx) {
  const auto& c = ctx.config;
  json fixtures = json::array();
  bool offdiag = true;
  double worst_ul = 0.0;
  const auto add = [&](const std::string& name, const Matrix& a12, const Matrix& a21,
                       const Matrix& s) {
    const auto g = square_group_op(a12, a21, s);
    offdiag = offdiag && g.off_diagonal_zero;
    const double rel = g.ul_mismatch / std::max(g.ul_block.max_abs(), 1e-300);
    worst_ul = std::max(worst_ul, rel);
    fixtures.push_back({{"name", name},
                        {"off_diagonal_zero", g.off_diagonal_zero},
                        {"upper_left_mismatch", rel}});
    return g;
  };
  add("scalar", Matrix{{2.0}}, Matrix{{3.0}}, Matrix{{5.0}});
  add("scalar_negative", Matrix{{-1.5}}, Matrix{{0.25}}, Matrix{{4.0}});

  const auto model = wave_ext(c.n, c.k1, c.k2, c.p);
  if (const auto split = split_special_form(model.blocks)) {
    const auto samples = c.lambda.midpoint_samples(c.n);
    const Matrix s = Matrix::diagonal(samples);
    const auto g = add("wave", split->first, split->second, s);
    const auto heat = heat_direct(c.n, samples, c.k1, c.k2, c.p);
    ctx.metrics["upper_left_vs_heat"] = max_abs_diff(g.ul_block, heat.direct);
  } else {
    fixtures.push_back({{"name", "wave"}, {"skipped", "boundary rows couple X1 to itself"}});
  }
  ctx.check("square_group_offdiag", offdiag, offdiag ? 0.0 : 1.0);
  ctx.check("square_group_upper_left", worst_ul <= ctx.tol("square_group_upper_left"), worst_ul);
  ctx.metrics["fixtures"] = fixtures;
}

void run_evolve(Context& ctx) {
  const auto& c = ctx.config;
  const auto samples = c.lambda.midpoint_samples(c.n);
  const auto heat = heat_direct(c.n, samples, c.k1, c.k2, c.p);
  const auto& space = heat.space;
  Vector x0(space.n);
  if (c.x0 == "cos") {
    for (std::size_t i = 0; i < space.n; ++i) {
      x0[i] = std::cos(std::numbers::pi * space.coordinate(i));
    }
  } else {
    std::mt19937_64 rng(c.seed);
    x0 = gaussian_vector(rng, space.n);
  }
  const TraceOptions opts{c.snapshots};
  const Tolerances tol = c.tolerances();
  EvolutionTrace trace;
  if (c.scheme == "implicit-euler") {
    trace = implicit_euler_trace(heat.direct, x0, c.t_end, c.dt, space, opts);
  } else if (c.scheme == "crank-nicolson") {
    trace = crank_nicolson_trace(heat.direct, x0, c.t_end, c.dt, space, opts);
  } else {
    const auto steps = static_cast<std::size_t>(std::llround(c.t_end / c.dt));
    std::vector<double> times(steps);
    for (std::size_t k = 0; k < steps; ++k) times[k] = static_cast<double>(k + 1) * c.dt;
    trace = expm_trace(heat.direct, x0, times, space, opts, tol);
  }

  const auto margin = dissipativity_margin(heat.direct, space, ctx.sampler());
  const bool applicable = margin.value <= Tolerances{}.margin;
  const double growth = trace.max_step_growth();
  ctx.check("evolve_contraction", !applicable || growth <= ctx.tol("evolve_contraction"), growth,
            {{"applicable", applicable}, {"margin", margin.value}});

  const bool analytic = c.lambda.kind == LambdaProfile::Kind::Constant && c.k1 == -1.0 &&
                        c.k2 == -1.0 && c.x0 == "cos";
  double error = 0.0;
  if (analytic) {
    const double t = trace.times.back();
    const double decay = std::exp(-c.lambda.a * std::numbers::pi * std::numbers::pi * t);
    Vector exact(space.n);
    for (std::size_t i = 0; i < space.n; ++i) {
      exact[i] = decay * std::cos(std::numbers::pi * space.coordinate(i));
    }
    const auto l2 = space.with_p(2.0);
    error = l2.norm(subtract(trace.final_state, exact)) / l2.norm(exact);
  }
  ctx.check("evolve_pde_accuracy", !analytic || error <= ctx.tol("evolve_pde_accuracy"), error,
            {{"applicable", analytic}});

  // grid step kept inside the expm bound
  const double step = std::min(0.1, 0.5 * tol.expm_norm_bound / heat.direct.norm_1());
  std::vector<double> grid(20);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = step * static_cast<double>(k + 1);
  const auto growth_fit = growth_bound_fit(heat.direct, grid, space.weights(), tol);
  ctx.metrics["growth_step"] = step;
  ctx.metrics["growth_m"] = growth_fit.m;
  ctx.metrics["growth_omega"] = growth_fit.omega;
  ctx.metrics["final_norm"] = trace.norms.back();
  ctx.metrics["steps"] = trace.times.size() - 1;

  std::ostringstream csv;
  write_trace_csv(csv, trace);
  ctx.csv.emplace_back("evolve_trace.csv", csv.str());
  if (c.snapshots > 0) {
    std::ostringstream states;
    write_states_csv(states, trace);
    ctx.csv.emplace_back("evolve_states.csv", states.str());
  }
}

void run_isometry(Context& ctx) {
  const auto& c = ctx.config;
  const auto model = wave_ext(c.n, c.k1, c.k2, c.p);
  const auto space = model.blocks.product();
  std::mt19937_64 rng(c.seed);
  std::vector<Vector> samples;
  for (std::size_t k = 0; k < c.samples; ++k) samples.push_back(gaussian_vector(rng, space.dim()));
  const std::vector<double> ts = {0.1, -0.1, 1.0, -1.0};
  const double dev =
      isometry_deviation(model.blocks.assembled, ts, samples, space.weights(), c.tolerances());
  ctx.check("isometry_deviation", dev <= ctx.tol("isometry_deviation"), dev);
  ctx.metrics["times"] = ts;
}

using Runner = void (*)(Context&);

Runner runner_for(std::string_view sub) {
  if (sub == "sip-axioms") return run_sip_axioms;
  if (sub == "coercivity") return run_coercivity;
  if (sub == "wave-cert") return run_wave_cert;
  if (sub == "wave2heat") return run_wave2heat;
  if (sub == "resolvent-check") return run_resolvent_check;
  if (sub == "counterexample") return run_counterexample;
  if (sub == "square-group") return run_square_group;
  if (sub == "evolve") return run_evolve;
  if (sub == "isometry") return run_isometry;
  throw ConfigError("unknown subcommand '" + std::string(sub) + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

RunOutcome run(std::string_view subcommand, const ExperimentConfig& config, bool write_files) {
  const Runner runner = runner_for(subcommand);
  Context ctx{config, json::array(), json::object(), {}};
  RunOutcome outcome;
  json& s = outcome.summary;
  s["schema"] = 1;
  s["subcommand"] = std::string(subcommand);
  s["config"] = config.to_json();
  try {
    runner(ctx);
  } catch (const Error& e) {
    s["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
  }
  bool pass = !s.contains("error");
  for (const auto& c : ctx.checks) pass = pass && c["pass"].get<bool>();
  s["checks"] = ctx.checks;
  s["metrics"] = ctx.metrics;
  s["pass"] = pass;
  outcome.exit_code = pass ? kExitPass : kExitCheckFailure;

  if (write_files) {
    std::filesystem::create_directories(config.out_dir);
    json files = json::array();
    for (const auto& [name, text] : ctx.csv) {
      const auto path = config.out_dir / name;
      write_text(path, text);
      outcome.artifacts.push_back(path);
      files.push_back(name);
    }
    s["artifacts"] = files;
    const auto summary_path = config.out_dir / (std::string(subcommand) + ".json");
    write_text(summary_path, s.dump(2) + "\n");
    outcome.artifacts.insert(outcome.artifacts.begin(), summary_path);
  }
  return outcome;
}

int run_sweep(std::string_view subcommand, const std::vector<KeyValues>& base_layers,
              const json& sweep, const std::filesystem::path& out_dir,
              std::vector<RunOutcome>* outcomes) {
  if (!sweep.is_array()) throw ConfigError("sweep file must hold a JSON array of configs");
  std::vector<ExperimentConfig> configs;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!sweep[i].is_object()) throw ConfigError("sweep entry " + std::to_string(i) + " is not an object");
    auto layers = base_layers;
    layers.push_back(parse_config_text(sweep[i].dump()));
    auto c = make_config(subcommand, layers);
    c.out_dir = out_dir / ("sweep_" + std::to_string(i));
    configs.push_back(std::move(c));
  }
  const std::string sub(subcommand);
  std::vector<std::future<RunOutcome>> futures;
  for (const auto& c : configs) {
    futures.push_back(std::async(std::launch::async, [&sub, &c] { return run(sub, c); }));
  }
  int code = kExitPass;
  for (auto& f : futures) {
    auto r = f.get();
    code = std::max(code, r.exit_code);
    if (outcomes) outcomes->push_back(std::move(r));
  }
  return code;
}

}  // namespace semigroup::cli
