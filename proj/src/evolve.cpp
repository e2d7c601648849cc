#include "semigroup/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "semigroup/error.hpp"

namespace semigroup {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ImplicitEuler: return "implicit-euler";
    case Scheme::CrankNicolson: return "crank-nicolson";
    case Scheme::Expm: return "expm";
  }
  return "unknown";
}

double EvolutionTrace::max_step_growth() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < norms.size(); ++k) {
    const double base = norms[k] > 0.0 ? norms[k] : 1.0;
    worst = std::max(worst, (norms[k + 1] - norms[k]) / base);
  }
  return norms.size() < 2 ? 0.0 : worst;
}

namespace {

std::size_t step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= dt)) {
    throw Error(ErrorCode::InvalidArgument, "time stepping needs dt > 0 and T >= dt");
  }
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

class Recorder {
 public:
  Recorder(EvolutionTrace& trace, const Space& space, std::size_t steps, TraceOptions options)
      : trace_(trace), space_(space), max_(options.max_snapshots) {
    stride_ = max_ == 0 ? 0 : std::max<std::size_t>(1, (steps + max_) / max_);
    trace_.times.reserve(steps + 1);
    trace_.norms.reserve(steps + 1);
  }

  void record(std::size_t step, double t, const Vector& x) {
    trace_.times.push_back(t);
    trace_.norms.push_back(norm(space_, x));
    if (max_ > 0 && step % stride_ == 0 && trace_.states.size() < max_) {
      trace_.states.push_back(x);
      trace_.state_times.push_back(t);
    }
  }

 private:
  EvolutionTrace& trace_;
  const Space& space_;
  std::size_t max_;
  std::size_t stride_ = 0;
};

EvolutionTrace one_step_trace(Scheme scheme, const Matrix& a, std::span<const Complex> x0,
                              double t_end, double dt, const Space& space, TraceOptions options,
                              const Tolerances& tol) {
  if (!a.is_square() || a.rows() != x0.size() || dim(space) != x0.size()) {
    throw Error(ErrorCode::DimensionMismatch, "operator, state and space sizes differ");
  }
  const std::size_t steps = step_count(t_end, dt);
  const std::size_t n = a.rows();
  const double theta = scheme == Scheme::CrankNicolson ? 0.5 : 1.0;

  Matrix lhs = Matrix::identity(n);
  lhs -= Complex{theta * dt, 0.0} * a;
  std::optional<Matrix> explicit_part;
  if (scheme == Scheme::CrankNicolson) {
    explicit_part = Matrix::identity(n) + Complex{0.5 * dt, 0.0} * a;
  }

  std::optional<LuFactorization> lu;
  try {
    lu.emplace(lhs, tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularStep, e.what());
  }

  EvolutionTrace trace;
  trace.scheme = scheme;
  Recorder rec(trace, space, steps, options);
  Vector x(x0.begin(), x0.end());
  rec.record(0, 0.0, x);
  for (std::size_t k = 1; k <= steps; ++k) {
    x = explicit_part ? lu->solve(*explicit_part * x) : lu->solve(x);
    rec.record(k, static_cast<double>(k) * dt, x);
  }
  trace.final_state = std::move(x);
  return trace;
}

}  // namespace

EvolutionTrace implicit_euler_trace(const Matrix& a, std::span<const Complex> x0, double t_end,
                                    double dt, const Space& space, TraceOptions options,
                                    const Tolerances& tol) {
  return one_step_trace(Scheme::ImplicitEuler, a, x0, t_end, dt, space, options, tol);
}

EvolutionTrace crank_nicolson_trace(const Matrix& a, std::span<const Complex> x0, double t_end,
                                    double dt, const Space& space, TraceOptions options,
                                    const Tolerances& tol) {
  return one_step_trace(Scheme::CrankNicolson, a, x0, t_end, dt, space, options, tol);
}

EvolutionTrace expm_trace(const Matrix& a, std::span<const Complex> x0,
                          const std::vector<double>& times, const Space& space,
                          TraceOptions options, const Tolerances& tol) {
  if (!a.is_square() || a.rows() != x0.size() || dim(space) != x0.size()) {
    throw Error(ErrorCode::DimensionMismatch, "operator, state and space sizes differ");
  }
  EvolutionTrace trace;
  trace.scheme = Scheme::Expm;
  Recorder rec(trace, space, times.size(), options);
  const Vector x(x0.begin(), x0.end());
  rec.record(0, 0.0, x);
  double last = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > last)) throw Error(ErrorCode::InvalidArgument, "times must increase from 0");
    last = times[k];
    trace.final_state = expm(a, times[k], tol) * x;
    rec.record(k + 1, times[k], trace.final_state);
  }
  if (times.empty()) trace.final_state = x;
  return trace;
}

double weighted_norm2(const Matrix& a, std::span<const double> weights, const Tolerances& tol) {
  const Matrix b = weights.empty() ? a : weighted_similarity(a, weights);
  const auto values = hermitian_eigvals(b.adjoint() * b, tol);
  return values.empty() ? 0.0 : std::sqrt(std::max(values.back(), 0.0));
}

double isometry_deviation(const Matrix& a, const std::vector<double>& t_list,
                          const std::vector<Vector>& samples, std::span<const double> weights,
                          const Tolerances& tol) {
  const auto wnorm = [&](std::span<const Complex> x) {
    if (weights.empty()) return norm2(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * std::norm(x[i]);
    return std::sqrt(s);
  };
  double worst = 0.0;
  for (double t : t_list) {
    const Matrix e = expm(a, t, tol);
    for (const auto& x : samples) {
      const double nx = wnorm(x);
      if (nx == 0.0) continue;
      worst = std::max(worst, std::abs(wnorm(e * x) - nx) / nx);
    }
  }
  return worst;
}

GrowthBound growth_bound_fit(const Matrix& a, const std::vector<double>& t_grid,
                             std::span<const double> weights, const Tolerances& tol) {
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty t grid");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t grid must be positive");
  }
  GrowthBound out;
  out.times = t_grid;

  // A uniform grid t_k = (k+1) t_0 is walked by repeated multiplication.
  bool uniform = true;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double expected = static_cast<double>(k + 1) * t_grid[0];
    if (std::abs(t_grid[k] - expected) > 1e-12 * expected) uniform = false;
  }
  if (uniform) {
    const Matrix step = expm(a, t_grid[0], tol);
    Matrix t_op = step;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      if (k > 0) t_op = t_op * step;
      out.norms.push_back(weighted_norm2(t_op, weights, tol));
    }
  } else {
    for (double t : t_grid) out.norms.push_back(weighted_norm2(expm(a, t, tol), weights, tol));
  }

  const double n = static_cast<double>(t_grid.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double y = std::log(std::max(out.norms[k], 1e-300));
    st += t_grid[k];
    sy += y;
    stt += t_grid[k] * t_grid[k];
    sty += t_grid[k] * y;
  }
  const double denom = n * stt - st * st;
  double log_m = 0.0;
  if (denom > 0.0) {
    out.omega = (n * sty - st * sy) / denom;
    log_m = (sy - out.omega * st) / n;
  } else {
    out.omega = sy / st;
  }
  out.m = std::max(1.0, std::exp(log_m));
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    out.m = std::max(out.m, out.norms[k] * std::exp(-out.omega * t_grid[k]));
  }
  return out;
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << "time,norm,scheme\n";
  out.precision(17);
  const auto name = to_string(trace.scheme);
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    out << trace.times[k] << ',' << trace.norms[k] << ',' << name << '\n';
  }
}

void write_states_csv(std::ostream& out, const EvolutionTrace& trace) {
  out.precision(17);
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    out << trace.state_times[k];
    for (const auto& v : trace.states[k]) out << ',' << v.real();
    out << '\n';
  }
}

}  // namespace semigroup
