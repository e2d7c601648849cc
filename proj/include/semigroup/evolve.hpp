#pragma once

// Time integration and semigroup diagnostics. Norms are measured in the
// same discrete l^p norm the SIP module uses, so a contraction trace and a
// dissipativity certificate talk about the same quantity.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semigroup/linalg.hpp"
#include "semigroup/sip.hpp"
#include "semigroup/tolerances.hpp"

namespace semigroup {

enum class Scheme { ImplicitEuler, CrankNicolson, Expm };

std::string to_string(Scheme scheme);

struct EvolutionTrace {
  Scheme scheme = Scheme::ImplicitEuler;
  std::vector<double> times;  // strictly increasing, starts at 0
  std::vector<double> norms;
  std::vector<Vector> states;  // optional snapshots, at most max_snapshots
  std::vector<double> state_times;
  Vector final_state;

  /// Largest relative one-step growth max_k (norm[k+1] - norm[k]) / norm[k].
  double max_step_growth() const;
  bool non_increasing(double slack) const { return max_step_growth() <= slack; }
};

struct TraceOptions {
  std::size_t max_snapshots = 0;  // 0 keeps no states
};

/// x+ = (I - dt A)^{-1} x, the resolvent iterate at lambda = 1/dt.
/// SingularStep when I - dt A is singular.
EvolutionTrace implicit_euler_trace(const Matrix& a, std::span<const Complex> x0, double t_end,
                                    double dt, const Space& space, TraceOptions options = {},
                                    const Tolerances& tol = {});

/// (I - dt/2 A) x+ = (I + dt/2 A) x.
EvolutionTrace crank_nicolson_trace(const Matrix& a, std::span<const Complex> x0, double t_end,
                                    double dt, const Space& space, TraceOptions options = {},
                                    const Tolerances& tol = {});

/// States exp(t_k A) x0 on the given increasing times (t_0 = 0 is prepended).
EvolutionTrace expm_trace(const Matrix& a, std::span<const Complex> x0,
                          const std::vector<double>& times, const Space& space,
                          TraceOptions options = {}, const Tolerances& tol = {});

/// max over samples and t of | ||exp(tA)x|| - ||x|| | / ||x|| in the weighted
/// 2-norm. Propagates Overflow from expm.
double isometry_deviation(const Matrix& a, const std::vector<double>& t_list,
                          const std::vector<Vector>& samples, std::span<const double> weights = {},
                          const Tolerances& tol = {});

struct GrowthBound {
  double m = 1.0;
  double omega = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
};

/// Least-squares fit of log ||exp(tA)||_2 (weighted) against t. M is clamped
/// to >= 1 and raised until every sample obeys ||T(t)|| <= M e^{omega t}.
GrowthBound growth_bound_fit(const Matrix& a, const std::vector<double>& t_grid,
                             std::span<const double> weights = {}, const Tolerances& tol = {});

/// Weighted 2-norm sqrt(lambda_max(B^H B)), B = W^{1/2} A W^{-1/2}. Empty
/// weights mean the Euclidean norm.
double weighted_norm2(const Matrix& a, std::span<const double> weights = {},
                      const Tolerances& tol = {});

/// CSV with header "time,norm,scheme".
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);
/// One row per snapshot: time followed by the real parts of the state.
void write_states_csv(std::ostream& out, const EvolutionTrace& trace);

}  // namespace semigroup
