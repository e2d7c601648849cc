#pragma once

// Dissipativity margins, coercivity of the closure operator, and desk-scale
// Lumer-Phillips generation certificates.
//
// Everything at p = 2 is exact (Hermitian eigenvalue problems in the weighted
// inner product). At p != 2 the extremal Rayleigh-type quotients are sampled
// and refined by coordinate search, and the results carry certified = false.

#include <cstdint>
#include <vector>

#include "semigroup/evolve.hpp"
#include "semigroup/linalg.hpp"
#include "semigroup/sip.hpp"
#include "semigroup/tolerances.hpp"

namespace semigroup {

/// Seeded source of random test vectors. Copies replay the same stream.
struct Sampler {
  std::uint64_t seed = 20240611;
  std::size_t count = 500;
  bool complex_values = false;
};

struct Margin {
  double value = 0.0;
  bool certified = false;  // exact (p = 2) or sampled lower bound
  std::size_t samples = 0;
};

/// sup_x Re[Ax, x] / ||x||^2 with respect to the space's SIP.
Margin dissipativity_margin(const Matrix& a, const Space& space, const Sampler& sampler = {},
                            const Tolerances& tol = {});

struct NormCheck {
  bool holds = true;
  double worst_ratio = 0.0;  // min ||(lambda - A)x|| / (lambda ||x||)
  double worst_lambda = 0.0;
  bool consistent_with_margin = true;  // margin <= tol implies holds
  Margin margin;
};

/// lambda ||x|| <= ||(lambda I - A) x|| over the sampler's draws, with the
/// margin cross-check filled in.
NormCheck norm_dissipativity_check(const Matrix& a, const Space& space,
                                   const std::vector<double>& lambdas,
                                   const Sampler& sampler = {}, const Tolerances& tol = {});
/// Same inequality on explicit vectors; no margin cross-check.
NormCheck norm_dissipativity_check(const Matrix& a, const Space& space,
                                   const std::vector<double>& lambdas,
                                   const std::vector<Vector>& samples, const Tolerances& tol = {});

struct CoercivityReport {
  double m2 = 0.0;              // inf Re[x, Sx] / ||x||^2
  double s_norm = 0.0;          // operator p-norm of S
  bool s_norm_exact = false;
  double window_upper = 0.0;    // lambda window is (0, m2 / s_norm^2]
  double shift_constant = 0.0;  // largest m with m I - S^-1 dissipative
  bool certified = false;
  std::size_t samples = 0;

  bool in_window(double lambda) const { return lambda > 0.0 && lambda <= window_upper; }
};

/// NotCoercive when m2 <= 0, Singular when S cannot be inverted.
CoercivityReport coercivity_report(const Matrix& s, const GridSpace& space,
                                   const Sampler& sampler = {}, const Tolerances& tol = {});

/// Smallest eigenvalue of S + S^* in the weighted inner product.
double hilbert_coercivity(const Matrix& s, const GridSpace& space, const Tolerances& tol = {});

struct GenerationCertificate {
  Margin margin;
  double range_residual = 0.0;  // max relative residual over the probes
  std::size_t probes = 0;
  double lambda_used = 0.0;
  GrowthBound growth;
  bool dissipative = false;
  bool range_condition = false;

  bool passes() const { return dissipative && range_condition; }
};

/// Dissipativity margin, range condition of lambda I - A on the canonical
/// basis plus 8 seeded random right-hand sides, and a growth-bound fit on
/// t = 0.1, 0.2, ..., 2.0 in the weighted 2-norm.
GenerationCertificate generation_certificate(const Matrix& a, const Space& space, double lambda,
                                             const Sampler& sampler = {},
                                             const Tolerances& tol = {});

}  // namespace semigroup
