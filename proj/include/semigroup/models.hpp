#pragma once

// Staggered-grid discretization of the wave system
//
//   d/dt (x1, x2) = (d/dxi x2, d/dxi x1)  on [0, 1],
//   (Qf)_1(1) = K1 (Qf)_2(1),  (Qf)_2(0) = K2 (Qf)_1(0),
//
// with x1 on the N+1 nodes and x2 on the N cell midpoints, and of the heat
// operator d/dxi(lambda d/dxi) with the matching Robin conditions. Boundary
// conditions are imposed by eliminating the flux x2 at xi = 0, 1:
//
//   x2(1) = c1 x1(1),  c1 = (1 + K1)/(K1 - 1)    (K1 = 1: x1(1) = 0)
//   x2(0) = c0 x1(0),  c0 = (1 + K2)/(1 - K2)    (K2 = 1: x1(0) = 0)
//
// Dirichlet nodes are removed from the node grid. Boundary rows use the
// half cell next to the boundary, matching the trapezoid weights of the node
// grid so that the scheme is exactly dissipative at p = 2.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semigroup/blockops.hpp"
#include "semigroup/linalg.hpp"
#include "semigroup/sip.hpp"

namespace semigroup {

struct StaggeredPair {
  Matrix d_plus;   // nodes (N+1) -> midpoints (N): (f_{j+1} - f_j) / h
  Matrix d_minus;  // midpoints (N) -> interior nodes (N-1): (m_{j+1/2} - m_{j-1/2}) / h
  double h = 0.0;
  std::size_t cells = 0;
};

StaggeredPair staggered_derivatives(std::size_t cells);

/// Heat conduction coefficient on [0, 1] from a small closed-form family,
/// so that the extrema are exact.
struct LambdaProfile {
  enum class Kind { Constant, Affine, Sinusoid };  // c, a + b xi, a + b sin(pi xi)
  Kind kind = Kind::Constant;
  double a = 1.0;
  double b = 0.0;

  static LambdaProfile constant(double c) { return {Kind::Constant, c, 0.0}; }
  static LambdaProfile affine(double a, double b) { return {Kind::Affine, a, b}; }
  static LambdaProfile sinusoid(double a, double b) { return {Kind::Sinusoid, a, b}; }
  /// "3", "const:3", "1+xi", "1+0.5*xi", "affine:1,0.5", "2+sin", "2+1*sin",
  /// "sin:2,1". InvalidArgument on anything else.
  static LambdaProfile parse(std::string_view text);

  double operator()(double xi) const;
  double min() const;
  double max() const;
  std::string describe() const;
  /// lambda at the midpoints (j + 1/2) h; NonPositiveCoefficient if min() <= 0.
  std::vector<double> midpoint_samples(std::size_t cells) const;
  /// lambda_min^2 / lambda_max from the exact extrema.
  double coercivity_bound() const;
};

/// Boundary closure for one end: either a flux coupling x2 = c x1 or a
/// Dirichlet condition on x1 (node removed).
struct BoundaryClosure {
  bool dirichlet = false;
  double coupling = 0.0;
};

BoundaryClosure right_closure(double k1);  // xi = 1
BoundaryClosure left_closure(double k2);   // xi = 0

/// Q = (1/sqrt 2) [[1, 1], [-1, 1]].
Matrix q_matrix();

struct WaveModel {
  double k1 = 0.0;
  double k2 = 0.0;
  std::size_t cells = 0;
  double p = 2.0;
  BlockExt blocks;
  Matrix q;
};

/// InvalidBC when |K1| > 1 or |K2| > 1.
WaveModel wave_ext(std::size_t cells, double k1, double k2, double p = 2.0);

struct QDiagonalization {
  Matrix d;          // T A_ext T^T with T applying Q to paired unknowns
  Matrix transform;  // T (orthogonal)
  /// Frobenius norm of the coupling block between the two characteristic
  /// families, restricted to pairs whose stencils avoid boundary rows.
  double interior_offdiag_norm = 0.0;
  /// max |coupling block * v| for v = (sin(pi xi), sin(pi xi)) sampled on
  /// the pairs; vanishes like O(h) on smooth data.
  double smooth_offdiag = 0.0;
  std::size_t interior_pairs = 0;
};

/// Pairs node j with midpoint j + 1/2 and applies Q to each pair. On the
/// staggered grid the two half-steps differ, so the coupling block equals
/// (D_back - D_fwd)/2 = -(h/2) times a second difference instead of vanishing.
QDiagonalization q_diagonalize(const WaveModel& model);

/// Q (0 d; d 0) Q^-1 for a collocated square block d; equals diag(d, -d).
Matrix q_conjugate_collocated(const Matrix& d);

/// S = diag(lambda_j) on the midpoint space, S^-1 = diag(1/lambda_j), with
/// the coercivity report attached. NonPositiveCoefficient on lambda_j <= 0.
Closure multiplication_s(std::span<const double> lambda_at_midpoints, const GridSpace& x2,
                         const Sampler& sampler = {}, const Tolerances& tol = {});

struct HeatModel {
  std::vector<double> lambda_samples;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  std::size_t cells = 0;
  GridSpace space;  // node grid, Dirichlet nodes removed
  Matrix direct;
};

/// Three-point stencil ((lambda_{j+1/2}(u_{j+1} - u_j) - lambda_{j-1/2}(u_j - u_{j-1})) / h^2
/// with the Robin fluxes lambda u'(1) = c1 u(1), lambda u'(0) = c0 u(0) in
/// the half-cell boundary rows. Assembled directly, independent of the wave
/// blocks.
HeatModel heat_direct(std::size_t cells, std::span<const double> lambda_samples, double k1,
                      double k2, double p = 2.0);

struct HeatSpectrum {
  std::vector<double> eigenvalues;  // ascending
  double symmetry_defect = 0.0;     // max |B - B^T| / max |B|, B = W^{1/2} A W^{-1/2}
  bool real = false;                // B symmetric, so the spectrum is real
};

HeatSpectrum heat_spectrum(const HeatModel& model, const Tolerances& tol = {});

}  // namespace semigroup
