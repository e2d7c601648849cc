#pragma once

// Block operators on X1 x X2 and the closure construction
//
//   A_ext = ( A1     )      A_S x = A1 (x; S A2 x),
//           ( A2   0 )
//
// together with the perturbation P = diag(0, lambda I - S^-1) used to solve
// the resolvent equation of A_S through the extended space.

#include <optional>
#include <utility>

#include "semigroup/dissipativity.hpp"
#include "semigroup/linalg.hpp"
#include "semigroup/sip.hpp"

namespace semigroup {

struct BlockExt {
  Matrix a1;         // X1 x X2 -> X1, stored on the concatenated space
  Matrix a2;         // X1 -> X2
  Matrix assembled;  // (A1 ; A2 0) on X1 x X2
  GridSpace x1;
  GridSpace x2;

  ProductSpace product() const { return {x1, x2}; }
  std::size_t n1() const { return x1.n; }
  std::size_t n2() const { return x2.n; }
};

/// DimensionMismatch unless A1 is n1 x (n1 + n2) and A2 is n2 x n1.
BlockExt assemble_ext(Matrix a1, Matrix a2, const GridSpace& x1, const GridSpace& x2);

struct Closure {
  Matrix s;
  Matrix s_inv;
  CoercivityReport report;
};

/// Inverts S, checks ||S S^-1 - I||_max <= tol.closure_inverse (Singular
/// otherwise) and attaches the coercivity report on X2.
Closure make_closure(Matrix s, const GridSpace& x2, const Sampler& sampler = {},
                     const Tolerances& tol = {});

/// A_S = A1 [I ; S A2] as a single X1 -> X1 matrix.
Matrix build_as(const BlockExt& ext, const Matrix& s);
Matrix build_as(const BlockExt& ext, const Closure& closure);

struct IdentityResidual {
  double absolute = 0.0;
  double scale = 0.0;  // sum of the magnitudes of the three SIP terms

  double relative() const { return scale > 0.0 ? absolute / scale : absolute; }
};

/// | [A_S x, x]_1 - ( [A_ext (x; S A2 x), (x; S A2 x)] - [A2 x, S A2 x]_2 ) |
/// with the product SIP on X1 x X2.
IdentityResidual dissipation_identity_residual(const BlockExt& ext, const Closure& closure,
                                               const DiscreteFunction& x,
                                               const Tolerances& tol = {});

/// diag(0 on X1, lambda I - S^-1 on X2).
Matrix perturbation_p(const Closure& closure, double lambda, std::size_t x1_dim);

struct ResolventQuery {
  double lambda = 0.0;
  DiscreteFunction g;
};

enum class ResolventMode {
  Certified,    // lambda must lie in the coercivity window
  Exploratory,  // any lambda; singular extensions are reported as errors
};

struct ResolventDiagnostics {
  double closure_residual = 0.0;  // ||x2 - S A2 x1||_2
  double x2_norm = 0.0;
  double resolvent_residual = 0.0;  // ||(lambda - A_S) x1 - g||_2 / ||g||_2
  double direct_agreement = 0.0;    // ||x1 - x_direct||_2 / ||x_direct||_2
  bool in_window = false;

  bool passes(double tol) const {
    return closure_residual <= tol * std::max(x2_norm, 1.0) && resolvent_residual <= tol &&
           direct_agreement <= tol;
  }
};

struct ResolventResult {
  Vector x1;
  Vector x2;
  ResolventDiagnostics diagnostics;
};

/// Solves (lambda I - A_ext - P)(x1; x2) = (g; 0). The second row forces
/// x2 = S A2 x1 and the first becomes (lambda I - A_S) x1 = g; both are
/// checked, and x1 is compared with a direct solve of lambda I - A_S.
/// SingularExtension when the extended matrix is singular; OutsideWindow in
/// certified mode for lambda outside (0, m2 / ||S||^2].
ResolventResult resolvent_via_extension(const BlockExt& ext, const Closure& closure,
                                        const ResolventQuery& query,
                                        ResolventMode mode = ResolventMode::Exploratory,
                                        const Tolerances& tol = {});

struct SquareGroup {
  Matrix cal_a;     // (0 A12 ; S A21 0)
  Matrix cal_a_sq;  // literal product cal_a * cal_a
  Matrix ul_block;  // A12 S A21
  bool off_diagonal_zero = false;
  double ul_mismatch = 0.0;  // ul_block vs upper-left block of cal_a_sq
};

/// A12: X2 -> X1, A21: X1 -> X2, S on X2.
SquareGroup square_group_op(const Matrix& a12, const Matrix& a21, const Matrix& s);

/// (A12, A21) when A1 ignores its X1 argument, i.e. A_ext = (0 A12 ; A21 0).
std::optional<std::pair<Matrix, Matrix>> split_special_form(const BlockExt& ext);

/// A_ext = (0 0 ; 1 0) on R x R: A_S = 0 for S = I although A_ext is not
/// dissipative.
BlockExt counterexample_ext();

}  // namespace semigroup
