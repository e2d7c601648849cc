#pragma once

namespace semigroup {

/// Numerical thresholds shared by every module. Pass one instance through a
/// computation; the defaults are the documented library defaults.
struct Tolerances {
  double singular_pivot = 1e-13;   // relative to ||A||_inf
  double symmetry = 1e-12;         // relative asymmetry accepted by sym_eig
  double expm_norm_bound = 1e3;    // ||tA||_1 above this raises Overflow
  double zero_threshold = 1e-300;  // |g_i| below this counts as zero in the SIP
  double margin = 1e-10;           // dissipativity margin accepted as <= 0
  double range = 1e-10;            // relative range-condition residual
  double identity = 1e-10;         // scaled residual of algebraic identities
  double closure_inverse = 1e-10;  // ||S S^-1 - I||
  double resolvent = 1e-8;         // resolvent-via-extension diagnostics
  double contraction_slack = 1e-10;  // per-step relative norm growth
  int jacobi_max_sweeps = 100;
  int ascent_steps = 200;
};

}  // namespace semigroup
