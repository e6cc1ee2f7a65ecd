#pragma once

#include "robustcov/solver.hpp"
#include "robustcov/trimmed.hpp"

namespace robustcov {

// Conservative trimming level when the effective rank r is known:
//   floor(eta*n) + ceil(c*eta*n + r + log(32/(3*alpha))).
// Throws KTooLarge when the level reaches n.
int k0_formula(double eta, int n, double c, double r, double alpha);

struct AdaptiveReport {
  int k_star = 0;             // pilot trimming level floor(n/D)
  double pilot_op_norm = 0.0;
  double trace_hat = 0.0;
  double r_hat = 0.0;         // trace_hat / pilot_op_norm
  int k_hat = 0;              // final trimming level actually used
  bool k_hat_clamped = false; // true if the formula exceeded n-1
  CovEstimate final;
};

// Fully data-driven estimator: a heavily trimmed pilot fit supplies an
// effective-rank estimate r_hat, which sizes the final trimming level
//   k_hat = floor(eta*n) + ceil(eta*n + 3*r_hat + log(32/(3*alpha))).
// The level is clamped to n-1 (and flagged) if the formula overshoots.
// D is the pilot trimming divisor: the pilot trims floor(n/D) rows.
AdaptiveReport estimate_adaptive(const Sample& sample, double eta,
                                 double alpha, double p, const SphereNet& net,
                                 const SolverConfig& config = {}, int D = 10);

}  // namespace robustcov
