#pragma once

#include "robustcov/model.hpp"

namespace robustcov {

// Shared parameter bag for the closed-form bound evaluators.  Each evaluator
// reads only the fields it documents; unrelated fields may be left at their
// defaults.  Existential constants from the analysis are never baked in --
// callers pass C / C0 explicitly.
struct BoundInputs {
  int n = 1;
  int d = 1;
  int t = 1;
  double alpha = 0.05;
  double gamma = 1.0;      // smoothing width of the Gaussian perturbation
  double op_norm = 1.0;    // ||Sigma||
  double trace = 1.0;      // tr(Sigma)
  double r = 1.0;          // effective rank tr(Sigma)/||Sigma||
  MomentProfile profile;
  double eta = 0.0;
  double A = 1.0;          // a.s. upper bound on the centered summands
  double mu_bar = 0.0;     // sup_v of the smoothed means
  double sigma_bar = 0.0;  // sup_v of the smoothed standard deviations
};

// Weak-moment variant parameters (2 <= q <= 4).
struct WeakBoundInputs {
  double q = 4.0;
  double kappa_q = 1.0;
  double nu_q = 0.0;      // optional q-th norm-moment proxy
  double B_prime = 0.0;   // optional truncation level
};

// KL divergence between two isotropic Gaussians of common width gamma whose
// means differ by v_norm:  v_norm^2 / (2 gamma^2).
double kl_gaussian(double v_norm, double gamma);

// PAC-Bayes Bernstein deviation bound for smoothed indicator sums:
//   n*mu_bar + sigma_bar*sqrt(n*(gamma^-2 + 2 log(1/alpha)))
//     + A*(gamma^-2 + 2 log(1/alpha))/6.
// Uses fields n, gamma, alpha, A, mu_bar, sigma_bar.
double pac_bernstein_bound(const BoundInputs& in);

// Threshold above which, with probability >= 1 - e^-t, at most t of n draws
// of a nonnegative variable Z with E Z^q = moment_q land:
//   e^{2/q} * (n * moment_q / t)^{1/q}.
double single_point_threshold_bq(int n, int t, double q, double moment_q);

// Truncation level for squared projections under an L^p hypothesis with
// p >= 4 (PTooSmall otherwise):
//   ||Sigma|| * max( 4 kappa_p^2 (2000 n / t)^{2/p},
//                    512 kappa_4^2 r sqrt(n) / t^{3/2} ).
// Uses fields n, t, op_norm, r, profile.
double threshold_Bp(const BoundInputs& in);

// Minkowski bound on the p-th norm moment: kappa_p * sqrt(trace).
double norm_moment_bound(double kappa_p, double p, double trace);

struct TruncationGap {
  double exact_gap = 0.0;    // E N^2 - E min(N^2, B')
  double lemma_bound = 0.0;  // exp(-B'/(8 s)) * 12 s^{3/2} / sqrt(B')
};

// For N ~ Normal(m, s): the exact truncation gap together with its
// closed-form upper bound.  Requires m^2 <= B'/4 and s <= B'/4
// (HypothesisViolated otherwise).
TruncationGap gaussian_truncation_gap(double m, double s, double B_prime);

// Deviation bound for the trimmed estimator with caller-supplied constant C:
//   C kappa_4^2 ||Sigma|| (sqrt(r/n) + sqrt(log(2/alpha)/n))
//     + C kappa_p^2 ||Sigma|| eta^{1 - 2/p}.
// Uses fields n, alpha, eta, op_norm, r, profile (requires kappa_4).
double theorem_main_bound(const BoundInputs& in, double C);

// Weak-moment truncation level, 2 <= q <= 4 (QOutOfRange otherwise):
//   C0 kappa_q^2 ||Sigma|| (n/t)^{2/q} (1 + r/t).
double threshold_Bq_weak(const BoundInputs& in, const WeakBoundInputs& weak,
                         double C0);

// Weak-moment deviation bound, 2 <= q <= 4:
//   C kappa_q^2 ||Sigma|| ((r + log(2/alpha))/n)^{1-2/q}
//     + C kappa_q^2 ||Sigma|| eta^{1-2/q}.
double weak_moment_bound(const BoundInputs& in, const WeakBoundInputs& weak,
                         double C);

// Standard normal helpers built on erfc (relative accuracy ~1e-15).
double normal_cdf(double x);
double normal_sf(double x);
double normal_pdf(double x);

namespace detail {

// E (N^2 - B)_+ for N ~ Normal(m, s), valid for any s >= 0, B > 0; no
// hypothesis check.  Shared by gaussian_truncation_gap and the truncated
// empirical-process diagnostics.
double truncated_square_gap(double m, double s, double B);

}  // namespace detail
}  // namespace robustcov
