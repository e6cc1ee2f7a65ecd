#include "robustcov/adaptive.hpp"

#include <cmath>

namespace robustcov {

int k0_formula(double eta, int n, double c, double r, double alpha) {
  ContaminationBudget{eta}.validate();
  if (n < 1) throw EmptySample("sample size must be >= 1");
  if (!(c > 0.0)) throw InvalidSpec("constant c must be positive");
  if (!(r >= 0.0)) throw NegativeInput("effective rank must be >= 0");
  // Unlike the pipeline, the bare formula admits alpha >= 1: boundary probes
  // such as alpha = 32/(3e) are legitimate ways to pin the log term.
  if (!(alpha > 0.0)) throw InvalidSpec("alpha must be positive");
  const double fixed = std::floor(eta * n);
  const double slack =
      std::ceil(c * eta * n + r + std::log(32.0 / (3.0 * alpha)));
  const double k = fixed + slack;
  if (k >= static_cast<double>(n)) {
    throw KTooLarge("trimming formula reaches the sample size");
  }
  return static_cast<int>(k);
}

AdaptiveReport estimate_adaptive(const Sample& sample, double eta,
                                 double alpha, double p, const SphereNet& net,
                                 const SolverConfig& config, int D) {
  validate_sample(sample);
  ContaminationBudget{eta}.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidSpec("alpha must lie in (0, 1)");
  }
  if (!(p >= 2.0)) throw PTooSmall("moment order p must be >= 2");
  if (D < 2) throw InvalidSpec("pilot divisor D must be >= 2");
  if (net.dim() != sample.d()) {
    throw DimensionMismatch("net dimension does not match sample dimension");
  }
  const int n = sample.n();

  AdaptiveReport report;
  report.k_star = n / D;
  if (report.k_star >= n) {
    throw KTooLarge("pilot trimming level reaches the sample size");
  }

  const CovEstimate pilot =
      estimate_covariance(sample, report.k_star, net, config);
  report.pilot_op_norm = detail::top_eigenvalue(pilot.matrix);
  if (!(report.pilot_op_norm > 0.0)) {
    throw DegeneratePilot(
        "pilot fit has no positive eigenvalue; cannot size the trim level");
  }

  // Half the failure budget goes to the trace estimate, half to the final
  // fit; the trace stage can itself reject n as too small.
  const TraceEstimate trace = estimate_trace(sample, eta, alpha / 2.0);
  report.trace_hat = trace.value;
  report.r_hat = report.trace_hat / report.pilot_op_norm;

  const double formula =
      std::floor(eta * n) +
      std::ceil(eta * n + 3.0 * report.r_hat +
                std::log(32.0 / (3.0 * alpha)));
  if (formula >= static_cast<double>(n)) {
    report.k_hat = n - 1;
    report.k_hat_clamped = true;
  } else {
    report.k_hat = static_cast<int>(formula);
  }

  report.final = estimate_covariance(sample, report.k_hat, net, config);
  return report;
}

}  // namespace robustcov
