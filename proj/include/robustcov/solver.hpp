#pragma once

#include <optional>

#include "robustcov/sphere.hpp"

namespace robustcov {

enum class StepRule { Polyak, FixedDecay };

struct SolverConfig {
  int max_iterations = 5000;
  // Stop once the best objective improves by less than this over a window
  // of 50 iterations.
  double tolerance = 1e-7;
  StepRule step_rule = StepRule::Polyak;
  std::uint64_t seed = 0;
};

// Minimizes  A |-> max_v |<v, A v> - targets_v|  over PSD matrices by
// projected subgradient descent: the subgradient at the active net vector
// (ties broken by lowest index) is +/- v v^T, and iterates are projected
// back onto the PSD cone by eigenvalue clipping.  Failure to converge is
// not an error; the best iterate seen is returned, and it never does worse
// than the warm start (plus tolerance).
CovEstimate fit_psd(const SphereNet& net, const Eigen::VectorXd& targets,
                    const SolverConfig& config = {},
                    const std::optional<Eigen::MatrixXd>& warm_start =
                        std::nullopt);

// Covariance fit at trimming level k: targets are the k-trimmed directional
// second moments over the net, and the warm start is the plug-in second
// moment of the rows surviving norm-trimming at level k.
CovEstimate estimate_covariance(const Sample& sample, int k,
                                const SphereNet& net,
                                const SolverConfig& config = {});

// Average of Y_i Y_i^T over the n-k rows with smallest norms.
Eigen::MatrixXd trimmed_second_moment(const Sample& sample, int k);

// Objective value of a candidate matrix against net targets; the same
// evaluation the solver uses internally.
double fit_objective(const SphereNet& net, const Eigen::VectorXd& targets,
                     const Eigen::MatrixXd& A);

}  // namespace robustcov
