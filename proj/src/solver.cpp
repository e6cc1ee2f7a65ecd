#include "robustcov/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace robustcov {
namespace {

// Quadratic forms v_j^T A v_j for all net rows at once.
Eigen::VectorXd quad_forms(const Eigen::MatrixXd& net_vectors,
                           const Eigen::MatrixXd& A) {
  return (net_vectors * A).cwiseProduct(net_vectors).rowwise().sum();
}

// Index of the largest absolute residual, lowest index on ties, so the
// subgradient choice is deterministic.
int active_index(const Eigen::VectorXd& residuals) {
  int best = 0;
  double best_abs = std::abs(residuals[0]);
  for (int j = 1; j < residuals.size(); ++j) {
    const double a = std::abs(residuals[j]);
    if (a > best_abs) {
      best_abs = a;
      best = j;
    }
  }
  return best;
}

// Unconstrained least-squares fit of a symmetric matrix to the targets,
// solved through the d(d+1)/2 free entries.  Gives the subgradient descent a
// starting point that is already correct up to the PSD constraint.
Eigen::MatrixXd least_squares_start(const Eigen::MatrixXd& net_vectors,
                                    const Eigen::VectorXd& targets) {
  const int d = static_cast<int>(net_vectors.cols());
  const int q = d * (d + 1) / 2;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd g(q);
  for (int j = 0; j < net_vectors.rows(); ++j) {
    int idx = 0;
    for (int a = 0; a < d; ++a) {
      g[idx++] = net_vectors(j, a) * net_vectors(j, a);
      for (int b = a + 1; b < d; ++b) {
        g[idx++] = 2.0 * net_vectors(j, a) * net_vectors(j, b);
      }
    }
    gram.selfadjointView<Eigen::Lower>().rankUpdate(g, 1.0);
    rhs += targets[j] * g;
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  // Tiny ridge keeps the solve well posed when the net is rank deficient
  // for the quadratic-form design (cannot happen for a covering net, but
  // costs nothing).
  gram.diagonal().array() += 1e-12 * (gram.trace() / q + 1.0);
  const Eigen::VectorXd coef = gram.ldlt().solve(rhs);
  Eigen::MatrixXd A(d, d);
  int idx = 0;
  for (int a = 0; a < d; ++a) {
    A(a, a) = coef[idx++];
    for (int b = a + 1; b < d; ++b) {
      A(a, b) = A(b, a) = coef[idx++];
    }
  }
  return A;
}

}  // namespace

double fit_objective(const SphereNet& net, const Eigen::VectorXd& targets,
                     const Eigen::MatrixXd& A) {
  if (targets.size() != net.size()) {
    throw SizeMismatch("targets length does not match net size");
  }
  if (A.rows() != net.dim() || A.cols() != net.dim()) {
    throw DimensionMismatch("candidate matrix does not match net dimension");
  }
  return (quad_forms(net.vectors, A) - targets).cwiseAbs().maxCoeff();
}

CovEstimate fit_psd(const SphereNet& net, const Eigen::VectorXd& targets,
                    const SolverConfig& config,
                    const std::optional<Eigen::MatrixXd>& warm_start) {
  if (net.size() < 1) throw InvalidSpec("net is empty");
  if (targets.size() != net.size()) {
    throw SizeMismatch("targets length does not match net size");
  }
  if (!targets.allFinite()) {
    throw NonFiniteInput("targets contain a non-finite value");
  }
  if (targets.size() > 0 && targets.minCoeff() < 0.0) {
    throw NegativeInput("targets must be nonnegative");
  }
  if (config.max_iterations < 1) {
    throw InvalidSpec("max_iterations must be >= 1");
  }
  const int d = net.dim();

  Eigen::MatrixXd A = detail::psd_project(least_squares_start(
      net.vectors, targets));
  if (warm_start) {
    if (warm_start->rows() != d || warm_start->cols() != d) {
      throw DimensionMismatch("warm start has wrong dimensions");
    }
    const Eigen::MatrixXd warm = detail::psd_project(*warm_start);
    if (fit_objective(net, targets, warm) < fit_objective(net, targets, A)) {
      A = warm;
    }
  }

  const double scale = std::max(1.0, targets.cwiseAbs().maxCoeff());
  Eigen::MatrixXd best_matrix = A;
  double best_obj = fit_objective(net, targets, A);
  const double initial_obj = best_obj;

  // Polyak steps need the unknown optimal value; we substitute a moving
  // target best - lambda and halve lambda whenever a 50-iteration window
  // stops improving.  The closing phases behave like restarted Polyak runs
  // with ever tighter targets.
  double lambda = std::max(best_obj / 2.0, 1e-12 * scale);
  const double lambda_floor = 1e-14 * scale;
  double window_best = best_obj;
  int iterations = 0;

  for (int t = 0; t < config.max_iterations; ++t) {
    if (best_obj <= 1e-14 * scale) break;

    const Eigen::VectorXd residuals = quad_forms(net.vectors, A) - targets;
    const int j = active_index(residuals);
    const double value = std::abs(residuals[j]);
    if (value < best_obj) {
      best_obj = value;
      best_matrix = A;
    }

    double step;
    if (config.step_rule == StepRule::Polyak) {
      // ||v v^T||_F = 1 for unit v, so the Polyak step is just the gap.
      step = value - std::max(best_obj - lambda, 0.0);
    } else {
      step = initial_obj / std::sqrt(t + 1.0);
    }

    const Eigen::VectorXd v = net.vectors.row(j).transpose();
    const double sign = residuals[j] >= 0.0 ? 1.0 : -1.0;
    A = detail::psd_project(A - (sign * step) * (v * v.transpose()));
    iterations = t + 1;

    if ((t + 1) % 50 == 0) {
      if (window_best - best_obj < config.tolerance) {
        if (lambda <= lambda_floor) break;
        lambda = std::max(lambda / 4.0, lambda_floor);
      }
      window_best = best_obj;
    }
  }

  CovEstimate out;
  out.matrix = best_matrix;
  out.objective = best_obj;
  out.iterations = iterations;
  out.k_used = 0;
  return out;
}

Eigen::MatrixXd trimmed_second_moment(const Sample& sample, int k) {
  validate_sample(sample);
  const int n = sample.n();
  if (k < 0 || k >= n) {
    throw KTooLarge("trimming level k must satisfy 0 <= k < n");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) norms[i] = sample.data.row(i).squaredNorm();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return norms[a] != norms[b] ? norms[a] < norms[b] : a < b;
  });
  order.resize(n - k);
  std::sort(order.begin(), order.end());

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(sample.d(), sample.d());
  for (int i : order) {
    acc.selfadjointView<Eigen::Lower>().rankUpdate(
        sample.data.row(i).transpose(), 1.0);
  }
  acc = acc.selfadjointView<Eigen::Lower>();
  return acc / static_cast<double>(n - k);
}

CovEstimate estimate_covariance(const Sample& sample, int k,
                                const SphereNet& net,
                                const SolverConfig& config) {
  if (net.dim() != sample.d()) {
    throw DimensionMismatch("net dimension does not match sample dimension");
  }
  const Eigen::VectorXd targets = net_profile(sample, net, k);
  CovEstimate out =
      fit_psd(net, targets, config, trimmed_second_moment(sample, k));
  out.k_used = k;
  return out;
}

}  // namespace robustcov
