#pragma once

#include <Eigen/Dense>
#include <optional>

#include "robustcov/errors.hpp"

namespace robustcov {

// Data matrix with one observation per row.  The estimators in this library
// work on the raw second-moment structure, so no centering is applied.
struct Sample {
  Eigen::MatrixXd data;  // n x d

  int n() const { return static_cast<int>(data.rows()); }
  int d() const { return static_cast<int>(data.cols()); }

  // Validating factory: rejects empty matrices and non-finite entries.
  static Sample checked(Eigen::MatrixXd m);
};

void validate_sample(const Sample& sample);

// Moment hypothesis a caller asserts about the data-generating distribution:
// directional L^p norms are at most kappa_p times the directional L^2 norm.
// kappa_4 is needed by the fourth-moment terms of the error bounds and must
// be supplied whenever p >= 4.
struct MomentProfile {
  double p = 2.0;
  double kappa_p = 1.0;
  std::optional<double> kappa_4;

  void validate() const;
  double require_kappa_4() const;
};

// Fraction of adversarially replaced rows the estimators are asked to
// tolerate.  Half or more replaced rows makes covariance unidentifiable.
struct ContaminationBudget {
  double eta = 0.0;
  void validate() const;
};

enum class TrimOrigin { Fixed, K0Formula, Adaptive };

// A trimming level together with where it came from.
struct TrimSpec {
  int k = 0;
  TrimOrigin origin = TrimOrigin::Fixed;
};

// Output of the fitting routines: a positive semidefinite matrix plus the
// solver diagnostics needed to audit the fit.
struct CovEstimate {
  Eigen::MatrixXd matrix;
  double objective = 0.0;
  int iterations = 0;
  int k_used = 0;
};

// Throws unless `matrix` is symmetric (1e-12 relative) with smallest
// eigenvalue >= -1e-10 * max(op_norm, 1).
void validate_cov_estimate(const CovEstimate& estimate);

struct SpectralSummary {
  double op_norm = 0.0;         // largest eigenvalue
  double trace = 0.0;
  double effective_rank = 0.0;  // trace / op_norm, in [1, d]
};

// Spectral facts of a nonzero symmetric PSD matrix using a dense symmetric
// eigensolver (intended scale d <= 200).
SpectralSummary spectral_summary(const Eigen::MatrixXd& M);

// Operator-norm distance between symmetric matrices: the largest absolute
// eigenvalue of A - B.
double operator_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

bool is_symmetric(const Eigen::MatrixXd& M, double rel_tol = 1e-12);

namespace detail {

// Largest eigenvalue of a symmetric matrix.
double top_eigenvalue(const Eigen::MatrixXd& M);

// Nearest PSD matrix: symmetrize, then clip negative eigenvalues to zero.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& M);

// Symmetric PSD square root via eigendecomposition (handles singular input).
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& M);

}  // namespace detail
}  // namespace robustcov
