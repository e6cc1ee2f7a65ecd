#include "robustcov/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace robustcov {

Sample Sample::checked(Eigen::MatrixXd m) {
  Sample sample{std::move(m)};
  validate_sample(sample);
  return sample;
}

void validate_sample(const Sample& sample) {
  if (sample.data.rows() < 1) {
    throw EmptySample("sample must contain at least one row");
  }
  if (sample.data.cols() < 1) {
    throw InvalidSpec("sample must have at least one column");
  }
  if (!sample.data.allFinite()) {
    throw NonFiniteInput("sample contains non-finite entries");
  }
}

void MomentProfile::validate() const {
  if (!(p >= 2.0)) throw InvalidSpec("moment order p must be >= 2");
  if (!(kappa_p > 0.0)) throw InvalidSpec("kappa_p must be positive");
  if (p >= 4.0 && !kappa_4.has_value()) {
    throw InvalidSpec("kappa_4 is required when p >= 4");
  }
}

double MomentProfile::require_kappa_4() const {
  if (!kappa_4.has_value()) {
    throw InvalidSpec("operation requires kappa_4 in the moment profile");
  }
  return *kappa_4;
}

void ContaminationBudget::validate() const {
  if (!(eta >= 0.0 && eta < 0.5)) {
    throw EtaTooLarge("contamination fraction must lie in [0, 0.5)");
  }
}

bool is_symmetric(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void validate_cov_estimate(const CovEstimate& estimate) {
  const auto& M = estimate.matrix;
  if (!is_symmetric(M)) {
    throw NotSymmetric("estimate matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo < -1e-10 * std::max(hi, 1.0)) {
    throw NegativeInput("estimate matrix has a significantly negative eigenvalue");
  }
}

SpectralSummary spectral_summary(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw DimensionMismatch("spectral summary needs a square matrix");
  }
  if (!is_symmetric(M)) {
    throw NotSymmetric("spectral summary needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  const double op_norm = eig.eigenvalues().maxCoeff();
  if (op_norm <= 0.0) {
    throw ZeroMatrix("effective rank undefined for the zero matrix");
  }
  SpectralSummary summary;
  summary.op_norm = op_norm;
  summary.trace = M.trace();
  summary.effective_rank = summary.trace / op_norm;
  return summary;
}

double operator_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols()) {
    throw DimensionMismatch("operator distance needs square matrices of equal size");
  }
  Eigen::MatrixXd diff = A - B;
  diff = 0.5 * (diff + diff.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diff,
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

namespace detail {

double top_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (M + M.transpose()));
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * lambda.asDiagonal() *
                        eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (M + M.transpose()));
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lambda.asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace detail
}  // namespace robustcov
