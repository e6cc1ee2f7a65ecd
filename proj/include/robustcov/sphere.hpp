#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "robustcov/model.hpp"

namespace robustcov {

// A finite set of unit vectors covering the sphere to within
// covering_radius in Euclidean distance.  Quadratic forms evaluated on a
// (1/4)-net determine the operator norm of a symmetric matrix up to a
// factor of 2, which is what the fitting step relies on.
struct SphereNet {
  Eigen::MatrixXd vectors;  // m x d, unit rows
  double covering_radius = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

struct NetConfig {
  std::size_t max_points = 2'000'000;  // reject builds projected past this
  int certification_probes = 100'000;
};

// Greedy farthest-point net over a pool of low-discrepancy plus seeded
// random directions.  The build targets a covering radius slightly inside
// eps and then certifies with random probes; the certification is
// probabilistic, a caveat documented in the README.  Deterministic given
// (d, eps, seed).
SphereNet build_net(int d, double eps, std::uint64_t seed,
                    const NetConfig& config = {});

// Trimmed mean of the squared projections of the sample onto unit vector v.
double directional_estimate(const Sample& sample, const Eigen::VectorXd& v,
                            int k);

// directional_estimate evaluated over every net vector, in net order.
Eigen::VectorXd net_profile(const Sample& sample, const SphereNet& net, int k);

struct CountReport {
  double threshold_B = 0.0;
  int t_target = 0;
  int max_count = 0;             // max over net of #{i : <X_i,v>^2 > B}
  Eigen::VectorXd attaining_vector;
  bool holds = false;            // max_count <= t_target
};

// Worst-direction exceedance count of squared projections over threshold B.
CountReport count_exceedances(const Sample& sample, const SphereNet& net,
                              double B, int t);

struct NormReport {
  bool violated = false;
  int worst_j = 0;  // smallest failing level, 0 if none
};

// Checks, for j = 1..ceil(n/t), that at most j*t rows have
// ||X_i|| >= e^{1/2} (n/(j t))^{1/4} kappa_4 sqrt(trace).  Requires t >= 3.
NormReport norm_exceedances(const Sample& sample, int t, double kappa_4,
                            double trace);

// Max over the net of |(1/n) sum_i min(<X_i,v>^2, B) - E min(<X,v>^2, B)|
// where the expectation is for a centered Gaussian with covariance ref_cov
// (closed form).  A diagnostic lower bound on the sphere-wide supremum.
double truncated_process_on_net(const Sample& sample, const SphereNet& net,
                                double B, const Eigen::MatrixXd& ref_cov);

// Same statistic with a caller-supplied expectation, e.g. a Monte Carlo
// oracle for non-Gaussian generators.
double truncated_process_on_net(
    const Sample& sample, const SphereNet& net, double B,
    const std::function<double(const Eigen::VectorXd&)>&
        truncated_second_moment);

// Text round-trip: header "d m eps seed", then one net vector per line with
// 17 significant digits.
void save_net(const SphereNet& net, std::ostream& out);
SphereNet load_net(std::istream& in);

}  // namespace robustcov
