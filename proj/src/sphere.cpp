#include "robustcov/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <vector>

#include "robustcov/bounds.hpp"
#include "robustcov/rng.hpp"
#include "robustcov/trimmed.hpp"

namespace robustcov {
namespace {

constexpr std::uint64_t kStreamPool = 4;
constexpr std::uint64_t kStreamProbes = 5;

// The build adopts any probe farther than kBuildMargin * eps from the net
// and accepts once a whole probe round stays within kCertifyMargin * eps.
// The remaining slack up to the advertised radius eps covers whatever the
// random probes missed.
constexpr double kBuildMargin = 0.9;
constexpr double kCertifyMargin = 0.96;

// Fraction of the sphere's surface inside a cap of angular radius theta.
double cap_fraction(int d, double theta) {
  if (d == 2) return theta / M_PI;
  const auto integrand = [d](double t) {
    return std::pow(std::sin(t), static_cast<double>(d - 2));
  };
  const auto simpson = [&](double hi) {
    const int steps = 4096;
    const double h = hi / steps;
    double acc = integrand(0.0) + integrand(hi);
    for (int i = 1; i < steps; ++i) {
      acc += integrand(i * h) * ((i % 2) ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
  };
  return simpson(theta) / simpson(M_PI);
}

// Additive low-discrepancy sequence in [0,1)^k based on the generalized
// golden ratio (the positive root of x^{k+1} = x + 1).
class AdditiveSequence {
 public:
  explicit AdditiveSequence(int k) : alpha_(k), state_(k, 0.5) {
    double phi = 1.5;
    for (int it = 0; it < 64; ++it) {
      phi = std::pow(1.0 + phi, 1.0 / (k + 1));
    }
    double a = 1.0 / phi;
    for (int j = 0; j < k; ++j) {
      alpha_[j] = a;
      a /= phi;
    }
  }

  void next(std::vector<double>& out) {
    for (size_t j = 0; j < alpha_.size(); ++j) {
      state_[j] += alpha_[j];
      if (state_[j] >= 1.0) state_[j] -= 1.0;
      out[j] = state_[j];
    }
  }

 private:
  std::vector<double> alpha_;
  std::vector<double> state_;
};

// Direction from a low-discrepancy point: Box-Muller each pair of
// coordinates, then normalize.
Eigen::VectorXd direction_from_uniforms(const std::vector<double>& u, int d) {
  Eigen::VectorXd z(d);
  for (int j = 0; j < d; j += 2) {
    const double u1 = std::max(u[j], 0x1.0p-53);
    const double u2 = u[j + 1];
    const double radius = std::sqrt(-2.0 * std::log(u1));
    z[j] = radius * std::cos(2.0 * M_PI * u2);
    if (j + 1 < d) z[j + 1] = radius * std::sin(2.0 * M_PI * u2);
  }
  const double norm = z.norm();
  return norm > 1e-12 ? Eigen::VectorXd(z / norm)
                      : Eigen::VectorXd(Eigen::VectorXd::Unit(d, 0));
}

Eigen::MatrixXd build_pool(int d, std::uint64_t seed, int pool_size) {
  Eigen::MatrixXd pool(pool_size, d);
  const int low_disc = pool_size / 2;
  AdditiveSequence seq(d + (d % 2));
  std::vector<double> u(d + (d % 2));
  for (int i = 0; i < low_disc; ++i) {
    seq.next(u);
    pool.row(i) = direction_from_uniforms(u, d).transpose();
  }
  Philox rng(seed, kStreamPool);
  for (int i = low_disc; i < pool_size; ++i) {
    Eigen::VectorXd z(d);
    for (;;) {
      for (int j = 0; j < d; ++j) z[j] = rng.normal();
      const double norm = z.norm();
      if (norm > 1e-12) {
        pool.row(i) = (z / norm).transpose();
        break;
      }
    }
  }
  return pool;
}

// One round of random probes against the net.  Probes farther than
// `radius` from the net are appended to `extra` (and count against later
// probes in the same round), so repeated rounds converge to a certified
// cover.  Returns the worst distance seen, measuring each probe against the
// net as it stood when the probe was tested.
double probe_round(const Eigen::MatrixXd& net, std::uint64_t seed,
                   int probes, double radius,
                   std::vector<Eigen::VectorXd>* extra) {
  const int d = static_cast<int>(net.cols());
  Philox rng(seed, kStreamProbes);
  constexpr int kBlock = 512;
  Eigen::MatrixXd block(d, kBlock);
  const double radius_dot = 1.0 - 0.5 * radius * radius;
  double worst_dot = 1.0;
  int done = 0;
  while (done < probes) {
    const int count = std::min(kBlock, probes - done);
    for (int i = 0; i < count; ++i) {
      Eigen::VectorXd z(d);
      for (;;) {
        for (int j = 0; j < d; ++j) z[j] = rng.normal();
        const double norm = z.norm();
        if (norm > 1e-12) {
          block.col(i) = z / norm;
          break;
        }
      }
    }
    const Eigen::MatrixXd dots = net * block.leftCols(count);
    for (int i = 0; i < count; ++i) {
      double best = dots.col(i).maxCoeff();
      if (extra) {
        for (const auto& v : *extra) {
          best = std::max(best, v.dot(block.col(i)));
        }
        if (best < radius_dot) extra->push_back(block.col(i));
      }
      worst_dot = std::min(worst_dot, best);
    }
    done += count;
  }
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * worst_dot));
}

double exact_circle_radius(const Eigen::MatrixXd& net) {
  std::vector<double> angles(net.rows());
  for (int i = 0; i < net.rows(); ++i) {
    angles[i] = std::atan2(net(i, 1), net(i, 0));
  }
  std::sort(angles.begin(), angles.end());
  double max_gap = 2.0 * M_PI + angles.front() - angles.back();
  for (size_t i = 1; i < angles.size(); ++i) {
    max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  }
  return 2.0 * std::sin(max_gap / 4.0);
}

void check_net_sample(const Sample& sample, const SphereNet& net) {
  validate_sample(sample);
  if (net.dim() != sample.d()) {
    throw DimensionMismatch("net dimension does not match sample dimension");
  }
}

double directional_value(const Sample& sample, const Eigen::VectorXd& v, int k,
                         std::vector<double>& buffer) {
  const Eigen::VectorXd proj = sample.data * v;
  buffer.resize(proj.size());
  for (int i = 0; i < proj.size(); ++i) buffer[i] = proj[i] * proj[i];
  return detail::trimmed_mean_value(buffer, k);
}

}  // namespace

SphereNet build_net(int d, double eps, std::uint64_t seed,
                    const NetConfig& config) {
  if (d < 1) throw InvalidSpec("net dimension must be >= 1");
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw InvalidSpec("net resolution eps must lie in (0, 0.5]");
  }

  SphereNet net;
  net.eps = eps;
  net.seed = seed;

  if (d == 1) {
    net.vectors.resize(2, 1);
    net.vectors << 1.0, -1.0;
    net.covering_radius = 0.0;
    return net;
  }
  if (d == 2) {
    // Exact on the circle: uniform points with adjacent spacing at most
    // 2 asin(eps/2), independent of the seed.
    const int m = static_cast<int>(std::ceil(M_PI / std::asin(eps / 2.0)));
    net.vectors.resize(m, 2);
    for (int i = 0; i < m; ++i) {
      const double angle = 2.0 * M_PI * i / m;
      net.vectors(i, 0) = std::cos(angle);
      net.vectors(i, 1) = std::sin(angle);
    }
    net.covering_radius = exact_circle_radius(net.vectors);
    return net;
  }

  const double theta = 2.0 * std::asin(eps / 2.0);
  const double projected = 4.0 / cap_fraction(d, theta);
  if (projected > static_cast<double>(config.max_points)) {
    throw DimensionTooLarge(
        "projected net size exceeds the configured cap; reduce d or raise eps");
  }

  const int pool_size = static_cast<int>(std::clamp(
      projected * 48.0, 20000.0, 3'000'000.0));
  const Eigen::MatrixXd pool = build_pool(d, seed, pool_size);

  // Greedy farthest-point selection, tracking for every pool candidate its
  // best dot product against the selected set (distance and dot are
  // monotonically related on the sphere).
  const double stop_dot = 1.0 - 0.5 * (kBuildMargin * eps) * (kBuildMargin * eps);
  std::vector<int> selected;
  selected.push_back(0);
  Eigen::VectorXd best_dot = pool * pool.row(0).transpose();
  for (;;) {
    int next = 0;
    double lowest = 2.0;
    for (int i = 0; i < pool_size; ++i) {
      if (best_dot[i] < lowest) {
        lowest = best_dot[i];
        next = i;
      }
    }
    if (lowest >= stop_dot) break;
    selected.push_back(next);
    if (selected.size() > config.max_points) {
      throw DimensionTooLarge("net construction exceeded the configured cap");
    }
    best_dot = best_dot.cwiseMax(pool * pool.row(next).transpose());
  }

  net.vectors.resize(static_cast<int>(selected.size()), d);
  for (size_t i = 0; i < selected.size(); ++i) {
    net.vectors.row(static_cast<int>(i)) = pool.row(selected[i]);
  }

  // Repair: keep throwing probe rounds at the net, adopting every probe
  // that lands outside the inner radius, until a round's worst distance
  // stays inside the certification radius.
  const double inner = kBuildMargin * eps;
  for (int round = 0;; ++round) {
    if (round == 64) {
      throw InvalidSpec("net certification failed to converge");
    }
    std::vector<Eigen::VectorXd> extra;
    const double worst = probe_round(
        net.vectors, seed + round, config.certification_probes, inner, &extra);
    if (!extra.empty()) {
      const int old_m = static_cast<int>(net.vectors.rows());
      if (old_m + extra.size() > config.max_points) {
        throw DimensionTooLarge("net construction exceeded the configured cap");
      }
      net.vectors.conservativeResize(old_m + static_cast<int>(extra.size()),
                                     d);
      for (size_t i = 0; i < extra.size(); ++i) {
        net.vectors.row(old_m + static_cast<int>(i)) = extra[i].transpose();
      }
    }
    if (worst <= kCertifyMargin * eps) break;
  }

  net.covering_radius = eps;
  return net;
}

double directional_estimate(const Sample& sample, const Eigen::VectorXd& v,
                            int k) {
  validate_sample(sample);
  if (v.size() != sample.d()) {
    throw DimensionMismatch("direction dimension does not match sample");
  }
  if (std::abs(v.norm() - 1.0) > 1e-10) {
    throw NotUnitVector("direction must have unit norm (1e-10 tolerance)");
  }
  if (k < 0 || k >= sample.n()) {
    throw KTooLarge("trimming level k must satisfy 0 <= k < n");
  }
  std::vector<double> buffer;
  return directional_value(sample, v, k, buffer);
}

Eigen::VectorXd net_profile(const Sample& sample, const SphereNet& net,
                            int k) {
  check_net_sample(sample, net);
  if (k < 0 || k >= sample.n()) {
    throw KTooLarge("trimming level k must satisfy 0 <= k < n");
  }
  Eigen::VectorXd profile(net.size());
  std::vector<double> buffer;
  for (int j = 0; j < net.size(); ++j) {
    profile[j] =
        directional_value(sample, net.vectors.row(j).transpose(), k, buffer);
  }
  return profile;
}

CountReport count_exceedances(const Sample& sample, const SphereNet& net,
                              double B, int t) {
  check_net_sample(sample, net);
  if (!(B > 0.0)) throw NonpositiveThreshold("threshold B must be positive");
  if (t < 1) throw InvalidSpec("count target t must be >= 1");

  CountReport report;
  report.threshold_B = B;
  report.t_target = t;
  report.max_count = -1;
  for (int j = 0; j < net.size(); ++j) {
    const Eigen::VectorXd proj =
        sample.data * net.vectors.row(j).transpose();
    int count = 0;
    for (int i = 0; i < proj.size(); ++i) {
      if (proj[i] * proj[i] > B) ++count;
    }
    if (count > report.max_count) {
      report.max_count = count;
      report.attaining_vector = net.vectors.row(j).transpose();
    }
  }
  report.holds = report.max_count <= t;
  return report;
}

NormReport norm_exceedances(const Sample& sample, int t, double kappa_4,
                            double trace) {
  validate_sample(sample);
  if (t < 3) throw TTooSmall("norm exceedance check requires t >= 3");
  if (!(kappa_4 > 0.0) || !(trace > 0.0)) {
    throw InvalidSpec("kappa_4 and trace must be positive");
  }
  const int n = sample.n();
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) norms[i] = sample.data.row(i).norm();
  std::sort(norms.begin(), norms.end(), std::greater<>());

  NormReport report;
  const double base = std::exp(0.5) * kappa_4 * std::sqrt(trace);
  const int levels = (n + t - 1) / t;
  for (int j = 1; j <= levels; ++j) {
    const double threshold =
        base * std::pow(static_cast<double>(n) / (static_cast<double>(j) * t),
                        0.25);
    // norms is descending: count of entries >= threshold.
    const auto it = std::lower_bound(norms.begin(), norms.end(), threshold,
                                     [](double a, double b) { return a >= b; });
    const int count = static_cast<int>(it - norms.begin());
    if (count > j * t) {
      report.violated = true;
      report.worst_j = j;
      return report;
    }
  }
  return report;
}

double truncated_process_on_net(
    const Sample& sample, const SphereNet& net, double B,
    const std::function<double(const Eigen::VectorXd&)>&
        truncated_second_moment) {
  check_net_sample(sample, net);
  if (!(B > 0.0)) throw NonpositiveThreshold("threshold B must be positive");
  const double n = static_cast<double>(sample.n());
  double worst = 0.0;
  for (int j = 0; j < net.size(); ++j) {
    const Eigen::VectorXd v = net.vectors.row(j).transpose();
    const Eigen::VectorXd proj = sample.data * v;
    double acc = 0.0;
    for (int i = 0; i < proj.size(); ++i) {
      acc += std::min(proj[i] * proj[i], B);
    }
    worst = std::max(worst, std::abs(acc / n - truncated_second_moment(v)));
  }
  return worst;
}

double truncated_process_on_net(const Sample& sample, const SphereNet& net,
                                double B, const Eigen::MatrixXd& ref_cov) {
  if (ref_cov.rows() != sample.d() || ref_cov.cols() != sample.d()) {
    throw DimensionMismatch("reference covariance has wrong dimensions");
  }
  return truncated_process_on_net(
      sample, net, B, [&](const Eigen::VectorXd& v) {
        const double variance = v.dot(ref_cov * v);
        return variance - detail::truncated_square_gap(0.0, variance, B);
      });
}

void save_net(const SphereNet& net, std::ostream& out) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", net.eps);
  out << net.dim() << ' ' << net.size() << ' ' << buf << ' ' << net.seed
      << '\n';
  for (int i = 0; i < net.size(); ++i) {
    for (int j = 0; j < net.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", net.vectors(i, j));
      out << buf << (j + 1 == net.dim() ? '\n' : ' ');
    }
  }
}

SphereNet load_net(std::istream& in) {
  SphereNet net;
  int d = 0, m = 0;
  if (!(in >> d >> m >> net.eps >> net.seed)) {
    throw InvalidSpec("malformed net header; expected 'd m eps seed'");
  }
  if (d < 1 || m < 1) throw InvalidSpec("net header has nonpositive shape");
  net.vectors.resize(m, d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!(in >> net.vectors(i, j))) throw InvalidSpec("net body ended early");
    }
  }
  for (int i = 0; i < m; ++i) {
    if (std::abs(net.vectors.row(i).norm() - 1.0) > 1e-12) {
      throw NotUnitVector("net file contains a non-unit row");
    }
  }
  net.covering_radius = d == 1 ? 0.0
                     : d == 2 ? exact_circle_radius(net.vectors)
                              : net.eps;
  return net;
}

}  // namespace robustcov
