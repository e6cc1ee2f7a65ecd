#include "robustcov/bounds.hpp"

#include <cmath>

namespace robustcov {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidSpec("alpha must lie in (0,1)");
  }
}

void check_weak_q(double q) {
  if (!(q >= 2.0 && q <= 4.0)) {
    throw QOutOfRange("weak-moment bounds require 2 <= q <= 4");
  }
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }
double normal_sf(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }
double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double kl_gaussian(double v_norm, double gamma) {
  if (!(gamma > 0.0)) throw NonpositiveGamma("gamma must be positive");
  if (v_norm < 0.0) throw NegativeInput("v_norm must be nonnegative");
  return v_norm * v_norm / (2.0 * gamma * gamma);
}

double pac_bernstein_bound(const BoundInputs& in) {
  if (in.n < 1) throw EmptySample("n must be >= 1");
  if (!(in.gamma > 0.0)) throw NonpositiveGamma("gamma must be positive");
  check_alpha(in.alpha);
  if (in.sigma_bar < 0.0 || in.A < 0.0 || in.mu_bar < 0.0) {
    throw NegativeInput("mu_bar, sigma_bar and A must be nonnegative");
  }
  const double complexity =
      1.0 / (in.gamma * in.gamma) + 2.0 * std::log(1.0 / in.alpha);
  return static_cast<double>(in.n) * in.mu_bar +
         in.sigma_bar * std::sqrt(static_cast<double>(in.n) * complexity) +
         in.A * complexity / 6.0;
}

double single_point_threshold_bq(int n, int t, double q, double moment_q) {
  if (n < 1 || t < 1 || !(q > 0.0) || !(moment_q > 0.0)) {
    throw InvalidSpec("single-point threshold needs positive n, t, q, moment");
  }
  return std::exp(2.0 / q) *
         std::pow(static_cast<double>(n) * moment_q / static_cast<double>(t),
                  1.0 / q);
}

double threshold_Bp(const BoundInputs& in) {
  in.profile.validate();
  if (in.profile.p < 4.0) {
    throw PTooSmall("truncation threshold requires moment order p >= 4");
  }
  if (in.n < 1 || in.t < 1) throw InvalidSpec("n and t must be >= 1");
  if (!(in.op_norm > 0.0) || !(in.r >= 1.0)) {
    throw InvalidSpec("op_norm must be positive and r >= 1");
  }
  const double kp = in.profile.kappa_p;
  const double k4 = in.profile.require_kappa_4();
  const double nn = static_cast<double>(in.n);
  const double tt = static_cast<double>(in.t);
  const double light = 4.0 * kp * kp * std::pow(2000.0 * nn / tt, 2.0 / in.profile.p);
  const double heavy = 512.0 * k4 * k4 * in.r * std::sqrt(nn) / std::pow(tt, 1.5);
  return in.op_norm * std::max(light, heavy);
}

double norm_moment_bound(double kappa_p, double p, double trace) {
  if (!(kappa_p > 0.0) || !(p >= 2.0) || !(trace >= 0.0)) {
    throw InvalidSpec("norm-moment bound needs kappa_p > 0, p >= 2, trace >= 0");
  }
  return kappa_p * std::sqrt(trace);
}

namespace detail {

double truncated_square_gap(double m, double s, double B) {
  if (s == 0.0) return std::max(m * m - B, 0.0);
  const double sd = std::sqrt(s);
  const double root = std::sqrt(B);
  const double a_hi = (root - m) / sd;   // entry point of the upper tail
  const double a_lo = (root + m) / sd;   // entry point of the lower tail
  // E (N^2 - B)_+ integrated over each tail of Normal(m, s).
  const double gap =
      (m * m + s - B) * (normal_sf(a_hi) + normal_sf(a_lo)) +
      sd * ((root + m) * normal_pdf(a_hi) + (root - m) * normal_pdf(a_lo));
  return std::max(gap, 0.0);
}

}  // namespace detail

TruncationGap gaussian_truncation_gap(double m, double s, double B_prime) {
  if (!(B_prime > 0.0)) throw NonpositiveThreshold("B' must be positive");
  if (s < 0.0) throw NegativeInput("variance s must be nonnegative");
  if (!(m * m <= B_prime / 4.0) || !(s <= B_prime / 4.0)) {
    throw HypothesisViolated(
        "truncation gap bound needs m^2 <= B'/4 and s <= B'/4");
  }
  TruncationGap out;
  out.exact_gap = detail::truncated_square_gap(m, s, B_prime);
  out.lemma_bound =
      s == 0.0 ? 0.0
               : std::exp(-B_prime / (8.0 * s)) * 12.0 * std::pow(s, 1.5) /
                     std::sqrt(B_prime);
  return out;
}

double theorem_main_bound(const BoundInputs& in, double C) {
  in.profile.validate();
  check_alpha(in.alpha);
  if (!(C > 0.0)) throw InvalidSpec("constant C must be positive");
  if (in.n < 1 || !(in.op_norm > 0.0) || !(in.r >= 1.0)) {
    throw InvalidSpec("theorem bound needs n >= 1, op_norm > 0, r >= 1");
  }
  if (!(in.eta >= 0.0 && in.eta < 0.5)) {
    throw EtaTooLarge("eta must lie in [0, 0.5)");
  }
  const double k4 = in.profile.require_kappa_4();
  const double kp = in.profile.kappa_p;
  const double nn = static_cast<double>(in.n);
  const double clean = C * k4 * k4 * in.op_norm *
                       (std::sqrt(in.r / nn) +
                        std::sqrt(std::log(2.0 / in.alpha) / nn));
  // pow(0, 0) = 1, so at p = 2 the contamination term stays eta-independent.
  const double contamination =
      C * kp * kp * in.op_norm * std::pow(in.eta, 1.0 - 2.0 / in.profile.p);
  return clean + contamination;
}

double threshold_Bq_weak(const BoundInputs& in, const WeakBoundInputs& weak,
                         double C0) {
  check_weak_q(weak.q);
  if (!(C0 > 0.0)) throw InvalidSpec("constant C0 must be positive");
  if (in.n < 1 || in.t < 1 || !(in.op_norm > 0.0) || !(in.r >= 1.0) ||
      !(weak.kappa_q > 0.0)) {
    throw InvalidSpec("weak threshold needs n, t >= 1, op_norm > 0, r >= 1, kappa_q > 0");
  }
  const double nn = static_cast<double>(in.n);
  const double tt = static_cast<double>(in.t);
  return C0 * weak.kappa_q * weak.kappa_q * in.op_norm *
         std::pow(nn / tt, 2.0 / weak.q) * (1.0 + in.r / tt);
}

double weak_moment_bound(const BoundInputs& in, const WeakBoundInputs& weak,
                         double C) {
  check_weak_q(weak.q);
  check_alpha(in.alpha);
  if (!(C > 0.0)) throw InvalidSpec("constant C must be positive");
  if (in.n < 1 || !(in.op_norm > 0.0) || !(in.r >= 1.0) ||
      !(weak.kappa_q > 0.0)) {
    throw InvalidSpec("weak bound needs n >= 1, op_norm > 0, r >= 1, kappa_q > 0");
  }
  if (!(in.eta >= 0.0 && in.eta < 0.5)) {
    throw EtaTooLarge("eta must lie in [0, 0.5)");
  }
  const double exponent = 1.0 - 2.0 / weak.q;
  const double scale = C * weak.kappa_q * weak.kappa_q * in.op_norm;
  const double nn = static_cast<double>(in.n);
  const double clean =
      scale * std::pow((in.r + std::log(2.0 / in.alpha)) / nn, exponent);
  const double contamination = scale * std::pow(in.eta, exponent);
  return clean + contamination;
}

}  // namespace robustcov
