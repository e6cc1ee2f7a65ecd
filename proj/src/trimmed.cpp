#include "robustcov/trimmed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robustcov {
namespace {

void check_values(std::span<const double> values, int k) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw EmptySample("trimmed statistics need at least one value");
  if (k < 0 || k >= n) {
    throw KTooLarge("trimming level k must satisfy 0 <= k < n");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteInput("values must be finite");
    if (v < 0.0) throw NegativeInput("values must be nonnegative");
  }
}

}  // namespace

namespace detail {

double trimmed_mean_value(std::vector<double>& buffer, int k) {
  const int n = static_cast<int>(buffer.size());
  const int keep = n - k;
  if (k > 0) {
    std::nth_element(buffer.begin(), buffer.begin() + (keep - 1), buffer.end());
  }
  std::sort(buffer.begin(), buffer.begin() + keep);
  double sum = 0.0;
  for (int i = 0; i < keep; ++i) sum += buffer[i];
  return sum / keep;
}

}  // namespace detail

TrimmedMeanResult trimmed_mean(std::span<const double> values, int k) {
  check_values(values, k);
  const int n = static_cast<int>(values.size());
  const int keep = n - k;

  // Order by (value, original index): deterministic even with tied values.
  std::vector<std::pair<double, int>> order(n);
  for (int i = 0; i < n; ++i) order[i] = {values[i], i};
  std::nth_element(order.begin(), order.begin() + (keep - 1), order.end());
  std::sort(order.begin(), order.begin() + keep);

  TrimmedMeanResult result;
  result.k = k;
  double sum = 0.0;
  for (int i = 0; i < keep; ++i) sum += order[i].first;
  result.value = sum / keep;
  result.dropped_indices.reserve(k);
  for (int i = keep; i < n; ++i) result.dropped_indices.push_back(order[i].second);
  std::sort(result.dropped_indices.begin(), result.dropped_indices.end());
  return result;
}

double truncated_mean(std::span<const double> values, double b) {
  if (values.empty()) throw EmptySample("truncated mean needs at least one value");
  if (!(b > 0.0)) throw NonpositiveThreshold("truncation level b must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteInput("values must be finite");
    if (v < 0.0) throw NegativeInput("values must be nonnegative");
  }
  double sum = 0.0;
  for (double v : values) sum += std::min(v, b);
  return sum / static_cast<double>(values.size());
}

TrimTruncateGap trim_truncate_gap(std::span<const double> values, int k,
                                  double b) {
  check_values(values, k);
  if (!(b > 0.0)) throw NonpositiveThreshold("truncation level b must be positive");
  const int n = static_cast<int>(values.size());

  TrimTruncateGap out;
  out.gap = std::abs(trimmed_mean(values, k).value - truncated_mean(values, b));
  out.bound = 2.0 * b * static_cast<double>(k) / static_cast<double>(n);
  out.count_over_b =
      static_cast<int>(std::count_if(values.begin(), values.end(),
                                     [b](double v) { return v > b; }));
  return out;
}

int trace_trim_count(double eta, int n, double alpha, double c) {
  if (n < 1) throw EmptySample("trace estimate needs at least one row");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alpha must lie in (0,1)");
  if (!(eta >= 0.0 && eta < 0.5)) throw EtaTooLarge("eta must lie in [0, 0.5)");
  if (!(c > 0.0)) throw InvalidSpec("slack multiplier c must be positive");
  const double en = eta * static_cast<double>(n);
  const int k = static_cast<int>(std::floor(en)) +
                static_cast<int>(std::ceil(c * en + std::log(2.0 / alpha)));
  if (k >= n) {
    throw KTooLarge("trimming level from the trace formula reaches n; "
                    "increase n or relax alpha/eta");
  }
  return k;
}

TraceEstimate estimate_trace(const Sample& sample, double eta, double alpha,
                             double c) {
  validate_sample(sample);
  const int n = sample.n();
  TraceEstimate est;
  est.k = trace_trim_count(eta, n, alpha, c);
  std::vector<double> squared_norms(n);
  for (int i = 0; i < n; ++i) squared_norms[i] = sample.data.row(i).squaredNorm();
  est.value = detail::trimmed_mean_value(squared_norms, est.k);
  return est;
}

}  // namespace robustcov
