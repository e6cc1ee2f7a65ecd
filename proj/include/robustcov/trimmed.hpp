#pragma once

#include <span>
#include <vector>

#include "robustcov/model.hpp"

namespace robustcov {

struct TrimmedMeanResult {
  double value = 0.0;
  int k = 0;
  std::vector<int> dropped_indices;  // the k largest, ascending by index
};

// Mean of the n-k smallest values.  Equivalently the infimum, over all
// subsets of size n-k, of the subset average; this identity is what the
// robustness analysis leans on and is exercised by the test suite.
// Ties are broken by (value, original index) so results are deterministic.
TrimmedMeanResult trimmed_mean(std::span<const double> values, int k);

// (1/n) * sum_i min(values[i], b) for a positive cap b.
double truncated_mean(std::span<const double> values, double b);

struct TrimTruncateGap {
  double gap = 0.0;          // |trimmed - truncated|
  double bound = 0.0;        // 2 * b * k / n
  int count_over_b = 0;      // #{i : values[i] > b}
};

// Compares the k-trimmed mean against the b-truncated mean.  Whenever at
// most k values exceed b the two differ by at most 2*b*k/n.
TrimTruncateGap trim_truncate_gap(std::span<const double> values, int k,
                                  double b);

struct TraceEstimate {
  double value = 0.0;
  int k = 0;
};

// Number of squared norms to trim when estimating the trace at confidence
// alpha under contamination eta:  floor(eta*n) + ceil(c*eta*n + log(2/alpha)).
int trace_trim_count(double eta, int n, double alpha, double c = 1.0);

// Trimmed mean of the squared row norms; a contamination-resistant estimate
// of trace(Sigma) for mean-zero data.
TraceEstimate estimate_trace(const Sample& sample, double eta, double alpha,
                             double c = 1.0);

namespace detail {

// Core selection shared by every trimmed statistic: partition the buffer so
// its first n-k entries are the smallest under (value, index) order, sort
// them ascending and sum left to right.  The canonical summation order keeps
// repeated calls bit-identical.
double trimmed_mean_value(std::vector<double>& buffer, int k);

}  // namespace detail
}  // namespace robustcov
