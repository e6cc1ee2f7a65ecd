#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robustcov/model.hpp"

namespace robustcov {

enum class Family { Gaussian, StudentT, EllipticalPareto, Rademacher };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

// Sampling recipe for mean-zero data with population covariance exactly
// `sigma`.  Heavy-tailed families are normalized to unit second moment
// before the sigma^{1/2} transform:
//   StudentT         coordinates scaled by sqrt((dof-2)/dof), dof > 4
//   EllipticalPareto radius R ~ Pareto(tail_index) rescaled to make
//                    E ||X||^2 = d, times a uniform sphere direction
struct DistributionSpec {
  Family family = Family::Gaussian;
  Eigen::MatrixXd sigma;
  double dof = 0.0;         // StudentT only
  double tail_index = 0.0;  // EllipticalPareto only, > 2
  std::uint64_t seed = 0;

  int d() const { return static_cast<int>(sigma.rows()); }
  void validate() const;
};

// n rows drawn from the spec; deterministic per seed, distinct streams for
// distinct seeds.
Sample generate(const DistributionSpec& spec, int n);

struct KappaEstimate {
  double value = 0.0;
  bool exact = false;       // closed form vs Monte Carlo
  double std_error = 0.0;   // 0 when exact
};

// Worst-direction L^p/L^2 moment ratio of the (uncontaminated) family.
// Gaussian and StudentT have closed forms; the other families fall back to
// Monte Carlo and are flagged approximate.  Throws MomentDiverges when the
// requested moment does not exist.
KappaEstimate kappa_reference(const DistributionSpec& spec, double p,
                              std::int64_t mc_draws = 200'000);

enum class AdversaryKind { None, Spike, DirectionTargeted, Nearby };

// Row-replacement adversary: replaces exactly floor(eta*n) rows, chosen by
// the adversary's own seeded stream.
//   Spike             rows become magnitude * direction
//   DirectionTargeted rows become magnitude * (top eigenvector of the clean
//                     sample second moment)
//   Nearby            rows get magnitude * direction added
// An unset direction means a seeded random unit vector.
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::None;
  double eta = 0.0;
  double magnitude = 0.0;
  std::optional<Eigen::VectorXd> direction;
  std::uint64_t seed = 0;
};

struct ContaminationResult {
  Sample corrupted;
  std::vector<int> replaced_indices;  // ascending
};

// Applies the adversary; rows not replaced are bit-identical to the input.
ContaminationResult contaminate(const Sample& sample, const AdversarySpec& adv);

// Text round-trip: header "n d seed family", then one row per line with 17
// significant digits.
void save_sample(const Sample& sample, std::uint64_t seed,
                 const std::string& family, std::ostream& out);

struct LoadedSample {
  Sample sample;
  std::uint64_t seed = 0;
  std::string family;
};

LoadedSample load_sample(std::istream& in);

}  // namespace robustcov
