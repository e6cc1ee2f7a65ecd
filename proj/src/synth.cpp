#include "robustcov/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "robustcov/rng.hpp"

namespace robustcov {
namespace {

// Dedicated counter streams so that data, adversary choices and auxiliary
// draws never share random bits even when seeds coincide.
constexpr std::uint64_t kStreamData = 0;
constexpr std::uint64_t kStreamAdversary = 1;
constexpr std::uint64_t kStreamKappa = 2;

// E |N(0,1)|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
double gaussian_abs_moment(double p) {
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) /
         std::sqrt(M_PI);
}

// E |T|^p for a Student-t with `dof` degrees of freedom (p < dof):
//   dof^{p/2} Gamma((p+1)/2) Gamma((dof-p)/2) / (sqrt(pi) Gamma(dof/2)).
double student_abs_moment(double p, double dof) {
  return std::pow(dof, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) *
         std::tgamma(0.5 * (dof - p)) /
         (std::sqrt(M_PI) * std::tgamma(0.5 * dof));
}

Eigen::VectorXd fill_normal(Philox& rng, int d) {
  Eigen::VectorXd z(d);
  for (int j = 0; j < d; ++j) z[j] = rng.normal();
  return z;
}

// Isotropic core draw: mean zero, identity second moment.
Eigen::VectorXd core_draw(const DistributionSpec& spec, Philox& rng) {
  const int d = spec.d();
  switch (spec.family) {
    case Family::Gaussian:
      return fill_normal(rng, d);
    case Family::StudentT: {
      Eigen::VectorXd z = fill_normal(rng, d);
      const double w = rng.chi_square(spec.dof);
      const double unit_scale = std::sqrt((spec.dof - 2.0) / spec.dof);
      return z * (unit_scale / std::sqrt(w / spec.dof));
    }
    case Family::EllipticalPareto: {
      Eigen::VectorXd u = fill_normal(rng, d);
      u.normalize();
      // E R^2 = a/(a-2) for Pareto(a); rescale so E ||X||^2 = d.
      const double a = spec.tail_index;
      const double radius = rng.pareto(a) *
                            std::sqrt(static_cast<double>(d) * (a - 2.0) / a);
      return u * radius;
    }
    case Family::Rademacher: {
      Eigen::VectorXd z(d);
      for (int j = 0; j < d; ++j) z[j] = rng.rademacher();
      return z;
    }
  }
  throw InvalidSpec("unknown distribution family");
}

Eigen::VectorXd seeded_unit_vector(Philox& rng, int d) {
  for (;;) {
    Eigen::VectorXd v = fill_normal(rng, d);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

// First floor(eta*n) entries of a seeded Fisher-Yates shuffle of [0, n).
std::vector<int> choose_rows(Philox& rng, int n, int count) {
  std::vector<int> index(n);
  for (int i = 0; i < n; ++i) index[i] = i;
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % (n - i));
    std::swap(index[i], index[j]);
  }
  std::vector<int> chosen(index.begin(), index.begin() + count);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::Gaussian: return "gaussian";
    case Family::StudentT: return "student_t";
    case Family::EllipticalPareto: return "elliptical_pareto";
    case Family::Rademacher: return "rademacher";
  }
  throw InvalidSpec("unknown distribution family");
}

Family family_from_name(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "student_t") return Family::StudentT;
  if (name == "elliptical_pareto") return Family::EllipticalPareto;
  if (name == "rademacher") return Family::Rademacher;
  throw InvalidSpec("unknown distribution family: " + name);
}

void DistributionSpec::validate() const {
  if (sigma.rows() < 1 || sigma.rows() != sigma.cols()) {
    throw InvalidSpec("sigma must be a nonempty square matrix");
  }
  if (!sigma.allFinite()) throw NonFiniteInput("sigma has non-finite entries");
  if (!is_symmetric(sigma, 1e-10)) {
    throw NotSymmetric("sigma must be symmetric");
  }
  if (family == Family::StudentT && !(dof > 4.0)) {
    throw InvalidSpec("StudentT requires dof > 4");
  }
  if (family == Family::EllipticalPareto && !(tail_index > 2.0)) {
    throw InvalidSpec("EllipticalPareto requires tail_index > 2");
  }
}

Sample generate(const DistributionSpec& spec, int n) {
  spec.validate();
  if (n < 1) throw EmptySample("generate needs n >= 1");
  const Eigen::MatrixXd root = detail::symmetric_sqrt(spec.sigma);
  Philox rng(spec.seed, kStreamData);
  Sample sample;
  sample.data.resize(n, spec.d());
  for (int i = 0; i < n; ++i) {
    sample.data.row(i) = (root * core_draw(spec, rng)).transpose();
  }
  return sample;
}

KappaEstimate kappa_reference(const DistributionSpec& spec, double p,
                              std::int64_t mc_draws) {
  spec.validate();
  if (!(p >= 2.0)) throw InvalidSpec("kappa is defined for p >= 2");

  KappaEstimate est;
  switch (spec.family) {
    case Family::Gaussian:
      est.value = std::pow(gaussian_abs_moment(p), 1.0 / p);
      est.exact = true;
      return est;
    case Family::StudentT: {
      if (p >= spec.dof) {
        throw MomentDiverges("Student-t moment of order p >= dof diverges");
      }
      // Every one-dimensional projection of the elliptical core is a
      // unit-variance t marginal, so the worst direction is any direction.
      const double unit_scale = std::sqrt((spec.dof - 2.0) / spec.dof);
      est.value =
          unit_scale * std::pow(student_abs_moment(p, spec.dof), 1.0 / p);
      est.exact = true;
      return est;
    }
    case Family::EllipticalPareto: {
      if (p >= spec.tail_index) {
        throw MomentDiverges("Pareto radius moment of order p >= tail_index diverges");
      }
      // Elliptical symmetry: all projections of the core share one law, so a
      // single coordinate suffices.  Monte Carlo, flagged approximate.
      Philox rng(spec.seed, kStreamKappa);
      const int d = spec.d();
      const double a = spec.tail_index;
      const double scale = std::sqrt(static_cast<double>(d) * (a - 2.0) / a);
      double sum = 0.0, sum_sq = 0.0;
      for (std::int64_t i = 0; i < mc_draws; ++i) {
        Eigen::VectorXd u = fill_normal(rng, d);
        u.normalize();
        const double z = std::abs(rng.pareto(a) * scale * u[0]);
        const double zp = std::pow(z, p);
        sum += zp;
        sum_sq += zp * zp;
      }
      const double mean = sum / static_cast<double>(mc_draws);
      const double var =
          std::max(0.0, sum_sq / static_cast<double>(mc_draws) - mean * mean);
      est.value = std::pow(mean, 1.0 / p);
      est.exact = false;
      // Delta method for x -> x^{1/p} at the sample mean.
      est.std_error = std::sqrt(var / static_cast<double>(mc_draws)) *
                      std::pow(mean, 1.0 / p - 1.0) / p;
      return est;
    }
    case Family::Rademacher: {
      // Not elliptical: scan coordinate axes, the diagonal and a batch of
      // seeded random directions for the worst moment ratio.
      Philox rng(spec.seed, kStreamKappa);
      const int d = spec.d();
      std::vector<Eigen::VectorXd> directions;
      for (int j = 0; j < d; ++j) {
        directions.push_back(Eigen::VectorXd::Unit(d, j));
      }
      directions.push_back(Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(d)));
      for (int j = 0; j < 64; ++j) {
        directions.push_back(seeded_unit_vector(rng, d));
      }
      const std::int64_t draws_per_dir =
          std::max<std::int64_t>(mc_draws / static_cast<std::int64_t>(directions.size()), 1000);
      double best_mean = 0.0, best_var = 0.0;
      std::int64_t best_draws = 1;
      for (const auto& dir : directions) {
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = 0; i < draws_per_dir; ++i) {
          double dot = 0.0;
          for (int j = 0; j < d; ++j) dot += dir[j] * rng.rademacher();
          const double zp = std::pow(std::abs(dot), p);
          sum += zp;
          sum_sq += zp * zp;
        }
        const double mean = sum / static_cast<double>(draws_per_dir);
        if (mean > best_mean) {
          best_mean = mean;
          best_var = std::max(
              0.0, sum_sq / static_cast<double>(draws_per_dir) - mean * mean);
          best_draws = draws_per_dir;
        }
      }
      est.value = std::pow(best_mean, 1.0 / p);
      est.exact = false;
      est.std_error = std::sqrt(best_var / static_cast<double>(best_draws)) *
                      std::pow(best_mean, 1.0 / p - 1.0) / p;
      return est;
    }
  }
  throw InvalidSpec("unknown distribution family");
}

ContaminationResult contaminate(const Sample& sample, const AdversarySpec& adv) {
  validate_sample(sample);
  if (!(adv.eta >= 0.0 && adv.eta < 1.0)) {
    throw EtaTooLarge("adversary eta must lie in [0, 1)");
  }
  const int n = sample.n();
  const int d = sample.d();
  if (adv.direction && adv.direction->size() != d) {
    throw DimensionMismatch("adversary direction has wrong dimension");
  }

  ContaminationResult result;
  result.corrupted = sample;
  if (adv.kind == AdversaryKind::None) return result;

  const int count = static_cast<int>(std::floor(adv.eta * static_cast<double>(n)));
  if (count == 0) return result;

  Philox rng(adv.seed, kStreamAdversary);
  result.replaced_indices = choose_rows(rng, n, count);

  Eigen::VectorXd direction;
  if (adv.kind == AdversaryKind::DirectionTargeted) {
    // Aim along the clean data's top second-moment eigenvector; canonical
    // sign so the choice is deterministic.
    const Eigen::MatrixXd second_moment =
        sample.data.transpose() * sample.data / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(second_moment);
    direction = eig.eigenvectors().col(d - 1);
    for (int j = 0; j < d; ++j) {
      if (std::abs(direction[j]) > 1e-12) {
        if (direction[j] < 0.0) direction = -direction;
        break;
      }
    }
  } else if (adv.direction) {
    direction = adv.direction->normalized();
  } else {
    direction = seeded_unit_vector(rng, d);
  }

  for (int idx : result.replaced_indices) {
    switch (adv.kind) {
      case AdversaryKind::Spike:
      case AdversaryKind::DirectionTargeted:
        result.corrupted.data.row(idx) = (adv.magnitude * direction).transpose();
        break;
      case AdversaryKind::Nearby:
        result.corrupted.data.row(idx) += (adv.magnitude * direction).transpose();
        break;
      case AdversaryKind::None:
        break;
    }
  }
  return result;
}

void save_sample(const Sample& sample, std::uint64_t seed,
                 const std::string& family, std::ostream& out) {
  validate_sample(sample);
  out << sample.n() << ' ' << sample.d() << ' ' << seed << ' ' << family
      << '\n';
  char buf[32];
  for (int i = 0; i < sample.n(); ++i) {
    for (int j = 0; j < sample.d(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", sample.data(i, j));
      out << buf << (j + 1 == sample.d() ? '\n' : ' ');
    }
  }
}

LoadedSample load_sample(std::istream& in) {
  LoadedSample loaded;
  int n = 0, d = 0;
  if (!(in >> n >> d >> loaded.seed >> loaded.family)) {
    throw InvalidSpec("malformed sample header; expected 'n d seed family'");
  }
  if (n < 1 || d < 1) throw InvalidSpec("sample header has nonpositive shape");
  loaded.sample.data.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!(in >> loaded.sample.data(i, j))) {
        throw InvalidSpec("sample body ended early");
      }
    }
  }
  validate_sample(loaded.sample);
  return loaded;
}

}  // namespace robustcov
