#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "robustcov/bounds.hpp"
#include "robustcov/synth.hpp"

namespace rc = robustcov;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (fs::temp_directory_path() / "robustcov_cli_XXXXXX").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    REQUIRE(mkdtemp(buf.data()) != nullptr);
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
  const fs::path out = dir.file("run_stdout.txt");
  const fs::path err = dir.file("run_stderr.txt");
  const std::string cmd = std::string(CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

fs::path write_gaussian_sample(const TempDir& dir, const std::string& name,
                               int n, std::uint64_t seed) {
  rc::DistributionSpec spec;
  spec.sigma = Eigen::MatrixXd::Identity(2, 2);
  spec.seed = seed;
  const rc::Sample sample = rc::generate(spec, n);
  const fs::path path = dir.file(name);
  std::ofstream out(path);
  rc::save_sample(sample, seed, "gaussian", out);
  return path;
}

}  // namespace

TEST_CASE("estimate happy path emits a reproducible JSON report") {
  TempDir dir;
  const fs::path sample = write_gaussian_sample(dir, "sample.txt", 400, 5);
  const fs::path config = dir.file("config.json");
  spit(config, "{\"sample_file\": \"" + sample.string() +
                   "\", \"eta\": 0.0, \"alpha\": 0.1, \"net_seed\": 1, "
                   "\"seed\": 7}");

  const fs::path report_path = dir.file("report.json");
  const RunResult run = run_cli(
      dir, "estimate --config " + config.string() + " --out " +
               report_path.string());
  REQUIRE(run.exit_code == 0);

  const nlohmann::json report = nlohmann::json::parse(slurp(report_path));
  CHECK(report.at("d").get<int>() == 2);
  CHECK(report.at("k_star").get<int>() == 40);
  CHECK(report.at("k_hat").get<int>() >= 1);
  CHECK_FALSE(report.at("k_hat_clamped").get<bool>());
  CHECK(report.at("seed").get<std::uint64_t>() == 7);
  CHECK(report.at("rng").get<std::string>() == "philox4x32-10");
  CHECK(report.at("config_hash").get<std::string>().size() == 16);
  CHECK(report.at("objective").get<double>() >= 0.0);

  const auto flat = report.at("matrix").get<std::vector<double>>();
  REQUIRE(flat.size() == 4);
  Eigen::MatrixXd matrix(2, 2);
  matrix << flat[0], flat[1], flat[2], flat[3];
  CHECK(std::abs(matrix(0, 1) - matrix(1, 0)) <= 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  CHECK(rc::operator_distance(matrix, Eigen::MatrixXd::Identity(2, 2)) <= 0.8);

  // Identical config, identical bytes.
  const fs::path again_path = dir.file("report_again.json");
  const RunResult again = run_cli(
      dir, "estimate --config " + config.string() + " --out " +
               again_path.string());
  REQUIRE(again.exit_code == 0);
  CHECK(slurp(again_path) == slurp(report_path));

  // --seed only relabels the report.
  const RunResult reseeded = run_cli(
      dir, "estimate --config " + config.string() + " --seed 99");
  REQUIRE(reseeded.exit_code == 0);
  const nlohmann::json relabeled = nlohmann::json::parse(reseeded.out);
  CHECK(relabeled.at("seed").get<std::uint64_t>() == 99);
  CHECK(relabeled.at("matrix") == report.at("matrix"));
}

TEST_CASE("estimate rejects an out-of-range eta") {
  TempDir dir;
  const fs::path sample = write_gaussian_sample(dir, "sample.txt", 50, 2);
  const fs::path config = dir.file("config.json");
  spit(config, "{\"sample_file\": \"" + sample.string() +
                   "\", \"eta\": 0.6, \"alpha\": 0.1}");

  const RunResult run = run_cli(dir, "estimate --config " + config.string());
  CHECK(run.exit_code == 2);
  CHECK(run.err.find("eta must be < 0.5") != std::string::npos);
}

TEST_CASE("estimate surfaces estimator failures as exit 3") {
  TempDir dir;
  // Eight rows cannot absorb the trace stage's trimming level at this alpha.
  const fs::path sample = write_gaussian_sample(dir, "tiny.txt", 8, 3);
  const fs::path config = dir.file("config.json");
  spit(config, "{\"sample_file\": \"" + sample.string() +
                   "\", \"eta\": 0.0, \"alpha\": 0.001, \"D\": 2}");

  const RunResult run = run_cli(dir, "estimate --config " + config.string());
  CHECK(run.exit_code == 3);
  CHECK(run.err.find("KTooLarge") != std::string::npos);
}

TEST_CASE("estimate reports a missing sample file as a config error") {
  TempDir dir;
  const fs::path config = dir.file("config.json");
  spit(config, "{\"sample_file\": \"" + dir.file("nope.txt").string() +
                   "\", \"eta\": 0.0, \"alpha\": 0.1}");

  const RunResult run = run_cli(dir, "estimate --config " + config.string());
  CHECK(run.exit_code == 2);
  CHECK(run.err.find("cannot open") != std::string::npos);
}

TEST_CASE("config parse failures exit 2") {
  TempDir dir;
  const fs::path bad = dir.file("bad.json");
  spit(bad, "{\"sample_file\": ");
  CHECK(run_cli(dir, "estimate --config " + bad.string()).exit_code == 2);

  const fs::path unknown = dir.file("unknown.json");
  spit(unknown,
       "{\"sample_file\": \"x\", \"eta\": 0.0, \"alpha\": 0.1, "
       "\"bogus_key\": 1}");
  const RunResult run = run_cli(dir, "estimate --config " + unknown.string());
  CHECK(run.exit_code == 2);
  CHECK(run.err.find("unknown key") != std::string::npos);
}

TEST_CASE("sweep writes one row per trial, size, and estimator") {
  TempDir dir;
  const fs::path config = dir.file("sweep.json");
  spit(config,
       "{\"distribution\": {\"family\": \"gaussian\", "
       "\"sigma\": [[1.0, 0.0], [0.0, 1.0]]}, "
       "\"n_grid\": [100, 200], \"trials\": 2, "
       "\"eta\": 0.01, \"alpha\": 0.1, \"seed\": 11}");

  const fs::path csv_path = dir.file("sweep.csv");
  const RunResult run = run_cli(
      dir, "sweep --config " + config.string() + " --out " +
               csv_path.string() + " --threads 1");
  REQUIRE(run.exit_code == 0);

  const std::string csv = slurp(csv_path);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "trial,n,d,eta,estimator,op_error,k_used,runtime_ms,seed");

  int rows = 0;
  std::vector<std::string> estimators;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> parts;
    while (std::getline(fields, field, ',')) parts.push_back(field);
    REQUIRE(parts.size() == 9);
    estimators.push_back(parts[4]);
    CHECK(parts[2] == "2");                    // d
    CHECK(parts[7] == "0");                    // runtime_ms not recorded
    CHECK(std::stod(parts[5]) >= 0.0);         // op_error
  }
  CHECK(rows == 12);
  REQUIRE(estimators.size() == 12);
  for (int i = 0; i < 12; i += 3) {
    CHECK(estimators[i] == "sample_cov");
    CHECK(estimators[i + 1] == "trimmed_fixed_k");
    CHECK(estimators[i + 2] == "adaptive");
  }

  const nlohmann::json meta =
      nlohmann::json::parse(slurp(csv_path.string() + ".meta.json"));
  CHECK(meta.at("rows").get<int>() == 12);
  CHECK(meta.at("seed").get<std::uint64_t>() == 11);
  CHECK(meta.at("rng").get<std::string>() == "philox4x32-10");
  CHECK(meta.at("config_hash").get<std::string>().size() == 16);

  // Byte identity across reruns, including across thread counts.
  const fs::path rerun_path = dir.file("sweep_rerun.csv");
  const RunResult rerun = run_cli(
      dir, "sweep --config " + config.string() + " --out " +
               rerun_path.string() + " --threads 2");
  REQUIRE(rerun.exit_code == 0);
  CHECK(slurp(rerun_path) == csv);
  CHECK(nlohmann::json::parse(slurp(rerun_path.string() + ".meta.json"))
            .at("config_hash") == meta.at("config_hash"));
}

TEST_CASE("sweep with zero trials emits only the header") {
  TempDir dir;
  const fs::path config = dir.file("sweep.json");
  spit(config,
       "{\"distribution\": {\"family\": \"gaussian\", \"sigma\": [[1.0]]}, "
       "\"n_grid\": [50], \"trials\": 0, \"eta\": 0.0, \"alpha\": 0.1}");

  const fs::path csv_path = dir.file("empty.csv");
  const RunResult run = run_cli(
      dir, "sweep --config " + config.string() + " --out " + csv_path.string());
  REQUIRE(run.exit_code == 0);
  CHECK(slurp(csv_path) == "trial,n,d,eta,estimator,op_error,k_used,runtime_ms,seed\n");
}

TEST_CASE("sweep requires an output path") {
  TempDir dir;
  const fs::path config = dir.file("sweep.json");
  spit(config,
       "{\"distribution\": {\"family\": \"gaussian\", \"sigma\": [[1.0]]}, "
       "\"n_grid\": [50], \"trials\": 1, \"eta\": 0.0, \"alpha\": 0.1}");
  const RunResult run = run_cli(dir, "sweep --config " + config.string());
  CHECK(run.exit_code == 2);
}

TEST_CASE("diagnose evaluates the requested bounds") {
  TempDir dir;
  const fs::path config = dir.file("diag.json");
  spit(config,
       "{\"seed\": 4, "
       "\"bp\": {\"op_norm\": 1.0, \"kappa_p\": 1.0, \"kappa_4\": 1.0, "
       "\"p\": 4.0, \"n\": 1000, \"t\": 10, \"r\": 5.0}, "
       "\"bq\": {\"n\": 100, \"t\": 4, \"q\": 2.0, \"moment_q\": 1.0}, "
       "\"pac_bernstein\": {\"n\": 100, \"mu_bar\": 0.0, \"sigma_bar\": 2.0, "
       "\"A\": 3.0, \"gamma\": 0.5, \"alpha\": 0.1353352832366127}}");

  const RunResult run = run_cli(dir, "diagnose --config " + config.string());
  REQUIRE(run.exit_code == 0);
  const nlohmann::json report = nlohmann::json::parse(run.out);

  CHECK(report.at("B_p").get<double>() ==
        doctest::Approx(2560.0).epsilon(1e-12));
  CHECK(report.at("b_q").get<double>() ==
        doctest::Approx(5.0 * std::exp(1.0)).epsilon(1e-12));

  rc::BoundInputs pac;
  pac.n = 100;
  pac.mu_bar = 0.0;
  pac.sigma_bar = 2.0;
  pac.A = 3.0;
  pac.gamma = 0.5;
  pac.alpha = 0.1353352832366127;
  CHECK(report.at("pac_bernstein").get<double>() ==
        doctest::Approx(rc::pac_bernstein_bound(pac)).epsilon(1e-12));

  CHECK(report.at("seed").get<std::uint64_t>() == 4);
  CHECK(report.at("config_hash").get<std::string>().size() == 16);
}

TEST_CASE("diagnose runs the exceedance frequency experiment") {
  TempDir dir;
  const fs::path config = dir.file("diag.json");
  spit(config,
       "{\"seed\": 8, "
       "\"count_freq\": {\"distribution\": {\"family\": \"gaussian\", "
       "\"sigma\": [[1.0, 0.0], [0.0, 1.0]]}, "
       "\"n\": 50, \"t\": 6, \"B\": 30.0, \"trials\": 20}}");

  const RunResult run = run_cli(dir, "diagnose --config " + config.string());
  REQUIRE(run.exit_code == 0);
  const nlohmann::json report = nlohmann::json::parse(run.out);
  const double freq = report.at("count_holds_freq").get<double>();
  CHECK(freq >= 0.0);
  CHECK(freq <= 1.0);
  CHECK(report.at("count_trials").get<int>() == 20);
}

TEST_CASE("diagnose count frequency meets its Gaussian target") {
  TempDir dir;
  rc::BoundInputs in;
  in.n = 2000;
  in.t = 6;
  in.op_norm = 1.0;
  in.r = 3.0;
  in.profile.p = 4.0;
  in.profile.kappa_4 = std::pow(3.0, 0.25);
  in.profile.kappa_p = std::pow(3.0, 0.25);
  const double B = rc::threshold_Bp(in);

  char b_text[40];
  std::snprintf(b_text, sizeof b_text, "%.17g", B);
  const fs::path config = dir.file("diag.json");
  spit(config,
       std::string("{\"seed\": 12, ") +
           "\"count_freq\": {\"distribution\": {\"family\": \"gaussian\", "
           "\"sigma\": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]}, "
           "\"n\": 2000, \"t\": 6, \"B\": " + b_text + ", \"trials\": 300}}");

  const RunResult run = run_cli(dir, "diagnose --config " + config.string());
  REQUIRE(run.exit_code == 0);
  const nlohmann::json report = nlohmann::json::parse(run.out);
  CHECK(report.at("count_holds_freq").get<double>() >= 0.995);
}

TEST_CASE("diagnose epsilon_net insists on a Gaussian reference") {
  TempDir dir;
  const fs::path config = dir.file("diag.json");
  spit(config,
       "{\"epsilon_net\": {\"distribution\": {\"family\": \"student_t\", "
       "\"sigma\": [[1.0]], \"dof\": 5.0}, "
       "\"n\": 100, \"B\": 10.0, \"trials\": 2}}");

  const RunResult run = run_cli(dir, "diagnose --config " + config.string());
  CHECK(run.exit_code == 2);
  CHECK(run.err.find("gaussian") != std::string::npos);
}
