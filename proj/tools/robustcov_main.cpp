// Command-line harness: estimate (adaptive fit of a stored sample), sweep
// (simulation grid to CSV), diagnose (bound evaluators and Monte Carlo event
// frequencies).  Exit codes: 0 success, 2 configuration/parse error,
// 3 estimator error.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robustcov/adaptive.hpp"
#include "robustcov/bounds.hpp"
#include "robustcov/rng.hpp"
#include "robustcov/solver.hpp"
#include "robustcov/sphere.hpp"
#include "robustcov/synth.hpp"
#include "robustcov/trimmed.hpp"

namespace rc = robustcov;
using nlohmann::json;

namespace {

// Thrown for anything wrong with the configuration or its referenced input
// files; maps to exit code 2.  Library errors raised after the inputs were
// accepted map to exit code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
}

// Ordered JSON object writer; field order is the call order, numbers carry
// 17 significant digits, so identical inputs give identical bytes.
class JsonWriter {
 public:
  void num(const std::string& k, double v) { key(k) += fmt(v); }
  void integer(const std::string& k, long long v) {
    key(k) += std::to_string(v);
  }
  void u64(const std::string& k, std::uint64_t v) {
    key(k) += std::to_string(v);
  }
  void boolean(const std::string& k, bool v) { key(k) += v ? "true" : "false"; }
  void str(const std::string& k, const std::string& v) {
    key(k) += "\"" + v + "\"";
  }
  void num_array(const std::string& k, const std::vector<double>& values) {
    std::string& out = key(k);
    out += "[";
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out += ",";
      out += fmt(values[i]);
    }
    out += "]";
  }
  std::string finish() { return body_ + "}\n"; }

 private:
  std::string& key(const std::string& k) {
    body_ += first_ ? "{" : ",";
    first_ = false;
    body_ += "\"" + k + "\":";
    return body_;
  }
  std::string body_;
  bool first_ = true;
};

// --- config access helpers -------------------------------------------------

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

const json& require(const json& obj, const char* k) {
  if (!obj.contains(k)) {
    throw ConfigError(std::string("missing required key \"") + k + "\"");
  }
  return obj.at(k);
}

double get_num(const json& obj, const char* k) {
  const json& v = require(obj, k);
  if (!v.is_number()) {
    throw ConfigError(std::string("key \"") + k + "\" must be a number");
  }
  return v.get<double>();
}

double get_num_or(const json& obj, const char* k, double fallback) {
  return obj.contains(k) ? get_num(obj, k) : fallback;
}

long long get_int(const json& obj, const char* k) {
  const json& v = require(obj, k);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string("key \"") + k + "\" must be an integer");
  }
  return v.get<long long>();
}

long long get_int_or(const json& obj, const char* k, long long fallback) {
  return obj.contains(k) ? get_int(obj, k) : fallback;
}

std::string get_str(const json& obj, const char* k) {
  const json& v = require(obj, k);
  if (!v.is_string()) {
    throw ConfigError(std::string("key \"") + k + "\" must be a string");
  }
  return v.get<std::string>();
}

void check_eta(double eta) {
  if (eta < 0.0) throw ConfigError("eta must be >= 0");
  if (!(eta < 0.5)) throw ConfigError("eta must be < 0.5");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must be in (0, 1)");
  }
}

rc::DistributionSpec parse_distribution(const json& obj) {
  check_keys(obj, "\"distribution\"", {"family", "sigma", "dof", "tail_index"});
  rc::DistributionSpec spec;
  const std::string family = get_str(obj, "family");
  try {
    spec.family = rc::family_from_name(family);
  } catch (const rc::Error& e) {
    throw ConfigError(e.what());
  }
  const json& sigma = require(obj, "sigma");
  if (!sigma.is_array() || sigma.empty()) {
    throw ConfigError("\"sigma\" must be a nonempty array of rows");
  }
  const size_t d = sigma.size();
  spec.sigma.resize(static_cast<int>(d), static_cast<int>(d));
  for (size_t i = 0; i < d; ++i) {
    const json& row = sigma.at(i);
    if (!row.is_array() || row.size() != d) {
      throw ConfigError("\"sigma\" must be a square matrix");
    }
    for (size_t j = 0; j < d; ++j) {
      if (!row.at(j).is_number()) {
        throw ConfigError("\"sigma\" entries must be numbers");
      }
      spec.sigma(static_cast<int>(i), static_cast<int>(j)) =
          row.at(j).get<double>();
    }
  }
  spec.dof = get_num_or(obj, "dof", 0.0);
  spec.tail_index = get_num_or(obj, "tail_index", 0.0);
  try {
    spec.validate();
  } catch (const rc::Error& e) {
    throw ConfigError(std::string(e.name()) + ": " + e.what());
  }
  return spec;
}

rc::AdversarySpec parse_adversary(const json& obj, int d) {
  check_keys(obj, "\"adversary\"", {"kind", "eta", "magnitude", "direction"});
  rc::AdversarySpec adv;
  const std::string kind = get_str(obj, "kind");
  if (kind == "none") {
    adv.kind = rc::AdversaryKind::None;
  } else if (kind == "spike") {
    adv.kind = rc::AdversaryKind::Spike;
  } else if (kind == "direction_targeted") {
    adv.kind = rc::AdversaryKind::DirectionTargeted;
  } else if (kind == "nearby") {
    adv.kind = rc::AdversaryKind::Nearby;
  } else {
    throw ConfigError("unknown adversary kind \"" + kind + "\"");
  }
  adv.eta = get_num_or(obj, "eta", 0.0);
  check_eta(adv.eta);
  adv.magnitude = get_num_or(obj, "magnitude", 0.0);
  if (obj.contains("direction")) {
    const json& dir = obj.at("direction");
    if (dir.is_string()) {
      if (dir.get<std::string>() != "random") {
        throw ConfigError("\"direction\" must be an array or \"random\"");
      }
    } else if (dir.is_array()) {
      if (static_cast<int>(dir.size()) != d) {
        throw ConfigError("\"direction\" must have length d");
      }
      Eigen::VectorXd v(d);
      for (int j = 0; j < d; ++j) v[j] = dir.at(j).get<double>();
      const double norm = v.norm();
      if (!(norm > 0.0)) throw ConfigError("\"direction\" must be nonzero");
      adv.direction = v / norm;
    } else {
      throw ConfigError("\"direction\" must be an array or \"random\"");
    }
  }
  return adv;
}

rc::SolverConfig parse_solver(const json& obj) {
  check_keys(obj, "\"solver\"",
             {"max_iterations", "tolerance", "step_rule", "seed"});
  rc::SolverConfig config;
  config.max_iterations =
      static_cast<int>(get_int_or(obj, "max_iterations", 5000));
  if (config.max_iterations < 1) {
    throw ConfigError("\"max_iterations\" must be >= 1");
  }
  config.tolerance = get_num_or(obj, "tolerance", 1e-7);
  if (!(config.tolerance > 0.0)) {
    throw ConfigError("\"tolerance\" must be positive");
  }
  if (obj.contains("step_rule")) {
    const std::string rule = get_str(obj, "step_rule");
    if (rule == "polyak") {
      config.step_rule = rc::StepRule::Polyak;
    } else if (rule == "fixed_decay") {
      config.step_rule = rc::StepRule::FixedDecay;
    } else {
      throw ConfigError("\"step_rule\" must be \"polyak\" or \"fixed_decay\"");
    }
  }
  config.seed = static_cast<std::uint64_t>(get_int_or(obj, "seed", 0));
  return config;
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;          // empty: config value, else stdout
  std::optional<std::uint64_t> seed_override;
  int threads = 0;               // 0: env or hardware default
};

int resolve_threads(const CommonArgs& args) {
  if (args.threads > 0) return args.threads;
  if (const char* env = std::getenv("ROBUSTCOV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ConfigError("ROBUSTCOV_THREADS must be a positive integer");
    }
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

json parse_config(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const CommonArgs& args) {
  const std::string text = read_file(args.config_path);
  const std::uint64_t config_hash = fnv1a64(text);
  const json cfg = parse_config(text);
  check_keys(cfg, "config",
             {"sample_file", "eta", "alpha", "p", "D", "net_eps", "net_seed",
              "solver", "seed", "out"});

  const std::string sample_file = get_str(cfg, "sample_file");
  const double eta = get_num(cfg, "eta");
  check_eta(eta);
  const double alpha = get_num(cfg, "alpha");
  check_alpha(alpha);
  const double p = get_num_or(cfg, "p", 4.0);
  const int D = static_cast<int>(get_int_or(cfg, "D", 10));
  const double net_eps = get_num_or(cfg, "net_eps", 0.25);
  const std::uint64_t net_seed =
      static_cast<std::uint64_t>(get_int_or(cfg, "net_seed", 0));
  const rc::SolverConfig solver =
      cfg.contains("solver") ? parse_solver(cfg.at("solver"))
                             : rc::SolverConfig{};
  const std::uint64_t seed =
      args.seed_override.value_or(
          static_cast<std::uint64_t>(get_int_or(cfg, "seed", 0)));
  std::string out_path = args.out_path;
  if (out_path.empty() && cfg.contains("out")) out_path = get_str(cfg, "out");

  rc::LoadedSample loaded;
  try {
    std::ifstream in(sample_file);
    if (!in) throw ConfigError("cannot open file: " + sample_file);
    loaded = rc::load_sample(in);
  } catch (const rc::Error& e) {
    throw ConfigError("sample file " + sample_file + ": " + e.what());
  }

  const rc::SphereNet net =
      rc::build_net(loaded.sample.d(), net_eps, net_seed);
  const rc::AdaptiveReport report =
      rc::estimate_adaptive(loaded.sample, eta, alpha, p, net, solver, D);

  JsonWriter w;
  w.integer("k_star", report.k_star);
  w.num("pilot_op_norm", report.pilot_op_norm);
  w.num("trace_hat", report.trace_hat);
  w.num("r_hat", report.r_hat);
  w.integer("k_hat", report.k_hat);
  w.boolean("k_hat_clamped", report.k_hat_clamped);
  w.integer("d", loaded.sample.d());
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(loaded.sample.d()) * loaded.sample.d());
  for (int i = 0; i < report.final.matrix.rows(); ++i) {
    for (int j = 0; j < report.final.matrix.cols(); ++j) {
      flat.push_back(report.final.matrix(i, j));
    }
  }
  w.num_array("matrix", flat);
  w.num("objective", report.final.objective);
  w.integer("iterations", report.final.iterations);
  w.u64("seed", seed);
  w.str("config_hash", hex64(config_hash));
  w.str("rng", rc::kRngAlgorithm);
  emit(out_path, w.finish());
  return 0;
}

// --- sweep -------------------------------------------------------------------

struct SweepRow {
  int trial = 0;
  int n = 0;
  int d = 0;
  std::string estimator;
  double op_error = 0.0;
  int k_used = 0;
  long long runtime_ms = 0;
  std::uint64_t seed = 0;
};

int cmd_sweep(const CommonArgs& args) {
  const std::string text = read_file(args.config_path);
  const std::uint64_t config_hash = fnv1a64(text);
  const json cfg = parse_config(text);
  check_keys(cfg, "config",
             {"distribution", "adversary", "n_grid", "trials", "eta", "alpha",
              "p", "D", "k", "net_eps", "net_seed", "solver", "seed", "out",
              "record_runtime"});

  const rc::DistributionSpec dist = parse_distribution(require(cfg, "distribution"));
  const int d = dist.d();
  rc::AdversarySpec adversary;
  if (cfg.contains("adversary")) {
    adversary = parse_adversary(cfg.at("adversary"), d);
  }

  const json& grid_json = require(cfg, "n_grid");
  if (!grid_json.is_array() || grid_json.empty()) {
    throw ConfigError("\"n_grid\" must be a nonempty array of integers");
  }
  std::vector<int> n_grid;
  for (const json& v : grid_json) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ConfigError("\"n_grid\" entries must be positive integers");
    }
    n_grid.push_back(static_cast<int>(v.get<long long>()));
  }

  const long long trials = get_int(cfg, "trials");
  if (trials < 0) throw ConfigError("\"trials\" must be >= 0");
  const double eta = get_num(cfg, "eta");
  check_eta(eta);
  const double alpha = get_num(cfg, "alpha");
  check_alpha(alpha);
  const double p = get_num_or(cfg, "p", 4.0);
  const int D = static_cast<int>(get_int_or(cfg, "D", 10));
  const std::optional<int> fixed_k =
      cfg.contains("k") ? std::optional<int>(static_cast<int>(get_int(cfg, "k")))
                        : std::nullopt;
  const double net_eps = get_num_or(cfg, "net_eps", 0.25);
  const std::uint64_t net_seed =
      static_cast<std::uint64_t>(get_int_or(cfg, "net_seed", 0));
  const rc::SolverConfig solver =
      cfg.contains("solver") ? parse_solver(cfg.at("solver"))
                             : rc::SolverConfig{};
  bool record_runtime = false;
  if (cfg.contains("record_runtime")) {
    const json& v = cfg.at("record_runtime");
    if (!v.is_boolean()) {
      throw ConfigError("\"record_runtime\" must be a boolean");
    }
    record_runtime = v.get<bool>();
  }
  const std::uint64_t master_seed =
      args.seed_override.value_or(
          static_cast<std::uint64_t>(get_int_or(cfg, "seed", 0)));
  std::string out_path = args.out_path;
  if (out_path.empty() && cfg.contains("out")) out_path = get_str(cfg, "out");
  if (out_path.empty()) {
    throw ConfigError("sweep requires an output path (--out or \"out\")");
  }

  const rc::SphereNet net = rc::build_net(d, net_eps, net_seed);

  const long long cells = trials * static_cast<long long>(n_grid.size());
  std::vector<SweepRow> rows(static_cast<size_t>(cells) * 3);
  std::atomic<long long> next_cell{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    for (;;) {
      const long long cell = next_cell.fetch_add(1);
      if (cell >= cells || failed.load()) break;
      try {
        const int trial = static_cast<int>(cell / n_grid.size());
        const int gi = static_cast<int>(cell % n_grid.size());
        const int n = n_grid[gi];
        const std::uint64_t cell_seed =
            master_seed + static_cast<std::uint64_t>(cell);

        rc::DistributionSpec cell_dist = dist;
        cell_dist.seed = cell_seed;
        rc::Sample sample = rc::generate(cell_dist, n);
        if (adversary.kind != rc::AdversaryKind::None) {
          rc::AdversarySpec cell_adv = adversary;
          cell_adv.seed = cell_seed;
          sample = rc::contaminate(sample, cell_adv).corrupted;
        }

        for (int e = 0; e < 3; ++e) {
          SweepRow row;
          row.trial = trial;
          row.n = n;
          row.d = d;
          row.seed = cell_seed;
          const auto t0 = std::chrono::steady_clock::now();
          Eigen::MatrixXd estimate;
          if (e == 0) {
            row.estimator = "sample_cov";
            estimate = rc::trimmed_second_moment(sample, 0);
            row.k_used = 0;
          } else if (e == 1) {
            row.estimator = "trimmed_fixed_k";
            const int k = fixed_k ? *fixed_k
                                  : rc::trace_trim_count(eta, n, alpha);
            const rc::CovEstimate fit =
                rc::estimate_covariance(sample, k, net, solver);
            estimate = fit.matrix;
            row.k_used = fit.k_used;
          } else {
            row.estimator = "adaptive";
            const rc::AdaptiveReport report =
                rc::estimate_adaptive(sample, eta, alpha, p, net, solver, D);
            estimate = report.final.matrix;
            row.k_used = report.k_hat;
          }
          if (record_runtime) {
            row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
          }
          row.op_error = rc::operator_distance(estimate, dist.sigma);
          rows[static_cast<size_t>(cell) * 3 + e] = row;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  const int threads =
      std::max(1, std::min<int>(resolve_threads(args),
                                static_cast<int>(std::max(1ll, cells))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::string csv = "trial,n,d,eta,estimator,op_error,k_used,runtime_ms,seed\n";
  for (const SweepRow& row : rows) {
    csv += std::to_string(row.trial);
    csv += ",";
    csv += std::to_string(row.n);
    csv += ",";
    csv += std::to_string(row.d);
    csv += ",";
    csv += fmt(eta);
    csv += ",";
    csv += row.estimator;
    csv += ",";
    csv += fmt(row.op_error);
    csv += ",";
    csv += std::to_string(row.k_used);
    csv += ",";
    csv += std::to_string(row.runtime_ms);
    csv += ",";
    csv += std::to_string(row.seed);
    csv += "\n";
  }
  write_file(out_path, csv);

  // The CSV column set is pinned, so the reproducibility fields ride in a
  // sidecar next to the table.
  JsonWriter meta;
  meta.str("config_hash", hex64(config_hash));
  meta.u64("seed", master_seed);
  meta.str("rng", rc::kRngAlgorithm);
  meta.integer("rows", static_cast<long long>(rows.size()));
  write_file(out_path + ".meta.json", meta.finish());
  return 0;
}

// --- diagnose ----------------------------------------------------------------

int cmd_diagnose(const CommonArgs& args) {
  const std::string text = read_file(args.config_path);
  const std::uint64_t config_hash = fnv1a64(text);
  const json cfg = parse_config(text);
  check_keys(cfg, "config",
             {"seed", "bp", "bq", "pac_bernstein", "count_freq", "norm_freq",
              "epsilon_net", "out"});
  const std::uint64_t seed =
      args.seed_override.value_or(
          static_cast<std::uint64_t>(get_int_or(cfg, "seed", 0)));
  std::string out_path = args.out_path;
  if (out_path.empty() && cfg.contains("out")) out_path = get_str(cfg, "out");

  JsonWriter w;
  w.u64("seed", seed);
  w.str("config_hash", hex64(config_hash));
  w.str("rng", rc::kRngAlgorithm);

  if (cfg.contains("bp")) {
    const json& obj = cfg.at("bp");
    check_keys(obj, "\"bp\"",
               {"op_norm", "kappa_p", "kappa_4", "p", "n", "t", "r"});
    rc::BoundInputs in;
    in.op_norm = get_num(obj, "op_norm");
    in.n = static_cast<int>(get_int(obj, "n"));
    in.t = static_cast<int>(get_int(obj, "t"));
    in.r = get_num(obj, "r");
    in.profile.p = get_num(obj, "p");
    in.profile.kappa_p = get_num(obj, "kappa_p");
    in.profile.kappa_4 = get_num(obj, "kappa_4");
    w.num("B_p", rc::threshold_Bp(in));
  }

  if (cfg.contains("bq")) {
    const json& obj = cfg.at("bq");
    check_keys(obj, "\"bq\"", {"n", "t", "q", "moment_q"});
    w.num("b_q", rc::single_point_threshold_bq(
                     static_cast<int>(get_int(obj, "n")),
                     static_cast<int>(get_int(obj, "t")), get_num(obj, "q"),
                     get_num(obj, "moment_q")));
  }

  if (cfg.contains("pac_bernstein")) {
    const json& obj = cfg.at("pac_bernstein");
    check_keys(obj, "\"pac_bernstein\"",
               {"n", "mu_bar", "sigma_bar", "A", "gamma", "alpha"});
    rc::BoundInputs in;
    in.n = static_cast<int>(get_int(obj, "n"));
    in.mu_bar = get_num(obj, "mu_bar");
    in.sigma_bar = get_num(obj, "sigma_bar");
    in.A = get_num(obj, "A");
    in.gamma = get_num(obj, "gamma");
    in.alpha = get_num(obj, "alpha");
    check_alpha(in.alpha);
    w.num("pac_bernstein", rc::pac_bernstein_bound(in));
  }

  if (cfg.contains("count_freq")) {
    const json& obj = cfg.at("count_freq");
    check_keys(obj, "\"count_freq\"",
               {"distribution", "n", "t", "B", "trials", "net_eps", "net_seed"});
    const rc::DistributionSpec dist =
        parse_distribution(require(obj, "distribution"));
    const int n = static_cast<int>(get_int(obj, "n"));
    const int t = static_cast<int>(get_int(obj, "t"));
    const double B = get_num(obj, "B");
    const long long trials = get_int(obj, "trials");
    if (trials < 1) throw ConfigError("\"trials\" must be >= 1");
    const rc::SphereNet net =
        rc::build_net(dist.d(), get_num_or(obj, "net_eps", 0.25),
                      static_cast<std::uint64_t>(get_int_or(obj, "net_seed", 0)));
    long long holds = 0;
    for (long long trial = 0; trial < trials; ++trial) {
      rc::DistributionSpec trial_dist = dist;
      trial_dist.seed = seed + static_cast<std::uint64_t>(trial);
      const rc::Sample sample = rc::generate(trial_dist, n);
      if (rc::count_exceedances(sample, net, B, t).holds) ++holds;
    }
    w.num("count_holds_freq",
          static_cast<double>(holds) / static_cast<double>(trials));
    w.integer("count_trials", trials);
  }

  if (cfg.contains("norm_freq")) {
    const json& obj = cfg.at("norm_freq");
    check_keys(obj, "\"norm_freq\"",
               {"distribution", "n", "t", "kappa_4", "trials"});
    const rc::DistributionSpec dist =
        parse_distribution(require(obj, "distribution"));
    const int n = static_cast<int>(get_int(obj, "n"));
    const int t = static_cast<int>(get_int(obj, "t"));
    const double kappa_4 = get_num(obj, "kappa_4");
    const long long trials = get_int(obj, "trials");
    if (trials < 1) throw ConfigError("\"trials\" must be >= 1");
    const double trace = dist.sigma.trace();
    long long violated = 0;
    for (long long trial = 0; trial < trials; ++trial) {
      rc::DistributionSpec trial_dist = dist;
      trial_dist.seed = seed + (1ull << 32) + static_cast<std::uint64_t>(trial);
      const rc::Sample sample = rc::generate(trial_dist, n);
      if (rc::norm_exceedances(sample, t, kappa_4, trace).violated) ++violated;
    }
    w.num("norm_violated_freq",
          static_cast<double>(violated) / static_cast<double>(trials));
    w.integer("norm_trials", trials);
  }

  if (cfg.contains("epsilon_net")) {
    const json& obj = cfg.at("epsilon_net");
    check_keys(obj, "\"epsilon_net\"",
               {"distribution", "n", "B", "trials", "net_eps", "net_seed"});
    const rc::DistributionSpec dist =
        parse_distribution(require(obj, "distribution"));
    if (dist.family != rc::Family::Gaussian) {
      throw ConfigError(
          "\"epsilon_net\" requires a gaussian distribution (closed-form "
          "truncated moments)");
    }
    const int n = static_cast<int>(get_int(obj, "n"));
    const double B = get_num(obj, "B");
    const long long trials = get_int(obj, "trials");
    if (trials < 1) throw ConfigError("\"trials\" must be >= 1");
    const rc::SphereNet net =
        rc::build_net(dist.d(), get_num_or(obj, "net_eps", 0.25),
                      static_cast<std::uint64_t>(get_int_or(obj, "net_seed", 0)));
    double sum = 0.0;
    double worst = 0.0;
    for (long long trial = 0; trial < trials; ++trial) {
      rc::DistributionSpec trial_dist = dist;
      trial_dist.seed = seed + (2ull << 32) + static_cast<std::uint64_t>(trial);
      const rc::Sample sample = rc::generate(trial_dist, n);
      const double value =
          rc::truncated_process_on_net(sample, net, B, dist.sigma);
      sum += value;
      worst = std::max(worst, value);
    }
    w.num("epsilon_B_mean", sum / static_cast<double>(trials));
    w.num("epsilon_B_max", worst);
    w.integer("epsilon_B_trials", trials);
  }

  emit(out_path, w.finish());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust covariance estimation harness"};
  app.require_subcommand(1);

  CommonArgs args;
  std::uint64_t seed_value = 0;
  std::vector<CLI::Option*> seed_opts;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "path to a JSON config")
        ->required();
    sub->add_option("--out", args.out_path, "output path");
    seed_opts.push_back(sub->add_option(
        "--seed", seed_value, "master seed (overrides the config)"));
    sub->add_option("--threads", args.threads,
                    "worker threads (default: ROBUSTCOV_THREADS or hardware)");
  };

  CLI::App* estimate = app.add_subcommand(
      "estimate", "adaptive covariance estimate of a stored sample");
  add_common(estimate);
  CLI::App* sweep =
      app.add_subcommand("sweep", "simulation grid over n and estimators");
  add_common(sweep);
  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "bound evaluators and Monte Carlo event frequencies");
  add_common(diagnose);

  CLI11_PARSE(app, argc, argv);
  for (const CLI::Option* opt : seed_opts) {
    if (opt->count() > 0) args.seed_override = seed_value;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(args);
    if (sweep->parsed()) return cmd_sweep(args);
    return cmd_diagnose(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rc::Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
