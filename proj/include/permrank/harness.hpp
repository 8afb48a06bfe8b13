#pragma once

#include "permrank/estimate.hpp"
#include "permrank/matrix.hpp"
#include "permrank/projection.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace permrank {

/// Version string baked in at configure time (git describe of the source tree).
std::string build_describe();

struct ExperimentConfig {
  std::string experiment_name = "svt-scaling";
  std::vector<std::pair<Index, Index>> size_grid{{128, 128}, {256, 256}, {512, 512}, {1024, 1024}};
  double p_obs = 1.0;
  int trials = 20;
  std::uint64_t seed = 20160601;
  std::optional<double> threshold;  ///< SVT threshold override
  double reg_scale = 1.0;
  int rho = 2;
  /// Worker threads for independent trials; 0 picks the hardware count.
  int threads = 0;
  ProjectionConfig projection;

  void validate() const;
  nlohmann::json to_json() const;
  /// Fields present in `j` override the ones in `base`.
  static ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base);
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double error = 0.0;  ///< (1 / nd) ||M_hat - M*||_F^2
};

struct ExperimentRecord {
  std::string experiment;
  std::string family;
  Index n = 0;
  Index d = 0;
  double p_obs = 1.0;
  std::uint64_t root_seed = 0;
  std::vector<TrialRecord> trials;
  double mean = 0.0;
  double median = 0.0;
  double stderr_mean = 0.0;
  double wall_seconds = 0.0;

  /// Fills mean, median and standard error from `trials`.
  void summarize();
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// R^2 reached the minimum; otherwise the slope should not be asserted on.
  bool conclusive = false;
};

/// Least-squares fit of log(y) against log(x).
SlopeFit fit_log_log_slope(std::span<const double> x, std::span<const double> y, double min_r_squared = 0.8);

enum class SvtFamily { kTriangular, kNonNegativeRank2 };
const char* family_name(SvtFamily f);

/// SVT on `trials` fresh observations of one member of `family` at size n x d.
/// The triangular family is square and uses n only.
ExperimentRecord run_svt_trials(SvtFamily family, Index n, Index d, const ExperimentConfig& cfg);

struct SvtScalingReport {
  std::vector<ExperimentRecord> triangular;
  std::vector<ExperimentRecord> nn_rank;
  SlopeFit triangular_fit;
  SlopeFit nn_rank_fit;
  std::vector<ExperimentRecord> all() const;
};

/// Needs at least four sizes with the largest n at least 8 times the smallest.
SvtScalingReport run_svt_scaling(const ExperimentConfig& cfg);

struct HalvingReport {
  ExperimentRecord full;  ///< at cfg.p_obs
  ExperimentRecord half;  ///< at cfg.p_obs / 2
  double median_ratio = 0.0;  ///< half.median / full.median
};

/// Triangular-family SVT error at p_obs and p_obs / 2 for a fixed n.
HalvingReport run_p_obs_halving(Index n, const ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

struct FailureSuiteOptions {
  Index two_step_size = 251;
  /// Regularizer scale for the 3x3 brute-force comparison; the default scale
  /// penalizes any non-empty fit at that size.
  double slice_reg_scale = 1e-3;
  ProjectionConfig projection;
};

/// Two-step counterexample, greedy first step and block extension, and the
/// brute-force versus two-step comparison on a 3x3 slice.
SuiteReport run_failure_suite(std::uint64_t seed, const FailureSuiteOptions& opts = {});

struct OracleSuiteOptions {
  int ls_trials = 100;
  int projection_instances = 500;
  int membership_instances = 1000;
  /// See FailureSuiteOptions::slice_reg_scale.
  double reg_scale = 1e-3;
  ProjectionConfig projection;
};

/// Brute-force least squares on 4x4 permutation-rank-one truth, projection
/// against the quadratic-program oracle, membership against enumeration.
SuiteReport run_oracle_suite(std::uint64_t seed, const OracleSuiteOptions& opts = {});

/// Writes <stem>.csv (one row per trial) and <stem>.json (config, aggregates,
/// build version, seed), each via a temporary file and rename.
void emit_results(std::span<const ExperimentRecord> records, const std::filesystem::path& dir, const std::string& stem,
                  const nlohmann::json& config, const nlohmann::json& extra = nlohmann::json::object());

/// The per-trial CSV text that emit_results writes.
std::string format_records_csv(std::span<const ExperimentRecord> records);

}  // namespace permrank
