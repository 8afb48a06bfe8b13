#include "permrank/analyze.hpp"
#include "permrank/constructors.hpp"
#include "permrank/decomposition.hpp"
#include "permrank/estimate.hpp"
#include "permrank/harness.hpp"
#include "permrank/io.hpp"
#include "permrank/linalg.hpp"
#include "permrank/observe.hpp"
#include "permrank/projection.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace permrank;
namespace fs = std::filesystem;

namespace {

struct Params {
  std::uint64_t seed = 1;
  fs::path out_dir = ".";
  std::string stem;
  std::string config_path;
  std::string input;

  std::string family = "triangular";
  Index n = 64;
  Index d = 0;  // 0 means square
  Index k = 2;
  Index r = 2;
  int rho = 2;

  std::optional<double> p_obs;
  std::optional<double> threshold;
  double reg_scale = 1.0;
  bool reg_scale_given = false;
  int max_k = 1;
  bool capped = true;
  bool distinct = false;
  double proj_tol = ProjectionConfig{}.tolerance;
  int proj_max_iter = ProjectionConfig{}.max_iterations;
  int threads = 0;
  int trials = 0;

  std::string method;
  std::string experiment;

  Index cols() const { return d > 0 ? d : n; }

  ProjectionConfig projection() const {
    ProjectionConfig cfg;
    cfg.tolerance = proj_tol;
    cfg.max_iterations = proj_max_iter;
    cfg.validate();
    return cfg;
  }
};

nlohmann::json projection_json(const ProjectionConfig& cfg) {
  return {{"tolerance", cfg.tolerance},
          {"max_iterations", cfg.max_iterations},
          {"lower_bound", cfg.lower_bound},
          {"upper_bound", cfg.upper_bound}};
}

// Keys in the --config file take precedence over command-line flags.
void apply_config(Params& p) {
  if (p.config_path.empty()) return;
  const nlohmann::json j = nlohmann::json::parse(read_file(p.config_path));
  const auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  take("seed", p.seed);
  take("family", p.family);
  take("n", p.n);
  take("d", p.d);
  take("k", p.k);
  take("r", p.r);
  take("rho", p.rho);
  take("reg_scale", p.reg_scale);
  take("max_k", p.max_k);
  take("capped", p.capped);
  take("distinct", p.distinct);
  take("threads", p.threads);
  if (j.contains("p_obs")) p.p_obs = j.at("p_obs").get<double>();
  if (j.contains("threshold") && !j.at("threshold").is_null()) p.threshold = j.at("threshold").get<double>();
  if (j.contains("projection")) {
    const auto& pj = j.at("projection");
    if (pj.contains("tolerance")) p.proj_tol = pj.at("tolerance").get<double>();
    if (pj.contains("max_iterations")) p.proj_max_iter = pj.at("max_iterations").get<int>();
  }
}

fs::path output(const Params& p, const std::string& fallback, const char* ext) {
  return p.out_dir / ((p.stem.empty() ? fallback : p.stem) + ext);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_matrix(const fs::path& path, const DenseMatrix& m) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  write_matrix_csv(path, m);
}

nlohmann::json base_metadata(const Params& p, const std::string& command) {
  return {{"command", command}, {"build", build_describe()}, {"seed", p.seed}};
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Observation sidecar written by `observe` sits next to the CSV.
std::optional<double> sidecar_p_obs(const fs::path& csv) {
  fs::path side = csv;
  side.replace_extension(".json");
  if (!fs::exists(side)) return std::nullopt;
  const nlohmann::json j = nlohmann::json::parse(read_file(side));
  if (!j.contains("p_obs")) return std::nullopt;
  return j.at("p_obs").get<double>();
}

int cmd_generate(const Params& p) {
  const Index n = p.n;
  const Index d = p.cols();
  DenseMatrix m;
  nlohmann::json meta = base_metadata(p, "generate");
  meta["family"] = p.family;
  if (p.family == "triangular") {
    m = make_triangular_halves(n).matrix();
  } else if (p.family == "upper-ones") {
    m = make_upper_triangular_ones(p.k).matrix();
  } else if (p.family == "rank-pair") {
    m = make_rank_pair_matrix(p.rho, p.r, n, d).matrix();
  } else if (p.family == "hausdorff") {
    m = make_hausdorff_block(p.k, n, d).matrix.matrix();
  } else if (p.family == "convex") {
    m = generate_convex_combination_model(n, d, p.r, p.seed).matrix();
  } else if (p.family == "random-pr") {
    const PermRankDecomposition dec = random_perm_rank(p.rho, n, d, p.seed);
    m = dec.sum();
    meta["decomposition"] = decomposition_to_json(dec);
  } else if (p.family == "two-step-counterexample") {
    const TwoStepCounterexample cex = make_two_step_counterexample(n, d);
    m = cex.m_star.matrix();
    meta["row_groups"] = cex.row_groups;
    meta["col_groups"] = cex.col_groups;
  } else if (p.family == "greedy-counterexample") {
    m = make_greedy_counterexample(p.rho, n, d).matrix();
  } else {
    throw std::invalid_argument("generate: unknown family '" + p.family + "'");
  }
  meta["rows"] = m.rows();
  meta["cols"] = m.cols();
  const fs::path csv = output(p, p.family, ".csv");
  write_matrix(csv, m);
  write_json(output(p, p.family, ".json"), meta);
  std::cout << csv.string() << "\n";
  return 0;
}

int cmd_observe(const Params& p) {
  if (!p.p_obs) throw std::invalid_argument("observe: --p-obs is required");
  const UnitIntervalMatrix truth(read_matrix_csv(p.input));
  const ObservationMatrix y = sample_observations(truth, *p.p_obs, p.seed);
  const fs::path csv = output(p, "observed", ".csv");
  write_matrix(csv, y.values());
  nlohmann::json meta = base_metadata(p, "observe");
  meta["p_obs"] = *p.p_obs;
  meta["input"] = p.input;
  write_json(output(p, "observed", ".json"), meta);
  std::cout << csv.string() << "\n";
  return 0;
}

bool is_observation_matrix(const DenseMatrix& m) {
  return (m.array() == 0.0 || m.array() == 0.5 || m.array() == 1.0).all();
}

int cmd_estimate(const Params& p) {
  const DenseMatrix values = read_matrix_csv(p.input);
  // Anything other than 0 / 0.5 / 1 symbols is taken as an already recentred Y'.
  const bool symbols = is_observation_matrix(values);
  std::optional<double> p_obs = p.p_obs;
  std::string p_source = "flag";
  if (!p_obs) {
    p_obs = sidecar_p_obs(p.input);
    p_source = "sidecar";
  }
  if (!p_obs) {
    p_obs = symbols ? estimate_p_obs(ObservationMatrix(values, 1.0)) : 1.0;
    p_source = symbols ? "estimated" : "default";
  }
  require_p_obs(*p_obs, "estimate");
  const DenseMatrix y_prime = symbols ? recenter(ObservationMatrix(values, *p_obs)) : values;
  const ProjectionConfig proj = p.projection();

  nlohmann::json meta = base_metadata(p, "estimate");
  meta["method"] = p.method;
  meta["p_obs"] = *p_obs;
  meta["p_obs_source"] = p_source;
  meta["input"] = p.input;
  meta["input_kind"] = symbols ? "observations" : "recentered";
  meta["projection"] = projection_json(proj);

  const auto t0 = std::chrono::steady_clock::now();
  DenseMatrix estimate;
  if (p.method == "svt") {
    const double lambda = p.threshold.value_or(default_svt_threshold(values.rows(), values.cols(), *p_obs));
    estimate = soft_threshold_singular_values(y_prime, lambda).cwiseMax(0.0).cwiseMin(1.0);
    meta["threshold"] = lambda;
  } else if (p.method == "bruteforce") {
    const RegularizerSpec spec{p.reg_scale, 2.01};
    const RegularizedLsResult r = brute_force_regularized_ls(y_prime, *p_obs, p.max_k, spec, proj);
    estimate = r.estimate;
    meta["reg_scale"] = p.reg_scale;
    meta["max_k"] = p.max_k;
    meta["chosen_k"] = r.chosen_k;
    meta["fit_error"] = r.fit_error;
    meta["objective"] = r.objective;
    meta["candidates"] = r.candidates;
  } else if (p.method == "two-step") {
    TwoStepOptions opts;
    opts.rho_star = p.rho;
    opts.distinct_permutations = p.distinct;
    opts.projection = proj;
    const TwoStepResult r = two_step_estimate(y_prime, opts);
    estimate = r.estimate;
    meta["rho"] = p.rho;
    meta["distinct_permutations"] = p.distinct;
    meta["fit_sweeps"] = r.fit_sweeps;
    meta["fit_converged"] = r.fit_converged;
    meta["warnings"] = r.warnings;
    meta["objective"] = (y_prime - r.estimate).squaredNorm();
  } else if (p.method == "greedy") {
    GreedyOptions opts;
    opts.capped = p.capped;
    opts.projection = proj;
    const GreedyResult r = greedy_decompose(UnitIntervalMatrix(y_prime, Clamp::kYes), opts);
    estimate = DenseMatrix::Zero(values.rows(), values.cols());
    for (const auto& c : r.components) estimate += c.matrix().matrix();
    meta["capped"] = p.capped;
    meta["components"] = r.components.size();
    meta["terminated"] = r.terminated;
    meta["stalled"] = r.stalled;
    meta["residual_norms"] = r.residual_norms;
  } else {
    throw std::invalid_argument("estimate: unknown method '" + p.method + "'");
  }
  meta["seconds"] = elapsed(t0);

  const fs::path csv = output(p, "estimate-" + p.method, ".csv");
  write_matrix(csv, estimate);
  write_json(output(p, "estimate-" + p.method, ".json"), meta);
  std::cout << csv.string() << "\n";
  return 0;
}

int cmd_decompose(const Params& p) {
  const UnitIntervalMatrix m(read_matrix_csv(p.input));
  nlohmann::json meta = base_metadata(p, "decompose");
  meta["input"] = p.input;
  const MembershipResult member = pr1_membership(m);
  meta["pr1_member"] = member.member;
  PermRankDecomposition dec(m.rows(), m.cols(), {});
  if (member.member) {
    dec = PermRankDecomposition({BimonotoneComponent(m, *member.witness)});
    meta["method"] = "membership";
  } else {
    GreedyOptions opts;
    opts.capped = p.capped;
    opts.projection = p.projection();
    const GreedyResult r = greedy_decompose(m, opts);
    meta["method"] = "greedy";
    meta["terminated"] = r.terminated;
    meta["stalled"] = r.stalled;
    meta["residual_norms"] = r.residual_norms;
    meta["projection"] = projection_json(opts.projection);
    if (p.capped) dec = PermRankDecomposition(m.rows(), m.cols(), r.components);
  }
  const UniquenessVerdict v = check_uniqueness_necessary(dec);
  meta["components"] = dec.size();
  meta["decomposition"] = decomposition_to_json(dec);
  meta["uniqueness_necessary_condition"] = v.satisfied;
  nlohmann::json viol = nlohmann::json::array();
  for (const auto& [i, j] : v.violations) viol.push_back({i, j});
  meta["uniqueness_violations"] = viol;
  const fs::path out = output(p, "decomposition", ".json");
  write_json(out, meta);
  std::cout << out.string() << "\n";
  return 0;
}

int cmd_analyze(const Params& p) {
  const DenseMatrix m = read_matrix_csv(p.input);
  nlohmann::json meta = base_metadata(p, "analyze");
  meta["input"] = p.input;
  const SpectralReport s = spectral_report(m);
  meta["singular_values"] = s.singular_values;
  meta["frobenius_sq"] = s.frobenius_sq;
  meta["op_norm"] = s.op_norm;
  meta["numerical_rank"] = numerical_rank(m);
  meta["rank_one_gap"] = best_rank_one_gap(m);
  const bool in_box = m.size() > 0 && m.minCoeff() >= 0.0 && m.maxCoeff() <= 1.0;
  meta["pr1_member"] = in_box && pr1_membership(UnitIntervalMatrix(m)).member;
  if (in_box && m.rows() * m.cols() <= 36) meta["distance_to_pr1"] = distance_to_pr1(m, p.projection()).distance_sq;
  const fs::path out = output(p, "analysis", ".json");
  write_json(out, meta);
  std::cout << meta.dump(2) << "\n";
  return 0;
}

int report_suite(const SuiteReport& r, const Params& p, const nlohmann::json& config) {
  nlohmann::json j = r.to_json();
  j["build"] = build_describe();
  j["seed"] = p.seed;
  j["config"] = config;
  write_json(output(p, r.suite, ".json"), j);
  for (const auto& c : r.checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  return r.all_pass() ? 0 : 1;
}

const char* slope_status(const SlopeFit& f, double lo, double hi) {
  if (!f.conclusive) return "inconclusive";
  return f.slope >= lo && f.slope <= hi ? "pass" : "fail";
}

int cmd_experiment(const Params& p) {
  ExperimentConfig base;
  base.experiment_name = p.experiment;
  base.seed = p.seed;
  base.threads = p.threads;
  base.threshold = p.threshold;
  base.reg_scale = p.reg_scale;
  base.rho = p.rho;
  base.projection = p.projection();
  if (p.p_obs) base.p_obs = *p.p_obs;
  if (p.trials > 0) base.trials = p.trials;
  ExperimentConfig cfg = base;
  bool reg_scale_given = p.reg_scale_given;
  if (!p.config_path.empty()) {
    const nlohmann::json j = nlohmann::json::parse(read_file(p.config_path));
    cfg = ExperimentConfig::from_json(j, base);
    reg_scale_given = reg_scale_given || j.contains("reg_scale");
  }
  cfg.validate();
  Params out = p;
  out.seed = cfg.seed;

  if (p.experiment == "svt-scaling") {
    const SvtScalingReport r = run_svt_scaling(cfg);
    const auto records = r.all();
    const char* tri = slope_status(r.triangular_fit, -0.65, -0.35);
    const char* nn = slope_status(r.nn_rank_fit, -1.3, -0.7);
    const auto fit_json = [](const SlopeFit& f, const char* status) {
      return nlohmann::json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
                            {"status", status}};
    };
    emit_results(records, p.out_dir, p.stem.empty() ? "svt-scaling" : p.stem, cfg.to_json(),
                 {{"fits", {{"triangular", fit_json(r.triangular_fit, tri)}, {"nn_rank_2", fit_json(r.nn_rank_fit, nn)}}}});
    std::cout << "triangular slope " << r.triangular_fit.slope << " (R2 " << r.triangular_fit.r_squared << ") " << tri
              << "\nnn-rank-2 slope " << r.nn_rank_fit.slope << " (R2 " << r.nn_rank_fit.r_squared << ") " << nn << "\n";
    return std::string(tri) == "pass" && std::string(nn) == "pass" ? 0 : 1;
  }
  if (p.experiment == "halving") {
    const Index n = cfg.size_grid.front().first;
    const HalvingReport r = run_p_obs_halving(n, cfg);
    const std::vector<ExperimentRecord> records{r.full, r.half};
    const bool pass = r.median_ratio >= 1.2 && r.median_ratio <= 1.7;
    emit_results(records, p.out_dir, p.stem.empty() ? "halving" : p.stem, cfg.to_json(),
                 {{"median_ratio", r.median_ratio}, {"status", pass ? "pass" : "fail"}});
    std::cout << "median error ratio " << r.median_ratio << (pass ? " pass" : " fail") << "\n";
    return pass ? 0 : 1;
  }
  if (p.experiment == "failure") {
    FailureSuiteOptions opts;
    opts.projection = cfg.projection;
    // The suites default to their own small-size regularizer scale.
    if (reg_scale_given) opts.slice_reg_scale = cfg.reg_scale;
    return report_suite(run_failure_suite(cfg.seed, opts), out, cfg.to_json());
  }
  if (p.experiment == "oracle") {
    OracleSuiteOptions opts;
    opts.projection = cfg.projection;
    if (reg_scale_given) opts.reg_scale = cfg.reg_scale;
    if (p.trials > 0) opts.ls_trials = p.trials;
    return report_suite(run_oracle_suite(cfg.seed, opts), out, cfg.to_json());
  }
  throw std::invalid_argument("experiment: unknown name '" + p.experiment +
                              "' (expected svt-scaling, halving, failure or oracle)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permutation-rank matrix estimation toolkit"};
  app.require_subcommand(1);
  Params p;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", p.seed, "Root seed");
    sub->add_option("--out-dir", p.out_dir, "Output directory");
    sub->add_option("--name", p.stem, "Output file stem");
    sub->add_option("--config", p.config_path, "JSON file whose keys override flags")->check(CLI::ExistingFile);
    sub->add_option("--proj-tol", p.proj_tol, "Projection stopping tolerance");
    sub->add_option("--proj-max-iter", p.proj_max_iter, "Projection iteration cap");
  };

  CLI::App* gen = app.add_subcommand("generate", "Write a structured matrix");
  common(gen);
  gen->add_option("family", p.family,
                  "triangular | upper-ones | rank-pair | hausdorff | convex | random-pr | two-step-counterexample | "
                  "greedy-counterexample")
      ->required();
  gen->add_option("-n,--rows", p.n, "Rows");
  gen->add_option("-d,--cols", p.d, "Columns (defaults to rows)");
  gen->add_option("-k", p.k, "Block or triangle size");
  gen->add_option("-r,--rank", p.r, "Rank");
  gen->add_option("--rho", p.rho, "Permutation-rank");

  CLI::App* obs = app.add_subcommand("observe", "Sample partial binary observations of a truth matrix");
  common(obs);
  obs->add_option("--input", p.input, "Truth CSV")->required()->check(CLI::ExistingFile);
  obs->add_option("--p-obs", p.p_obs, "Observation probability")->required();

  CLI::App* est = app.add_subcommand("estimate", "Estimate a matrix from observations");
  common(est);
  est->add_option("method", p.method, "svt | bruteforce | two-step | greedy")
      ->required()
      ->check(CLI::IsMember({"svt", "bruteforce", "two-step", "greedy"}));
  est->add_option("--input", p.input, "Observation CSV")->required()->check(CLI::ExistingFile);
  est->add_option("--p-obs", p.p_obs, "Observation probability (else sidecar, else estimated)");
  est->add_option("--threshold", p.threshold, "SVT threshold override");
  est->add_option("--reg-scale", p.reg_scale, "Regularizer scale");
  est->add_option("--max-k", p.max_k, "Largest permutation-rank searched by bruteforce");
  est->add_option("--rho", p.rho, "Permutation-rank used by two-step");
  est->add_flag("--distinct", p.distinct, "Two-step: collect distinct permutation pairs");
  est->add_flag("--capped,!--uncapped", p.capped, "Greedy: cap each component by the residual");

  CLI::App* dec = app.add_subcommand("decompose", "Decompose a matrix into bimonotone components");
  common(dec);
  dec->add_option("--input", p.input, "Matrix CSV")->required()->check(CLI::ExistingFile);
  dec->add_flag("--capped,!--uncapped", p.capped, "Greedy: cap each component by the residual");

  CLI::App* ana = app.add_subcommand("analyze", "Spectral and structural report for a matrix");
  common(ana);
  ana->add_option("--input", p.input, "Matrix CSV")->required()->check(CLI::ExistingFile);

  CLI::App* exp = app.add_subcommand("experiment", "Run a registered experiment or suite");
  common(exp);
  exp->add_option("experiment", p.experiment, "svt-scaling | halving | failure | oracle")
      ->required()
      ->check(CLI::IsMember({"svt-scaling", "halving", "failure", "oracle"}));
  exp->add_option("--p-obs", p.p_obs, "Observation probability");
  exp->add_option("--threshold", p.threshold, "SVT threshold override");
  exp->add_option("--reg-scale", p.reg_scale, "Regularizer scale");
  exp->add_option("--rho", p.rho, "Permutation-rank");
  exp->add_option("--trials", p.trials, "Trials per grid point");
  exp->add_option("--threads", p.threads, "Worker threads (0 = hardware)");

  CLI11_PARSE(app, argc, argv);
  p.reg_scale_given = exp->count("--reg-scale") > 0;

  try {
    if (exp->parsed()) return cmd_experiment(p);
    apply_config(p);
    if (gen->parsed()) return cmd_generate(p);
    if (obs->parsed()) return cmd_observe(p);
    if (est->parsed()) return cmd_estimate(p);
    if (dec->parsed()) return cmd_decompose(p);
    if (ana->parsed()) return cmd_analyze(p);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
