#include "permrank/harness.hpp"

#include "permrank/analyze.hpp"
#include "permrank/constructors.hpp"
#include "permrank/decomposition.hpp"
#include "permrank/io.hpp"
#include "permrank/observe.hpp"
#include "permrank/oracles.hpp"
#include "permrank/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#ifndef PERMRANK_BUILD_DESCRIBE
#define PERMRANK_BUILD_DESCRIBE "unknown"
#endif

namespace permrank {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn(i) for i in [0, count). Results must be written by index so the
// outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t size_key(Index n, Index d) {
  return mix64(static_cast<std::uint64_t>(n) * 0x100000001b3ULL ^ static_cast<std::uint64_t>(d));
}

std::string fmt(double v) { return format_number(v); }

PermutationPair random_pair(std::size_t n, std::size_t d, std::uint64_t seed) {
  return {random_permutation(n, seed, 0), random_permutation(d, seed, 1)};
}

}  // namespace

std::string build_describe() { return PERMRANK_BUILD_DESCRIBE; }

// --- Config -----------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (experiment_name.empty()) throw std::invalid_argument("ExperimentConfig: experiment_name is empty");
  if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be at least 1");
  if (size_grid.empty()) throw std::invalid_argument("ExperimentConfig: size_grid is empty");
  for (const auto& [n, d] : size_grid) {
    if (n < 1 || d < 1) throw DimensionError("ExperimentConfig: grid sizes must be positive");
  }
  require_p_obs(p_obs, "ExperimentConfig");
  if (threshold && (!std::isfinite(*threshold) || *threshold < 0.0)) {
    throw std::invalid_argument("ExperimentConfig: threshold must be finite and non-negative");
  }
  if (!(reg_scale > 0.0)) throw std::invalid_argument("ExperimentConfig: reg_scale must be positive");
  if (rho < 1) throw std::invalid_argument("ExperimentConfig: rho must be positive");
  if (threads < 0) throw std::invalid_argument("ExperimentConfig: threads must be non-negative");
  projection.validate();
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& [n, d] : size_grid) grid.push_back({n, d});
  nlohmann::json j{{"experiment_name", experiment_name},
                   {"size_grid", grid},
                   {"p_obs", p_obs},
                   {"trials", trials},
                   {"seed", seed},
                   {"reg_scale", reg_scale},
                   {"rho", rho},
                   {"projection",
                    {{"tolerance", projection.tolerance},
                     {"max_iterations", projection.max_iterations},
                     {"lower_bound", projection.lower_bound},
                     {"upper_bound", projection.upper_bound}}}};
  j["threshold"] = threshold ? nlohmann::json(*threshold) : nlohmann::json(nullptr);
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, ExperimentConfig base) {
  if (!j.is_object()) throw std::invalid_argument("ExperimentConfig: JSON config must be an object");
  if (j.contains("experiment_name")) base.experiment_name = j.at("experiment_name").get<std::string>();
  if (j.contains("size_grid")) {
    base.size_grid.clear();
    for (const auto& e : j.at("size_grid")) {
      if (e.is_number_integer()) {
        base.size_grid.emplace_back(e.get<Index>(), e.get<Index>());
      } else {
        base.size_grid.emplace_back(e.at(0).get<Index>(), e.at(1).get<Index>());
      }
    }
  }
  if (j.contains("p_obs")) base.p_obs = j.at("p_obs").get<double>();
  if (j.contains("trials")) base.trials = j.at("trials").get<int>();
  if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threshold")) {
    base.threshold = j.at("threshold").is_null() ? std::nullopt : std::optional<double>(j.at("threshold").get<double>());
  }
  if (j.contains("reg_scale")) base.reg_scale = j.at("reg_scale").get<double>();
  if (j.contains("rho")) base.rho = j.at("rho").get<int>();
  if (j.contains("threads")) base.threads = j.at("threads").get<int>();
  if (j.contains("projection")) {
    const auto& p = j.at("projection");
    if (p.contains("tolerance")) base.projection.tolerance = p.at("tolerance").get<double>();
    if (p.contains("max_iterations")) base.projection.max_iterations = p.at("max_iterations").get<int>();
  }
  base.validate();
  return base;
}

// --- Records ----------------------------------------------------------------

void ExperimentRecord::summarize() {
  if (trials.empty()) {
    mean = median = stderr_mean = 0.0;
    return;
  }
  std::vector<double> e;
  e.reserve(trials.size());
  for (const auto& t : trials) e.push_back(t.error);
  const auto m = static_cast<double>(e.size());
  mean = std::accumulate(e.begin(), e.end(), 0.0) / m;
  std::vector<double> sorted = e;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  median = sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  if (e.size() < 2) {
    stderr_mean = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : e) ss += (v - mean) * (v - mean);
  stderr_mean = std::sqrt(ss / (m - 1.0) / m);
}

SlopeFit fit_log_log_slope(std::span<const double> x, std::span<const double> y, double min_r_squared) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_log_log_slope: need two or more points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_log_log_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto m = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_log_log_slope: x values must not all be equal");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  f.conclusive = f.r_squared >= min_r_squared;
  return f;
}

// --- SVT scaling ------------------------------------------------------------

const char* family_name(SvtFamily f) {
  switch (f) {
    case SvtFamily::kTriangular: return "triangular";
    case SvtFamily::kNonNegativeRank2: return "nn-rank-2";
  }
  return "?";
}

ExperimentRecord run_svt_trials(SvtFamily family, Index n, Index d, const ExperimentConfig& cfg) {
  cfg.validate();
  if (family == SvtFamily::kTriangular) d = n;
  const auto start = Clock::now();
  ExperimentRecord rec;
  rec.experiment = cfg.experiment_name;
  rec.family = family_name(family);
  rec.n = n;
  rec.d = d;
  rec.p_obs = cfg.p_obs;
  rec.root_seed = cfg.seed;
  rec.trials.resize(static_cast<std::size_t>(cfg.trials));

  const SvtConfig svt{cfg.threshold.value_or(default_svt_threshold(n, d, cfg.p_obs)), true};
  const CounterRng root(cfg.seed);
  const std::uint64_t key = size_key(n, d);
  std::optional<UnitIntervalMatrix> fixed;
  if (family == SvtFamily::kTriangular) fixed = make_triangular_halves(n);

  parallel_for(cfg.trials, cfg.threads, [&](int t) {
    const std::uint64_t trial_seed = root.derive(static_cast<std::uint64_t>(t)).seed();
    const CounterRng trial(trial_seed);
    const UnitIntervalMatrix truth =
        fixed ? *fixed : generate_convex_combination_model(n, d, 2, trial.derive(key).seed());
    const ObservationMatrix y = sample_observations(truth, cfg.p_obs, trial.derive(key + 1).seed());
    const DenseMatrix est = svt_estimate(y, svt);
    rec.trials[static_cast<std::size_t>(t)] = {t, trial_seed, normalized_sq_error(est, truth.matrix())};
  });
  rec.summarize();
  rec.wall_seconds = seconds_since(start);
  return rec;
}

std::vector<ExperimentRecord> SvtScalingReport::all() const {
  std::vector<ExperimentRecord> out = triangular;
  out.insert(out.end(), nn_rank.begin(), nn_rank.end());
  return out;
}

SvtScalingReport run_svt_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  Index lo = cfg.size_grid.front().first;
  Index hi = lo;
  for (const auto& [n, d] : cfg.size_grid) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  if (cfg.size_grid.size() < 4 || hi < 8 * lo) {
    throw std::invalid_argument("run_svt_scaling: size_grid needs at least four sizes spanning a factor of 8 in n");
  }
  SvtScalingReport r;
  std::vector<double> ns, tri, nn;
  for (const auto& [n, d] : cfg.size_grid) {
    r.triangular.push_back(run_svt_trials(SvtFamily::kTriangular, n, d, cfg));
    r.nn_rank.push_back(run_svt_trials(SvtFamily::kNonNegativeRank2, n, d, cfg));
    ns.push_back(static_cast<double>(n));
    tri.push_back(r.triangular.back().mean);
    nn.push_back(r.nn_rank.back().mean);
  }
  r.triangular_fit = fit_log_log_slope(ns, tri);
  r.nn_rank_fit = fit_log_log_slope(ns, nn);
  return r;
}

HalvingReport run_p_obs_halving(Index n, const ExperimentConfig& cfg) {
  HalvingReport r;
  r.full = run_svt_trials(SvtFamily::kTriangular, n, n, cfg);
  ExperimentConfig half = cfg;
  half.p_obs = cfg.p_obs / 2.0;
  r.half = run_svt_trials(SvtFamily::kTriangular, n, n, half);
  r.median_ratio = r.full.median > 0.0 ? r.half.median / r.full.median : 0.0;
  return r;
}

// --- Suites -----------------------------------------------------------------

bool SuiteReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return {{"suite", suite}, {"pass", all_pass()}, {"checks", arr}};
}

SuiteReport run_failure_suite(std::uint64_t seed, const FailureSuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "failure";
  (void)seed;  // every construction here is deterministic

  const TwoStepCounterexample cex = make_two_step_counterexample(opts.two_step_size, opts.two_step_size);
  for (bool distinct : {false, true}) {
    TwoStepOptions ts;
    ts.rho_star = 2;
    ts.distinct_permutations = distinct;
    ts.projection = opts.projection;
    const TwoStepResult res = two_step_estimate(cex.m_star.matrix(), ts);
    const double err = normalized_sq_error(res.estimate, cex.m_star.matrix());
    std::ostringstream os;
    os << "n=" << opts.two_step_size << " error=" << fmt(err) << " sweeps=" << res.fit_sweeps;
    rep.checks.push_back({distinct ? "two-step-distinct-error" : "two-step-error", err >= 0.01, os.str()});
  }

  {
    DenseMatrix m(2, 2);
    m << 0.0, 0.6, 0.6, 0.4;
    GreedyOptions g;
    g.projection = opts.projection;
    const GreedyResult res = greedy_decompose(UnitIntervalMatrix(m), g);
    DenseMatrix expected(2, 2);
    expected << 0.0, 0.4, 0.4, 0.4;
    const double diff =
        res.components.empty() ? 1.0 : (res.components.front().matrix().matrix() - expected).cwiseAbs().maxCoeff();
    rep.checks.push_back({"greedy-first-step", diff <= 1e-8, "max deviation " + fmt(diff)});
    const bool many = res.components.size() >= 3 || !res.terminated;
    rep.checks.push_back({"greedy-overcount-2x2", many,
                          "components=" + std::to_string(res.components.size()) +
                              (res.terminated ? "" : " (did not terminate)")});
  }

  {
    GreedyOptions g;
    g.projection = opts.projection;
    const GreedyResult res = greedy_decompose(make_greedy_counterexample(2, 4, 4), g);
    const bool many = res.components.size() >= 3 || !res.terminated;
    rep.checks.push_back({"greedy-overcount-block", many,
                          "rho=2 n=d=4 components=" + std::to_string(res.components.size())});
  }

  {
    // One representative row and column from each of the three groups.
    const auto& g = cex.row_groups;
    const std::array<Index, 3> idx{1, 1 + g[0], 1 + g[0] + g[1]};
    DenseMatrix slice(3, 3);
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) slice(i, j) = cex.m_star(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    const RegularizedLsResult bf =
        brute_force_regularized_ls(slice, 1.0, 2, RegularizerSpec{opts.slice_reg_scale, 2.01}, opts.projection);
    TwoStepOptions ts;
    ts.rho_star = 2;
    ts.projection = opts.projection;
    const TwoStepResult two = two_step_estimate(slice, ts);
    const double e_bf = normalized_sq_error(bf.estimate, slice);
    const double e_two = normalized_sq_error(two.estimate, slice);
    rep.checks.push_back({"bruteforce-vs-two-step-slice", e_bf <= e_two + 1e-9,
                          "bruteforce=" + fmt(e_bf) + " (k=" + std::to_string(bf.chosen_k) + ") two-step=" + fmt(e_two)});
  }
  return rep;
}

namespace {

DenseMatrix ls_truth() {
  DenseMatrix t(4, 4);
  t << 0.0, 0.1, 0.5, 0.9,  //
      0.1, 0.3, 0.7, 1.0,   //
      0.2, 0.5, 0.9, 1.0,   //
      0.5, 0.8, 1.0, 1.0;
  const PermutationPair p{Permutation({2, 0, 3, 1}), Permutation({1, 3, 0, 2})};
  return apply_permutation_pair(t, p);
}

// Mix of members (with ties), near-members and generic matrices.
DenseMatrix membership_instance(int i, std::uint64_t seed) {
  const CounterRng rng(seed);
  const auto draw = [&](std::uint64_t k) { return rng.uniform(streams::kGenerator, k); };
  DenseMatrix m(4, 4);
  const int kind = i % 4;
  if (kind == 3) {
    for (Index k = 0; k < 16; ++k) m.data()[k] = draw(static_cast<std::uint64_t>(k));
    return m;
  }
  if (kind == 2) {
    for (Index k = 0; k < 16; ++k) m.data()[k] = std::floor(draw(static_cast<std::uint64_t>(k)) * 3.0) / 2.0;
    return m;
  }
  std::array<double, 4> q{}, r{};
  for (std::size_t k = 0; k < 4; ++k) {
    q[k] = std::floor(draw(100 + k) * 3.0) * 0.25;
    r[k] = std::floor(draw(200 + k) * 3.0) * 0.25;
  }
  std::sort(q.begin(), q.end());
  std::sort(r.begin(), r.end());
  for (Index a = 0; a < 4; ++a) {
    for (Index b = 0; b < 4; ++b) m(a, b) = std::min(1.0, q[static_cast<std::size_t>(a)] + r[static_cast<std::size_t>(b)]);
  }
  if (kind == 1) {
    const auto k = static_cast<Index>(std::min(15.0, draw(300) * 16.0));
    m.data()[k] = std::clamp(m.data()[k] + (draw(301) < 0.5 ? -0.25 : 0.25), 0.0, 1.0);
  }
  return apply_permutation_pair(m, random_pair(4, 4, seed));
}

}  // namespace

SuiteReport run_oracle_suite(std::uint64_t seed, const OracleSuiteOptions& opts) {
  SuiteReport rep;
  rep.suite = "oracle";
  const CounterRng root(seed);
  const RegularizerSpec spec{opts.reg_scale, 2.01};

  {
    const DenseMatrix truth =
        apply_permutation_pair(make_upper_triangular_ones(4).matrix(), PermutationPair{Permutation({3, 1, 0, 2}),
                                                                                       Permutation({1, 2, 3, 0})});
    const RegularizedLsResult r = brute_force_regularized_ls(ObservationMatrix(truth, 1.0), 1, spec, opts.projection);
    const double err = normalized_sq_error(r.estimate, truth);
    rep.checks.push_back({"ls-noiseless", err < 1e-10, "error=" + fmt(err) + " k=" + std::to_string(r.chosen_k)});
  }

  {
    const UnitIntervalMatrix truth(ls_truth());
    const int trials = opts.ls_trials;
    std::vector<double> ls_full(static_cast<std::size_t>(trials)), ls_half(ls_full.size()), svt_full(ls_full.size());
    parallel_for(trials, 0, [&](int t) {
      const CounterRng trial = root.derive(1000 + static_cast<std::uint64_t>(t));
      const ObservationMatrix y1 = sample_observations(truth, 1.0, trial.derive(1).seed());
      const ObservationMatrix yh = sample_observations(truth, 0.5, trial.derive(2).seed());
      const auto i = static_cast<std::size_t>(t);
      ls_full[i] = normalized_sq_error(brute_force_regularized_ls(y1, 1, spec, opts.projection).estimate, truth.matrix());
      ls_half[i] = normalized_sq_error(brute_force_regularized_ls(yh, 1, spec, opts.projection).estimate, truth.matrix());
      svt_full[i] =
          normalized_sq_error(svt_estimate(y1, SvtConfig{default_svt_threshold(4, 4, 1.0), true}), truth.matrix());
    });
    const auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    const double m1 = mean(ls_full), mh = mean(ls_half), ms = mean(svt_full);
    rep.checks.push_back({"ls-p-obs-direction", m1 < mh,
                          "mean error p=1: " + fmt(m1) + ", p=0.5: " + fmt(mh) + " over " + std::to_string(trials)});
    rep.checks.push_back({"ls-below-svt", m1 < ms, "mean error LS: " + fmt(m1) + ", SVT: " + fmt(ms)});
  }

  {
    double worst = 0.0;
    std::vector<double> diffs(static_cast<std::size_t>(opts.projection_instances));
    parallel_for(opts.projection_instances, 0, [&](int i) {
      const CounterRng rng = root.derive(20000 + static_cast<std::uint64_t>(i));
      DenseMatrix target(3, 3);
      for (Index k = 0; k < 9; ++k) target.data()[k] = -0.25 + 1.5 * rng.uniform(streams::kGenerator, static_cast<std::uint64_t>(k));
      const PermutationPair p = random_pair(3, 3, rng.seed());
      const DenseMatrix ours = project_bimonotone(target, p, opts.projection).matrix;
      const DenseMatrix ref = oracle::qp_project_bimonotone(target, p, DenseMatrix::Zero(3, 3), DenseMatrix::Ones(3, 3));
      diffs[static_cast<std::size_t>(i)] = (ours - ref).cwiseAbs().maxCoeff();
    });
    for (double v : diffs) worst = std::max(worst, v);
    rep.checks.push_back({"projection-vs-qp", worst <= 1e-6,
                          std::to_string(opts.projection_instances) + " instances, max deviation " + fmt(worst)});
  }

  {
    std::vector<int> agree(static_cast<std::size_t>(opts.membership_instances));
    std::vector<int> member(agree.size());
    parallel_for(opts.membership_instances, 0, [&](int i) {
      const DenseMatrix m = membership_instance(i, root.derive(40000 + static_cast<std::uint64_t>(i)).seed());
      const bool fast = pr1_membership(UnitIntervalMatrix(m)).member;
      const bool slow = oracle::pr1_by_enumeration(m);
      agree[static_cast<std::size_t>(i)] = fast == slow ? 1 : 0;
      member[static_cast<std::size_t>(i)] = slow ? 1 : 0;
    });
    const int n_agree = std::accumulate(agree.begin(), agree.end(), 0);
    const int n_member = std::accumulate(member.begin(), member.end(), 0);
    rep.checks.push_back({"membership-vs-enumeration", n_agree == opts.membership_instances,
                          std::to_string(n_agree) + "/" + std::to_string(opts.membership_instances) + " agree, " +
                              std::to_string(n_member) + " members"});
  }
  return rep;
}

// --- Emission ---------------------------------------------------------------

std::string format_records_csv(std::span<const ExperimentRecord> records) {
  std::string out = "experiment,family,n,d,p_obs,trial,seed,error\n";
  for (const auto& r : records) {
    for (const auto& t : r.trials) {
      out += r.experiment + "," + r.family + "," + std::to_string(r.n) + "," + std::to_string(r.d) + "," +
             fmt(r.p_obs) + "," + std::to_string(t.trial) + "," + std::to_string(t.seed) + "," + fmt(t.error) + "\n";
    }
  }
  return out;
}

void emit_results(std::span<const ExperimentRecord> records, const std::filesystem::path& dir, const std::string& stem,
                  const nlohmann::json& config, const nlohmann::json& extra) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  nlohmann::json recs = nlohmann::json::array();
  std::size_t total = 0;
  for (const auto& r : records) {
    total += r.trials.size();
    recs.push_back({{"experiment", r.experiment},
                    {"family", r.family},
                    {"n", r.n},
                    {"d", r.d},
                    {"p_obs", r.p_obs},
                    {"root_seed", r.root_seed},
                    {"trials", r.trials.size()},
                    {"mean", r.mean},
                    {"median", r.median},
                    {"stderr", r.stderr_mean},
                    {"wall_seconds", r.wall_seconds}});
  }
  nlohmann::json summary{{"build", build_describe()},
                         {"config", config},
                         {"seed", config.contains("seed") ? config.at("seed") : nlohmann::json(nullptr)},
                         {"trials", total},
                         {"records", recs}};
  for (const auto& [k, v] : extra.items()) summary[k] = v;

  write_file_atomic(dir / (stem + ".csv"), format_records_csv(records));
  write_file_atomic(dir / (stem + ".json"), summary.dump(2) + "\n");
}

}  // namespace permrank
