// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include "permrank/analyze.hpp"
#include "permrank/constructors.hpp"
#include "permrank/decomposition.hpp"
#include "permrank/estimate.hpp"
#include "permrank/harness.hpp"
#include "permrank/observe.hpp"
#include "permrank/oracles.hpp"
#include "permrank/projection.hpp"
#include "permrank/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace permrank;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %-28s %8.2fs (limit %.0fs) %s%s\n", pass ? "PASS" : "FAIL", id, name, secs, budget_seconds,
              o.detail.c_str(), in_time ? "" : " [over time]");
  std::fflush(stdout);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double nsq(const DenseMatrix& a, const DenseMatrix& b) {
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

DenseMatrix uniform_matrix(Index n, Index d, const CounterRng& rng, double lo, double hi) {
  DenseMatrix m(n, d);
  for (Index k = 0; k < m.size(); ++k) {
    m.data()[k] = lo + (hi - lo) * rng.uniform(streams::kGenerator, static_cast<std::uint64_t>(k));
  }
  return m;
}

PermutationPair random_pair(Index n, Index d, std::uint64_t seed) {
  return {random_permutation(static_cast<std::size_t>(n), seed, 0),
          random_permutation(static_cast<std::size_t>(d), seed, 1)};
}

// Members, near-members, tie-heavy and generic 4x4 matrices in rotation.
DenseMatrix membership_instance(int i, std::uint64_t seed) {
  const CounterRng rng(seed);
  switch (i % 4) {
    case 0:
      return random_bimonotone(4, 4, seed).matrix().matrix();
    case 1: {
      DenseMatrix m = random_bimonotone(4, 4, seed).matrix().matrix();
      const auto k = static_cast<Index>(rng.uniform(7, 0) * 16.0) % 16;
      m.data()[k] = rng.uniform(7, 1);
      return m;
    }
    case 2: {
      DenseMatrix m = uniform_matrix(4, 4, rng, 0.0, 1.0);
      return (m * 2.0).array().round().matrix() / 2.0;
    }
    default:
      return uniform_matrix(4, 4, rng, 0.0, 1.0);
  }
}

}  // namespace

int main() {
  std::printf("permrank acceptance (build %s)\n", build_describe().c_str());

  criterion(1, "greedy-exactness", 1.0, [] {
    DenseMatrix m(2, 2);
    m << 0.0, 0.6, 0.6, 0.4;
    const GreedyResult r = greedy_decompose(UnitIntervalMatrix(m));
    DenseMatrix first(2, 2);
    first << 0.0, 0.4, 0.4, 0.4;
    const double dev = r.components.empty() ? 1.0 : (r.components.front().matrix().matrix() - first).cwiseAbs().maxCoeff();
    const bool pass = dev <= 1e-8 && r.components.size() >= 3;
    return Outcome{pass, "first-step deviation " + num(dev) + ", components " + std::to_string(r.components.size())};
  });

  criterion(2, "two-step-failure", 30.0, [] {
    const TwoStepCounterexample cex = make_two_step_counterexample(251, 251);
    TwoStepOptions opts;
    opts.rho_star = 2;
    const TwoStepResult r = two_step_estimate(cex.m_star.matrix(), opts);
    const double err = nsq(r.estimate, cex.m_star.matrix());
    return Outcome{err >= 0.01, "normalized error " + num(err) + ", need >= 0.01 (fit sweeps " +
                                    std::to_string(r.fit_sweeps) + ")"};
  });

  ExperimentConfig svt_cfg;
  svt_cfg.seed = 20160601;
  SvtScalingReport svt;
  bool svt_ran = false;
  const auto run_svt = [&] {
    if (svt_ran) return;
    svt = run_svt_scaling(svt_cfg);
    svt_ran = true;
  };

  criterion(3, "svt-rate-triangular", 300.0, [&] {
    run_svt();
    double fam = 0.0;
    for (const auto& r : svt.triangular) fam += r.wall_seconds;
    const SlopeFit& f = svt.triangular_fit;
    const bool pass = f.slope >= -0.65 && f.slope <= -0.35 && f.r_squared >= 0.8;
    return Outcome{pass, "slope " + num(f.slope) + " R2 " + num(f.r_squared) + ", family time " + num(fam) + "s"};
  });

  criterion(4, "svt-rate-nn-rank-2", 300.0, [&] {
    run_svt();
    double fam = 0.0;
    for (const auto& r : svt.nn_rank) fam += r.wall_seconds;
    const SlopeFit& f = svt.nn_rank_fit;
    const bool pass = f.slope >= -1.3 && f.slope <= -0.7 && f.r_squared >= 0.8;
    return Outcome{pass, "slope " + num(f.slope) + " R2 " + num(f.r_squared) + ", family time " + num(fam) + "s"};
  });

  criterion(5, "projection-correctness", 60.0, [] {
    const CounterRng root(5);
    double worst_qp = 0.0;
    for (int i = 0; i < 500; ++i) {
      const CounterRng rng = root.derive(static_cast<std::uint64_t>(i));
      const DenseMatrix t = uniform_matrix(3, 3, rng, -0.5, 1.5);
      const PermutationPair p = random_pair(3, 3, rng.seed());
      const DenseMatrix ours = project_bimonotone(t, p).matrix;
      const DenseMatrix ref = oracle::qp_project_bimonotone(t, p, DenseMatrix::Zero(3, 3), DenseMatrix::Ones(3, 3));
      worst_qp = std::max(worst_qp, (ours - ref).cwiseAbs().maxCoeff());
    }
    int expansive = 0;
    double worst_idem = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const CounterRng rng = root.derive(100000 + static_cast<std::uint64_t>(i));
      const DenseMatrix a = uniform_matrix(5, 5, rng.derive(0), -0.5, 1.5);
      const DenseMatrix b = uniform_matrix(5, 5, rng.derive(1), -0.5, 1.5);
      const PermutationPair p = random_pair(5, 5, rng.seed());
      const DenseMatrix pa = project_bimonotone(a, p).matrix;
      const DenseMatrix pb = project_bimonotone(b, p).matrix;
      if ((pa - pb).norm() > (a - b).norm() + 1e-8) ++expansive;
      worst_idem = std::max(worst_idem, (project_bimonotone(pa, p).matrix - pa).cwiseAbs().maxCoeff());
    }
    const bool pass = worst_qp <= 1e-6 && expansive == 0 && worst_idem <= 1e-8;
    return Outcome{pass, "QP max deviation " + num(worst_qp) + " over 500; expansive pairs " + std::to_string(expansive) +
                             "/1000; idempotence deviation " + num(worst_idem)};
  });

  criterion(6, "pr1-membership", 60.0, [] {
    const CounterRng root(6);
    int agree = 0, members = 0;
    for (int i = 0; i < 1000; ++i) {
      const DenseMatrix m = membership_instance(i, root.derive(static_cast<std::uint64_t>(i)).seed());
      const bool slow = oracle::pr1_by_enumeration(m);
      agree += pr1_membership(UnitIntervalMatrix(m)).member == slow ? 1 : 0;
      members += slow ? 1 : 0;
    }
    int ctor_ok = 0, ctor_total = 0;
    const auto expect = [&](const UnitIntervalMatrix& m, bool member) {
      ++ctor_total;
      if (pr1_membership(m).member == member) ++ctor_ok;
    };
    for (Index k : {1, 2, 5, 12}) expect(make_upper_triangular_ones(k), true);
    for (Index n : {2, 7, 16}) expect(make_triangular_halves(n), true);
    for (Index r : {1, 3, 5}) expect(make_rank_pair_matrix(1, r, 8, 6), true);
    for (Index rho : {2, 3}) {
      for (Index r : {rho, rho + 2}) expect(make_rank_pair_matrix(rho, r, 8, 8), false);
    }
    const bool pass = agree == 1000 && ctor_ok == ctor_total;
    return Outcome{pass, std::to_string(agree) + "/1000 agree (" + std::to_string(members) + " members); constructors " +
                             std::to_string(ctor_ok) + "/" + std::to_string(ctor_total)};
  });

  criterion(7, "spectral-tail-bounds", 120.0, [] {
    const CounterRng root(7);
    int pr_ok = 0, nn_ok = 0;
    const Index sizes[] = {8, 20, 35, 60};
    for (int i = 0; i < 200; ++i) {
      const CounterRng rng = root.derive(static_cast<std::uint64_t>(i));
      const Index rho = 1 + i % 3;
      const Index n = sizes[i % 4];
      const Index d = sizes[(i / 4) % 4];
      const PermRankDecomposition dec = random_perm_rank(rho, n, d, rng.seed());
      const Index s = 1 + static_cast<Index>(rng.uniform(9, 0) * static_cast<double>(std::min(n, d) - 1));
      pr_ok += verify_tail_bound_pr(dec, s).pass ? 1 : 0;

      const Index r = 1 + i % 5;
      const UnitIntervalMatrix m = generate_convex_combination_model(n, d, std::min({r, n, d}), rng.derive(1).seed());
      const Index rr = std::min({r, n, d});
      const Index s_nn = 1 + static_cast<Index>(rng.uniform(9, 1) * static_cast<double>(rr)) % rr;
      nn_ok += verify_tail_bound_nn(m, rr, s_nn).pass ? 1 : 0;
    }
    return Outcome{pr_ok == 200 && nn_ok == 200,
                   "PR " + std::to_string(pr_ok) + "/200, NN " + std::to_string(nn_ok) + "/200"};
  });

  criterion(8, "operator-norm-bound", 120.0, [] {
    const OpNormCheck c = empirical_opnorm_check(300, 300, 1.0, 200, 8);
    return Outcome{c.fraction_within >= 0.99,
                   "fraction within " + num(c.fraction_within) + " of 200, threshold " + num(c.threshold)};
  });

  criterion(9, "uniqueness-worked-example", 1.0, [] {
    DenseMatrix a(2, 2), b(2, 2), alt_a(2, 2), alt_b(2, 2);
    a << 0, .3, .3, .9;
    b << 1, .3, .3, .1;
    alt_a << 0, .4, .4, .9;
    alt_b << 1, .2, .2, .1;
    const PermRankDecomposition dec({BimonotoneComponent::certify(UnitIntervalMatrix(a)),
                                     BimonotoneComponent::certify(UnitIntervalMatrix(b))});
    const PermRankDecomposition alt({BimonotoneComponent::certify(UnitIntervalMatrix(alt_a)),
                                     BimonotoneComponent::certify(UnitIntervalMatrix(alt_b))});
    const UniquenessVerdict v = check_uniqueness_necessary(dec);
    const bool flagged = !v.satisfied && v.violations.size() == 1 && v.violations[0] == std::pair<Index, Index>{1, 1};
    const double gap = (alt.sum() - dec.sum()).cwiseAbs().maxCoeff();
    return Outcome{flagged && gap <= 1e-12,
                   std::string("(2,2) flagged ") + (flagged ? "only" : "no") + ", alternative sum gap " + num(gap)};
  });

  criterion(10, "hausdorff-convexity", 60.0, [] {
    bool bound_ok = true;
    double lo = 1e300, hi = 0.0;
    std::string vals;
    for (Index n : {16, 32, 64}) {
      const HausdorffReport r = hausdorff_gap_report(2, n, n);
      bound_ok = bound_ok && r.certificate >= 0.0025 * static_cast<double>(n * n) / 2.0;
      lo = std::min(lo, r.scaled);
      hi = std::max(hi, r.scaled);
      vals += num(r.scaled) + " ";
    }
    const ConvexityGap g = convexity_gap_estimate(2, 2);
    const bool pass = bound_ok && hi / lo <= 2.0 && std::abs(g.distance_sq - 1.0 / 6.0) <= 1e-6;
    return Outcome{pass, "scaled certificates " + vals + "(ratio " + num(hi / lo) + "), convexity gap " +
                             num(g.distance_sq)};
  });

  criterion(11, "bruteforce-ls", 300.0, [] {
    OracleSuiteOptions opts;
    opts.ls_trials = 200;
    opts.projection_instances = 0;
    opts.membership_instances = 0;
    const SuiteReport r = run_oracle_suite(11, opts);
    bool pass = true;
    std::string detail;
    for (const auto& c : r.checks) {
      if (c.name.rfind("ls-", 0) != 0) continue;
      pass = pass && c.pass;
      detail += c.name + ": " + c.detail + "; ";
    }
    return Outcome{pass, detail};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
