#include "permrank/constructors.hpp"
#include "permrank/linalg.hpp"
#include "permrank/observe.hpp"
#include "permrank/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace permrank;

namespace {

UnitIntervalMatrix small_truth() {
  DenseMatrix m(4, 4);
  m << 0.0, 0.1, 0.5, 0.9,  //
      0.1, 0.3, 0.7, 1.0,   //
      0.2, 0.5, 0.9, 1.0,   //
      0.5, 0.8, 1.0, 1.0;
  return UnitIntervalMatrix(m);
}

}  // namespace

TEST(Observations, DegenerateTruths) {
  const ObservationMatrix ones = sample_observations(UnitIntervalMatrix(DenseMatrix::Ones(5, 3)), 1.0, 1);
  EXPECT_EQ(ones.values(), DenseMatrix::Ones(5, 3));
  const ObservationMatrix zeros = sample_observations(UnitIntervalMatrix(DenseMatrix::Zero(5, 3)), 1.0, 1);
  EXPECT_EQ(zeros.values(), DenseMatrix::Zero(5, 3));
}

TEST(Observations, EntriesAreExactSymbols) {
  const ObservationMatrix y = sample_observations(small_truth(), 0.4, 3);
  for (Index k = 0; k < y.values().size(); ++k) {
    const double v = y.values().data()[k];
    EXPECT_TRUE(v == 0.0 || v == 0.5 || v == 1.0) << v;
  }
}

TEST(Observations, RejectsBadInputs) {
  EXPECT_THROW(sample_observations(small_truth(), 0.0, 1), std::invalid_argument);
  EXPECT_THROW(sample_observations(small_truth(), 1.5, 1), std::invalid_argument);
  EXPECT_THROW(ObservationMatrix(DenseMatrix::Constant(2, 2, 0.25), 1.0), std::invalid_argument);
  EXPECT_THROW(ObservationMatrix(DenseMatrix::Zero(2, 2), -0.1), std::invalid_argument);
}

TEST(Observations, DeterministicGivenSeed) {
  EXPECT_EQ(sample_observations(small_truth(), 0.5, 11).values(), sample_observations(small_truth(), 0.5, 11).values());
  EXPECT_NE(sample_observations(small_truth(), 0.5, 11).values(), sample_observations(small_truth(), 0.5, 12).values());
}

TEST(Recenter, Arithmetic) {
  DenseMatrix v(1, 3);
  v << 0.0, 0.5, 1.0;
  EXPECT_EQ(recenter(ObservationMatrix(v, 1.0)), v);
  const DenseMatrix half = recenter(ObservationMatrix(v, 0.5));
  EXPECT_DOUBLE_EQ(half(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(half(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(half(0, 2), 1.5);
  EXPECT_LE((uncenter(half, 0.5) - v).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Recenter, UnbiasedMonteCarlo) {
  const UnitIntervalMatrix truth = small_truth();
  const int trials = 10000;
  const double p = 0.3;
  DenseMatrix sum = DenseMatrix::Zero(4, 4), sum_sq = DenseMatrix::Zero(4, 4);
  const CounterRng root(77);
  for (int t = 0; t < trials; ++t) {
    const DenseMatrix y = recenter(sample_observations(truth, p, root.derive(static_cast<std::uint64_t>(t)).seed()));
    sum += y;
    sum_sq += y.cwiseProduct(y);
  }
  const DenseMatrix mean = sum / trials;
  for (Index k = 0; k < 16; ++k) {
    const double var = sum_sq.data()[k] / trials - mean.data()[k] * mean.data()[k];
    const double se = std::sqrt(var / trials);
    EXPECT_LE(std::abs(mean.data()[k] - truth.matrix().data()[k]), 3.0 * se + 1e-12) << k;
  }
}

TEST(EstimatePObs, EdgesAndConcentration) {
  EXPECT_EQ(estimate_p_obs(ObservationMatrix(DenseMatrix::Constant(3, 3, 0.5), 0.2)), 0.0);
  EXPECT_EQ(estimate_p_obs(ObservationMatrix(DenseMatrix::Ones(3, 3), 0.2)), 1.0);
  const UnitIntervalMatrix truth(DenseMatrix::Constant(200, 200, 0.7));
  int within = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    if (std::abs(estimate_p_obs(sample_observations(truth, 0.3, s)) - 0.3) <= 0.02) ++within;
  }
  EXPECT_GE(within, 99);
}

TEST(Noise, HalfTruthGivesSymmetricSigns) {
  const NoiseMatrix w = sample_noise_matrix(UnitIntervalMatrix(DenseMatrix::Constant(30, 30, 0.5)), 1.0, 5);
  int plus = 0;
  for (Index k = 0; k < w.values().size(); ++k) {
    const double v = w.values().data()[k];
    ASSERT_TRUE(v == 0.5 || v == -0.5) << v;
    plus += v > 0 ? 1 : 0;
  }
  EXPECT_GT(plus, 350);
  EXPECT_LT(plus, 550);
}

TEST(Noise, ZeroMean) {
  const UnitIntervalMatrix truth(DenseMatrix::Constant(100, 100, 0.3));
  double sum = 0.0, sum_sq = 0.0;
  const int trials = 10;  // 10 x 10^4 = 10^5 entries
  for (int t = 0; t < trials; ++t) {
    const DenseMatrix w = sample_noise_matrix(truth, 0.6, 100 + static_cast<std::uint64_t>(t)).values();
    sum += w.sum();
    sum_sq += w.squaredNorm();
  }
  const double count = trials * 1e4;
  const double mean = sum / count;
  const double se = std::sqrt((sum_sq / count - mean * mean) / count);
  EXPECT_LE(std::abs(mean), 3.0 * se);
}

TEST(Noise, CoupledWithObservations) {
  const UnitIntervalMatrix truth = small_truth();
  for (double p : {1.0, 0.7, 0.2}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const DenseMatrix y = recenter(sample_observations(truth, p, s));
      const DenseMatrix w = sample_noise_matrix(truth, p, s).values();
      EXPECT_LE((y - truth.matrix() - w / p).cwiseAbs().maxCoeff(), 1e-12) << p << " " << s;
      EXPECT_LE(w.cwiseAbs().maxCoeff(), 1.0);
    }
  }
}

TEST(OpNormCheck, TinyMatrixAlwaysWithinBound) {
  const OpNormCheck c = empirical_opnorm_check(2, 2, 1.0, 50, 1);
  EXPECT_EQ(c.fraction_within, 1.0);
  for (double v : c.op_norms) EXPECT_LE(v, 2.0 + 1e-12);
}

TEST(OpNormCheck, RatioStableAcrossSizes) {
  std::vector<double> medians;
  for (Index n : {100, 200, 400}) {
    OpNormCheck c = empirical_opnorm_check(n, n, 1.0, 9, 3);
    std::sort(c.op_norms.begin(), c.op_norms.end());
    medians.push_back(c.op_norms[4] / std::sqrt(2.0 * static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  EXPECT_LE(*hi / *lo, 1.1);
}

TEST(OperatorNorm, PowerIterationMatchesSvd) {
  const UnitIntervalMatrix m = generate_convex_combination_model(150, 90, 3, 8);
  const NoiseMatrix w = sample_noise_matrix(m, 0.5, 4);
  EXPECT_NEAR(operator_norm(w.values()), singular_values(w.values())(0), 1e-6);
}
