#include "permrank/constructors.hpp"
#include "permrank/decomposition.hpp"
#include "permrank/io.hpp"
#include "permrank/linalg.hpp"
#include "permrank/matrix.hpp"
#include "permrank/oracles.hpp"
#include "permrank/permutation.hpp"
#include "permrank/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

using namespace permrank;

namespace {

DenseMatrix mat(Index n, Index d, std::initializer_list<double> v) {
  DenseMatrix m(n, d);
  auto it = v.begin();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) m(i, j) = *it++;
  }
  return m;
}

DenseMatrix random_matrix(Index n, Index d, std::uint64_t seed) {
  const CounterRng rng(seed);
  DenseMatrix m(n, d);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(streams::kGenerator, static_cast<std::uint64_t>(k));
  return m;
}

}  // namespace

TEST(UnitIntervalMatrix, RejectsOutOfRangeUnlessClamped) {
  EXPECT_THROW(UnitIntervalMatrix(mat(1, 2, {0.5, 1.5})), std::invalid_argument);
  EXPECT_THROW(UnitIntervalMatrix(mat(1, 2, {-1e-15, 0.0})), std::invalid_argument);
  const UnitIntervalMatrix c(mat(1, 2, {-0.5, 1.5}), Clamp::kYes);
  EXPECT_EQ(c.matrix(), mat(1, 2, {0.0, 1.0}));
  DenseMatrix nan = mat(1, 1, {0.0});
  nan(0, 0) = std::nan("");
  EXPECT_THROW(UnitIntervalMatrix{nan}, std::invalid_argument);
}

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(Permutation({0, 0}), std::invalid_argument);
  EXPECT_THROW(Permutation({0, 2}), std::invalid_argument);
  EXPECT_NO_THROW(Permutation({1, 0}));
}

TEST(Permutation, FromOrderAndRanking) {
  const std::vector<double> keys{0.3, -1.0, 0.3, 2.0};
  const Permutation r = Permutation::ranking(keys);
  // -1 first, then the tied 0.3 entries in index order, then 2.
  EXPECT_EQ(r.mapping(), (std::vector<std::size_t>{1, 0, 2, 3}));
  EXPECT_EQ(r.order(), (std::vector<std::size_t>{1, 0, 2, 3}));
  const std::vector<std::size_t> order{2, 0, 1};
  const Permutation p = Permutation::from_order(order);
  EXPECT_EQ(p.order(), order);
  EXPECT_EQ(p.inverse().inverse(), p);
}

TEST(ApplyPermutationPair, IdentityAndRowSwap) {
  const DenseMatrix m = mat(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(apply_permutation_pair(m, PermutationPair::identity(2, 2)), m);
  const PermutationPair swap{Permutation({1, 0}), Permutation::identity(2)};
  EXPECT_EQ(apply_permutation_pair(m, swap), mat(2, 2, {3, 4, 1, 2}));
}

TEST(ApplyPermutationPair, InverseRoundTripAndEntryMultiset) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DenseMatrix m = random_matrix(3, 3, s);
    const auto pairs = all_permutation_pairs(3, 3);
    const PermutationPair& p = pairs[static_cast<std::size_t>(s * 7 % pairs.size())];
    const DenseMatrix out = apply_permutation_pair(m, p);
    EXPECT_EQ(apply_permutation_pair(out, p.inverse()), m);
    EXPECT_NEAR(out.squaredNorm(), m.squaredNorm(), 1e-12);
    std::vector<double> a(m.data(), m.data() + m.size()), b(out.data(), out.data() + out.size());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(ApplyPermutationPair, DimensionMismatchThrows) {
  EXPECT_THROW(apply_permutation_pair(DenseMatrix::Zero(2, 3), PermutationPair::identity(2, 2)), DimensionError);
}

TEST(AllPermutations, CountsAndOrder) {
  EXPECT_EQ(all_permutations(4).size(), 24u);
  EXPECT_EQ(all_permutation_pairs(3, 2).size(), 12u);
  const auto ps = all_permutations(3);
  EXPECT_TRUE(std::is_sorted(ps.begin(), ps.end()));
  EXPECT_EQ(ps.front(), Permutation::identity(3));
}

TEST(Constructors, UpperTriangularOnes) {
  EXPECT_EQ(make_upper_triangular_ones(1).matrix(), mat(1, 1, {1}));
  EXPECT_EQ(make_upper_triangular_ones(2).matrix(), mat(2, 2, {1, 1, 0, 1}));
  EXPECT_EQ(make_upper_triangular_ones(3).matrix(), mat(3, 3, {1, 1, 1, 0, 1, 1, 0, 0, 1}));
  EXPECT_THROW(make_upper_triangular_ones(0), DimensionError);
  for (Index k = 1; k <= 8; ++k) EXPECT_TRUE(pr1_membership(make_upper_triangular_ones(k)).member) << k;
}

TEST(Constructors, RankPairMatrix) {
  EXPECT_EQ(make_rank_pair_matrix(1, 1, 2, 2).matrix(), mat(2, 2, {1, 0, 0, 0}));
  EXPECT_EQ(make_rank_pair_matrix(2, 3, 4, 4).matrix(),
            mat(4, 4, {1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0}));
  EXPECT_EQ(numerical_rank(make_rank_pair_matrix(2, 3, 5, 5).matrix()), 3);
  EXPECT_THROW(make_rank_pair_matrix(3, 2, 5, 5), std::invalid_argument);
  EXPECT_THROW(make_rank_pair_matrix(1, 6, 5, 5), std::invalid_argument);
}

TEST(Constructors, RankPairMembershipIffRhoOne) {
  for (Index n : {3, 4, 6}) {
    for (Index r = 1; r <= n; ++r) {
      for (Index rho = 1; rho <= r; ++rho) {
        const UnitIntervalMatrix m = make_rank_pair_matrix(rho, r, n, n + 1);
        EXPECT_EQ(pr1_membership(m).member, rho == 1) << rho << " " << r << " " << n;
        EXPECT_EQ(numerical_rank(m.matrix()), r);
      }
    }
  }
}

TEST(Constructors, TriangularHalves) {
  EXPECT_EQ(make_triangular_halves(1).matrix(), mat(1, 1, {0.5}));
  EXPECT_EQ(make_triangular_halves(2).matrix(), mat(2, 2, {0.5, 0, 1, 0.5}));
  EXPECT_TRUE(pr1_membership(make_triangular_halves(6)).member);
  EXPECT_EQ(numerical_rank(make_triangular_halves(12).matrix()), 12);
}

TEST(Constructors, HausdorffBlock) {
  EXPECT_EQ(make_hausdorff_block(1, 2, 2).matrix.matrix(), mat(2, 2, {1, 1, 1, 0}));
  EXPECT_EQ(make_hausdorff_block(2, 4, 4).matrix.matrix(),
            mat(4, 4, {1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 0}));
  EXPECT_THROW(make_hausdorff_block(3, 4, 4), std::invalid_argument);

  const HausdorffBlock hb = make_hausdorff_block(2, 8, 8);
  const Eigen::VectorXd whole = singular_values(hb.matrix.matrix());
  const Eigen::VectorXd one = singular_values(hb.block);
  std::vector<double> expected;
  for (int copy = 0; copy < 2; ++copy) expected.insert(expected.end(), one.data(), one.data() + one.size());
  std::sort(expected.rbegin(), expected.rend());
  ASSERT_EQ(whole.size(), static_cast<Index>(expected.size()));
  for (Index i = 0; i < whole.size(); ++i) EXPECT_NEAR(whole(i), expected[static_cast<std::size_t>(i)], 1e-10);
}

TEST(Constructors, HausdorffBlockFloorsOddSizes) {
  const HausdorffBlock hb = make_hausdorff_block(2, 9, 11);
  EXPECT_EQ(hb.effective_rows, 8);
  EXPECT_EQ(hb.effective_cols, 8);
  EXPECT_EQ(hb.matrix.rows(), 9);
  EXPECT_EQ(hb.matrix.cols(), 11);
  EXPECT_EQ(hb.matrix.matrix().bottomRows(1).squaredNorm(), 0.0);
}

TEST(Constructors, ConvexityWitnessPair) {
  const auto [m1, m2] = make_convexity_witness_pair(2, 2);
  EXPECT_EQ(m1.matrix(), mat(2, 2, {1, 0, 0, 0}));
  EXPECT_EQ(m2.matrix(), mat(2, 2, {0, 0, 0, 1}));
  EXPECT_EQ(0.5 * (m1.matrix() + m2.matrix()), mat(2, 2, {0.5, 0, 0, 0.5}));
  const auto [a, b] = make_convexity_witness_pair(5, 4);
  EXPECT_TRUE(pr1_membership(a).member);
  EXPECT_TRUE(pr1_membership(b).member);
}

TEST(Constructors, ConvexCombinationModel) {
  EXPECT_EQ(numerical_rank(generate_convex_combination_model(15, 12, 1, 3).matrix()), 1);
  EXPECT_LE(numerical_rank(generate_convex_combination_model(20, 20, 2, 4).matrix()), 2);
  EXPECT_EQ(generate_convex_combination_model(20, 20, 2, 9), generate_convex_combination_model(20, 20, 2, 9));
  EXPECT_FALSE(generate_convex_combination_model(20, 20, 2, 9) == generate_convex_combination_model(20, 20, 2, 10));
}

TEST(Constructors, GreedyCounterexample) {
  const DenseMatrix m = make_greedy_counterexample(3, 4, 5).matrix();
  EXPECT_EQ(m(0, 1), 0.6);
  EXPECT_EQ(m(1, 1), 0.4);
  EXPECT_EQ(m(2, 2), 1.0);
  EXPECT_EQ(m.sum(), 0.6 + 0.6 + 0.4 + 1.0);
  EXPECT_FALSE(pr1_membership(UnitIntervalMatrix(m)).member);
}

TEST(Membership, SmallExamples) {
  const MembershipResult j2 = pr1_membership(UnitIntervalMatrix(mat(2, 2, {1, 1, 0, 1})));
  ASSERT_TRUE(j2.member);
  ASSERT_TRUE(j2.witness.has_value());
  EXPECT_TRUE(is_bimonotone_under(mat(2, 2, {1, 1, 0, 1}), *j2.witness));
  const MembershipResult id = pr1_membership(UnitIntervalMatrix(mat(2, 2, {1, 0, 0, 1})));
  EXPECT_FALSE(id.member);
  EXPECT_FALSE(id.witness.has_value());
}

TEST(Membership, AgreesWithEnumerationOnRandomMatrices) {
  int members = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    DenseMatrix m = random_matrix(4, 4, s);
    if (s % 2 == 0) {
      // Coarse values make ties and members common.
      m = (m * 2.0).array().floor().matrix() / 2.0;
    }
    const bool fast = pr1_membership(UnitIntervalMatrix(m)).member;
    ASSERT_EQ(fast, oracle::pr1_by_enumeration(m)) << m;
    members += fast ? 1 : 0;
  }
  EXPECT_GT(members, 5);
}

TEST(BimonotoneComponent, ValidatesAndCertifies) {
  const DenseMatrix j2 = mat(2, 2, {1, 1, 0, 1});
  EXPECT_THROW(BimonotoneComponent(UnitIntervalMatrix(j2), PermutationPair::identity(2, 2)), std::invalid_argument);
  EXPECT_NO_THROW(BimonotoneComponent::certify(UnitIntervalMatrix(j2)));
  EXPECT_THROW(BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {1, 0, 0, 1}))), std::invalid_argument);
}

TEST(PermRankDecomposition, RejectsSumOutsideBox) {
  const auto c = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {0.6, 0.6, 0.6, 0.6})));
  EXPECT_THROW(PermRankDecomposition({c, c}), std::invalid_argument);
  EXPECT_NO_THROW(PermRankDecomposition({c}));
  const auto wrong = BimonotoneComponent::certify(UnitIntervalMatrix(DenseMatrix::Zero(3, 2)));
  EXPECT_THROW(PermRankDecomposition(2, 2, {c, wrong}), DimensionError);
}

TEST(Uniqueness, WorkedTwoByTwoExample) {
  const auto c1 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {0, .3, .3, .9})));
  const auto c2 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {1, .3, .3, .1})));
  const UniquenessVerdict v = check_uniqueness_necessary(PermRankDecomposition({c1, c2}));
  EXPECT_FALSE(v.satisfied);
  ASSERT_EQ(v.violations.size(), 1u);
  EXPECT_EQ(v.violations[0], (std::pair<Index, Index>{1, 1}));
  EXPECT_EQ(v.counts(0, 0), 1);
  EXPECT_EQ(v.counts(0, 1), 0);
  EXPECT_EQ(v.counts(1, 0), 0);
  EXPECT_EQ(v.counts(1, 1), 2);

  const auto a1 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {0, .4, .4, .9})));
  const auto a2 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {1, .2, .2, .1})));
  const PermRankDecomposition alt({a1, a2});
  EXPECT_LE((alt.sum() - PermRankDecomposition({c1, c2}).sum()).cwiseAbs().maxCoeff(), 1e-12);
  const UniquenessVerdict va = check_uniqueness_necessary(alt);
  ASSERT_EQ(va.violations.size(), 1u);
  EXPECT_EQ(va.violations[0], (std::pair<Index, Index>{1, 1}));
}

TEST(Uniqueness, SingleComponentAndOrderInvariance) {
  const auto c1 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {0, .3, .3, .9})));
  const auto c2 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {1, .3, .3, .1})));
  EXPECT_TRUE(check_uniqueness_necessary(PermRankDecomposition({c1})).satisfied);
  const auto f = check_uniqueness_necessary(PermRankDecomposition({c1, c2}));
  const auto b = check_uniqueness_necessary(PermRankDecomposition({c2, c1}));
  EXPECT_EQ(f.violations, b.violations);
  EXPECT_EQ(f.counts, b.counts);
}

TEST(Io, CsvRoundTripAndErrors) {
  const DenseMatrix m = mat(2, 3, {0.1, 1.0 / 3.0, 0, 1e-300, 0.5, 1});
  EXPECT_EQ(parse_matrix_csv(format_matrix_csv(m)), m);
  EXPECT_THROW(parse_matrix_csv("1,2\n3\n"), IoError);
  EXPECT_THROW(parse_matrix_csv("1,x\n"), IoError);
  EXPECT_THROW(read_matrix_csv("/nonexistent/dir/m.csv"), IoError);

  const auto dir = std::filesystem::temp_directory_path() / "permrank_io_test";
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "m.csv", m);
  EXPECT_EQ(read_matrix_csv(dir / "m.csv"), m);
  EXPECT_FALSE(std::filesystem::exists(dir / "m.csv.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Io, DecompositionJsonRoundTrip) {
  const auto c1 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {0, .3, .3, .9})));
  const auto c2 = BimonotoneComponent::certify(UnitIntervalMatrix(mat(2, 2, {1, .3, .3, .1})));
  const PermRankDecomposition dec({c1, c2});
  const nlohmann::json j = decomposition_to_json(dec);
  EXPECT_EQ(j.at("shape"), nlohmann::json::array({2, 2}));
  const PermRankDecomposition back = decomposition_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.sum(), dec.sum());
  EXPECT_EQ(back[1].perms(), dec[1].perms());
}
