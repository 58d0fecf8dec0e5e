#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <set>

#include "sparsescan/random.hpp"
#include "sparsescan/wdpp.hpp"
#include "support/oracles.hpp"

namespace sparsescan {
namespace {

std::uint32_t mask_of(const IndexSet& items) {
  std::uint32_t m = 0;
  for (auto i : items) m |= 1u << i;
  return m;
}

oracle::Matrix to_oracle(const Eigen::MatrixXd& m) {
  oracle::Matrix out(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

Eigen::MatrixXd random_psd(int n, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = uniform01(rng) - 0.5;
  }
  return a * a.transpose();
}

double total_variation(const std::vector<double>& p, const std::vector<double>& counts, double draws) {
  double tv = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) tv += std::abs(p[s] - counts[s] / draws);
  return 0.5 * tv;
}

TEST(DppSample, ZeroKernelAlwaysEmpty) {
  const auto basis = eigendecompose(Eigen::MatrixXd::Zero(4, 4));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(dpp_sample(basis, rng).empty());
}

TEST(DppSample, IdentityKernelHalfInclusion) {
  const auto basis = eigendecompose(Eigen::MatrixXd::Identity(2, 2));
  Rng rng(2);
  const int draws = 100000;
  int hits[2] = {0, 0};
  for (int i = 0; i < draws; ++i) {
    for (auto item : dpp_sample(basis, rng)) ++hits[item];
  }
  EXPECT_NEAR(hits[0] / static_cast<double>(draws), 0.5, 0.01);
  EXPECT_NEAR(hits[1] / static_cast<double>(draws), 0.5, 0.01);
}

TEST(DppSample, SubsetDistributionMatchesDeterminants) {
  // A 4-item WDPP kernel with real spatial coupling.
  const std::vector<double> u{1.0, 0.8, 0.5, 0.9};
  const std::vector<PixelCoord> coords{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const auto kernel = build_kernel(u, coords, 1.0, 1.2);
  const auto basis = eigendecompose(kernel);
  const auto p = oracle::dpp_subset_probabilities(to_oracle(kernel.entries()));
  Rng rng(3);
  const int draws = 200000;
  std::vector<double> counts(p.size(), 0.0);
  for (int i = 0; i < draws; ++i) counts[mask_of(dpp_sample(basis, rng))] += 1.0;
  EXPECT_LT(total_variation(p, counts, draws), 0.01);
}

TEST(DppSample, ExpectedCardinality) {
  Rng rng(4);
  for (int trial = 0; trial < 3; ++trial) {
    const auto basis = eigendecompose(random_psd(6, rng));
    double expected = 0.0;
    for (Eigen::Index i = 0; i < 6; ++i) expected += basis.eigenvalues(i) / (basis.eigenvalues(i) + 1.0);
    const int draws = 100000;
    double total = 0.0;
    for (int i = 0; i < draws; ++i) total += static_cast<double>(dpp_sample(basis, rng).size());
    EXPECT_NEAR(total / draws, expected, 0.01 * expected);
  }
}

TEST(DppSample, DuplicatesNeverTogether) {
  const std::vector<double> u{0.9, 0.9, 0.4};
  const std::vector<PixelCoord> coords{{2, 2}, {2, 2}, {0, 0}};
  const auto basis = eigendecompose(build_kernel(u, coords, 1.0, 2.0));
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    const auto y = dpp_sample(basis, rng);
    EXPECT_FALSE(std::count(y.begin(), y.end(), 0u) && std::count(y.begin(), y.end(), 1u));
  }
}

TEST(DppSample, DeterministicPerSeed) {
  Rng g(6);
  const auto basis = eigendecompose(random_psd(10, g));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed);
    Rng b(seed);
    EXPECT_EQ(dpp_sample(basis, a), dpp_sample(basis, b));
  }
}

TEST(KdppSample, EdgeCases) {
  const auto basis = eigendecompose(Eigen::MatrixXd(Eigen::Vector3d(1, 2, 3).asDiagonal()));
  Rng rng(7);
  EXPECT_TRUE(kdpp_sample(basis, 0, rng).empty());
  EXPECT_EQ(kdpp_sample(basis, 3, rng), (IndexSet{0, 1, 2}));
}

TEST(KdppSample, RankExceededNamesRank) {
  const std::vector<double> u{0.5, 0.5};
  const std::vector<PixelCoord> coords{{0, 0}, {0, 0}};
  const auto basis = eigendecompose(build_kernel(u, coords, 1.0, 2.0));
  Rng rng(8);
  try {
    kdpp_sample(basis, 2, rng);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("rank 1"), std::string::npos) << e.what();
  }
}

TEST(KdppSample, DiagonalPairsProportionalToProducts) {
  const auto basis = eigendecompose(Eigen::MatrixXd(Eigen::Vector3d(1, 2, 3).asDiagonal()));
  Rng rng(9);
  const int draws = 100000;
  std::vector<double> counts(8, 0.0);
  for (int i = 0; i < draws; ++i) counts[mask_of(kdpp_sample(basis, 2, rng))] += 1.0;
  EXPECT_NEAR(counts[0b011] / draws, 2.0 / 11, 0.01);
  EXPECT_NEAR(counts[0b101] / draws, 3.0 / 11, 0.01);
  EXPECT_NEAR(counts[0b110] / draws, 6.0 / 11, 0.01);
}

TEST(KdppSample, DiagonalTriplesMatchElementarySymmetricOracle) {
  const std::vector<double> lambda{0.5, 1.0, 2.0, 3.0, 4.0};
  Eigen::VectorXd diag(5);
  for (int i = 0; i < 5; ++i) diag(i) = lambda[i];
  const auto basis = eigendecompose(Eigen::MatrixXd(diag.asDiagonal()));
  const double ek = oracle::elementary_symmetric(lambda, 3);
  Rng rng(10);
  const int draws = 100000;
  std::vector<double> counts(32, 0.0);
  for (int i = 0; i < draws; ++i) counts[mask_of(kdpp_sample(basis, 3, rng))] += 1.0;
  for (std::uint32_t s = 0; s < 32; ++s) {
    if (std::popcount(s) != 3) {
      EXPECT_EQ(counts[s], 0.0);
      continue;
    }
    double prod = 1.0;
    for (int i = 0; i < 5; ++i) {
      if (s & (1u << i)) prod *= lambda[i];
    }
    EXPECT_NEAR(counts[s] / draws, prod / ek, 0.008) << "subset " << s;
  }
}

TEST(KdppSample, SubsetDistributionMatchesConditionalDeterminants) {
  Rng g(11);
  const Eigen::MatrixXd l = random_psd(4, g) + 0.1 * Eigen::MatrixXd::Identity(4, 4);
  const auto basis = eigendecompose(l);
  const auto p = oracle::kdpp_subset_probabilities(to_oracle(l), 2);
  Rng rng(12);
  const int draws = 200000;
  std::vector<double> counts(16, 0.0);
  for (int i = 0; i < draws; ++i) counts[mask_of(kdpp_sample(basis, 2, rng))] += 1.0;
  EXPECT_LT(total_variation(p, counts, draws), 0.01);
}

TEST(KdppSample, PropertyExactlyKDistinctOnLargeKernels) {
  // Large k exercises the periodic re-orthonormalization.
  std::vector<PixelCoord> coords;
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) coords.push_back({static_cast<double>(c), static_cast<double>(r)});
  }
  Rng g(13);
  std::vector<double> u(coords.size());
  for (auto& x : u) x = uniform01(g) + kSaliencyFloor;
  const auto basis = eigendecompose(build_kernel(u, coords, 1.0, 1.5));
  Rng rng(14);
  for (std::size_t k : {1ul, 17ul, 50ul, basis.rank()}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto y = kdpp_sample(basis, k, rng);
      ASSERT_EQ(y.size(), k);
      EXPECT_TRUE(std::is_sorted(y.begin(), y.end()));
      EXPECT_EQ(std::set<std::size_t>(y.begin(), y.end()).size(), k);
      for (auto i : y) EXPECT_LT(i, coords.size());
    }
  }
}

TEST(KdppSample, HugeEigenvaluesStayFinite) {
  // Products of many large eigenvalues overflow linear-space tables.
  const int n = 400;
  Eigen::VectorXd diag(n);
  for (int i = 0; i < n; ++i) diag(i) = 1e6 + i;
  const auto basis = eigendecompose(Eigen::MatrixXd(diag.asDiagonal()));
  Rng rng(15);
  const auto y = kdpp_sample(basis, 200, rng);
  EXPECT_EQ(y.size(), 200u);
}

TEST(SampleProjection, OneItemPerColumn) {
  Rng g(16);
  const auto basis = eigendecompose(random_psd(8, g));
  Rng rng(17);
  const auto y = sample_projection(basis.eigenvectors.leftCols(5), rng);
  EXPECT_EQ(y.size(), 5u);
  EXPECT_EQ(std::set<std::size_t>(y.begin(), y.end()).size(), 5u);
  EXPECT_TRUE(sample_projection(Eigen::MatrixXd(8, 0), rng).empty());
}

}  // namespace
}  // namespace sparsescan
