#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uio/numkit.hpp"
#include "uio/oracle.hpp"

namespace uio {
namespace {

using testing::gaussian;

TEST(PencilRankDrop, DiagonalSquare) {
  const Matrix M0 = (Matrix(2, 2) << 0.5, 0, 0, 3).finished();
  const auto drops = numkit::pencil_rank_drop(M0, Matrix::Identity(2, 2));
  EXPECT_EQ(drops.normal_rank, 2u);
  ASSERT_EQ(drops.drop_points.size(), 2u);
  std::vector<double> re;
  for (const auto z : drops.drop_points) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], 0.5, 1e-12);
  EXPECT_NEAR(re[1], 3.0, 1e-12);
}

TEST(PencilRankDrop, RectangularSingleRow) {
  const Matrix M1 = (Matrix(2, 1) << 1, 0).finished();
  const Matrix M0 = (Matrix(2, 1) << 2, 0).finished();
  const auto drops = numkit::pencil_rank_drop(M0, M1);
  EXPECT_EQ(drops.normal_rank, 1u);
  ASSERT_EQ(drops.drop_points.size(), 1u);
  EXPECT_NEAR(std::abs(drops.drop_points[0] - Complex(2.0, 0.0)), 0.0, 1e-12);
}

TEST(PencilRankDrop, ExampleRosenbrockHasNoDrops) {
  const auto S = oracle::example_system();
  Matrix M1 = Matrix::Zero(5, 4);
  M1.topLeftCorner(3, 3).setIdentity();
  Matrix M0 = Matrix::Zero(5, 4);
  M0.topLeftCorner(3, 3) = S.A;
  M0.topRightCorner(3, 1) = S.E;
  M0.bottomLeftCorner(2, 3) = -S.C;
  const auto drops = numkit::pencil_rank_drop(M0, M1);
  EXPECT_EQ(drops.normal_rank, 4u);
  EXPECT_TRUE(drops.drop_points.empty());
}

TEST(PencilRankDrop, SquareInvertibleMatchesEigenvalues) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const Matrix M1 = gaussian(n, n, rng) + n * Matrix::Identity(n, n);
    const Matrix M0 = gaussian(n, n, rng);
    const auto drops = numkit::pencil_rank_drop(M0, M1);
    EXPECT_EQ(drops.normal_rank, static_cast<std::size_t>(n));
    const auto eig = numkit::spectrum(Matrix(M1.inverse() * M0)).eigenvalues;
    ASSERT_EQ(drops.drop_points.size(), eig.size()) << "trial " << trial;
    for (const auto z : eig) {
      double best = 1e300;
      for (const auto w : drops.drop_points) best = std::min(best, std::abs(z - w));
      EXPECT_LT(best, 1e-8 * std::max(1.0, std::abs(z)));
    }
  }
}

TEST(PencilRankDrop, PlantedInvariantZero) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto S = testing::plant_zero(testing::gaussian_system(4, 0, 2, 1, 100 + trial),
                                       2.0, 200 + trial);
    const auto rep = oracle::existence_model_based(S);
    bool found = false;
    for (const auto z : rep.drop_points) {
      if (std::abs(z - Complex(2.0, 0.0)) < 1e-6) found = true;
    }
    EXPECT_TRUE(found) << "trial " << trial;
    EXPECT_FALSE(rep.rosenbrock_ok);
  }
}

TEST(PencilRankDrop, ZeroPencil) {
  const auto drops = numkit::pencil_rank_drop(Matrix::Zero(3, 2), Matrix::Zero(3, 2));
  EXPECT_EQ(drops.normal_rank, 0u);
  EXPECT_TRUE(drops.drop_points.empty());
}

}  // namespace
}  // namespace uio
