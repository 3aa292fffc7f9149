#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uio/oracle.hpp"

namespace uio {
namespace {

using testing::gaussian;

UioRealization example_uio() {
  // D from the (a, b, c) = (0, 0, 1) member of the decoupling family, L = 0.
  const auto S = oracle::example_system();
  UioRealization U;
  U.D = (Matrix(3, 2) << 1, 0, 0, 0, 0, 1).finished();
  U.A_uio = (Matrix::Identity(3, 3) - U.D * S.C) * S.A;
  U.B_u = Matrix(3, 0);
  U.B_y = U.A_uio * U.D;
  return U;
}

TEST(NormalizeE, FullRankUnchanged) {
  const Matrix E = (Matrix(3, 2) << 1, 0, 0, 1, 1, 1).finished();
  const auto out = oracle::normalize_E(E);
  EXPECT_EQ(out.E, E);
  EXPECT_EQ(out.T_reduce, Matrix::Identity(2, 2));
}

TEST(NormalizeE, DropsDependentColumn) {
  const Vector e = (Vector(3) << 1, -2, 0.5).finished();
  Matrix E(3, 2);
  E << e, 2 * e;
  const auto out = oracle::normalize_E(E);
  ASSERT_EQ(out.E.cols(), 1);
  EXPECT_EQ(Vector(out.E.col(0)), e);
  ASSERT_EQ(out.T_reduce.rows(), 1);
  EXPECT_NEAR(out.T_reduce(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(out.T_reduce(0, 1), 2.0, 1e-12);
  EXPECT_LT((out.E * out.T_reduce - E).norm(), 1e-12);
}

TEST(NormalizeE, ZeroMatrixGivesEmpty) {
  const auto out = oracle::normalize_E(Matrix::Zero(4, 2));
  EXPECT_EQ(out.E.rows(), 4);
  EXPECT_EQ(out.E.cols(), 0);
}

TEST(CheckUioConditions, ExampleSolutionHasZeroResiduals) {
  const auto S = oracle::example_system();
  const auto U = example_uio();
  const Matrix expected_F =
      (Matrix(3, 3) << 0, 0, 0, -1, 0, 0, 0, 0, 0).finished();
  EXPECT_EQ(U.A_uio, expected_F);
  const auto rep = oracle::check_uio_conditions(S, U);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.schur);
  EXPECT_EQ(rep.decoupling, 0.0);
  EXPECT_EQ(rep.dynamics, 0.0);
  EXPECT_EQ(rep.spectral_radius, 0.0);
}

TEST(CheckUioConditions, ZeroObserverFailsDecoupling) {
  const auto S = oracle::example_system();
  UioRealization U{Matrix::Zero(3, 3), Matrix(3, 0), Matrix::Zero(3, 2),
                   Matrix::Zero(3, 2)};
  const auto rep = oracle::check_uio_conditions(S, U);
  EXPECT_FALSE(rep.pass);
  EXPECT_NEAR(rep.decoupling, S.E.norm(), 1e-15);
}

TEST(CheckUioConditions, SizeMismatchThrows) {
  const auto S = oracle::example_system();
  UioRealization U{Matrix::Zero(2, 2), Matrix(2, 0), Matrix::Zero(2, 2),
                   Matrix::Zero(2, 2)};
  EXPECT_THROW(oracle::check_uio_conditions(S, U), Error);
}

TEST(ExistenceModelBased, ExampleIsStrongStarObservable) {
  const auto rep = oracle::existence_model_based(oracle::example_system());
  EXPECT_TRUE(rep.rank_ce_ok);
  EXPECT_TRUE(rep.rosenbrock_ok);
  EXPECT_TRUE(rep.strong_star_detectable);
  EXPECT_TRUE(rep.drop_points.empty());
  EXPECT_TRUE(rep.unstable_drop_points.empty());
  EXPECT_EQ(rep.rank_ce, 1u);
  EXPECT_EQ(rep.normal_rank, 4u);
}

TEST(ExistenceModelBased, CeRankDropIsRejected) {
  auto S = oracle::example_system();
  S.C = (Matrix(2, 3) << 0, 1, 0, 0, 0, 1).finished();  // C E = 0
  const auto rep = oracle::existence_model_based(S);
  EXPECT_FALSE(rep.rank_ce_ok);
  EXPECT_FALSE(rep.strong_star_detectable);
}

TEST(ExistenceModelBased, PlantedZeroOutsideDisc) {
  const auto S = testing::plant_zero(testing::gaussian_system(4, 1, 2, 1, 31), 2.0, 8);
  const auto rep = oracle::existence_model_based(S);
  EXPECT_TRUE(rep.rank_ce_ok);
  EXPECT_FALSE(rep.rosenbrock_ok);
  ASSERT_FALSE(rep.unstable_drop_points.empty());
  bool found = false;
  for (const auto z : rep.unstable_drop_points) {
    if (std::abs(z - Complex(2.0, 0.0)) < 1e-6) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(ExistenceModelBased, SimilarityInvariance) {
  std::mt19937_64 rng(12);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto S = oracle::random_system(4, 1, 2, 1, seed % 2 == 0, seed);
    const Matrix T = gaussian(4, 4, rng) + 4 * Matrix::Identity(4, 4);
    SystemModel Sx = S;
    Sx.A = T * S.A * T.inverse();
    Sx.B = T * S.B;
    Sx.C = S.C * T.inverse();
    Sx.E = T * S.E;
    EXPECT_EQ(oracle::existence_model_based(S).strong_star_detectable,
              oracle::existence_model_based(Sx).strong_star_detectable)
        << "seed " << seed;
  }
}

TEST(DecouplingGainFamily, ExampleFamilyShape) {
  const auto S = oracle::example_system();
  const auto fam = oracle::decoupling_gain_family(S);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Matrix D = fam.particular + gaussian(3, 2, rng) * fam.projector;
    EXPECT_LT((D * S.C * S.E - S.E).norm(), 1e-12);
    // [[1, a], [0, b], [0, c]]
    EXPECT_NEAR(D(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(D(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(D(2, 0), 0.0, 1e-12);
  }
  // Any (a, b, c) is reachable: the free block spans the second column.
  const Matrix target = (Matrix(3, 2) << 1, 0.3, 0, -2, 0, 5).finished();
  const Matrix Z = (target - fam.particular);
  EXPECT_LT((Z * fam.projector - Z).norm(), 1e-12);
}

TEST(DecouplingGainFamily, BoundaryCaseIsNotDetectable) {
  // a = 0, c = 1, |b| >= 1 leaves an unstable unobservable mode.
  const auto S = oracle::example_system();
  for (const double b : {1.0, -1.5, 3.0}) {
    const Matrix D = (Matrix(3, 2) << 1, 0, 0, b, 0, 1).finished();
    const Matrix F = (Matrix::Identity(3, 3) - D * S.C) * S.A;
    EXPECT_FALSE(numkit::pbh_detectable(F, S.C).detectable) << "b = " << b;
  }
  const Matrix D = (Matrix(3, 2) << 1, 0, 0, 0.5, 0, 1).finished();
  const Matrix F = (Matrix::Identity(3, 3) - D * S.C) * S.A;
  EXPECT_TRUE(numkit::pbh_detectable(F, S.C).detectable);
}

TEST(DesignModelBased, ExampleDeadbeat) {
  const auto S = oracle::example_system();
  const auto U = oracle::design_model_based(S, {});
  const auto rep = oracle::check_uio_conditions(S, U);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.spectral_radius, 1e-8);
  EXPECT_NEAR(U.D(0, 0), 1.0, 1e-12);
}

TEST(DesignModelBased, HundredRandomSystemsPassConditions) {
  int designed = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const std::size_t n = 2 + seed % 4;
    const std::size_t r = 1 + seed % 2;
    const std::size_t p = std::min<std::size_t>(n, r + 1 + seed % 2);
    const auto S = oracle::random_system(n, seed % 3, p, r, true, seed);
    const auto U = oracle::design_model_based(S, {});
    const auto rep = oracle::check_uio_conditions(S, U);
    EXPECT_TRUE(rep.pass) << "seed " << seed;
    EXPECT_TRUE(rep.schur);
    ++designed;
  }
  EXPECT_EQ(designed, 100);
}

TEST(DesignModelBased, RejectsNonexistence) {
  auto S = oracle::example_system();
  S.C = (Matrix(2, 3) << 0, 1, 0, 0, 0, 1).finished();
  try {
    oracle::design_model_based(S, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConditionViolated);
    EXPECT_NE(std::string(e.what()).find("rank(CE)"), std::string::npos);
  }
  EXPECT_THROW(oracle::design_model_based(oracle::example_system(),
                                          {Complex(0.1, 0.1), 0.0, 0.0}),
               Error);
}

TEST(RandomSystem, VerdictsAndPreconditions) {
  const auto yes = oracle::random_system(3, 1, 2, 1, true, 5);
  EXPECT_TRUE(oracle::existence_model_based(yes).strong_star_detectable);
  const auto no = oracle::random_system(3, 1, 1, 1, false, 5);
  EXPECT_FALSE(oracle::existence_model_based(no).strong_star_detectable);
  EXPECT_TRUE(no.construction == "ce_rank_drop" || no.construction == "planted_zero");
  const auto fewer_outputs = oracle::random_system(3, 1, 1, 2, false, 5);
  EXPECT_EQ(fewer_outputs.construction, "ce_rank_drop");
  EXPECT_FALSE(oracle::existence_model_based(fewer_outputs).rank_ce_ok);
  EXPECT_THROW(oracle::random_system(3, 1, 1, 2, true, 5), Error);
  EXPECT_THROW(oracle::random_system(0, 1, 1, 1, true, 5), Error);
}

TEST(RandomSystem, Deterministic) {
  const auto a = oracle::random_system(4, 2, 2, 1, false, 123);
  const auto b = oracle::random_system(4, 2, 2, 1, false, 123);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.C, b.C);
  EXPECT_EQ(a.construction, b.construction);
}

TEST(SimulateSystem, ZeroDynamics) {
  SystemModel S{Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Identity(2, 2),
                Matrix::Zero(2, 1), ""};
  const auto traj = oracle::simulate_system(S, Vector::Ones(2), Matrix::Ones(1, 4),
                                            Matrix::Ones(1, 4), 5);
  EXPECT_EQ(traj.x.col(0), Vector::Ones(2));
  EXPECT_EQ(traj.x.rightCols(4), Matrix::Zero(2, 4));
  EXPECT_THROW(oracle::simulate_system(S, Vector::Ones(2), Matrix::Ones(1, 3),
                                       Matrix::Ones(1, 4), 5),
               Error);
}

}  // namespace
}  // namespace uio
