#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "isac/array_model.hpp"
#include "isac/idempotent.hpp"
#include "isac/sim.hpp"

using namespace isac;

namespace {

CMatrix random_matrix(int n, int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    CMatrix a(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) a(i, j) = cplx(n01(rng), n01(rng));
    }
    return a;
}

}  // namespace

TEST(ConstructProjector, IdentityColumnsGiveCoordinateProjector) {
    CMatrix a = CMatrix::Zero(4, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    const auto p = construct_projector(a);
    CMatrix expect = CMatrix::Zero(4, 4);
    expect(0, 0) = 1.0;
    expect(1, 1) = 1.0;
    EXPECT_LE((p.entries() - expect).norm(), 1e-14);
    EXPECT_EQ(p.rank_m, 2);
}

TEST(ConstructProjector, AllOnesSeed) {
    const auto p = construct_projector(CMatrix::Ones(2, 1));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(p.entries()(i, j) - cplx(0.5, 0.0)), 0.0, 1e-15);
    }
}

TEST(ConstructProjector, RandomSeedResidualAndTrace) {
    const auto p = construct_projector(random_matrix(12, 3, 1));
    EXPECT_LE(p.idem_residual, 1e-10);
    EXPECT_NEAR(p.entries().trace().real(), 3.0, 1e-10);
    EXPECT_NEAR(p.entries().trace().imag(), 0.0, 1e-12);
    EXPECT_LE((p.entries() - p.entries().adjoint()).norm(), 1e-14);
}

TEST(ConstructProjector, RankDeficientSeedRejected) {
    CMatrix a = random_matrix(6, 3, 2);
    a.col(2) = 2.0 * a.col(0) - a.col(1);
    try {
        construct_projector(a);
        FAIL() << "expected ConditioningError";
    } catch (const ConditioningError& e) {
        EXPECT_LT(e.singular_value_ratio(), 1e-10);
    }
    EXPECT_THROW(construct_projector(CMatrix::Zero(5, 2)), ConditioningError);
}

TEST(ConstructProjector, ShapeErrors) {
    EXPECT_THROW(construct_projector(random_matrix(3, 3, 3)), DomainError);
    EXPECT_THROW(construct_projector(random_matrix(3, 4, 3)), DomainError);
    EXPECT_THROW(construct_projector(CMatrix(3, 0)), DomainError);
}

TEST(ConstructProjector, InvariantUnderColumnMixing) {
    const CMatrix a = random_matrix(10, 4, 4);
    const CMatrix r = random_matrix(4, 4, 5);
    const auto p1 = construct_projector(a);
    const auto p2 = construct_projector(CMatrix(a * r));
    EXPECT_LE((p1.entries() - p2.entries()).norm(), 1e-9);
}

TEST(ConstructProjector, EigenvaluesAreZeroOrOne) {
    for (int m = 1; m < 8; ++m) {
        const auto p = construct_projector(random_matrix(8, m, 10 + m));
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(p.entries());
        int ones = 0;
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
            const double ev = eig.eigenvalues()[i];
            EXPECT_LE(std::min(std::abs(ev), std::abs(ev - 1.0)), 1e-10);
            if (ev > 0.5) ++ones;
        }
        EXPECT_EQ(ones, m);
    }
}

TEST(ConstructProjector, QuadraticFormMomentsMatchChiSquared) {
    const double sg = 0.05;
    for (int m : {1, 3, 5}) {
        const auto p = construct_projector(random_matrix(12, m, 20 + m));
        const auto s = sim::sensing_interference_samples(p.entries(), sg, 200000, 77, "test/moments");
        const auto x = sim::normalized_interference(s, sg);
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        var /= static_cast<double>(x.size() - 1);
        EXPECT_NEAR(mean, 2.0 * m, 0.05 * 2.0 * m);
        EXPECT_NEAR(var, 4.0 * m, 0.05 * 4.0 * m);
    }
}

TEST(ValidateIdempotent, ProjectorPasses) {
    const auto p = construct_projector(random_matrix(12, 3, 6));
    const auto c = validate_idempotent(p.entries());
    EXPECT_TRUE(c.passed);
    EXPECT_EQ(c.numeric_rank, 3);
    EXPECT_NEAR(c.trace, 3.0, 1e-10);
    EXPECT_FALSE(c.is_identity);
}

TEST(ValidateIdempotent, IdentityAndZeroFlagged) {
    const auto id = validate_idempotent(CMatrix(CMatrix::Identity(4, 4)));
    EXPECT_TRUE(id.is_identity);
    EXPECT_FALSE(id.passed);
    const auto z = validate_idempotent(CMatrix(CMatrix::Zero(4, 4)));
    EXPECT_TRUE(z.is_zero);
    EXPECT_FALSE(z.passed);
}

TEST(ValidateIdempotent, HalfProjectorFails) {
    const auto p = construct_projector(random_matrix(8, 2, 7));
    const CMatrix half = 0.5 * p.entries();
    const auto c = validate_idempotent(half);
    EXPECT_FALSE(c.passed);
    // (P/2)² − P/2 = −P/4
    EXPECT_NEAR(c.idem_residual, 0.25 * p.entries().norm(), 1e-10);
    EXPECT_NEAR(c.spectrum_residual, 0.5, 1e-10);
}

TEST(ValidateIdempotent, NonSquareRejected) {
    EXPECT_THROW(validate_idempotent(CMatrix(CMatrix::Zero(3, 2))), ShapeError);
}

TEST(SteeringSeeds, FullColumnRankForReferenceScenario) {
    const UlaGeometry g(12, 0.5);
    const AngleGrid targets({-22.0, 0.0, 22.0});
    for (int m = 1; m < 12; ++m) {
        const CMatrix a = augmented_steering_seed(targets, 5.0, g, m);
        ASSERT_EQ(a.cols(), m);
        Eigen::JacobiSVD<CMatrix> svd(a);
        const auto& sv = svd.singularValues();
        EXPECT_GT(sv[sv.size() - 1] / sv[0], 1e-10) << m;
    }
}

TEST(SteeringSeeds, NestedColumns) {
    const UlaGeometry g(12, 0.5);
    const AngleGrid targets({-22.0, 0.0, 22.0});
    const CMatrix a5 = augmented_steering_seed(targets, 5.0, g, 5);
    const CMatrix a8 = augmented_steering_seed(targets, 5.0, g, 8);
    EXPECT_LE((a8.leftCols(5) - a5).norm(), 1e-14);
    EXPECT_LE((a5.leftCols(3) - steering_subspace_seed(targets, g, 3)).norm(), 1e-14);
    EXPECT_LE((a5.col(3) - steering_vector(g, -19.5)).norm(), 1e-14);
}

TEST(SteeringSeeds, Errors) {
    const UlaGeometry g(4, 0.5);
    const AngleGrid targets({-30.0, 30.0});
    EXPECT_THROW(steering_subspace_seed(targets, g, 0), DomainError);
    EXPECT_THROW(steering_subspace_seed(targets, g, 3), DomainError);
    EXPECT_THROW(augmented_steering_seed(targets, 5.0, g, 4), DomainError);
}

TEST(ScaleToPower, RankEqualsBudgetGivesUnitGamma) {
    const auto p = construct_projector(random_matrix(12, 5, 8));
    const auto s = scale_to_power(p, 5.0, true);
    EXPECT_DOUBLE_EQ(s.gamma, 1.0);
    EXPECT_TRUE(s.idempotent);
}

TEST(ScaleToPower, FullBudgetScalesTrace) {
    const auto p = construct_projector(random_matrix(12, 3, 9));
    const auto s = scale_to_power(p, 5.0, true, 2.0, 0.05, 0.9);
    EXPECT_DOUBLE_EQ(s.gamma, 5.0 / 3.0);
    EXPECT_NEAR(s.covariance.trace(), 5.0, 1e-10);
    EXPECT_FALSE(s.idempotent);
    EXPECT_FALSE(validate_idempotent(s.covariance).passed);
}

TEST(ScaleToPower, UnscaledKeepsProjector) {
    const auto p = construct_projector(random_matrix(12, 3, 9));
    const auto s = scale_to_power(p, 5.0, false);
    EXPECT_EQ(s.gamma, 1.0);
    EXPECT_NEAR(s.covariance.trace(), 3.0, 1e-10);
    EXPECT_THROW(scale_to_power(p, 2.0, false), InfeasibleError);
    EXPECT_THROW(scale_to_power(p, 0.0, false), DomainError);
}
