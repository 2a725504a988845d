#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "isac/array_model.hpp"
#include "isac/idempotent.hpp"

using namespace isac;

TEST(SteeringVector, BroadsideIsAllOnes) {
    const auto a = steering_vector(UlaGeometry(4, 0.5), 0.0);
    ASSERT_EQ(a.size(), 4);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(a[i], cplx(1.0, 0.0));
    }
}

TEST(SteeringVector, ThirtyDegreesHalfWavelength) {
    // phase = π·sin 30° = π/2
    const auto a = steering_vector(UlaGeometry(2, 0.5), 30.0);
    EXPECT_EQ(a[0], cplx(1.0, 0.0));
    EXPECT_NEAR(a[1].real(), 0.0, 1e-15);
    EXPECT_NEAR(a[1].imag(), 1.0, 1e-15);
}

TEST(SteeringVector, NormSquaredEqualsAntennaCount) {
    const UlaGeometry g(3, 0.5);
    for (double th = -90.0; th <= 90.0; th += 7.5) {
        const auto a = steering_vector(g, th);
        EXPECT_EQ(a[0], cplx(1.0, 0.0));
        EXPECT_NEAR(a.squaredNorm(), 3.0, 1e-12);
    }
}

TEST(SteeringVector, RejectsAnglesOutsideDomain) {
    const UlaGeometry g(4);
    EXPECT_THROW(steering_vector(g, 90.5), DomainError);
    EXPECT_THROW(steering_vector(g, -91.0), DomainError);
    EXPECT_THROW(steering_vector(g, std::nan("")), DomainError);
}

TEST(UlaGeometry, Invariants) {
    EXPECT_THROW(UlaGeometry(0), DomainError);
    EXPECT_THROW(UlaGeometry(4, 0.0), DomainError);
    EXPECT_NO_THROW(UlaGeometry(1, 0.25));
}

TEST(AngleGrid, Invariants) {
    EXPECT_THROW(AngleGrid({0.0, 0.0}), DomainError);
    EXPECT_THROW(AngleGrid({1.0, 0.0}), DomainError);
    EXPECT_THROW(AngleGrid({-95.0}), DomainError);
    const auto g = AngleGrid::uniform(1.0);
    EXPECT_EQ(g.size(), 181u);
    EXPECT_EQ(g[0], -90.0);
    EXPECT_EQ(g[90], 0.0);
    EXPECT_EQ(g[180], 90.0);
}

TEST(TransmitBeampattern, IdentityAndZero) {
    const UlaGeometry g(6);
    const auto grid = AngleGrid::uniform(5.0);
    const auto id = transmit_beampattern(CMatrix(CMatrix::Identity(6, 6)), grid, g);
    const auto zero = transmit_beampattern(CMatrix(CMatrix::Zero(6, 6)), grid, g);
    for (Eigen::Index i = 0; i < id.size(); ++i) {
        EXPECT_NEAR(id[i], 6.0, 1e-12);
        EXPECT_EQ(zero[i], 0.0);
    }
}

TEST(TransmitBeampattern, RankOneProjectorPeaksAtItsAngle) {
    const UlaGeometry g(5);
    const double theta0 = 17.0;
    const auto a = steering_vector(g, theta0);
    const CMatrix c = a * a.adjoint() / 5.0;
    const auto bp = transmit_beampattern(c, AngleGrid({theta0}), g);
    EXPECT_NEAR(bp[0], 5.0, 1e-12);
}

TEST(TransmitBeampattern, ShapeMismatch) {
    EXPECT_THROW(transmit_beampattern(CMatrix(CMatrix::Identity(3, 3)), AngleGrid({0.0}), UlaGeometry(4)),
                 ShapeError);
}

TEST(TransmitBeampattern, NonnegativeForRandomPsd) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    const UlaGeometry g(8);
    const auto grid = AngleGrid::uniform(1.0);
    for (int trial = 0; trial < 20; ++trial) {
        CMatrix b(8, 3);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 3; ++j) b(i, j) = cplx(n01(rng), n01(rng));
        }
        const auto bp = transmit_beampattern(CMatrix(b * b.adjoint()), grid, g);
        EXPECT_GE(bp.minCoeff(), -1e-10);
    }
}

TEST(TransmitBeampattern, ProjectorNeverExceedsAntennaCount) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    const UlaGeometry g(10);
    const auto grid = AngleGrid::uniform(0.5);
    for (int m = 1; m < 10; ++m) {
        CMatrix a(10, m);
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < m; ++j) a(i, j) = cplx(n01(rng), n01(rng));
        }
        const auto p = construct_projector(a);
        const auto bp = transmit_beampattern(p.base, grid, g);
        EXPECT_LE(bp.maxCoeff(), 10.0 + 1e-10);
    }
}

TEST(DesiredBeampattern, TriangleValues) {
    const AngleGrid grid({-10.0, -5.0, -2.5, 0.0, 2.5, 5.0, 10.0});
    const auto d = desired_beampattern(grid, AngleGrid({0.0}), 5.0);
    EXPECT_EQ(d.values[3], 1.0);   // apex
    EXPECT_EQ(d.values[5], 0.0);   // foot
    EXPECT_EQ(d.values[1], 0.0);
    EXPECT_DOUBLE_EQ(d.values[4], 0.5);  // -θ/Δ + 1 + φ/Δ at θ = Δ/2
    EXPECT_DOUBLE_EQ(d.values[2], 0.5);
    EXPECT_EQ(d.values[0], 0.0);
    EXPECT_EQ(d.values[6], 0.0);
}

TEST(DesiredBeampattern, MultiTargetZeroOutsideAllLobes) {
    const auto grid = AngleGrid::uniform(1.0);
    const AngleGrid targets({-22.0, 0.0, 22.0});
    const auto d = desired_beampattern(grid, targets, 5.0);
    for (std::size_t l = 0; l < grid.size(); ++l) {
        double nearest = 1e9;
        for (double t : targets.angles()) nearest = std::min(nearest, std::abs(grid[l] - t));
        const double v = d.values[static_cast<Eigen::Index>(l)];
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        if (nearest >= 5.0) {
            EXPECT_EQ(v, 0.0);
        }
        if (nearest == 0.0) {
            EXPECT_EQ(v, 1.0);
        }
    }
}

TEST(DesiredBeampattern, RejectsOverlap) {
    const auto grid = AngleGrid::uniform(1.0);
    EXPECT_THROW(desired_beampattern(grid, AngleGrid({0.0, 10.0}), 5.0), DomainError);
    EXPECT_NO_THROW(desired_beampattern(grid, AngleGrid({0.0, 10.5}), 5.0));
    EXPECT_THROW(desired_beampattern(grid, AngleGrid({0.0}), 0.0), DomainError);
}

TEST(DesiredBeampattern, MirrorSymmetry) {
    const AngleGrid grid = AngleGrid::uniform(0.5);
    const AngleGrid targets({-40.0, 3.0, 31.0});
    const AngleGrid mirrored({-31.0, -3.0, 40.0});
    const auto d = desired_beampattern(grid, targets, 6.0);
    const auto dm = desired_beampattern(grid, mirrored, 6.0);
    const auto n = static_cast<Eigen::Index>(grid.size());
    for (Eigen::Index l = 0; l < n; ++l) {
        EXPECT_NEAR(d.values[l], dm.values[n - 1 - l], 1e-12);
    }
}

TEST(MatchingError, Examples) {
    RVector a(2), b(2);
    a << 1.0, 2.0;
    b << 2.0, 4.0;
    EXPECT_EQ(matching_error(1.0, a, a), 0.0);
    EXPECT_EQ(matching_error(2.0, a, b), 0.0);
    RVector e1(2), e2(2);
    e1 << 1.0, 0.0;
    e2 << 0.0, 1.0;
    EXPECT_EQ(matching_error(1.0, e1, e2), 2.0);
    EXPECT_THROW(matching_error(1.0, a, RVector(RVector::Zero(3))), ShapeError);
}

TEST(OptimalDelta, Examples) {
    RVector a(2), b(2);
    a << 1.0, 2.0;
    b << 2.0, 4.0;
    EXPECT_DOUBLE_EQ(optimal_delta(a, b), 2.0);
    EXPECT_EQ(matching_error(optimal_delta(a, b), a, b), 0.0);
    EXPECT_EQ(optimal_delta(a, RVector(RVector::Zero(2))), 0.0);
    RVector ones(2), c(2);
    ones << 1.0, 1.0;
    c << 1.0, 3.0;
    EXPECT_DOUBLE_EQ(optimal_delta(ones, c), 2.0);
    EXPECT_THROW(optimal_delta(RVector(RVector::Zero(2)), c), DomainError);
}

TEST(OptimalDelta, ClampsNegativeCorrelation) {
    RVector a(2), b(2);
    a << 1.0, 0.0;
    b << -1.0, 0.0;
    EXPECT_EQ(optimal_delta(a, b), 0.0);
}

TEST(OptimalDelta, MinimizesOverRandomDeltas) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    RVector d(30), act(30);
    for (int i = 0; i < 30; ++i) {
        d[i] = u(rng) / 5.0;
        act[i] = u(rng);
    }
    const double best = matching_error(optimal_delta(d, act), d, act);
    std::uniform_real_distribution<double> ud(1e-3, 20.0);
    for (int t = 0; t < 100; ++t) {
        EXPECT_LE(best, matching_error(ud(rng), d, act) + 1e-12);
    }
}
