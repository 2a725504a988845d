#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "covariance.hpp"
#include "errors.hpp"
#include "types.hpp"

namespace isac {

/// Uniform linear array: element count and spacing in wavelengths.
class UlaGeometry {
public:
    explicit UlaGeometry(int n_antennas, double spacing_ratio = 0.5)
        : n_antennas_(n_antennas), spacing_ratio_(spacing_ratio) {
        if (n_antennas < 1) throw DomainError("n_antennas must be >= 1");
        if (!(spacing_ratio > 0.0)) throw DomainError("spacing_ratio must be > 0");
    }

    int n_antennas() const noexcept { return n_antennas_; }
    double spacing_ratio() const noexcept { return spacing_ratio_; }

private:
    int n_antennas_;
    double spacing_ratio_;
};

/// Strictly increasing azimuth angles in degrees, all within [-90, 90].
class AngleGrid {
public:
    AngleGrid() = default;

    explicit AngleGrid(std::vector<double> angles_deg) : angles_(std::move(angles_deg)) {
        for (std::size_t i = 0; i < angles_.size(); ++i) {
            if (!(angles_[i] >= -90.0 && angles_[i] <= 90.0)) {
                throw DomainError("grid angle outside [-90, 90]");
            }
            if (i > 0 && !(angles_[i] > angles_[i - 1])) {
                throw DomainError("grid angles must be strictly increasing");
            }
        }
    }

    /// [-90, 90] sampled every `step_deg`, always including -90. Multiples of
    /// the step are computed from the integer index, so 0 lands exactly on 0.
    static AngleGrid uniform(double step_deg) {
        if (!(step_deg > 0.0)) throw DomainError("grid step must be > 0");
        const auto count = static_cast<std::size_t>(std::floor(180.0 / step_deg + 1e-9)) + 1;
        std::vector<double> angles(count);
        for (std::size_t i = 0; i < count; ++i) {
            angles[i] = -90.0 + static_cast<double>(i) * step_deg;
        }
        return AngleGrid(std::move(angles));
    }

    const std::vector<double>& angles() const noexcept { return angles_; }
    std::size_t size() const noexcept { return angles_.size(); }
    double operator[](std::size_t i) const { return angles_[i]; }

private:
    std::vector<double> angles_;
};

struct DesiredPattern {
    AngleGrid grid;
    RVector values;
    double half_width_deg = 0.0;
};

/// a(θ)_p = exp(j·2π·(d/λ)·p·sin θ), p = 0..n-1.
inline CVector steering_vector(const UlaGeometry& geometry, double theta_deg) {
    if (!(theta_deg >= -90.0 && theta_deg <= 90.0)) {
        throw DomainError("steering angle outside [-90, 90]");
    }
    const double k = 2.0 * kPi * geometry.spacing_ratio() * std::sin(deg_to_rad(theta_deg));
    CVector a(geometry.n_antennas());
    for (int p = 0; p < geometry.n_antennas(); ++p) {
        a[p] = std::polar(1.0, k * p);
    }
    return a;
}

/// Steering vectors for every grid angle, one per column.
inline CMatrix steering_matrix(const UlaGeometry& geometry, const AngleGrid& grid) {
    CMatrix a(geometry.n_antennas(), static_cast<Eigen::Index>(grid.size()));
    for (std::size_t l = 0; l < grid.size(); ++l) {
        a.col(static_cast<Eigen::Index>(l)) = steering_vector(geometry, grid[l]);
    }
    return a;
}

/// Φ̃(θ_l) = aᴴ(θ_l) C a(θ_l) over the grid. Accepts any square matrix; the
/// imaginary part is dropped, which is exact for Hermitian C.
inline RVector transmit_beampattern(const CMatrix& c, const AngleGrid& grid,
                                    const UlaGeometry& geometry) {
    if (c.rows() != geometry.n_antennas() || c.cols() != geometry.n_antennas()) {
        throw ShapeError("covariance dimension does not match array size");
    }
    const CMatrix a = steering_matrix(geometry, grid);
    const CMatrix ca = c * a;
    RVector out(static_cast<Eigen::Index>(grid.size()));
    for (Eigen::Index l = 0; l < out.size(); ++l) {
        out[l] = a.col(l).dot(ca.col(l)).real();
    }
    return out;
}

inline RVector transmit_beampattern(const CovarianceMatrix& c, const AngleGrid& grid,
                                    const UlaGeometry& geometry) {
    return transmit_beampattern(c.entries(), grid, geometry);
}

/// Per-target triangles of unit apex and half-width Δ, merged by pointwise max.
/// Targets closer than 2Δ would overlap and are rejected.
inline DesiredPattern desired_beampattern(const AngleGrid& grid, const AngleGrid& targets,
                                          double half_width_deg) {
    if (!(half_width_deg > 0.0)) throw DomainError("half width must be > 0");
    for (std::size_t t = 1; t < targets.size(); ++t) {
        if (targets[t] - targets[t - 1] <= 2.0 * half_width_deg) {
            throw DomainError("target triangles overlap: separation <= 2*half_width");
        }
    }
    RVector values = RVector::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t l = 0; l < grid.size(); ++l) {
        double v = 0.0;
        for (double phi : targets.angles()) {
            const double dist = std::abs(grid[l] - phi);
            if (dist < half_width_deg) v = std::max(v, 1.0 - dist / half_width_deg);
        }
        values[static_cast<Eigen::Index>(l)] = v;
    }
    return DesiredPattern{grid, std::move(values), half_width_deg};
}

inline double matching_error(double delta, const RVector& desired, const RVector& actual) {
    if (desired.size() != actual.size()) throw ShapeError("pattern lengths differ");
    return (delta * desired - actual).squaredNorm();
}

inline double matching_error(double delta, const DesiredPattern& desired, const RVector& actual) {
    return matching_error(delta, desired.values, actual);
}

/// Least-squares scale δ* = <Φ, Φ̃> / <Φ, Φ>, clamped at zero.
inline double optimal_delta(const RVector& desired, const RVector& actual) {
    if (desired.size() != actual.size()) throw ShapeError("pattern lengths differ");
    const double denom = desired.squaredNorm();
    if (!(denom > 0.0)) throw DomainError("desired pattern is identically zero");
    return std::max(0.0, desired.dot(actual) / denom);
}

inline double optimal_delta(const DesiredPattern& desired, const RVector& actual) {
    return optimal_delta(desired.values, actual);
}

}  // namespace isac
