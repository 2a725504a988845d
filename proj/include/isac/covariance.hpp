#pragma once

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "types.hpp"

namespace isac {

/// Hermitian positive semidefinite sensing covariance.
///
/// Construction checks both invariants; a matrix that fails either is rejected
/// with DomainError. Tolerances are relative for the Hermitian check and
/// absolute for the smallest eigenvalue.
class CovarianceMatrix {
public:
    static constexpr double kHermitianTol = 1e-10;
    static constexpr double kPsdTol = 1e-10;

    CovarianceMatrix() = default;

    explicit CovarianceMatrix(CMatrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols()) {
            throw ShapeError("covariance must be square");
        }
        const double scale = entries_.norm();
        const double asym = (entries_ - entries_.adjoint()).norm();
        if (asym > kHermitianTol * std::max(scale, 1.0)) {
            throw DomainError("covariance is not Hermitian (residual " + std::to_string(asym) + ")");
        }
        // Purge roundoff so downstream quadratic forms are exactly real.
        entries_ = (0.5 * (entries_ + entries_.adjoint())).eval();
        if (entries_.rows() > 0) {
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(entries_, Eigen::EigenvaluesOnly);
            min_eigenvalue_ = eig.eigenvalues().minCoeff();
            if (min_eigenvalue_ < -kPsdTol) {
                throw DomainError("covariance is not PSD (min eigenvalue " +
                                  std::to_string(min_eigenvalue_) + ")");
            }
        }
    }

    static CovarianceMatrix zero(Eigen::Index n) { return CovarianceMatrix(CMatrix::Zero(n, n)); }
    static CovarianceMatrix scaled_identity(Eigen::Index n, double c) {
        return CovarianceMatrix(CMatrix::Identity(n, n) * cplx(c, 0.0));
    }

    const CMatrix& entries() const noexcept { return entries_; }
    Eigen::Index n() const noexcept { return entries_.rows(); }
    double trace() const { return entries_.trace().real(); }
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

    CovarianceMatrix scaled(double gamma) const {
        if (!(gamma >= 0.0)) throw DomainError("covariance scale must be nonnegative");
        return CovarianceMatrix(entries_ * cplx(gamma, 0.0));
    }

private:
    CMatrix entries_;
    double min_eigenvalue_ = 0.0;
};

}  // namespace isac
