#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "array_model.hpp"
#include "covariance.hpp"
#include "errors.hpp"
#include "stats.hpp"
#include "types.hpp"

namespace isac {

/// Orthogonal projector of rank m, carried with its idempotency residual.
struct ProjectorMatrix {
    CovarianceMatrix base;
    int rank_m = 0;
    double idem_residual = 0.0;

    const CMatrix& entries() const noexcept { return base.entries(); }
    Eigen::Index n() const noexcept { return base.n(); }
};

struct IdempotencyCertificate {
    double symmetry_residual = 0.0;
    double idem_residual = 0.0;
    int numeric_rank = 0;
    double trace = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    /// Largest distance of any eigenvalue from {0, 1}.
    double spectrum_residual = 0.0;
    bool is_identity = false;
    bool is_zero = false;
    bool passed = false;
};

inline constexpr double kSeedSingularCutoff = 1e-10;

/// C = A (AᴴA)⁻¹ Aᴴ for a full-column-rank seed A (n×m, 1 ≤ m < n).
///
/// (AᴴA)⁻¹ is formed as V Σ⁻² Vᴴ from the SVD A = UΣVᴴ, so the Gram matrix is
/// never inverted directly and the rank test works on σ(A), not σ(A)².
inline ProjectorMatrix construct_projector(const CMatrix& seed) {
    const auto n = seed.rows();
    const auto m = seed.cols();
    if (m < 1) throw DomainError("seed must have at least one column");
    if (m >= n) throw DomainError("seed must have fewer columns than rows (projector would be the identity)");

    Eigen::JacobiSVD<CMatrix> svd(seed, Eigen::ComputeThinV);
    const RVector& sv = svd.singularValues();
    const double ratio = sv.size() > 0 && sv[0] > 0.0 ? sv[sv.size() - 1] / sv[0] : 0.0;
    if (!(ratio >= kSeedSingularCutoff)) {
        throw ConditioningError("seed is rank deficient (singular value ratio " + std::to_string(ratio) + ")", ratio);
    }
    const CMatrix& v = svd.matrixV();
    const RVector inv_sq = sv.array().square().inverse();
    const CMatrix gram_inv = v * inv_sq.cast<cplx>().asDiagonal() * v.adjoint();
    CMatrix c = seed * gram_inv * seed.adjoint();
    c = (0.5 * (c + c.adjoint())).eval();

    ProjectorMatrix out{CovarianceMatrix(c), static_cast<int>(m), 0.0};
    out.idem_residual = (out.entries() * out.entries() - out.entries()).norm();
    return out;
}

/// Residuals of C as a Hermitian idempotent. Never throws on non-projectors;
/// `passed` reports whether every residual is within `tol`.
inline IdempotencyCertificate validate_idempotent(const CMatrix& c, double tol = 1e-8) {
    if (c.rows() != c.cols()) throw ShapeError("validate_idempotent requires a square matrix");
    const auto n = c.rows();
    IdempotencyCertificate cert;
    cert.symmetry_residual = (c - c.adjoint()).norm();
    cert.idem_residual = (c * c - c).norm();
    cert.trace = c.trace().real();

    const CMatrix herm = 0.5 * (c + c.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
    const RVector& ev = eig.eigenvalues();
    cert.min_eigenvalue = n > 0 ? ev.minCoeff() : 0.0;
    cert.max_eigenvalue = n > 0 ? ev.maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > 0.5) ++cert.numeric_rank;
        cert.spectrum_residual = std::max(cert.spectrum_residual, std::min(std::abs(ev[i]), std::abs(ev[i] - 1.0)));
    }
    cert.is_identity = (c - CMatrix::Identity(n, n)).norm() <= tol;
    cert.is_zero = c.norm() <= tol;
    cert.passed = cert.symmetry_residual <= tol && cert.idem_residual <= tol &&
                  std::abs(cert.trace - cert.numeric_rank) <= tol * static_cast<double>(n) &&
                  !cert.is_identity && !cert.is_zero;
    return cert;
}

inline IdempotencyCertificate validate_idempotent(const CovarianceMatrix& c, double tol = 1e-8) {
    return validate_idempotent(c.entries(), tol);
}

/// Steering vectors toward the first m targets, one per column.
inline CMatrix steering_subspace_seed(const AngleGrid& targets, const UlaGeometry& geometry, int m) {
    if (m < 1) throw DomainError("seed rank must be >= 1");
    if (static_cast<std::size_t>(m) > targets.size()) throw DomainError("seed rank exceeds number of targets");
    if (m >= geometry.n_antennas()) throw DomainError("seed rank must be below the antenna count");
    CMatrix a(geometry.n_antennas(), m);
    for (int t = 0; t < m; ++t) a.col(t) = steering_vector(geometry, targets[static_cast<std::size_t>(t)]);
    return a;
}

/// Seed for ranks beyond the target count: the T target steering vectors,
/// then steering vectors at offsets ±Δ/2, ±Δ, ±3Δ/2, ... around each target in
/// turn. Columns are nested in m, so the spanned subspaces grow with m.
inline CMatrix augmented_steering_seed(const AngleGrid& targets, double half_width_deg,
                                       const UlaGeometry& geometry, int m) {
    if (targets.size() == 0) throw DomainError("augmented seed needs at least one target");
    if (static_cast<std::size_t>(m) <= targets.size()) return steering_subspace_seed(targets, geometry, m);
    if (m >= geometry.n_antennas()) throw DomainError("seed rank must be below the antenna count");

    std::vector<double> angles(targets.angles());
    for (int step = 1; static_cast<int>(angles.size()) < m; ++step) {
        const double offset = 0.5 * half_width_deg * ((step + 1) / 2) * (step % 2 == 1 ? 1.0 : -1.0);
        for (double phi : targets.angles()) {
            if (static_cast<int>(angles.size()) == m) break;
            angles.push_back(std::clamp(phi + offset, -90.0, 90.0));
        }
    }
    CMatrix a(geometry.n_antennas(), m);
    for (int j = 0; j < m; ++j) a.col(j) = steering_vector(geometry, angles[static_cast<std::size_t>(j)]);
    return a;
}

struct ScaledCovariance {
    CovarianceMatrix covariance;
    double gamma = 1.0;
    bool idempotent = true;
    /// Set when γ pushes Prob(gᴴγCg ≤ ρ) below α.
    bool interference_warning = false;
    std::string note;
};

/// Trace accounting for Tr(C) ≤ P_s. Without `full_budget` the projector is
/// returned unchanged (requires m ≤ P_s). With it, C is scaled by γ = P_s/m;
/// γC is then no longer idempotent and 2gᴴ(γC)g/σ_g² is γ·χ²₍₂ₘ₎.
inline ScaledCovariance scale_to_power(const ProjectorMatrix& p, double budget_ps, bool full_budget,
                                       double rho = 0.0, double sigma_g_sq = 1.0, double alpha = 0.0) {
    if (!(budget_ps > 0.0)) throw DomainError("sensing power budget must be > 0");
    ScaledCovariance out{p.base, 1.0, true, false, {}};
    if (!full_budget) {
        if (p.rank_m > budget_ps + 1e-12) {
            throw InfeasibleError("scale_to_power", "projector trace exceeds sensing budget", p.rank_m);
        }
        out.note = "unscaled projector, trace = rank";
        return out;
    }
    out.gamma = budget_ps / p.rank_m;
    out.covariance = p.base.scaled(out.gamma);
    out.idempotent = std::abs(out.gamma - 1.0) <= 1e-12;
    if (!out.idempotent) {
        out.note = "gamma*C is not idempotent; quadratic form is (gamma*sigma_g^2/2)*chi2(2m)";
    }
    if (rho > 0.0 && alpha > 0.0) {
        const double prob = stats::regularized_gamma_p(p.rank_m, rho / (out.gamma * sigma_g_sq));
        out.interference_warning = prob < alpha;
    }
    return out;
}

}  // namespace isac
