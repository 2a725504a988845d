#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rng.hpp"
#include "sim.hpp"
#include "solver.hpp"

namespace isac::sim {

struct SamplePathCheck {
    std::size_t n_symbols = 0;
    /// Mean of |y_k|² over the simulated symbols.
    double empirical_power = 0.0;
    /// Σ_i |h_kᴴw_i|² + g_kᴴCg_k + σ_n² for the same channel draw.
    double expected_power = 0.0;
    double relative_gap = 0.0;
};

struct RateReport {
    std::vector<double> mean_rate;
    std::size_t n_channels = 0;
    std::uint64_t seed = 0;
    SamplePathCheck sample_path;
};

/// r = L·x with x ~ CN(0, I) and L Lᴴ = C from the eigendecomposition of C.
inline CMatrix covariance_factor(const CMatrix& c) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(c);
    const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.cast<cplx>().asDiagonal();
}

/// Averages the achievable rate of every user over fresh (h, g) draws, and
/// simulates one received-signal path y_k = h_kᴴΣw_i s_i + g_kᴴr + n_k with
/// unit-power symbols to check the power bookkeeping of the rate expression.
inline RateReport rate_mc_check(const Solution& solution, const ProblemSpec& spec, std::size_t n_channels,
                                std::uint64_t seed, std::size_t n_symbols = 20000) {
    RateReport out;
    out.n_channels = n_channels;
    out.seed = seed;
    const int K = spec.users;
    if (K == 0 || n_channels == 0) return out;
    const CMatrix& c = solution.covariance.entries();
    out.mean_rate.assign(static_cast<std::size_t>(K), 0.0);

    std::vector<CVector> first_h;
    CVector first_g;
    for (std::size_t d = 0; d < n_channels; ++d) {
        RandomStream stream(seed, "rate_mc/draw=" + std::to_string(d));
        std::vector<CVector> h;
        for (int i = 0; i < K; ++i) h.push_back(sample_complex_gaussian_vector(spec.n_comm, spec.sigma_h_sq[i], stream));
        for (int u = 0; u < K; ++u) {
            const CVector g = sample_complex_gaussian_vector(spec.n_sensing, spec.sigma_g_sq, stream);
            out.mean_rate[static_cast<std::size_t>(u)] +=
                achievable_rate(solution.precoders, c, h, g, spec.noise_power, u, spec.rate_interference);
            if (d == 0 && u == spec.k0()) first_g = g;
        }
        if (d == 0) first_h = h;
    }
    for (double& r : out.mean_rate) r /= static_cast<double>(n_channels);

    const int k = spec.k0();
    const CMatrix factor = covariance_factor(c);
    RandomStream stream(seed, "rate_mc/sample_path");
    double acc = 0.0;
    for (std::size_t t = 0; t < n_symbols; ++t) {
        cplx y = 0.0;
        for (int i = 0; i < K; ++i) {
            y += first_h[static_cast<std::size_t>(k)].dot(solution.precoders.vectors[static_cast<std::size_t>(i)]) *
                 stream.complex_normal(1.0);
        }
        CVector x(spec.n_sensing);
        for (int j = 0; j < spec.n_sensing; ++j) x[j] = stream.complex_normal(1.0);
        y += first_g.dot(factor * x);
        y += stream.complex_normal(spec.noise_power);
        acc += std::norm(y);
    }
    out.sample_path.n_symbols = n_symbols;
    out.sample_path.empirical_power = acc / static_cast<double>(n_symbols);
    double expected = spec.noise_power + first_g.dot(c * first_g).real();
    for (int i = 0; i < K; ++i) {
        expected += std::norm(first_h[static_cast<std::size_t>(k)].dot(solution.precoders.vectors[static_cast<std::size_t>(i)]));
    }
    out.sample_path.expected_power = expected;
    out.sample_path.relative_gap = std::abs(out.sample_path.empirical_power - expected) / expected;
    return out;
}

}  // namespace isac::sim
