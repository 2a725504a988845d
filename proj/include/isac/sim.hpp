#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "array_model.hpp"
#include "covariance.hpp"
#include "errors.hpp"
#include "idempotent.hpp"
#include "problem.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "types.hpp"

namespace isac::sim {

/// Draws are generated in fixed-size chunks, each from its own labelled
/// stream, so the values do not depend on how chunks are scheduled.
inline constexpr std::size_t kChunkSize = 8192;

struct SampleSet {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string stream_label;
    std::string statistic_name;

    std::size_t n() const noexcept { return values.size(); }
};

inline CVector sample_complex_gaussian_vector(int dim, double variance, RandomStream& stream) {
    if (dim < 1) throw DomainError("dimension must be >= 1");
    if (!(variance > 0.0)) throw DomainError("variance must be > 0");
    CVector out(dim);
    for (int i = 0; i < dim; ++i) out[i] = stream.complex_normal(variance);
    return out;
}

inline CVector sample_complex_gaussian_vector(int dim, double variance, std::uint64_t seed,
                                              const std::string& label = "cgauss") {
    RandomStream stream(seed, label);
    return sample_complex_gaussian_vector(dim, variance, stream);
}

inline std::string chunk_label(const std::string& base, std::size_t chunk) {
    return base + "/chunk=" + std::to_string(chunk);
}

/// gᴴCg for g ~ CN(0, σ_g² I). For a rank-m projector, 2·value/σ_g² ~ χ²₍₂ₘ₎.
inline SampleSet sensing_interference_samples(const CMatrix& c, double sigma_g_sq, std::size_t n_samples,
                                              std::uint64_t seed, const std::string& label = "sensing_interference") {
    if (c.rows() != c.cols()) throw ShapeError("covariance must be square");
    if (!(sigma_g_sq > 0.0)) throw DomainError("sigma_g_sq must be > 0");
    const auto dim = c.rows();
    SampleSet out{std::vector<double>(n_samples), seed, label, "g^H C g"};
    const double s = std::sqrt(0.5 * sigma_g_sq);
    for (std::size_t start = 0, chunk = 0; start < n_samples; start += kChunkSize, ++chunk) {
        RandomStream stream(seed, chunk_label(label, chunk));
        const auto count = static_cast<Eigen::Index>(std::min(kChunkSize, n_samples - start));
        CMatrix g(dim, count);
        for (Eigen::Index j = 0; j < count; ++j) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                const double re = stream.normal();
                const double im = stream.normal();
                g(i, j) = cplx(s * re, s * im);
            }
        }
        const CMatrix cg = c * g;
        for (Eigen::Index j = 0; j < count; ++j) {
            out.values[start + static_cast<std::size_t>(j)] = g.col(j).dot(cg.col(j)).real();
        }
    }
    return out;
}

inline SampleSet sensing_interference_samples(const CovarianceMatrix& c, double sigma_g_sq, std::size_t n_samples,
                                              std::uint64_t seed, const std::string& label = "sensing_interference") {
    return sensing_interference_samples(c.entries(), sigma_g_sq, n_samples, seed, label);
}

/// 2·value/σ_g², the statistic that is χ²₍₂ₘ₎ for a rank-m projector.
inline std::vector<double> normalized_interference(const SampleSet& s, double sigma_g_sq) {
    std::vector<double> out(s.values.size());
    std::transform(s.values.begin(), s.values.end(), out.begin(), [&](double x) { return 2.0 * x / sigma_g_sq; });
    return out;
}

struct RankCdf {
    int rank = 0;
    std::vector<double> empirical;
    /// P(m, t/σ_g²) at the same thresholds.
    std::vector<double> analytic;
    double mean = 0.0;
};

struct CdfTable {
    std::vector<double> thresholds;
    std::vector<RankCdf> ranks;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
};

/// Empirical CDF of gᴴCg for projectors of each requested rank, on a shared
/// grid of `points` thresholds from 0 to the largest sample observed. Each rank
/// uses its own stream; the projector seeds are nested in m.
inline CdfTable interference_cdf_experiment(const std::vector<int>& ranks, const ProblemSpec& spec,
                                            std::size_t n_samples, std::uint64_t seed, int points = 50) {
    if (points < 2) throw DomainError("need at least two thresholds");
    const UlaGeometry geometry(spec.n_sensing, spec.spacing_ratio);
    const AngleGrid targets(spec.targets_deg);
    std::vector<SampleSet> samples;
    double hi = 0.0;
    for (int m : ranks) {
        if (m < 1 || m >= spec.n_sensing) throw DomainError("rank must be in [1, n_sensing)");
        const auto p = construct_projector(augmented_steering_seed(targets, spec.half_width_deg, geometry, m));
        samples.push_back(sensing_interference_samples(p.entries(), spec.sigma_g_sq, n_samples, seed,
                                                       "interference_cdf/rank=" + std::to_string(m)));
        hi = std::max(hi, *std::max_element(samples.back().values.begin(), samples.back().values.end()));
    }
    CdfTable table;
    table.seed = seed;
    table.n_samples = n_samples;
    table.thresholds.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) table.thresholds[static_cast<std::size_t>(i)] = hi * i / (points - 1);
    for (std::size_t r = 0; r < ranks.size(); ++r) {
        const stats::EmpiricalCdf ecdf(samples[r].values);
        RankCdf row;
        row.rank = ranks[r];
        double sum = 0.0;
        for (double x : samples[r].values) sum += x;
        row.mean = sum / static_cast<double>(n_samples);
        for (double t : table.thresholds) {
            row.empirical.push_back(ecdf(t));
            row.analytic.push_back(stats::regularized_gamma_p(ranks[r], t / spec.sigma_g_sq));
        }
        table.ranks.push_back(std::move(row));
    }
    return table;
}

struct TailCheck {
    double empirical_prob = 0.0;
    double closed_form = 0.0;
    double abs_gap = 0.0;
    /// 4·√(p(1−p)/n) at the closed-form p.
    double bound = 0.0;
    bool within_bound = false;
};

/// Monte Carlo frequency of |hᴴw|² ≥ ξ against exp(-ξ/(‖w‖²σ_h²)), with w of
/// norm `w_norm` spread evenly over `dim` antennas.
inline TailCheck comm_constraint_mc_check(double w_norm, double sigma_h_sq, double xi, std::size_t n_samples,
                                          std::uint64_t seed, int dim = 4) {
    if (!(w_norm >= 0.0) || !(sigma_h_sq > 0.0) || !(xi >= 0.0)) throw DomainError("invalid tail-check arguments");
    if (n_samples == 0) throw DomainError("need at least one sample");
    TailCheck out;
    if (xi == 0.0) {
        out.closed_form = 1.0;
    } else if (w_norm == 0.0) {
        out.closed_form = 0.0;
    } else {
        out.closed_form = stats::comm_power_tail_prob(w_norm * w_norm, sigma_h_sq, xi);
    }
    const CVector w = CVector::Constant(dim, cplx(w_norm / std::sqrt(static_cast<double>(dim)), 0.0));
    std::size_t hits = 0;
    for (std::size_t start = 0, chunk = 0; start < n_samples; start += kChunkSize, ++chunk) {
        RandomStream stream(seed, chunk_label("comm_tail", chunk));
        const std::size_t count = std::min(kChunkSize, n_samples - start);
        for (std::size_t j = 0; j < count; ++j) {
            const CVector h = sample_complex_gaussian_vector(dim, sigma_h_sq, stream);
            if (std::norm(h.dot(w)) >= xi) ++hits;
        }
    }
    const double n = static_cast<double>(n_samples);
    out.empirical_prob = static_cast<double>(hits) / n;
    out.abs_gap = std::abs(out.empirical_prob - out.closed_form);
    out.bound = 4.0 * std::sqrt(out.closed_form * (1.0 - out.closed_form) / n);
    out.within_bound = out.abs_gap <= out.bound;
    return out;
}

}  // namespace isac::sim
