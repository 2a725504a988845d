#pragma once

#include <algorithm>
#include <chrono>
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
#include "sca.hpp"
#include "sim.hpp"
#include "stats.hpp"
#include "types.hpp"

namespace isac {

inline UlaGeometry sensing_geometry(const ProblemSpec& spec) { return UlaGeometry(spec.n_sensing, spec.spacing_ratio); }

/// Largest m ≤ min(⌊P_s⌋, N_s − 1[, T]) with F(2m; ρ_norm) ≥ α. F decreases in
/// m, so the feasible ranks are exactly 1..m.
inline int choose_rank(const ProblemSpec& spec, bool target_seeded = true) {
    int cap = std::min(static_cast<int>(std::floor(spec.sensing_power + 1e-12)), spec.n_sensing - 1);
    if (target_seeded) cap = std::min(cap, spec.target_count());
    if (cap < 1) {
        throw InfeasibleError("choose_rank", "sensing power budget below 1 W admits no projector", spec.sensing_power);
    }
    const double x = spec.rho_normalized();
    for (int m = cap; m >= 1; --m) {
        if (stats::chi2_cdf(2 * m, x) >= spec.alpha) return m;
    }
    throw InfeasibleError("choose_rank", "no rank satisfies Prob(g^H C g <= rho) >= alpha", stats::chi2_cdf(2, x));
}

struct PrecoderSet {
    std::vector<CVector> vectors;
    RVector norms;

    std::size_t size() const noexcept { return vectors.size(); }
    double total_power() const { return norms.squaredNorm(); }
};

/// w_i = direction_i / v_i. Directions must be unit norm.
inline PrecoderSet build_precoders(const RVector& v, const std::vector<CVector>& directions) {
    if (static_cast<std::size_t>(v.size()) != directions.size()) throw ShapeError("one direction per user required");
    PrecoderSet out;
    out.norms.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const CVector& d = directions[static_cast<std::size_t>(i)];
        const double dn = d.norm();
        if (dn == 0.0) throw DomainError("precoder direction is the zero vector");
        if (std::abs(dn - 1.0) > 1e-9) throw DomainError("precoder direction must be unit norm");
        if (!(v[i] > 0.0)) throw DomainError("v entries must be > 0");
        out.vectors.push_back(d / v[i]);
        out.norms[i] = 1.0 / v[i];
    }
    return out;
}

/// h/‖h‖ per channel estimate; the first canonical basis vector for a zero estimate.
inline std::vector<CVector> matched_filter_directions(const std::vector<CVector>& estimates) {
    std::vector<CVector> out;
    for (const auto& h : estimates) {
        const double n = h.norm();
        if (n > 0.0) {
            out.push_back(h / n);
        } else {
            CVector e = CVector::Zero(h.size());
            e[0] = 1.0;
            out.push_back(e);
        }
    }
    return out;
}

/// log₂(1 + |h_kᴴw_k|² / (Σ_{i≠k} |h_•ᴴw_i|² + g_kᴴCg_k + σ_n²)), k 0-based.
/// `mode` selects h_k or h_i for the interference terms.
inline double achievable_rate(const PrecoderSet& precoders, const CMatrix& c, const std::vector<CVector>& h_all,
                              const CVector& g_k, double sigma_n_sq, int k,
                              RateInterference mode = RateInterference::kIntendedChannel) {
    if (h_all.size() != precoders.size()) throw ShapeError("one channel per precoder required");
    if (k < 0 || static_cast<std::size_t>(k) >= h_all.size()) throw ShapeError("user index out of range");
    if (c.rows() != g_k.size() || c.cols() != g_k.size()) throw ShapeError("sensing channel does not match covariance");
    for (std::size_t i = 0; i < h_all.size(); ++i) {
        if (h_all[i].size() != precoders.vectors[i].size()) throw ShapeError("channel and precoder lengths differ");
    }
    if (!(sigma_n_sq > 0.0)) throw DomainError("noise variance must be > 0");
    const auto ku = static_cast<std::size_t>(k);
    const double signal = std::norm(h_all[ku].dot(precoders.vectors[ku]));
    double interference = 0.0;
    for (std::size_t i = 0; i < h_all.size(); ++i) {
        if (i == ku) continue;
        const CVector& h = mode == RateInterference::kIntendedChannel ? h_all[ku] : h_all[i];
        interference += std::norm(h.dot(precoders.vectors[i]));
    }
    const double sensing = g_k.dot(c * g_k).real();
    return std::log2(1.0 + signal / (interference + sensing + sigma_n_sq));
}

struct FeasibilityReport {
    double intended_tail = 1.0;
    double nu = 0.0;
    std::vector<double> interferer_cdf;  // Prob(|h_iᴴw_i|² ≤ β_i), NaN at k
    std::vector<double> epsilon;
    double power_used = 0.0;
    double power_budget = 0.0;
    double interference_prob = 0.0;
    double alpha = 0.0;
    double trace = 0.0;
    double sensing_budget = 0.0;
    double min_eigenvalue = 0.0;
    std::vector<std::string> violations;
    bool all_ok = false;
};

inline constexpr double kFeasibilitySlack = 1e-9;

/// Checks the original closed-form probabilities (not the surrogates) for
/// precoder norms 1/v and a rank-m covariance scaled by gamma.
inline FeasibilityReport check_feasibility(const ProblemSpec& spec, const RVector& v, const CovarianceMatrix& c,
                                           int rank_m, double gamma) {
    FeasibilityReport r;
    r.nu = spec.nu;
    r.power_budget = spec.comm_power;
    r.alpha = spec.alpha;
    r.sensing_budget = spec.sensing_power;
    r.trace = c.trace();
    r.min_eigenvalue = c.min_eigenvalue();
    if (r.trace > spec.sensing_power + kFeasibilitySlack) r.violations.push_back("trace");
    if (r.min_eigenvalue < -kFeasibilitySlack) r.violations.push_back("psd");

    const double scale = gamma * spec.sigma_g_sq;
    r.interference_prob = spec.interference_scaling == InterferenceScaling::kChannelScaled
                              ? stats::regularized_gamma_p(rank_m, spec.rho / scale)
                              : stats::regularized_gamma_p(rank_m, spec.rho / 2.0);
    if (r.interference_prob < spec.alpha - kFeasibilitySlack) r.violations.push_back("sensing_interference");

    if (spec.users > 0) {
        const int k = spec.k0();
        r.power_used = sca::power_sum(v);
        if (r.power_used > spec.comm_power + kFeasibilitySlack) r.violations.push_back("comm_power");
        r.intended_tail = stats::comm_power_tail_prob(1.0 / (v[k] * v[k]), spec.sigma_h_sq[k], spec.xi);
        if (r.intended_tail < spec.nu - kFeasibilitySlack) r.violations.push_back("intended_reliability");
        for (int i = 0; i < spec.users; ++i) {
            r.epsilon.push_back(spec.epsilon[i]);
            if (i == k) {
                r.interferer_cdf.push_back(std::nan(""));
                continue;
            }
            const double cdf = 1.0 - stats::comm_power_tail_prob(1.0 / (v[i] * v[i]), spec.sigma_h_sq[i], spec.beta[i]);
            r.interferer_cdf.push_back(cdf);
            if (cdf < spec.epsilon[i] - kFeasibilitySlack) {
                r.violations.push_back("interferer_" + std::to_string(i + 1));
            }
        }
    }
    r.all_ok = r.violations.empty();
    return r;
}

struct Solution {
    ProblemSpec spec;
    std::uint64_t seed = 0;
    int rank_m = 0;
    ProjectorMatrix projector;
    IdempotencyCertificate certificate;
    /// The covariance actually transmitted (γ·projector).
    CovarianceMatrix covariance;
    double gamma = 1.0;
    DesiredPattern desired;
    RVector beampattern;
    double delta = 0.0;
    double matching_error = 0.0;
    /// v before and after handing leftover power to the intended user.
    RVector v_sca;
    RVector v;
    RVector z;
    std::vector<CVector> channel_estimates;
    PrecoderSet precoders;
    sca::ScaTrace z_trace;
    sca::ScaTrace b_trace;
    bool converged = false;
    int surrogate_violations = 0;
    FeasibilityReport feasibility;
    double intended_rate_at_estimate = 0.0;
    double wall_time_ms = 0.0;
    std::vector<std::string> notes;
};

struct SolveOptions {
    std::uint64_t seed = 1;
};

/// Channel estimates used to steer the precoders; fixed by the seed.
inline std::vector<CVector> draw_channel_estimates(const ProblemSpec& spec, std::uint64_t seed) {
    std::vector<CVector> out;
    for (int i = 0; i < spec.users; ++i) {
        RandomStream stream(seed, "channel_estimate/user=" + std::to_string(i + 1));
        out.push_back(sim::sample_complex_gaussian_vector(spec.n_comm, spec.sigma_h_sq[static_cast<std::size_t>(i)], stream));
    }
    return out;
}

/// Sequential pipeline: rank → projector → beampattern and δ → v-stage →
/// precoders. Every InfeasibleError thrown names the stage it came from.
inline Solution solve(const ProblemSpec& spec, const SolveOptions& options = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    spec.validate();
    Solution sol;
    sol.spec = spec;
    sol.seed = options.seed;

    sol.rank_m = choose_rank(spec, true);

    const UlaGeometry geometry = sensing_geometry(spec);
    const AngleGrid targets(spec.targets_deg);
    try {
        sol.projector = construct_projector(steering_subspace_seed(targets, geometry, sol.rank_m));
    } catch (const ConditioningError& e) {
        throw InfeasibleError("construct_projector", e.what(), e.singular_value_ratio());
    }
    sol.certificate = validate_idempotent(sol.projector.entries());

    const auto scaled = scale_to_power(sol.projector, spec.sensing_power, spec.full_budget, spec.rho,
                                       spec.sigma_g_sq, spec.alpha);
    sol.covariance = scaled.covariance;
    sol.gamma = scaled.gamma;
    if (!scaled.note.empty()) sol.notes.push_back(scaled.note);
    if (scaled.interference_warning) sol.notes.push_back("full-budget scaling violates the interference constraint");
    if (spec.interference_scaling == InterferenceScaling::kChannelScaled) {
        sol.notes.push_back("interference constraint evaluated as P(m, rho/sigma_g^2) (channel-variance scaled)");
    } else {
        sol.notes.push_back("interference constraint evaluated as P(m, rho/2) (channel variance ignored)");
    }
    sol.notes.push_back("PSD constraint is implied by the projector construction; checked anyway");

    const AngleGrid grid = AngleGrid::uniform(spec.grid_step_deg);
    sol.desired = desired_beampattern(grid, targets, spec.half_width_deg);
    sol.beampattern = transmit_beampattern(sol.covariance, grid, geometry);
    sol.delta = optimal_delta(sol.desired, sol.beampattern);
    sol.matching_error = matching_error(sol.delta, sol.desired, sol.beampattern);

    if (spec.users > 0) {
        auto vres = sca::solve_v_feasibility(spec);
        sol.v_sca = vres.v;
        sol.v = vres.v;
        sol.z = vres.z;
        sol.z_trace = std::move(vres.z_trace);
        sol.b_trace = std::move(vres.b_trace);
        sol.converged = vres.converged;
        sol.surrogate_violations = vres.surrogate_violations;
        const int k = spec.k0();
        if (spec.fill_intended_power) {
            const double others = sca::power_sum(sol.v) - 1.0 / (sol.v[k] * sol.v[k]);
            const double residual = spec.comm_power - others;
            if (residual > 0.0 && 1.0 / std::sqrt(residual) < sol.v[k]) {
                sol.v[k] = 1.0 / std::sqrt(residual);
                sol.notes.push_back("leftover communication power assigned to the intended user");
            }
        }
        sol.channel_estimates = draw_channel_estimates(spec, options.seed);
        sol.precoders = build_precoders(sol.v, matched_filter_directions(sol.channel_estimates));
        RandomStream gs(options.seed, "sensing_channel_estimate");
        const CVector g = sim::sample_complex_gaussian_vector(spec.n_sensing, spec.sigma_g_sq, gs);
        sol.intended_rate_at_estimate = achievable_rate(sol.precoders, sol.covariance.entries(), sol.channel_estimates,
                                                        g, spec.noise_power, k, spec.rate_interference);
    } else {
        sol.converged = true;
        sol.notes.push_back("no communication users: sensing-only solution");
    }
    sol.feasibility = check_feasibility(spec, sol.v, sol.covariance, sol.rank_m, sol.gamma);
    sol.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

struct BaselineRow {
    std::string name;
    int rank = 0;  // 0 for the isotropic reference
    double delta = 0.0;
    double matching_error = 0.0;
    double peak_sidelobe_db = 0.0;
    /// Monte Carlo mean of gᴴCg and of 2gᴴCg/σ_g².
    double mean_interference = 0.0;
    double mean_normalized_interference = 0.0;
    RVector beampattern;
};

struct BaselineComparison {
    DesiredPattern desired;
    std::vector<BaselineRow> rows;
};

/// Peak over the target lobes divided by the peak elsewhere, in dB.
inline double peak_sidelobe_db(const RVector& pattern, const RVector& desired) {
    double peak = 0.0;
    double side = 0.0;
    for (Eigen::Index i = 0; i < pattern.size(); ++i) {
        if (desired[i] > 0.0) {
            peak = std::max(peak, pattern[i]);
        } else {
            side = std::max(side, pattern[i]);
        }
    }
    if (side <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak / side);
}

/// Proposed projector against the isotropic covariance (P_s/N_s)·I and a
/// sweep of steering-seeded projectors of rank 1..min(8, N_s−1).
inline BaselineComparison compare_baselines(const ProblemSpec& spec, std::uint64_t seed = 1,
                                            std::size_t n_samples = 20000) {
    spec.validate();
    const UlaGeometry geometry = sensing_geometry(spec);
    const AngleGrid targets(spec.targets_deg);
    const AngleGrid grid = AngleGrid::uniform(spec.grid_step_deg);
    BaselineComparison out;
    out.desired = desired_beampattern(grid, targets, spec.half_width_deg);

    auto make_row = [&](std::string name, int rank, const CMatrix& c) {
        BaselineRow row;
        row.name = std::move(name);
        row.rank = rank;
        row.beampattern = transmit_beampattern(c, grid, geometry);
        row.delta = optimal_delta(out.desired, row.beampattern);
        row.matching_error = matching_error(row.delta, out.desired, row.beampattern);
        row.peak_sidelobe_db = peak_sidelobe_db(row.beampattern, out.desired.values);
        const auto s = sim::sensing_interference_samples(c, spec.sigma_g_sq, n_samples, seed, "baseline/" + row.name);
        double sum = 0.0;
        for (double x : s.values) sum += x;
        row.mean_interference = sum / static_cast<double>(n_samples);
        row.mean_normalized_interference = 2.0 * row.mean_interference / spec.sigma_g_sq;
        return row;
    };

    const int m = choose_rank(spec, true);
    const auto proposed = construct_projector(steering_subspace_seed(targets, geometry, m));
    const auto scaled = scale_to_power(proposed, spec.sensing_power, spec.full_budget);
    out.rows.push_back(make_row("proposed", m, scaled.covariance.entries()));
    out.rows.push_back(make_row("isotropic", 0,
                                CovarianceMatrix::scaled_identity(spec.n_sensing, spec.sensing_power / spec.n_sensing)
                                    .entries()));
    const int m_max = std::min(8, spec.n_sensing - 1);
    for (int r = 1; r <= m_max; ++r) {
        const auto p = construct_projector(augmented_steering_seed(targets, spec.half_width_deg, geometry, r));
        out.rows.push_back(make_row("rank_" + std::to_string(r), r, p.entries()));
    }
    return out;
}

}  // namespace isac
