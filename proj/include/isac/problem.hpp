#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace isac {

/// How the Marcum arguments a_k, b_i scale with v = 1/‖w‖.
enum class CoefficientForm {
    /// a = √2·v·√ξ/σ_h, consistent with σ_u² = ‖w‖²σ_h²/2.
    kVarianceConsistent,
    /// a = 2·v·√ξ/σ_h as printed in the final convex program.
    kLiteral,
};

/// How the sensing-interference threshold enters the χ² CDF.
enum class InterferenceScaling {
    /// Prob(gᴴCg ≤ ρ) = P(m, ρ/σ_g²), accounting for g ~ CN(0, σ_g² I).
    kChannelScaled,
    /// Prob(gᴴCg ≤ ρ) = P(m, ρ/2), ignoring the channel variance.
    kLiteral,
};

/// Which channel multiplies the interfering precoders in the SINR.
enum class RateInterference {
    /// Σ_{i≠k} |h_kᴴ w_i|².
    kIntendedChannel,
    /// Σ_{i≠k} |h_iᴴ w_i|².
    kLiteral,
};

/// Damping schedules ω_k = omega_ratio^k and Ω_k = big_omega_ratio^k with two
/// stopping tolerances (z-block and b-block).
struct ScaConfig {
    double omega_ratio = 0.1;
    double big_omega_ratio = 0.1;
    double zeta1 = 1e-4;
    double zeta2 = 1e-4;
    int max_iter = 100;

    double omega(int k) const { return std::pow(omega_ratio, k); }
    double big_omega(int k) const { return std::pow(big_omega_ratio, k); }

    void validate() const {
        if (!(omega_ratio > 0.0 && omega_ratio <= 1.0)) throw ConfigError("sca.omega_ratio", "must be in (0, 1]");
        if (!(big_omega_ratio > 0.0 && big_omega_ratio <= 1.0)) {
            throw ConfigError("sca.big_omega_ratio", "must be in (0, 1]");
        }
        if (!(zeta1 > 0.0)) throw ConfigError("sca.zeta1", "must be > 0");
        if (!(zeta2 > 0.0)) throw ConfigError("sca.zeta2", "must be > 0");
        if (max_iter < 1) throw ConfigError("sca.max_iter", "must be >= 1");
    }
};

/// Scenario parameters. Powers in watts, angles in degrees. Per-user vectors
/// (sigma_h_sq, beta, epsilon) have one entry per user; the intended user's
/// beta and epsilon entries are unused.
struct ProblemSpec {
    int n_sensing = 12;
    int n_comm = 12;
    int users = 3;
    /// 1-based index k of the intended user.
    int intended_user = 1;

    std::vector<double> targets_deg{-22.0, 0.0, 22.0};
    double half_width_deg = 5.0;
    double spacing_ratio = 0.5;
    double grid_step_deg = 1.0;

    double total_power = 10.0;
    double sensing_power = 5.0;
    double comm_power = 5.0;
    double noise_power = 1.0;

    std::vector<double> sigma_h_sq{0.05, 0.05, 0.05};
    double sigma_g_sq = 0.05;

    double xi = 0.001;
    std::vector<double> beta{0.1, 0.1, 0.1};
    double rho = 2.0;

    double nu = 0.9;
    std::vector<double> epsilon{0.5, 0.5, 0.5};
    double alpha = 0.9;

    ScaConfig sca{};
    CoefficientForm coefficient_form = CoefficientForm::kVarianceConsistent;
    InterferenceScaling interference_scaling = InterferenceScaling::kChannelScaled;
    RateInterference rate_interference = RateInterference::kIntendedChannel;
    /// Scale the projector to Tr(C) = P_s instead of keeping Tr(C) = m.
    bool full_budget = false;
    /// Give the power left after the SCA stage to the intended user.
    bool fill_intended_power = true;

    int n_total() const { return n_sensing + n_comm; }
    int target_count() const { return static_cast<int>(targets_deg.size()); }
    /// 0-based index of the intended user.
    int k0() const { return intended_user - 1; }

    /// Threshold fed to the χ²₍₂ₘ₎ CDF for the sensing-interference constraint.
    double rho_normalized() const {
        return interference_scaling == InterferenceScaling::kChannelScaled ? 2.0 * rho / sigma_g_sq : rho;
    }

    /// Field-level validation; throws ConfigError naming the first bad field.
    void validate() const {
        if (n_sensing < 2) throw ConfigError("n_sensing", "must be >= 2");
        if (n_comm < 1) throw ConfigError("n_comm", "must be >= 1");
        if (users < 0) throw ConfigError("users", "must be >= 0");
        if (users > 0 && (intended_user < 1 || intended_user > users)) {
            throw ConfigError("intended_user", "must be in 1..users");
        }
        if (targets_deg.empty()) throw ConfigError("targets_deg", "at least one target required");
        for (std::size_t i = 0; i < targets_deg.size(); ++i) {
            if (!(targets_deg[i] >= -90.0 && targets_deg[i] <= 90.0)) {
                throw ConfigError("targets_deg", "angles must lie in [-90, 90]");
            }
            if (i > 0 && !(targets_deg[i] > targets_deg[i - 1])) {
                throw ConfigError("targets_deg", "angles must be strictly increasing");
            }
        }
        if (!(half_width_deg > 0.0)) throw ConfigError("half_width_deg", "must be > 0");
        for (std::size_t i = 1; i < targets_deg.size(); ++i) {
            if (targets_deg[i] - targets_deg[i - 1] <= 2.0 * half_width_deg) {
                throw ConfigError("targets_deg", "targets must be separated by more than 2*half_width_deg");
            }
        }
        if (!(spacing_ratio > 0.0)) throw ConfigError("spacing_ratio", "must be > 0");
        if (!(grid_step_deg > 0.0 && grid_step_deg <= 90.0)) throw ConfigError("grid_step_deg", "must be in (0, 90]");
        if (!(total_power > 0.0)) throw ConfigError("total_power", "must be > 0");
        if (!(sensing_power > 0.0)) throw ConfigError("sensing_power", "must be > 0");
        if (!(comm_power > 0.0)) throw ConfigError("comm_power", "must be > 0");
        if (sensing_power + comm_power > total_power * (1.0 + 1e-12)) {
            throw ConfigError("sensing_power", "sensing_power + comm_power exceeds total_power");
        }
        if (!(noise_power > 0.0)) throw ConfigError("noise_power", "must be > 0");
        if (!(sigma_g_sq > 0.0)) throw ConfigError("sigma_g_sq", "must be > 0");
        check_per_user("sigma_h_sq", sigma_h_sq, [](double x) { return x > 0.0; }, "entries must be > 0");
        check_per_user("beta", beta, [](double x) { return x > 0.0; }, "entries must be > 0");
        check_per_user("epsilon", epsilon, [](double x) { return x > 0.0 && x < 1.0; }, "entries must be in (0, 1)");
        if (!(xi > 0.0)) throw ConfigError("xi", "must be > 0");
        if (!(rho >= 0.0)) throw ConfigError("rho", "must be >= 0");
        if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("nu", "must be in (0, 1)");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must be in (0, 1)");
        sca.validate();
    }

    /// The reference scenario: 24 antennas split evenly, 3 users, 3 targets,
    /// P_t = 10 dBW split evenly, σ² = 0.05, β/σ_n² = 0.1, ρ/σ_n² = 2, ξ/β = 0.01.
    static ProblemSpec reference() { return ProblemSpec{}; }

private:
    template <class Pred>
    void check_per_user(const char* field, const std::vector<double>& values, Pred ok, const char* msg) const {
        if (static_cast<int>(values.size()) != users) {
            throw ConfigError(field, "expected one entry per user (" + std::to_string(users) + ")");
        }
        for (double x : values) {
            if (!ok(x)) throw ConfigError(field, msg);
        }
    }
};

}  // namespace isac
