#pragma once

// Property checks run by `isac check`. Each check is independent and reports
// a measured value against its threshold.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isac/isac.hpp"

namespace isac::tools {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

inline CMatrix random_seed_matrix(int n, int m, RandomStream& rs) {
    CMatrix a(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) a(i, j) = rs.complex_normal(1.0);
    }
    return a;
}

inline double ks_chi2(const std::vector<double>& normalized, int m) {
    const stats::EmpiricalCdf ecdf(normalized);
    return stats::ks_statistic(ecdf, [m](double x) { return stats::chi2_cdf(2 * m, x); });
}

inline std::vector<CheckResult> run_checks(const RunConfig& cfg) {
    const ProblemSpec& spec = cfg.spec;
    const std::uint64_t seed = cfg.seed;
    const std::size_t n = cfg.samples;
    std::vector<CheckResult> out;

    {
        RandomStream rs(seed, "check/idempotent");
        double worst_idem = 0.0;
        double worst_trace = 0.0;
        double worst_spec = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            const int m = 1 + trial % (spec.n_sensing - 1);
            const auto p = construct_projector(random_seed_matrix(spec.n_sensing, m, rs));
            const auto cert = validate_idempotent(p.entries());
            worst_idem = std::max(worst_idem, p.idem_residual);
            worst_trace = std::max(worst_trace, std::abs(cert.trace - m));
            worst_spec = std::max(worst_spec, cert.spectrum_residual);
        }
        out.push_back({"idempotent_residual", worst_idem <= 1e-10, worst_idem, 1e-10, "max ||C^2-C||_F over 40 seeds"});
        out.push_back({"projector_trace_equals_rank", worst_trace <= 1e-8, worst_trace, 1e-8, "max |tr C - m|"});
        out.push_back({"projector_spectrum", worst_spec <= 1e-8, worst_spec, 1e-8, "max distance of eigenvalues to {0,1}"});
    }

    const UlaGeometry geometry(spec.n_sensing, spec.spacing_ratio);
    const AngleGrid targets(spec.targets_deg);
    const double ks_tol = 0.01;
    for (int m : {1, 2, 3, 4, 6, 8}) {
        if (m >= spec.n_sensing) continue;
        auto p = construct_projector(augmented_steering_seed(targets, spec.half_width_deg, geometry, m));
        CMatrix c = p.entries();
        if (cfg.inject_fault) c *= 0.5;
        const auto s = sim::sensing_interference_samples(c, spec.sigma_g_sq, n, seed, "check/chi2/m=" + std::to_string(m));
        const double d = ks_chi2(sim::normalized_interference(s, spec.sigma_g_sq), m);
        out.push_back({"chi2_ks_rank_" + std::to_string(m), d < ks_tol, d, ks_tol,
                       cfg.inject_fault ? "fault injected: covariance scaled by 0.5" : "KS vs chi2(2m)"});
    }
    {
        const int m = std::min(2, spec.n_sensing - 1);
        const auto p = construct_projector(augmented_steering_seed(targets, spec.half_width_deg, geometry, m));
        const auto s = sim::sensing_interference_samples(CMatrix(0.5 * p.entries()), spec.sigma_g_sq, n, seed,
                                                         "check/chi2_control");
        const double d = ks_chi2(sim::normalized_interference(s, spec.sigma_g_sq), m);
        out.push_back({"chi2_negative_control", d > 0.05, d, 0.05, "0.5*projector must fail the KS test"});
    }

    {
        RandomStream rs(seed, "check/comm_tail_params");
        double worst = 0.0;
        bool ok = true;
        for (int t = 0; t < 10; ++t) {
            const double w = 0.3 + 2.0 * rs.uniform();
            const double sh = 0.02 + 0.2 * rs.uniform();
            const double xi = w * w * sh * (0.1 + 2.0 * rs.uniform());
            const auto r = sim::comm_constraint_mc_check(w, sh, xi, n, seed + static_cast<std::uint64_t>(t));
            ok = ok && r.within_bound;
            worst = std::max(worst, r.bound > 0 ? r.abs_gap / (r.bound / 4.0) : 0.0);
        }
        out.push_back({"comm_tail_monte_carlo", ok, worst, 4.0, "max |gap| in binomial standard errors"});
    }

    {
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double z = 0.5 * i;
            auto integrand = [](double x) { return x * std::exp(-0.5 * x * x); };
            const double integral = z >= 0.0
                                        ? 1.0 - boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                                    integrand, 0.0, z, 15, 1e-14)
                                        : 1.0;
            worst = std::max(worst, std::abs(stats::marcum_q1(0.0, z) - integral));
        }
        out.push_back({"marcum_closed_form", worst <= 1e-8, worst, 1e-8, "Q1(0,z) vs quadrature, z in 0..5"});
    }

    {
        RandomStream rs(seed, "check/tangency");
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const double z0 = 4.0 * rs.uniform();
            worst = std::max(worst, std::abs(sca::surrogate_f(z0, z0) - std::exp(-0.5 * z0 * z0)));
            RVector v0(3);
            for (int i = 0; i < 3; ++i) v0[i] = 0.2 + 2.0 * rs.uniform();
            worst = std::max(worst, std::abs(sca::surrogate_g(v0, v0) - sca::power_sum(v0)));
        }
        out.push_back({"surrogate_tangency", worst <= 1e-12, worst, 1e-12, "|f~(z0)-f(z0)|, |g~(v0)-g(v0)|"});
    }

    {
        const int m = choose_rank(spec, true);
        const auto p = construct_projector(steering_subspace_seed(targets, geometry, m));
        const auto s = sim::sensing_interference_samples(p.entries(), spec.sigma_g_sq, n, seed, "check/rho_prob");
        const stats::EmpiricalCdf ecdf(s.values);
        const double gap = std::abs(ecdf(spec.rho) - stats::regularized_gamma_p(m, spec.rho / spec.sigma_g_sq));
        out.push_back({"interference_probability", gap <= 0.01, gap, 0.01, "|Prob(g^H C g <= rho) - P(m, rho/sigma_g^2)|"});
    }

    {
        std::vector<int> ranks;
        for (int m : cfg.cdf_ranks) ranks.push_back(m);
        const auto table = sim::interference_cdf_experiment(ranks, spec, n, seed, cfg.cdf_points);
        double worst = 0.0;
        for (std::size_t a = 0; a + 1 < table.ranks.size(); ++a) {
            for (std::size_t b = a + 1; b < table.ranks.size(); ++b) {
                const bool a_lower = table.ranks[a].rank < table.ranks[b].rank;
                const auto& lo = a_lower ? table.ranks[a] : table.ranks[b];
                const auto& hi = a_lower ? table.ranks[b] : table.ranks[a];
                for (std::size_t i = 0; i < table.thresholds.size(); ++i) {
                    worst = std::max(worst, hi.empirical[i] - lo.empirical[i]);
                }
            }
        }
        out.push_back({"rank_stochastic_ordering", worst <= 0.02, worst, 0.02, "max CDF(higher rank) - CDF(lower rank)"});
    }

    {
        try {
            const auto sol = solve(spec, SolveOptions{seed});
            out.push_back({"solution_feasible", sol.feasibility.all_ok, static_cast<double>(sol.feasibility.violations.size()),
                           0.0, "violated constraints"});
            out.push_back({"sca_converged", sol.converged, static_cast<double>(sol.b_trace.iterations_used),
                           static_cast<double>(spec.sca.max_iter), "iterations used"});
        } catch (const InfeasibleError& e) {
            out.push_back({"solution_feasible", false, 1.0, 0.0, std::string("stage ") + e.stage() + ": " + e.what()});
            out.push_back({"sca_converged", false, 0.0, 0.0, "solve failed"});
        }
    }
    return out;
}

}  // namespace isac::tools
