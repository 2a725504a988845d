#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "problem.hpp"
#include "stats.hpp"
#include "types.hpp"

namespace isac::sca {

struct ScaTrace {
    /// x_0, x_1, ..., x_{iterations_used}.
    std::vector<RVector> iterates;
    /// ‖x_k − x_{k−1}‖ for k = 1..iterations_used.
    std::vector<double> step_norms;
    bool converged = false;
    int iterations_used = 0;
};

/// Second-order Taylor expansion of f(z) = exp(-z²/2) about z0.
inline double surrogate_f(double z, double z0) {
    const double e = std::exp(-0.5 * z0 * z0);
    const double dz = z - z0;
    return e - z0 * dz * e + 0.5 * (z0 * z0 - 1.0) * dz * dz * e;
}

/// Per-coordinate second-order expansion of g(v) = Σ 1/v_i² about v0.
inline double surrogate_g(const RVector& v, const RVector& v0) {
    if (v.size() != v0.size()) throw ShapeError("surrogate_g: v and v0 differ in length");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v0.size(); ++i) {
        const double a = v0[i];
        if (!(a > 0.0)) throw DomainError("surrogate_g requires v0 > 0");
        const double d = v[i] - a;
        sum += 1.0 / (a * a) - 2.0 / (a * a * a) * d + 3.0 / (a * a * a * a) * d * d;
    }
    return sum;
}

inline double power_sum(const RVector& v) { return v.array().square().inverse().sum(); }

/// Minimizer of a 1-D quadratic c0 + c1·t + c2·t² over [lo, hi].
inline double minimize_quadratic_on_interval(double c1, double c2, double lo, double hi) {
    auto value = [&](double t) { return c1 * t + c2 * t * t; };
    double best = value(lo) <= value(hi) ? lo : hi;
    if (c2 > 0.0) {
        const double vertex = -c1 / (2.0 * c2);
        if (vertex > lo && vertex < hi && value(vertex) < value(best)) best = vertex;
    }
    return best;
}

/// Trust-region half-width, as a fraction of the current point, for both
/// blocks. 1/3 is where the g surrogate has its stationary point (4v0/3), so
/// the z box never forces the v block past it.
inline constexpr double kTrustFraction = 1.0 / 3.0;

/// argmin of f̃(·|z0) over [z_lo, (1+τ)·max(z0, z_lo)].
inline double tail_subproblem_minimizer(double z0, double z_lo) {
    const double e = std::exp(-0.5 * z0 * z0);
    const double hi = (1.0 + kTrustFraction) * std::max(z0, z_lo);
    // f̃(z0 + t) = e − z0·e·t + (z0²−1)/2·e·t²
    const double t = minimize_quadratic_on_interval(-z0 * e, 0.5 * (z0 * z0 - 1.0) * e, z_lo - z0, hi - z0);
    return z0 + t;
}

using SubproblemOracle = std::function<std::optional<RVector>(const RVector&)>;

/// Damped successive convex approximation:
///   x̂ = oracle(x_k);  x_{k+1} = x_k + ω_k (x̂ − x_k),  ω_k = omega_ratio^k.
/// Stops once ‖x_{k+1} − x_k‖ ≤ zeta1 or after max_iter updates. An empty
/// oracle result throws InfeasibleError.
inline ScaTrace sca_iterate(const SubproblemOracle& oracle, const RVector& x0, const ScaConfig& config) {
    config.validate();
    ScaTrace trace;
    trace.iterates.push_back(x0);
    RVector x = x0;
    for (int k = 0; k < config.max_iter; ++k) {
        const auto xhat = oracle(x);
        if (!xhat) {
            throw InfeasibleError("sca_iterate", "subproblem infeasible at iteration " + std::to_string(k));
        }
        if (xhat->size() != x.size()) throw ShapeError("oracle changed the point dimension");
        const RVector next = x + config.omega(k) * (*xhat - x);
        const double step = (next - x).norm();
        x = next;
        trace.iterates.push_back(x);
        trace.step_norms.push_back(step);
        trace.iterations_used = k + 1;
        if (step <= config.zeta1) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

/// Oracle for the scalar program min f̃(z|z_k) s.t. exp(-z²/2) ≤ tail_max.
inline SubproblemOracle tail_constraint_oracle(double tail_max) {
    if (!(tail_max > 0.0 && tail_max < 1.0)) throw DomainError("tail bound must be in (0, 1)");
    const double z_lo = std::sqrt(-2.0 * std::log(tail_max));
    return [z_lo](const RVector& x) -> std::optional<RVector> {
        RVector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = tail_subproblem_minimizer(x[i], z_lo);
        return out;
    };
}

/// Bounds that the true probabilistic constraints place on v = 1/‖w‖.
struct VBounds {
    /// c in a = c·v·√ξ/σ_h.
    double coefficient = 0.0;
    /// Upper bound on v_k from exp(-a_k²/2) ≥ ν.
    double v_max_intended = 0.0;
    /// Lower bounds on v_i (i ≠ k) from exp(-b_i²/2) ≤ 1 − ε_i; 0 at index k.
    RVector v_min;
    /// Smallest attainable Σ 1/v_i²; the interferers can approach zero power.
    double power_lower_bound = 0.0;
};

inline double marcum_coefficient(CoefficientForm form) {
    return form == CoefficientForm::kLiteral ? 2.0 : std::sqrt(2.0);
}

inline VBounds v_bounds(const ProblemSpec& spec) {
    const int K = spec.users;
    const int k = spec.k0();
    VBounds b;
    b.coefficient = marcum_coefficient(spec.coefficient_form);
    b.v_min = RVector::Zero(K);
    const double a_max = std::sqrt(-2.0 * std::log(spec.nu));
    b.v_max_intended = a_max * std::sqrt(spec.sigma_h_sq[k]) / (b.coefficient * std::sqrt(spec.xi));
    for (int i = 0; i < K; ++i) {
        if (i == k) continue;
        const double z_lo = std::sqrt(-2.0 * std::log(1.0 - spec.epsilon[i]));
        b.v_min[i] = z_lo * std::sqrt(spec.sigma_h_sq[i]) / (b.coefficient * std::sqrt(spec.beta[i]));
    }
    b.power_lower_bound = b.v_max_intended > 0.0 ? 1.0 / (b.v_max_intended * b.v_max_intended)
                                                 : std::numeric_limits<double>::infinity();
    return b;
}

struct VFeasibilityResult {
    /// v_i = 1/‖w_i‖ for all K users.
    RVector v;
    /// Marcum arguments b_i of the interferers (users other than k, in order).
    RVector z;
    ScaTrace z_trace;
    ScaTrace b_trace;
    bool converged = false;
    VBounds bounds;
    /// Iterations where the surrogate tail f̃ exceeded 1−ε at the z minimizer.
    int surrogate_violations = 0;
};

/// The v-stage: damped SCA over two blocks.
///
/// z-block: Marcum arguments b_i = c·v_i·√β_i/σ_h_i of the interferers,
/// minimizing f̃(z|z^k) over S0 = [z_lo, (1+τ)z^k] where z_lo inverts
/// exp(-z²/2) ≤ 1−ε_i. b-block: all v_i, minimizing g̃(v|v^k) over S1, the box
/// v_k ≤ v_max (intended reliability ν), v_i ≥ z_i^{k+1}/c_i (linked to the
/// updated z), |v − v^k| ≤ τ·v^k. Both subproblems are separable quadratics
/// solved in closed form. Stops when both step norms fall below ζ1 and ζ2.
inline VFeasibilityResult solve_v_feasibility(const ProblemSpec& spec) {
    spec.validate();
    const int K = spec.users;
    if (K < 1) throw DomainError("solve_v_feasibility requires at least one user");
    const int k = spec.k0();
    const ScaConfig& cfg = spec.sca;

    VFeasibilityResult res;
    res.bounds = v_bounds(spec);
    const VBounds& bounds = res.bounds;
    const double pc = spec.comm_power;
    if (!(bounds.power_lower_bound <= pc)) {
        throw InfeasibleError("v_feasibility",
                              "intended-user reliability needs power " + std::to_string(bounds.power_lower_bound) +
                                  " > P_c = " + std::to_string(pc),
                              bounds.power_lower_bound);
    }

    std::vector<int> interferers;
    for (int i = 0; i < K; ++i) {
        if (i != k) interferers.push_back(i);
    }
    const auto n_int = static_cast<Eigen::Index>(interferers.size());
    RVector coef_int(n_int);
    RVector z_lo(n_int);
    for (Eigen::Index j = 0; j < n_int; ++j) {
        const int i = interferers[static_cast<std::size_t>(j)];
        coef_int[j] = bounds.coefficient * std::sqrt(spec.beta[i]) / std::sqrt(spec.sigma_h_sq[i]);
        z_lo[j] = bounds.v_min[i] * coef_int[j];
    }

    // Equal power split, projected onto the true constraint box.
    RVector v = RVector::Constant(K, std::sqrt(static_cast<double>(K) / pc));
    v[k] = std::min(v[k], bounds.v_max_intended);
    for (int i : interferers) v[i] = std::max(v[i], bounds.v_min[i]);
    if (power_sum(v) > pc) {
        const double remaining = pc - 1.0 / (v[k] * v[k]);
        double int_power = 0.0;
        for (int i : interferers) int_power += 1.0 / (v[i] * v[i]);
        if (!(remaining > 0.0)) {
            throw InfeasibleError("v_feasibility", "no power left for interfering users", bounds.power_lower_bound);
        }
        const double s = std::sqrt(int_power / remaining);
        for (int i : interferers) v[i] *= s;
    }
    RVector z(n_int);
    for (Eigen::Index j = 0; j < n_int; ++j) z[j] = coef_int[j] * v[interferers[static_cast<std::size_t>(j)]];

    res.z_trace.iterates.push_back(z);
    res.b_trace.iterates.push_back(v);

    for (int it = 0; it < cfg.max_iter; ++it) {
        RVector z_hat(n_int);
        for (Eigen::Index j = 0; j < n_int; ++j) {
            const int i = interferers[static_cast<std::size_t>(j)];
            z_hat[j] = tail_subproblem_minimizer(z[j], z_lo[j]);
            if (surrogate_f(z_hat[j], z[j]) > 1.0 - spec.epsilon[i] + 1e-12) ++res.surrogate_violations;
        }
        const RVector z_next = z + cfg.omega(it) * (z_hat - z);

        RVector v_hat(K);
        for (int i = 0; i < K; ++i) {
            double lo = (1.0 - kTrustFraction) * v[i];
            double hi = (1.0 + kTrustFraction) * v[i];
            if (i == k) {
                hi = std::min(hi, bounds.v_max_intended);
            } else {
                const auto j = std::find(interferers.begin(), interferers.end(), i) - interferers.begin();
                lo = std::max(lo, z_next[j] / coef_int[j]);
                hi = std::max(hi, lo);
            }
            // g̃_i(v_i + t) = 1/v² − (2/v³)·t + (3/v⁴)·t²
            const double a = v[i];
            const double t = minimize_quadratic_on_interval(-2.0 / (a * a * a), 3.0 / (a * a * a * a), lo - a, hi - a);
            v_hat[i] = a + t;
        }
        if (surrogate_g(v_hat, v) > pc * (1.0 + 1e-12)) {
            throw InfeasibleError("v_feasibility", "power surrogate exceeds P_c at iteration " + std::to_string(it),
                                  surrogate_g(v_hat, v));
        }
        const RVector v_next = v + cfg.big_omega(it) * (v_hat - v);

        const double step_z = (z_next - z).norm();
        const double step_b = (v_next - v).norm();
        z = z_next;
        v = v_next;
        res.z_trace.iterates.push_back(z);
        res.b_trace.iterates.push_back(v);
        res.z_trace.step_norms.push_back(step_z);
        res.b_trace.step_norms.push_back(step_b);
        res.z_trace.iterations_used = res.b_trace.iterations_used = it + 1;
        if (step_z <= cfg.zeta1 && step_b <= cfg.zeta2) {
            res.converged = true;
            break;
        }
    }
    res.z_trace.converged = res.b_trace.converged = res.converged;
    res.v = v;
    res.z = z;
    return res;
}

}  // namespace isac::sca
