#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace isac::stats {

namespace detail {

inline constexpr double kEps = 1e-16;
inline constexpr int kMaxTerms = 100000;
inline constexpr double kTiny = 1e-300;

// Σ_{n≥0} p^n / (q (q+1) ... (q+n)); converges fast for p < q+1.
inline double gamma_series_sum(double q, double p) {
    double term = 1.0 / q;
    double sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= p / (q + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return sum;
    }
    return sum;
}

// Modified Lentz evaluation of the continued fraction for Γ(q,p)·e^p·p^{-q};
// converges fast for p >= q+1.
inline double gamma_continued_fraction(double q, double p) {
    double b = p + 1.0 - q;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - q);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

inline void check_args(double q, double p) {
    if (!(q > 0.0)) throw DomainError("incomplete gamma requires q > 0");
    if (!(p >= 0.0)) throw DomainError("incomplete gamma requires p >= 0");
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(q,p) = Γ(q,p)/Γ(q).
inline double regularized_gamma_q(double q, double p) {
    detail::check_args(q, p);
    if (p == 0.0) return 1.0;
    if (std::isinf(p)) return 0.0;
    const double log_prefactor = -p + q * std::log(p) - std::lgamma(q);
    if (p < q + 1.0) {
        return 1.0 - std::exp(log_prefactor) * detail::gamma_series_sum(q, p);
    }
    return std::exp(log_prefactor) * detail::gamma_continued_fraction(q, p);
}

/// Regularized lower incomplete gamma P(q,p) = γ(q,p)/Γ(q).
inline double regularized_gamma_p(double q, double p) {
    detail::check_args(q, p);
    if (p == 0.0) return 0.0;
    if (std::isinf(p)) return 1.0;
    const double log_prefactor = -p + q * std::log(p) - std::lgamma(q);
    if (p < q + 1.0) {
        return std::min(1.0, std::exp(log_prefactor) * detail::gamma_series_sum(q, p));
    }
    return std::max(0.0, 1.0 - std::exp(log_prefactor) * detail::gamma_continued_fraction(q, p));
}

/// γ(q,p) = ∫₀ᵖ t^{q-1} e^{-t} dt.
inline double lower_incomplete_gamma(double q, double p) {
    detail::check_args(q, p);
    if (p == 0.0) return 0.0;
    if (std::isinf(p)) return std::tgamma(q);
    const double log_prefactor = -p + q * std::log(p);
    if (p < q + 1.0) {
        return std::exp(log_prefactor) * detail::gamma_series_sum(q, p);
    }
    return std::tgamma(q) - std::exp(log_prefactor) * detail::gamma_continued_fraction(q, p);
}

/// Γ(q,p) = ∫ₚ^∞ t^{q-1} e^{-t} dt.
inline double upper_incomplete_gamma(double q, double p) {
    detail::check_args(q, p);
    if (p == 0.0) return std::tgamma(q);
    if (std::isinf(p)) return 0.0;
    const double log_prefactor = -p + q * std::log(p);
    if (p < q + 1.0) {
        return std::tgamma(q) - std::exp(log_prefactor) * detail::gamma_series_sum(q, p);
    }
    return std::exp(log_prefactor) * detail::gamma_continued_fraction(q, p);
}

/// CDF of χ² with an even number of degrees of freedom: F(2m; x) = P(m, x/2).
inline double chi2_cdf(int dof, double x) {
    if (dof < 2 || dof % 2 != 0) throw DomainError("chi2_cdf requires even dof >= 2");
    if (!(x >= 0.0)) throw DomainError("chi2_cdf requires x >= 0");
    return regularized_gamma_p(dof / 2, x / 2.0);
}

/// First-order Marcum Q-function Q₁(a,b).
///
/// a = 0 uses the closed form exp(-b²/2). For a > 0 the noncentral χ²₂ Poisson
/// mixture Σ_j Pois(j; a²/2)·Q(j+1, b²/2) is summed outward from the Poisson mode.
inline double marcum_q1(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q1 requires a, b >= 0");
    if (a == 0.0) return std::exp(-0.5 * b * b);
    if (b == 0.0) return 1.0;
    const double lambda = 0.5 * a * a;
    const double y = 0.5 * b * b;
    const auto mode = static_cast<long>(std::floor(lambda));
    auto log_weight = [lambda](long j) {
        return -lambda + static_cast<double>(j) * std::log(lambda) - std::lgamma(static_cast<double>(j) + 1.0);
    };
    double sum = 0.0;
    for (long j = mode; j >= 0; --j) {
        const double w = std::exp(log_weight(j));
        sum += w * regularized_gamma_q(static_cast<double>(j) + 1.0, y);
        if (w < 1e-18 && j < mode) break;
    }
    for (long j = mode + 1;; ++j) {
        const double w = std::exp(log_weight(j));
        sum += w * regularized_gamma_q(static_cast<double>(j) + 1.0, y);
        if (w < 1e-18) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// Prob(|hᴴw|² ≥ ξ) for h ~ CN(0, σ_h² I): Q₁(0, √ξ/σ_u) with σ_u² = ‖w‖²σ_h²/2,
/// which equals exp(-ξ / (‖w‖² σ_h²)).
inline double comm_power_tail_prob(double w_norm_sq, double sigma_h_sq, double xi) {
    if (!(w_norm_sq > 0.0) || !(sigma_h_sq > 0.0) || !(xi > 0.0)) {
        throw DomainError("comm_power_tail_prob requires positive arguments");
    }
    const double sigma_u = std::sqrt(0.5 * w_norm_sq * sigma_h_sq);
    return marcum_q1(0.0, std::sqrt(xi) / sigma_u);
}

/// Right-continuous empirical CDF over a sorted copy of the samples.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
        std::sort(sorted_.begin(), sorted_.end());
    }

    std::size_t n() const noexcept { return sorted_.size(); }
    const std::vector<double>& sorted_samples() const noexcept { return sorted_; }

    double operator()(double x) const {
        if (sorted_.empty()) return 0.0;
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

private:
    std::vector<double> sorted_;
};

/// Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)|, checking both sides of
/// every jump of the empirical CDF.
inline double ks_statistic(const EmpiricalCdf& samples, const std::function<double(double)>& reference_cdf) {
    const auto& xs = samples.sorted_samples();
    if (xs.empty()) throw DomainError("ks_statistic requires at least one sample");
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = reference_cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// Asymptotic two-sided KS critical value c(α)/√n for the usual levels.
inline double ks_critical_value(std::size_t n, double confidence = 0.999) {
    // c(α) = sqrt(-ln(α/2) / 2)
    const double alpha = 1.0 - confidence;
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace isac::stats
