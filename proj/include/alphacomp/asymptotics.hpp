#pragma once

// Small-alpha asymptotics of the alpha-transformed Dirichlet model.
//
// Coalescing shapes b_j = (b/alpha^2)(1 + alpha c_j) with sum_j c_j = 0 give
// a log-likelihood with a finite limit as alpha -> 0:
//
//   l = (nd/2) log(b/2pi) - (b/2) sum_ij (y_ij - ybar_i - c_j)^2
//       + n C0 + alpha sum_i C1_i + O(alpha^2)
//
//   C0   = -log(D)/2 - D ybar_++
//   C1_i = -(b/6) (D kappa3_i - sum_j c_j^3)
//
// The sign in front of sum_j c_j^3 is fixed by expanding log Gamma(b_j) to
// third order in alpha c_j: (1+e) log(1+e) = e + e^2/2 - e^3/6 + O(e^4). The
// other sign leaves an O(alpha) error term and the gap to the exact
// likelihood only halves when alpha halves.

#include "alphacomp/alpha_fit.hpp"
#include "alphacomp/dirichlet.hpp"
#include "alphacomp/errors.hpp"
#include "alphacomp/simplex.hpp"
#include "alphacomp/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace alphacomp {

inline constexpr double kZeroSumTolerance = 1e-10;

struct CoalescingParams {
    double alpha = 1.0;
    double b = 1.0;
    std::vector<double> c;

    void validate() const {
        detail::require_nonzero_alpha(alpha, "CoalescingParams");
        if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("coalescing b must be positive");
        if (c.size() < 2) throw DomainError("coalescing c needs at least 2 entries");
        const double sum = std::accumulate(c.begin(), c.end(), 0.0);
        if (std::abs(sum) > kZeroSumTolerance) {
            throw DomainError("coalescing c must sum to zero (sum = " + std::to_string(sum) + ")");
        }
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (!(1.0 + alpha * c[j] > 0.0)) {
                throw DomainError("shape " + std::to_string(j) + " is not positive: 1 + alpha c_j <= 0");
            }
        }
    }
};

inline DirichletParams coalescing_to_gamma(const CoalescingParams& p) {
    p.validate();
    std::vector<double> g(p.c.size());
    const double scale = p.b / (p.alpha * p.alpha);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = scale * (1.0 + p.alpha * p.c[j]);
    return DirichletParams(std::move(g));
}

struct CumulantSet {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
};

/// First three sample cumulants of one row. Central moments are formed from
/// deviations about the mean, which is algebraically the raw-moment formula
/// but exactly shift invariant in practice.
inline CumulantSet sample_cumulants(std::span<const double> y) {
    if (y.size() < 2) throw DomainError("sample_cumulants: need at least 2 values");
    const double inv = 1.0 / static_cast<double>(y.size());
    CumulantSet k;
    k.k1 = std::accumulate(y.begin(), y.end(), 0.0) * inv;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : y) {
        const double dev = v - k.k1;
        m2 += dev * dev;
        m3 += dev * dev * dev;
    }
    k.k2 = m2 * inv;
    k.k3 = k.k2 == 0.0 ? 0.0 : m3 * inv;
    return k;
}

/// Pieces of the expansion, summed over observations, so callers can inspect
/// or recombine them.
struct AsymptoticTerms {
    double log_b_term = 0.0;  // (nd/2) log(b / 2pi)
    double quadratic = 0.0;   // -(b/2) sum_ij (y_ij - ybar_i - c_j)^2
    double c0 = 0.0;          // n C0
    double kappa3_sum = 0.0;  // sum_i kappa3_i
    double c_cubed = 0.0;     // sum_j c_j^3
    std::size_t n = 0;
    std::size_t dim = 0;
    double b = 0.0;
    double alpha = 0.0;

    /// alpha sum_i C1_i.
    double first_order() const {
        return -alpha * b / 6.0 * (static_cast<double>(dim) * kappa3_sum - static_cast<double>(n) * c_cubed);
    }
    double total() const { return log_b_term + quadratic + c0 + first_order(); }
};

inline AsymptoticTerms asymptotic_terms(const LogData& data, const CoalescingParams& p) {
    p.validate();
    if (data.cols() != p.c.size()) throw DomainError("asymptotic_loglik: dimension mismatch");
    AsymptoticTerms t;
    t.n = data.rows();
    t.dim = data.cols();
    t.b = p.b;
    t.alpha = p.alpha;
    const double dim = static_cast<double>(t.dim);
    const double nd = static_cast<double>(t.n) * (dim - 1.0);
    t.log_b_term = 0.5 * nd * std::log(p.b / (2.0 * std::numbers::pi));
    double sq = 0.0;
    double grand = 0.0;
    for (std::size_t i = 0; i < t.n; ++i) {
        const auto row = data.row(i);
        const auto k = sample_cumulants(row);
        for (std::size_t j = 0; j < t.dim; ++j) {
            const double r = row[j] - k.k1 - p.c[j];
            sq += r * r;
        }
        grand += k.k1;
        t.kappa3_sum += k.k3;
    }
    t.quadratic = -0.5 * p.b * sq;
    t.c0 = static_cast<double>(t.n) * (-0.5 * std::log(dim)) - dim * grand;
    for (double cj : p.c) t.c_cubed += cj * cj * cj;
    return t;
}

/// Expansion of the coalescing log-likelihood through the alpha^1 term.
inline double asymptotic_loglik(const LogData& data, const CoalescingParams& p) {
    return asymptotic_terms(data, p).total();
}

/// c-hat_j = ybar_+j - ybar_++.
inline std::vector<double> estimate_c_hat(const LogData& data) {
    if (data.rows() < 1) throw DomainError("estimate_c_hat: empty data");
    const std::size_t n = data.rows();
    const std::size_t dim = data.cols();
    // Row-centre first so the result sums to zero to rounding.
    std::vector<double> c(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        const double row_mean = detail::mean(row);
        for (std::size_t j = 0; j < dim; ++j) c[j] += row[j] - row_mean;
    }
    for (double& v : c) v /= static_cast<double>(n);
    const double drift = detail::mean(c);
    for (double& v : c) v -= drift;
    return c;
}

/// b-hat = [ (nd)^-1 sum_ij (y_ij - ybar_+j - ybar_i+ + ybar_++)^2 ]^-1.
inline double estimate_b_hat(const LogData& data) {
    const std::size_t n = data.rows();
    const std::size_t dim = data.cols();
    if (n < 2) throw DomainError("estimate_b_hat: need at least 2 observations");
    const auto c = estimate_c_hat(data);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        const double row_mean = detail::mean(row);
        for (std::size_t j = 0; j < dim; ++j) {
            const double r = row[j] - row_mean - c[j];
            sq += r * r;
        }
    }
    const double mean_sq = sq / (static_cast<double>(n) * static_cast<double>(dim - 1));
    if (!(mean_sq > 0.0)) {
        throw DegenerateDataError("estimate_b_hat: two-way residuals vanish (replicated compositions)");
    }
    return 1.0 / mean_sq;
}

enum class AsymptoticVariant { asymptotic1, asymptotic2 };

inline const char* to_string(AsymptoticVariant v) {
    return v == AsymptoticVariant::asymptotic1 ? "Asymptotic1" : "Asymptotic2";
}

struct AsymptoticFit {
    double alpha = 0.0;
    std::vector<double> c_hat;
    double b_hat = 0.0;
    DirichletParams implied_gamma;
    AsymptoticVariant variant = AsymptoticVariant::asymptotic1;
    /// alpha^2 gamma-hat; Asymptotic2 only.
    std::vector<double> b_vec;
};

/// Closed-form coalescing estimates mapped to Dirichlet shapes at `alpha`.
inline AsymptoticFit fit_asymptotic1(const LogData& data, double alpha) {
    detail::require_nonzero_alpha(alpha, "fit_asymptotic1");
    AsymptoticFit fit;
    fit.alpha = alpha;
    fit.variant = AsymptoticVariant::asymptotic1;
    fit.c_hat = estimate_c_hat(data);
    fit.b_hat = estimate_b_hat(data);
    fit.implied_gamma = coalescing_to_gamma({alpha, fit.b_hat, fit.c_hat});
    return fit;
}

/// General Dirichlet(b/alpha^2) fit: the inner MLE at fixed alpha, reported
/// through b = alpha^2 gamma. (b-hat, c-hat) are the coalescing coordinates of
/// the same shapes: b-hat = mean_j b_j, c-hat_j = (b_j / b-hat - 1) / alpha.
inline AsymptoticFit fit_asymptotic2(const LogData& data, double alpha,
                                     std::optional<DirichletParams> init = std::nullopt) {
    detail::require_nonzero_alpha(alpha, "fit_asymptotic2");
    AsymptoticFit fit;
    fit.alpha = alpha;
    fit.variant = AsymptoticVariant::asymptotic2;
    fit.implied_gamma = profile_loglik(data, alpha, std::move(init)).params;
    const double a2 = alpha * alpha;
    fit.b_vec.resize(fit.implied_gamma.size());
    for (std::size_t j = 0; j < fit.b_vec.size(); ++j) fit.b_vec[j] = a2 * fit.implied_gamma[j];
    fit.b_hat = detail::mean(fit.b_vec);
    fit.c_hat.resize(fit.b_vec.size());
    for (std::size_t j = 0; j < fit.b_vec.size(); ++j) fit.c_hat[j] = (fit.b_vec[j] / fit.b_hat - 1.0) / alpha;
    return fit;
}

struct NormalizedParams {
    double b_star = 0.0;
    std::vector<double> c_star;
};

/// Moves a nonzero mean of c into b without changing any b_j:
/// b* = b (1 + alpha cbar), c*_j = (c_j - cbar) / (1 + alpha cbar).
inline NormalizedParams normalize_params(double alpha, double b, std::span<const double> c) {
    const double cbar = detail::mean(c);
    const double factor = 1.0 + alpha * cbar;
    if (!(factor > 0.0)) throw DomainError("normalize_params: 1 + alpha * mean(c) must be positive");
    NormalizedParams out;
    out.b_star = b * factor;
    out.c_star.resize(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) out.c_star[j] = (c[j] - cbar) / factor;
    return out;
}

/// Log of the Gaussian limit of alpha^d f_{gamma/alpha^2}(gammabar + alpha v)
/// on the zero-sum hyperplane:
///   -(d/2) log 2pi + (1/2) log(gamma_+^d / prod gammabar_j) - (1/2) sum gamma_+ v_j^2 / gammabar_j
inline double gaussian_limit_logdensity(std::span<const double> v, const DirichletParams& gamma) {
    if (v.size() != gamma.size()) throw DomainError("gaussian_limit_logdensity: dimension mismatch");
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    if (std::abs(sum) > kZeroSumTolerance) {
        throw DomainError("gaussian_limit_logdensity: v must sum to zero (sum = " + std::to_string(sum) + ")");
    }
    const double gp = gamma.gamma_plus();
    const double d = static_cast<double>(v.size() - 1);
    double log_prod = 0.0;
    double quad = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double gbar = gamma[j] / gp;
        log_prod += std::log(gbar);
        quad += gp * v[j] * v[j] / gbar;
    }
    return -0.5 * d * std::log(2.0 * std::numbers::pi) + 0.5 * (d * std::log(gp) - log_prod) - 0.5 * quad;
}

/// (D/alpha)(gammabar - 1/D): the centring of y - ybar under
/// Dirichlet(gamma/alpha^2), to leading order in gammabar - 1/D.
inline std::vector<double> leading_mean_shift(double alpha, const DirichletParams& gamma) {
    detail::require_nonzero_alpha(alpha, "leading_mean_shift");
    const double dim = static_cast<double>(gamma.size());
    std::vector<double> shift(gamma.size());
    for (std::size_t j = 0; j < shift.size(); ++j) {
        shift[j] = dim / alpha * (gamma[j] / gamma.gamma_plus() - 1.0 / dim);
    }
    return shift;
}

// Expansion of log Gamma(sum b_j) - sum log Gamma(b_j) for coalescing shapes,
// through the alpha^1 term.
inline double log_normalizer_expansion(double alpha, double b, std::span<const double> c) {
    const double dim = static_cast<double>(c.size());
    const double d = dim - 1.0;
    double c2 = 0.0;
    double c3 = 0.0;
    for (double v : c) {
        c2 += v * v;
        c3 += v * v * v;
    }
    return b * dim * std::log(dim) / (alpha * alpha) - d * std::log(std::abs(alpha)) + 0.5 * d * std::log(b) -
           0.5 * std::log(dim) - 0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * b * c2 + alpha * b / 6.0 * c3;
}

inline double log_normalizer_exact(double alpha, double b, std::span<const double> c) {
    CoalescingParams p{alpha, b, std::vector<double>(c.begin(), c.end())};
    return coalescing_to_gamma(p).log_normalizer();
}

// Expansion of sum_j b_j log sum_k x_k^alpha through the alpha^1 term.
inline double log_sum_power_expansion(double alpha, double b, std::span<const double> c, std::span<const double> y) {
    const double dim = static_cast<double>(c.size());
    const auto k = sample_cumulants(y);
    return b * dim / (alpha * alpha) * std::log(dim) + b * dim / alpha * k.k1 + 0.5 * b * dim * k.k2 +
           alpha * b * dim / 6.0 * k.k3;
}

inline double log_sum_power_exact(double alpha, double b, std::span<const double> c, std::span<const double> y) {
    CoalescingParams p{alpha, b, std::vector<double>(c.begin(), c.end())};
    return coalescing_to_gamma(p).gamma_plus() * detail::log_sum_power(y, alpha);
}

} // namespace alphacomp
