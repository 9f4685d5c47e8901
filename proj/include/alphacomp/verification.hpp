#pragma once

// Self-checks of the asymptotic machinery that do not depend on any data set:
// remainder order of the two expansions, the pseudo-inverse quadratic
// form behind the Gaussian limit, and the (b, c) recentring identity. Used by
// the test suites and by `alphacomp verify`.

#include "alphacomp/asymptotics.hpp"
#include "alphacomp/io.hpp"
#include "alphacomp/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace alphacomp {

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Worst residual (or worst ratio deviation for order checks).
    double residual = 0.0;
    std::string detail;
};

struct OrderCheck {
    std::vector<double> alphas;
    std::vector<double> gaps;
    std::vector<double> ratios;
};

inline bool ratios_within(const std::vector<double>& ratios, double lo, double hi) {
    return std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r >= lo && r <= hi; });
}

inline OrderCheck log_normalizer_order(const std::vector<double>& alphas, double b, std::span<const double> c) {
    OrderCheck out;
    out.alphas = alphas;
    for (double a : alphas) out.gaps.push_back(std::abs(log_normalizer_exact(a, b, c) - log_normalizer_expansion(a, b, c)));
    for (std::size_t k = 1; k < out.gaps.size(); ++k) out.ratios.push_back(out.gaps[k - 1] / out.gaps[k]);
    return out;
}

inline OrderCheck log_sum_power_order(const std::vector<double>& alphas, double b, std::span<const double> c,
                               std::span<const double> y) {
    OrderCheck out;
    out.alphas = alphas;
    for (double a : alphas) out.gaps.push_back(std::abs(log_sum_power_exact(a, b, c, y) - log_sum_power_expansion(a, b, c, y)));
    for (std::size_t k = 1; k < out.gaps.size(); ++k) out.ratios.push_back(out.gaps[k - 1] / out.gaps[k]);
    return out;
}

/// z^T Sigma^- z with Sigma = sigma2 (I - 11^T/D), the pseudo-inverse taken
/// numerically, against b sum_j (z_j - zbar - mu_j)^2 with b = 1/sigma2.
/// Returns the absolute difference.
inline double pinv_quadratic_residual(std::span<const double> z, std::span<const double> mu, double sigma2) {
    const auto dim = static_cast<Eigen::Index>(z.size());
    const Eigen::MatrixXd centring =
        Eigen::MatrixXd::Identity(dim, dim) - Eigen::MatrixXd::Constant(dim, dim, 1.0 / static_cast<double>(dim));
    const Eigen::MatrixXd sigma = sigma2 * centring;
    const Eigen::MatrixXd pinv = sigma.completeOrthogonalDecomposition().pseudoInverse();

    const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    Eigen::VectorXd r(dim);
    for (Eigen::Index j = 0; j < dim; ++j) r(j) = z[j] - zbar - mu[j];
    const double quadratic_form = r.dot(pinv * r);
    const double closed_form = r.squaredNorm() / sigma2;
    return std::abs(quadratic_form - closed_form);
}

inline CheckResult check_pinv_quadratic(std::size_t instances, std::uint64_t seed, double tolerance = 1e-10) {
    Rng rng(seed);
    CheckResult res{"pseudo-inverse quadratic form", true, 0.0, {}};
    for (std::size_t t = 0; t < instances; ++t) {
        const std::size_t dim = 2 + static_cast<std::size_t>(rng.uniform() * 6.0);
        std::vector<double> z(dim), mu(dim);
        for (auto& v : z) v = 2.0 * rng.normal();
        for (auto& v : mu) v = rng.normal();
        const double mu_bar = detail::mean(mu);
        for (auto& v : mu) v -= mu_bar;
        const double sigma2 = std::exp(2.0 * rng.uniform() - 1.0);
        res.residual = std::max(res.residual, pinv_quadratic_residual(z, mu, sigma2));
    }
    res.passed = res.residual <= tolerance;
    res.detail = std::to_string(instances) + " instances, max |difference| vs tolerance " + format_double(tolerance);
    return res;
}

/// Largest relative difference between (b/alpha^2)(1+alpha c_j) and the same
/// shape rebuilt from normalize_params.
inline double recentring_residual(double alpha, double b, std::span<const double> c) {
    const auto np = normalize_params(alpha, b, c);
    double worst = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double original = b / (alpha * alpha) * (1.0 + alpha * c[j]);
        const double rebuilt = np.b_star / (alpha * alpha) * (1.0 + alpha * np.c_star[j]);
        worst = std::max(worst, std::abs(original - rebuilt) / std::abs(original));
    }
    const double sum = std::accumulate(np.c_star.begin(), np.c_star.end(), 0.0);
    return std::max(worst, std::abs(sum));
}

inline CheckResult check_recentring(std::size_t instances, std::uint64_t seed, double tolerance = 1e-12) {
    Rng rng(seed);
    CheckResult res{"recentring identity", true, 0.0, {}};
    for (std::size_t t = 0; t < instances; ++t) {
        const std::size_t dim = 2 + static_cast<std::size_t>(rng.uniform() * 6.0);
        const double alpha = rng.uniform() - 0.5;
        const double b = std::exp(4.0 * rng.uniform() - 2.0);
        std::vector<double> c(dim);
        for (auto& v : c) v = 2.0 * rng.uniform() - 1.0;
        res.residual = std::max(res.residual, recentring_residual(alpha, b, c));
    }
    res.passed = res.residual <= tolerance;
    res.detail = std::to_string(instances) + " instances, max relative difference vs tolerance " +
                 format_double(tolerance);
    return res;
}

struct VerifySettings {
    std::vector<double> alphas{0.04, 0.02, 0.01};
    double b = 1.0;
    std::vector<double> c{0.1, 0.3, -0.4};
    std::vector<double> log_row{std::log(0.2), std::log(0.3), std::log(0.5)};
    double ratio_lo = 3.5;
    double ratio_hi = 4.5;
    std::size_t instances = 100;
    std::uint64_t seed = 20240601;
};

inline CheckResult summarize_order(const std::string& name, const OrderCheck& oc, double lo, double hi) {
    CheckResult res{name, ratios_within(oc.ratios, lo, hi), 0.0, {}};
    std::string d = "ratios";
    for (double r : oc.ratios) {
        d += " " + format_double(r);
        res.residual = std::max(res.residual, std::abs(r - 4.0));
    }
    res.detail = d + " (band [" + format_double(lo) + ", " + format_double(hi) + "])";
    return res;
}

inline std::vector<CheckResult> run_verification(const VerifySettings& s = {}) {
    std::vector<CheckResult> out;
    out.push_back(summarize_order("log-Gamma expansion O(alpha^2)", log_normalizer_order(s.alphas, s.b, s.c), s.ratio_lo,
                                  s.ratio_hi));
    out.push_back(summarize_order("log-sum-power expansion O(alpha^2)",
                                  log_sum_power_order(s.alphas, s.b, s.c, s.log_row), s.ratio_lo, s.ratio_hi));
    out.push_back(check_pinv_quadratic(s.instances, s.seed));
    out.push_back(check_recentring(s.instances, s.seed + 1));
    return out;
}

} // namespace alphacomp
