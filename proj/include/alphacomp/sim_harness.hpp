#pragma once

// Seeded experiment drivers: coalescing vs. general Dirichlet behaviour of
// y - ybar as alpha -> 0, the remainder order of the asymptotic likelihood,
// and the three-way estimator comparison.
//
// Every dataset is drawn from a stream keyed by (seed, alpha), so outputs are
// a pure function of the config and extending a grid leaves old points alone.

#include "alphacomp/alpha_fit.hpp"
#include "alphacomp/asymptotics.hpp"
#include "alphacomp/dirichlet.hpp"
#include "alphacomp/errors.hpp"
#include "alphacomp/random.hpp"
#include "alphacomp/simplex.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace alphacomp {

enum class SimMode { coalescing, general };

inline const char* to_string(SimMode m) { return m == SimMode::coalescing ? "coalescing" : "general"; }

struct SimConfig {
    SimMode mode = SimMode::coalescing;
    std::vector<double> alpha_grid;
    /// Coalescing: shapes (b/alpha^2)(1 + alpha c_j).
    double b = 1.0;
    std::vector<double> c;
    /// General: shapes b_vec / alpha^2.
    std::vector<double> b_vec;
    std::size_t n = 10000;
    std::uint64_t seed = 1;

    std::size_t dimension() const { return mode == SimMode::coalescing ? c.size() : b_vec.size(); }

    void validate() const {
        if (alpha_grid.empty()) throw ConfigError("alpha grid is empty");
        for (double a : alpha_grid) {
            if (a == 0.0 || !std::isfinite(a)) throw ConfigError("alpha grid must exclude 0");
        }
        if (n < 1) throw ConfigError("n must be positive");
        if (dimension() < 2) throw ConfigError("need at least 2 components");
        if (mode == SimMode::coalescing) {
            const double sum = std::accumulate(c.begin(), c.end(), 0.0);
            if (std::abs(sum) > kZeroSumTolerance) throw ConfigError("coalescing c must sum to zero");
            if (!(b > 0.0)) throw ConfigError("b must be positive");
        } else {
            for (double v : b_vec) {
                if (!(v > 0.0)) throw ConfigError("b_vec entries must be positive");
            }
        }
    }
};

/// Geometric grid of `points` values from `from` down to `to`.
inline std::vector<double> geometric_grid(double from, double to, std::size_t points) {
    if (points < 2 || !(from > 0.0) || !(to > 0.0)) throw ConfigError("geometric grid needs 2+ positive endpoints");
    std::vector<double> g(points);
    const double ratio = std::log(to / from) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) g[k] = from * std::exp(ratio * static_cast<double>(k));
    g.front() = from;
    g.back() = to;
    return g;
}

/// Dirichlet shapes the config induces at `alpha`.
inline DirichletParams simulation_shapes(const SimConfig& cfg, double alpha) {
    if (cfg.mode == SimMode::coalescing) {
        try {
            return coalescing_to_gamma({alpha, cfg.b, cfg.c});
        } catch (const DomainError& e) {
            throw ConfigError(std::string("induced shapes invalid: ") + e.what());
        }
    }
    std::vector<double> g(cfg.b_vec.size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = cfg.b_vec[j] / (alpha * alpha);
    try {
        return DirichletParams(std::move(g));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("induced shapes invalid: ") + e.what());
    }
}

namespace detail {

inline LogData simulate_from_stream(const SimConfig& cfg, double alpha, std::uint64_t stream_seed) {
    cfg.validate();
    require_nonzero_alpha(alpha, "simulate_dataset");
    const auto shapes = simulation_shapes(cfg, alpha);
    LogData log_u = sample_log(shapes, cfg.n, stream_seed);
    for (std::size_t i = 0; i < log_u.rows(); ++i) {
        const auto y = stable_inverse_log(log_u.row(i), alpha);
        std::copy(y.begin(), y.end(), log_u.row(i).begin());
    }
    return log_u;
}

} // namespace detail

/// Draws u ~ Dirichlet(shapes) and returns y = log u_alpha^{-1}(u) per row,
/// via the pivoted inverse.
inline LogData simulate_dataset(const SimConfig& cfg, double alpha) {
    return detail::simulate_from_stream(cfg, alpha, derive_seed(cfg.seed, alpha));
}

struct CurvePoint {
    double alpha = 0.0;
    std::vector<double> mean;        // Monte Carlo mean of y_j - ybar
    std::vector<double> std_error;   // its standard error
};

inline CurvePoint mean_logratio(const LogData& y, double alpha) {
    const std::size_t n = y.rows();
    const std::size_t dim = y.cols();
    CurvePoint pt;
    pt.alpha = alpha;
    pt.mean.assign(dim, 0.0);
    pt.std_error.assign(dim, 0.0);
    std::vector<double> centred(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = y.row(i);
        const double ybar = detail::mean(row);
        for (std::size_t j = 0; j < dim; ++j) {
            centred[i * dim + j] = row[j] - ybar;
            pt.mean[j] += row[j] - ybar;
        }
    }
    for (double& m : pt.mean) m /= static_cast<double>(n);
    if (n > 1) {
        for (std::size_t j = 0; j < dim; ++j) {
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dev = centred[i * dim + j] - pt.mean[j];
                ss += dev * dev;
            }
            pt.std_error[j] = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
        }
    }
    return pt;
}

inline std::vector<CurvePoint> mean_logratio_curve(const SimConfig& cfg) {
    cfg.validate();
    std::vector<CurvePoint> curve;
    curve.reserve(cfg.alpha_grid.size());
    for (double a : cfg.alpha_grid) curve.push_back(mean_logratio(simulate_dataset(cfg, a), a));
    return curve;
}

inline double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct OrderPoint {
    double alpha = 0.0;
    double exact = 0.0;
    double asymptotic = 0.0;
    double gap = 0.0;
    /// gap at the previous grid alpha divided by this gap; NaN for the first.
    double ratio = std::numeric_limits<double>::quiet_NaN();
};

/// |exact - asymptotic| log-likelihood on one simulated coalescing dataset per
/// alpha, both evaluated at the generating parameters.
///
/// All grid points draw from one shared stream (common random numbers), so
/// the datasets differ only through alpha and the gap ratios isolate the
/// remainder order instead of sampling noise in its coefficient.
inline std::vector<OrderPoint> order_study(const SimConfig& cfg) {
    cfg.validate();
    if (cfg.mode != SimMode::coalescing) throw ConfigError("order study needs coalescing mode");
    const std::uint64_t stream = derive_seed(cfg.seed, 0.0);
    std::vector<OrderPoint> out;
    for (double a : cfg.alpha_grid) {
        const auto data = detail::simulate_from_stream(cfg, a, stream);
        const CoalescingParams p{a, cfg.b, cfg.c};
        OrderPoint pt;
        pt.alpha = a;
        pt.exact = transformed_loglik(data, a, coalescing_to_gamma(p));
        pt.asymptotic = asymptotic_loglik(data, p);
        pt.gap = std::abs(pt.exact - pt.asymptotic);
        if (!out.empty()) pt.ratio = out.back().gap / pt.gap;
        out.push_back(pt);
    }
    return out;
}

struct ComparisonRow {
    std::string method;
    std::optional<std::vector<double>> estimates;
    std::string failure;
};

struct ComparisonTable {
    double alpha_used = 0.0;
    std::vector<std::string> component_labels;
    std::vector<ComparisonRow> rows;  // DirectMLE, Asymptotic1, Asymptotic2
    std::optional<FitResult> direct_fit;
};

inline std::vector<std::string> default_labels(std::size_t dim) {
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < dim; ++j) labels.push_back("x" + std::to_string(j + 1));
    return labels;
}

/// Shapes from the direct MLE and the two asymptotic fits at one alpha. With
/// no alpha given, fit_direct chooses it. Rows that fail carry the message.
inline ComparisonTable estimator_comparison(const LogData& data, std::optional<double> alpha = std::nullopt,
                                            std::vector<std::string> labels = {},
                                            const SearchOptions& search = {}) {
    ComparisonTable table;
    table.component_labels = labels.empty() ? default_labels(data.cols()) : std::move(labels);
    if (table.component_labels.size() != data.cols()) throw DomainError("label count does not match data");

    auto as_vector = [](const DirichletParams& p) { return std::vector<double>(p.gamma().begin(), p.gamma().end()); };

    ComparisonRow direct{"DirectMLE", std::nullopt, {}};
    std::optional<DirichletParams> warm;
    if (alpha) {
        table.alpha_used = *alpha;
        try {
            const auto p = profile_loglik(data, *alpha);
            warm = p.params;
            direct.estimates = as_vector(p.params);
        } catch (const Error& e) {
            direct.failure = e.what();
        }
    } else {
        auto fit = fit_direct(data, search);
        table.alpha_used = fit.alpha_hat;
        warm = fit.gamma_hat;
        direct.estimates = as_vector(fit.gamma_hat);
        table.direct_fit = std::move(fit);
    }
    table.rows.push_back(std::move(direct));

    ComparisonRow a1{"Asymptotic1", std::nullopt, {}};
    try {
        a1.estimates = as_vector(fit_asymptotic1(data, table.alpha_used).implied_gamma);
    } catch (const Error& e) {
        a1.failure = e.what();
    }
    table.rows.push_back(std::move(a1));

    ComparisonRow a2{"Asymptotic2", std::nullopt, {}};
    try {
        a2.estimates = as_vector(fit_asymptotic2(data, table.alpha_used, warm).implied_gamma);
    } catch (const Error& e) {
        a2.failure = e.what();
    }
    table.rows.push_back(std::move(a2));
    return table;
}

} // namespace alphacomp
