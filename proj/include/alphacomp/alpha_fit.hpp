#pragma once

// Exact likelihood of the alpha-transformed Dirichlet model and its profile
// over alpha.
//
// With u_i = u_alpha(x_i) ~ Dirichlet(b), the log-likelihood of x_1..x_n is
//
//   l(alpha, b) = n log Gamma(b_+) - n sum_j log Gamma(b_j) + n d log|alpha|
//               + sum_ij (alpha b_j - 1) log x_ij - b_+ sum_i log sum_j x_ij^alpha
//
// which is sum_i [log f_b(u_i) + log|J_alpha(x_i)|] after expansion. The
// likelihood diverges at alpha = 0, so searches run over
// [lo, -delta] U [delta, hi].

#include "alphacomp/dirichlet.hpp"
#include "alphacomp/errors.hpp"
#include "alphacomp/simplex.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace alphacomp {

inline void require_same_dimension(const LogData& data, const DirichletParams& params) {
    if (data.cols() != params.size()) {
        throw DomainError("data has " + std::to_string(data.cols()) + " parts but parameters have " +
                          std::to_string(params.size()));
    }
}

/// Expanded form, evaluated straight from the log data.
inline double transformed_loglik(const LogData& data, double alpha, const DirichletParams& params) {
    detail::require_nonzero_alpha(alpha, "transformed_loglik");
    require_same_dimension(data, params);
    const std::size_t n = data.rows();
    const std::size_t dim = data.cols();
    const double nd = static_cast<double>(n);

    double linear = 0.0;
    double log_sums = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < dim; ++j) linear += (alpha * params[j] - 1.0) * row[j];
        log_sums += detail::log_sum_power(row, alpha);
    }
    return nd * params.log_normalizer() + nd * static_cast<double>(dim - 1) * std::log(std::abs(alpha)) +
           linear - params.gamma_plus() * log_sums;
}

inline double transformed_loglik(std::span<const Composition> data, double alpha, const DirichletParams& params) {
    return transformed_loglik(LogData::from_compositions(data), alpha, params);
}

/// Density-plus-Jacobian form: transform each row, evaluate the Dirichlet
/// density, add log|J|. An independent route to the same number.
inline double transformed_loglik_composed(const LogData& data, double alpha, const DirichletParams& params) {
    detail::require_nonzero_alpha(alpha, "transformed_loglik");
    require_same_dimension(data, params);
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto log_u = log_alpha_transform(data.row(i), alpha);
        total += log_density_from_logs(log_u, params) + log_jacobian(data.row(i), alpha);
    }
    return total;
}

/// Rows mapped through u_alpha, still in log form.
inline LogData transform_rows(const LogData& data, double alpha) {
    LogData out(data.rows(), data.cols());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto log_u = log_alpha_transform(data.row(i), alpha);
        std::copy(log_u.begin(), log_u.end(), out.row(i).begin());
    }
    return out;
}

inline double total_log_jacobian(const LogData& data, double alpha) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) s += log_jacobian(data.row(i), alpha);
    return s;
}

struct ProfilePoint {
    double value = 0.0;
    DirichletParams params;
};

/// max over gamma of transformed_loglik at fixed alpha: a Dirichlet MLE on the
/// transformed rows plus the gamma-free Jacobian total.
inline ProfilePoint profile_loglik(const LogData& data, double alpha,
                                   std::optional<DirichletParams> init = std::nullopt,
                                   const MleOptions& options = {}) {
    detail::require_nonzero_alpha(alpha, "profile_loglik");
    const auto stats = DirichletSuffStats::from_logs(transform_rows(data, alpha));
    try {
        ProfilePoint p;
        p.params = mle(stats, std::move(init), options);
        p.value = static_cast<double>(stats.n) * stats.mean_loglik(p.params) + total_log_jacobian(data, alpha);
        return p;
    } catch (const ConvergenceError& e) {
        char buf[32];
        const auto end = std::to_chars(buf, buf + sizeof buf, alpha).ptr;
        throw ConvergenceError("alpha = " + std::string(buf, end) + ": " + e.what(), e.last_iterate(),
                               e.gradient_norm());
    }
}

struct AlphaInterval {
    double lo = -1.0;
    double hi = 1.0;
};

struct SearchOptions {
    AlphaInterval bounds{};
    /// Half-width of the excluded neighbourhood of zero.
    double delta = 1e-3;
    /// Total number of grid points across both sides of zero.
    std::size_t grid_size = 82;
    /// Golden-section stops once the bracket is this narrow.
    double bracket_tolerance = 1e-4;
};

struct FitResult {
    double alpha_hat = 0.0;
    DirichletParams gamma_hat;
    double loglik = 0.0;
    /// Profile evaluations spent (grid plus refinement).
    std::size_t iterations = 0;
    bool converged = false;
    /// alpha_hat sits on an end of a search segment.
    bool at_boundary = false;
    AlphaInterval alpha_bounds{};
    double bracket_width = 0.0;
};

struct ProfileCurve {
    std::vector<double> alphas;
    std::vector<std::optional<double>> values;
    std::vector<std::optional<DirichletParams>> params;
    /// Failure message for each gap, empty where the fit succeeded.
    std::vector<std::string> failures;
};

namespace detail {

struct Segment {
    double lo;
    double hi;
};

inline std::vector<Segment> search_segments(const SearchOptions& opt) {
    const double lo = opt.bounds.lo;
    const double hi = opt.bounds.hi;
    if (!(opt.delta > 0.0)) throw DomainError("delta must be positive");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("alpha bounds must satisfy lo < hi");
    std::vector<Segment> segs;
    if (lo <= -opt.delta) segs.push_back({lo, std::min(hi, -opt.delta)});
    if (hi >= opt.delta) segs.push_back({std::max(lo, opt.delta), hi});
    if (segs.empty()) throw DomainError("alpha bounds lie entirely inside (-delta, delta)");
    for (const auto& s : segs) {
        if (!(s.lo < s.hi)) throw DomainError("alpha search segment is empty");
    }
    return segs;
}

// Linear grid on each segment. With two segments the positive side gets the
// extra point when grid_size is odd.
inline std::vector<std::vector<double>> segment_grids(const SearchOptions& opt) {
    if (opt.grid_size < 5) throw DomainError("grid_size must be at least 5");
    const auto segs = search_segments(opt);
    std::vector<std::size_t> counts;
    if (segs.size() == 1) {
        counts = {opt.grid_size};
    } else {
        const std::size_t pos = (opt.grid_size + 1) / 2;
        counts = {opt.grid_size - pos, pos};
    }
    std::vector<std::vector<double>> grids;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        std::vector<double> g(counts[s]);
        const double step = (segs[s].hi - segs[s].lo) / static_cast<double>(counts[s] - 1);
        for (std::size_t k = 0; k < counts[s]; ++k) g[k] = segs[s].lo + step * static_cast<double>(k);
        g.back() = segs[s].hi;
        grids.push_back(std::move(g));
    }
    return grids;
}

} // namespace detail

/// The grid profile_curve and fit_direct evaluate, in ascending order.
inline std::vector<double> alpha_grid(const SearchOptions& opt) {
    std::vector<double> out;
    for (const auto& g : detail::segment_grids(opt)) out.insert(out.end(), g.begin(), g.end());
    return out;
}

/// Profile log-likelihood on the grid. Each point warm-starts from its
/// neighbour on the same side of zero; failed points become gaps.
inline ProfileCurve profile_curve(const LogData& data, const SearchOptions& opt = {}) {
    ProfileCurve curve;
    for (const auto& grid : detail::segment_grids(opt)) {
        std::optional<DirichletParams> warm;
        for (double a : grid) {
            curve.alphas.push_back(a);
            try {
                auto p = profile_loglik(data, a, warm);
                warm = p.params;
                curve.values.push_back(p.value);
                curve.params.push_back(std::move(p.params));
                curve.failures.emplace_back();
            } catch (const Error& e) {
                curve.values.push_back(std::nullopt);
                curve.params.push_back(std::nullopt);
                curve.failures.emplace_back(e.what());
            }
        }
    }
    return curve;
}

inline ProfileCurve profile_curve(std::span<const Composition> data, const SearchOptions& opt = {}) {
    return profile_curve(LogData::from_compositions(data), opt);
}

/// Grid scan of the profile, then golden-section search inside the bracket
/// formed by the best grid point's neighbours.
inline FitResult fit_direct(const LogData& data, const SearchOptions& opt = {}) {
    const auto grids = detail::segment_grids(opt);
    const auto curve = profile_curve(data, opt);

    FitResult result;
    result.alpha_bounds = opt.bounds;

    // Locate the best grid point and its (segment, index).
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < curve.alphas.size(); ++k) {
        if (curve.values[k] && (!best || *curve.values[k] > *curve.values[*best])) best = k;
    }
    result.iterations = curve.alphas.size();
    if (!best) {
        throw FitError("profile likelihood failed at every grid point; first failure: " + curve.failures.front());
    }
    std::size_t seg = 0;
    std::size_t idx = *best;
    while (idx >= grids[seg].size()) idx -= grids[seg++].size();
    const auto& grid = grids[seg];

    double best_alpha = curve.alphas[*best];
    double best_value = *curve.values[*best];
    DirichletParams best_params = *curve.params[*best];

    auto evaluate = [&](double a) -> double {
        ++result.iterations;
        try {
            auto p = profile_loglik(data, a, best_params);
            if (p.value > best_value) {
                best_value = p.value;
                best_alpha = a;
                best_params = p.params;
            }
            return p.value;
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    double left = grid[idx == 0 ? 0 : idx - 1];
    double right = grid[std::min(idx + 1, grid.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = right - inv_phi * (right - left);
    double x2 = left + inv_phi * (right - left);
    double f1 = evaluate(x1);
    double f2 = evaluate(x2);
    int guard = 0;
    while (right - left > opt.bracket_tolerance && guard++ < 200) {
        if (f1 >= f2) {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - inv_phi * (right - left);
            f1 = evaluate(x1);
        } else {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + inv_phi * (right - left);
            f2 = evaluate(x2);
        }
    }
    result.bracket_width = right - left;
    result.converged = result.bracket_width <= opt.bracket_tolerance;
    result.alpha_hat = best_alpha;
    result.gamma_hat = best_params;
    result.at_boundary = best_alpha == grid.front() || best_alpha == grid.back();
    result.loglik = transformed_loglik(data, result.alpha_hat, result.gamma_hat);
    return result;
}

inline FitResult fit_direct(std::span<const Composition> data, const SearchOptions& opt = {}) {
    return fit_direct(LogData::from_compositions(data), opt);
}

} // namespace alphacomp
