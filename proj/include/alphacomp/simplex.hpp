#pragma once

// Compositions, the alpha-transformation family and its companions:
//
//   u_alpha(x)_j = x_j^alpha / sum_k x_k^alpha        (power transform)
//   w(x)_j       = log x_j - mean_k log x_k           (centred log-ratio)
//   Delta_alpha  = (D/|alpha|) ||u_alpha(x) - u_alpha(y)||
//   log|J_alpha| = d log|alpha| + (alpha-1) sum_j log x_j - D log sum_k x_k^alpha
//
// Everything here works on the open simplex. Internally the transforms are
// evaluated in log space so that small |alpha| and strongly skewed inputs do
// not lose the O(alpha) deviation from the barycentre.

#include "alphacomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace alphacomp {

// Sum deviation that construction silently absorbs by renormalizing.
inline constexpr double kClosureTolerance = 1e-8;

// Below this |alpha| the inverse goes through stable_inverse_log.
inline constexpr double kDirectInverseMinAlpha = 0.01;

/// A point in the interior of the simplex: D >= 2 strictly positive parts
/// summing to one.
class Composition {
public:
    Composition() = default;

    /// Validates and stores `values`. A sum within kClosureTolerance of one is
    /// renormalized; anything further off is rejected.
    static Composition from_values(std::vector<double> values) {
        check_positive(values);
        const double sum = std::accumulate(values.begin(), values.end(), 0.0);
        if (std::abs(sum - 1.0) > kClosureTolerance) {
            throw DomainError("composition sums to " + std::to_string(sum) + ", expected 1");
        }
        return Composition(normalized(std::move(values), sum));
    }

    /// Closure of an arbitrary positive vector (divides by its sum).
    static Composition closure(std::vector<double> raw) {
        check_positive(raw);
        const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
        if (!std::isfinite(sum)) throw NumericalRangeError("row sum overflows", 0);
        return Composition(normalized(std::move(raw), sum));
    }

    /// Builds the composition whose logs are `log_values` up to an additive
    /// constant. Throws NumericalRangeError if a part underflows to zero.
    static Composition from_logs(std::span<const double> log_values) {
        if (log_values.size() < 2) throw DomainError("composition needs at least 2 parts");
        const double top = *std::max_element(log_values.begin(), log_values.end());
        if (!std::isfinite(top)) throw NumericalRangeError("non-finite log component", 0);
        std::vector<double> v(log_values.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::exp(log_values[j] - top);
        const double sum = std::accumulate(v.begin(), v.end(), 0.0);
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] /= sum;
            if (!(v[j] > 0.0)) {
                throw NumericalRangeError(
                    "component " + std::to_string(j) + " underflows to zero", j);
            }
        }
        return Composition(std::move(v));
    }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const { return values_[j]; }
    std::span<const double> values() const noexcept { return values_; }

    std::vector<double> logs() const {
        std::vector<double> y(values_.size());
        std::transform(values_.begin(), values_.end(), y.begin(), [](double v) { return std::log(v); });
        return y;
    }

    friend bool operator==(const Composition&, const Composition&) = default;

private:
    explicit Composition(std::vector<double> v) : values_(std::move(v)) {}

    static void check_positive(const std::vector<double>& v) {
        if (v.size() < 2) throw DomainError("composition needs at least 2 parts");
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (!std::isfinite(v[j]) || !(v[j] > 0.0)) {
                throw DomainError("component " + std::to_string(j) +
                                  " is not strictly positive (" + std::to_string(v[j]) + ")");
            }
        }
    }

    static std::vector<double> normalized(std::vector<double> v, double sum) {
        for (double& x : v) x /= sum;
        return v;
    }

    std::vector<double> values_;
};

/// Natural logs of a composition, their mean, and the centred version.
struct LogRatios {
    std::vector<double> y;
    std::vector<double> w;
    double y_bar = 0.0;
};

/// Row-major n x D matrix of log-compositions y_ij = log x_ij.
///
/// This is the working representation for likelihoods and simulations: at
/// small alpha simulated compositions can have parts far below the smallest
/// double, while their logs are perfectly ordinary numbers.
class LogData {
public:
    LogData() = default;

    LogData(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), y_(rows * cols, 0.0) {}

    static LogData from_compositions(std::span<const Composition> data) {
        if (data.empty()) throw DomainError("empty dataset");
        LogData out(data.size(), data.front().size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data[i].size() != out.cols_) throw DomainError("rows have different dimensions");
            for (std::size_t j = 0; j < out.cols_; ++j) out.at(i, j) = std::log(data[i][j]);
        }
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double at(std::size_t i, std::size_t j) const { return y_[i * cols_ + j]; }
    double& at(std::size_t i, std::size_t j) { return y_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {y_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {y_.data() + i * cols_, cols_}; }

    /// Exponentiates back to compositions; throws NumericalRangeError when a
    /// part is not representable.
    std::vector<Composition> to_compositions() const {
        std::vector<Composition> out;
        out.reserve(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out.push_back(Composition::from_logs(row(i)));
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> y_;
};

namespace detail {

inline void require_nonzero_alpha(double alpha, const char* what) {
    if (alpha == 0.0) {
        throw DomainError(std::string(what) +
                          ": alpha = 0 is the log-ratio limit; use clr() instead");
    }
    if (!std::isfinite(alpha)) throw DomainError(std::string(what) + ": alpha must be finite");
}

inline double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double log_sum_exp(std::span<const double> t) {
    const double top = *std::max_element(t.begin(), t.end());
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double v : t) s += std::exp(v - top);
    return top + std::log(s);
}

/// log(D^-1 sum_j exp(t_j)). Goes through expm1/log1p when every |t_j| < 1 so
/// that the O(t) deviation from zero survives.
inline double log_mean_exp(std::span<const double> t) {
    const double n = static_cast<double>(t.size());
    const bool near_zero = std::all_of(t.begin(), t.end(), [](double v) { return std::abs(v) < 1.0; });
    if (near_zero) {
        double s = 0.0;
        for (double v : t) s += std::expm1(v);
        return std::log1p(s / n);
    }
    return log_sum_exp(t) - std::log(n);
}

/// log(D u_alpha(x)_j) from the logs of x. Uses the centred logs so that the
/// result is accurate relative to alpha * w_j rather than to one.
inline std::vector<double> log_scaled_transform(std::span<const double> log_x, double alpha) {
    const double y_bar = mean(log_x);
    std::vector<double> t(log_x.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = alpha * (log_x[j] - y_bar);
    const double shift = log_mean_exp(t);
    for (double& v : t) v -= shift;
    return t;
}

/// log sum_k x_k^alpha, evaluated from logs.
inline double log_sum_power(std::span<const double> log_x, double alpha) {
    std::vector<double> t(log_x.size());
    const double y_bar = mean(log_x);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = alpha * (log_x[j] - y_bar);
    return alpha * y_bar + std::log(static_cast<double>(t.size())) + log_mean_exp(t);
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
}

} // namespace detail

inline LogRatios clr(const Composition& x) {
    LogRatios r;
    r.y = x.logs();
    r.y_bar = detail::mean(r.y);
    r.w.resize(r.y.size());
    for (std::size_t j = 0; j < r.y.size(); ++j) r.w[j] = r.y[j] - r.y_bar;
    return r;
}

/// Log of u_alpha(x) computed from log x. Works for rows whose parts are not
/// representable as doubles.
inline std::vector<double> log_alpha_transform(std::span<const double> log_x, double alpha) {
    detail::require_nonzero_alpha(alpha, "alpha_transform");
    std::vector<double> t = detail::log_scaled_transform(log_x, alpha);
    const double log_d = std::log(static_cast<double>(t.size()));
    for (double& v : t) v -= log_d;
    return t;
}

inline Composition alpha_transform(const Composition& x, double alpha) {
    const auto y = x.logs();
    return Composition::from_logs(log_alpha_transform(y, alpha));
}

/// Log of u_alpha^{-1}(u), pivoting on the part with the largest u_j^{1/alpha}
/// (the largest u_j when alpha > 0) so that no power overflows:
///
///   y_j = (1/alpha) log(u_j/u_p) - log(1 + sum_{k != p} (u_k/u_p)^{1/alpha})
///
/// Ties in the pivot go to the lowest index.
inline std::vector<double> stable_inverse_log(std::span<const double> log_u, double alpha) {
    detail::require_nonzero_alpha(alpha, "stable_inverse_log");
    const std::size_t d = log_u.size();
    std::size_t pivot = 0;
    for (std::size_t j = 1; j < d; ++j) {
        if (log_u[j] / alpha > log_u[pivot] / alpha) pivot = j;
    }
    std::vector<double> scaled(d);
    double tail = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        scaled[j] = (log_u[j] - log_u[pivot]) / alpha;
        if (j != pivot) tail += std::exp(scaled[j]);
    }
    const double norm = std::log1p(tail);
    for (double& v : scaled) v -= norm;
    return scaled;
}

inline std::vector<double> stable_inverse_log(const Composition& u, double alpha) {
    const auto log_u = u.logs();
    return stable_inverse_log(log_u, alpha);
}

inline Composition alpha_inverse(const Composition& u, double alpha) {
    detail::require_nonzero_alpha(alpha, "alpha_inverse");
    if (std::abs(alpha) < kDirectInverseMinAlpha) {
        return Composition::from_logs(stable_inverse_log(u, alpha));
    }
    std::vector<double> p(u.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = std::pow(u[j], 1.0 / alpha);
        if (!std::isfinite(p[j])) {
            throw NumericalRangeError("u_" + std::to_string(j) + "^(1/alpha) overflows", j);
        }
    }
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (!std::isfinite(sum)) throw NumericalRangeError("sum of powers overflows", 0);
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] /= sum;
        if (!(p[j] > 0.0)) {
            throw NumericalRangeError("component " + std::to_string(j) + " underflows to zero", j);
        }
    }
    return Composition::from_values(std::move(p));
}

/// Delta_alpha(x, y). alpha = 0 gives the log-ratio distance ||w(x) - w(y)||,
/// computed in closed form.
inline double alpha_metric(const Composition& x, const Composition& y, double alpha) {
    if (x.size() != y.size()) throw DomainError("alpha_metric: dimension mismatch");
    if (!std::isfinite(alpha)) throw DomainError("alpha_metric: alpha must be finite");
    if (alpha == 0.0) return detail::euclidean(clr(x).w, clr(y).w);
    // D u_j = exp(t_j), so the D/|alpha| prefactor folds into the expm1 terms.
    const auto tx = detail::log_scaled_transform(x.logs(), alpha);
    const auto ty = detail::log_scaled_transform(y.logs(), alpha);
    double s = 0.0;
    for (std::size_t j = 0; j < tx.size(); ++j) {
        const double diff = std::expm1(tx[j]) - std::expm1(ty[j]);
        s += diff * diff;
    }
    return std::sqrt(s) / std::abs(alpha);
}

inline double log_jacobian(std::span<const double> log_x, double alpha) {
    detail::require_nonzero_alpha(alpha, "log_jacobian");
    const double dim = static_cast<double>(log_x.size());
    const double sum_log = std::accumulate(log_x.begin(), log_x.end(), 0.0);
    return (dim - 1.0) * std::log(std::abs(alpha)) + (alpha - 1.0) * sum_log -
           dim * detail::log_sum_power(log_x, alpha);
}

inline double log_jacobian(const Composition& x, double alpha) {
    const auto y = x.logs();
    return log_jacobian(y, alpha);
}

/// alpha^{-1} (D u_alpha(x) - 1), which tends to clr(x) as alpha -> 0.
inline std::vector<double> rescaled_transform_limit(const Composition& x, double alpha) {
    detail::require_nonzero_alpha(alpha, "rescaled_transform_limit");
    auto t = detail::log_scaled_transform(x.logs(), alpha);
    for (double& v : t) v = std::expm1(v) / alpha;
    return t;
}

} // namespace alphacomp
