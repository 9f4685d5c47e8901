#pragma once

// Dirichlet distribution on the open simplex: density, seeded sampling and
// maximum-likelihood estimation.

#include "alphacomp/errors.hpp"
#include "alphacomp/random.hpp"
#include "alphacomp/simplex.hpp"
#include "alphacomp/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace alphacomp {

class DirichletParams {
public:
    DirichletParams() = default;

    explicit DirichletParams(std::vector<double> gamma) : gamma_(std::move(gamma)) {
        if (gamma_.size() < 2) throw DomainError("Dirichlet needs at least 2 shape parameters");
        for (std::size_t j = 0; j < gamma_.size(); ++j) {
            if (!(gamma_[j] > 0.0) || !std::isfinite(gamma_[j])) {
                throw DomainError("shape " + std::to_string(j) + " must be positive and finite, got " +
                                  std::to_string(gamma_[j]));
            }
        }
        gamma_plus_ = std::accumulate(gamma_.begin(), gamma_.end(), 0.0);
    }

    std::size_t size() const noexcept { return gamma_.size(); }
    double operator[](std::size_t j) const { return gamma_[j]; }
    std::span<const double> gamma() const noexcept { return gamma_; }
    double gamma_plus() const noexcept { return gamma_plus_; }

    /// Normalizing constant log Gamma(gamma_+) - sum_j log Gamma(gamma_j).
    double log_normalizer() const {
        double s = log_gamma(gamma_plus_);
        for (double g : gamma_) s -= log_gamma(g);
        return s;
    }

    friend bool operator==(const DirichletParams&, const DirichletParams&) = default;

private:
    std::vector<double> gamma_;
    double gamma_plus_ = 0.0;
};

/// log f(v) from log v. Kept separate so likelihoods can run on LogData.
inline double log_density_from_logs(std::span<const double> log_v, const DirichletParams& params) {
    if (log_v.size() != params.size()) throw DomainError("log_density: dimension mismatch");
    double s = params.log_normalizer();
    for (std::size_t j = 0; j < log_v.size(); ++j) s += (params[j] - 1.0) * log_v[j];
    return s;
}

inline double log_density(const Composition& v, const DirichletParams& params) {
    const auto log_v = v.logs();
    return log_density_from_logs(log_v, params);
}

/// n draws as log-compositions, from normalized independent Gamma variates.
inline LogData sample_log(const DirichletParams& params, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("sample: n must be at least 1");
    Rng rng(seed);
    const std::size_t dim = params.size();
    LogData out(n, dim);
    std::vector<double> g(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) g[j] = rng.log_gamma_variate(params[j]);
        const double norm = detail::log_sum_exp(g);
        for (std::size_t j = 0; j < dim; ++j) out.at(i, j) = g[j] - norm;
    }
    return out;
}

inline std::vector<Composition> sample(const DirichletParams& params, std::size_t n, std::uint64_t seed) {
    return sample_log(params, n, seed).to_compositions();
}

/// Everything the likelihood depends on (n and the mean logs), plus the first
/// two moments used to initialize Newton.
struct DirichletSuffStats {
    std::size_t n = 0;
    std::vector<double> mean_log;
    std::vector<double> mean;
    std::vector<double> variance;
    /// Every observation equals the first; the likelihood then has no maximum.
    bool replicated = false;

    static DirichletSuffStats from_logs(const LogData& log_v) {
        DirichletSuffStats s;
        s.n = log_v.rows();
        const std::size_t dim = log_v.cols();
        s.replicated = true;
        for (std::size_t i = 1; i < s.n && s.replicated; ++i) {
            s.replicated = std::equal(log_v.row(i).begin(), log_v.row(i).end(), log_v.row(0).begin());
        }
        s.mean_log.assign(dim, 0.0);
        s.mean.assign(dim, 0.0);
        s.variance.assign(dim, 0.0);
        const double inv_n = 1.0 / static_cast<double>(s.n);
        for (std::size_t i = 0; i < s.n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                s.mean_log[j] += log_v.at(i, j) * inv_n;
                s.mean[j] += std::exp(log_v.at(i, j)) * inv_n;
            }
        }
        for (std::size_t i = 0; i < s.n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const double dev = std::exp(log_v.at(i, j)) - s.mean[j];
                s.variance[j] += dev * dev * inv_n;
            }
        }
        return s;
    }

    /// Average log-likelihood per observation.
    double mean_loglik(const DirichletParams& p) const {
        double s = p.log_normalizer();
        for (std::size_t j = 0; j < mean_log.size(); ++j) s += (p[j] - 1.0) * mean_log[j];
        return s;
    }

    /// Sum of the absolute sizes of the terms in mean_loglik.
    double loglik_magnitude(const DirichletParams& p) const {
        double s = 1.0 + std::abs(log_gamma(p.gamma_plus()));
        for (std::size_t j = 0; j < mean_log.size(); ++j) {
            s += std::abs(log_gamma(p[j])) + std::abs((p[j] - 1.0) * mean_log[j]);
        }
        return s;
    }

    /// Per-observation score d/dgamma_j.
    std::vector<double> score(const DirichletParams& p) const {
        const double psi_plus = digamma(p.gamma_plus());
        std::vector<double> g(p.size());
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = psi_plus - digamma(p[j]) + mean_log[j];
        return g;
    }
};

struct MleOptions {
    int max_iterations = 200;
    /// Stop once every per-observation score component is below this.
    double score_tolerance = 1e-8;
};

/// Moment matching: mean parts give gamma-bar, the variances give gamma_+
/// through Var(v_j) = m_j (1 - m_j) / (gamma_+ + 1).
inline DirichletParams moment_initialization(const DirichletSuffStats& s) {
    const std::size_t dim = s.mean.size();
    double precision_sum = 0.0;
    int used = 0;
    for (std::size_t j = 0; j < dim; ++j) {
        if (s.variance[j] > 0.0) {
            const double est = s.mean[j] * (1.0 - s.mean[j]) / s.variance[j] - 1.0;
            if (est > 0.0 && std::isfinite(est)) {
                precision_sum += std::log(est);
                ++used;
            }
        }
    }
    const double total = used > 0 ? std::exp(precision_sum / used) : static_cast<double>(dim);
    const double mass = std::accumulate(s.mean.begin(), s.mean.end(), 0.0);
    std::vector<double> g(dim);
    for (std::size_t j = 0; j < dim; ++j) g[j] = std::max(total * s.mean[j] / mass, 1e-6);
    return DirichletParams(std::move(g));
}

namespace detail {

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Newton direction for theta = log(gamma). The Hessian in theta is
// diag(a) + z gamma gamma^T with a_j = gamma_j g_j - gamma_j^2 psi'(gamma_j)
// and z = psi'(gamma_+); Sherman-Morrison solves it in O(D). When it is not
// negative definite we fall back to the gamma-space Newton step (always an
// ascent direction, the likelihood being concave in gamma) mapped to theta.
inline std::vector<double> newton_direction(const DirichletParams& p, std::span<const double> score) {
    const std::size_t dim = p.size();
    const double z = trigamma(p.gamma_plus());
    std::vector<double> tri(dim);
    for (std::size_t j = 0; j < dim; ++j) tri[j] = trigamma(p[j]);

    std::vector<double> a(dim);
    bool diag_negative = true;
    double s_gg = 0.0;
    double s_gd = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double gam = p[j];
        a[j] = gam * score[j] - gam * gam * tri[j];
        if (!(a[j] < 0.0)) diag_negative = false;
        s_gg += gam * gam / a[j];
        s_gd += gam * (gam * score[j]) / a[j];
    }
    std::vector<double> step(dim);
    if (diag_negative && 1.0 + z * s_gg > 0.0) {
        const double coef = z * s_gd / (1.0 + z * s_gg);
        for (std::size_t j = 0; j < dim; ++j) {
            step[j] = -(p[j] * score[j] - p[j] * coef) / a[j];
        }
        return step;
    }
    // gamma-space: H = z 11^T - diag(tri)
    double s_q = 0.0;
    double s_gq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        s_q += 1.0 / tri[j];
        s_gq += score[j] / tri[j];
    }
    const double beta = s_gq / (s_q - 1.0 / z);
    for (std::size_t j = 0; j < dim; ++j) {
        const double d_gamma = (score[j] - beta) / tri[j];
        step[j] = d_gamma / p[j];
    }
    return step;
}

} // namespace detail

/// Maximum-likelihood Dirichlet fit from sufficient statistics. Newton on
/// log-parameters with backtracking; converged when the per-observation score
/// has max-norm <= options.score_tolerance.
inline DirichletParams mle(const DirichletSuffStats& stats, std::optional<DirichletParams> init = std::nullopt,
                           const MleOptions& options = {}) {
    if (stats.n < 2) throw DomainError("mle: need at least 2 observations");
    if (stats.replicated) throw DegenerateDataError("mle: all observations are identical; no maximum exists");
    DirichletParams current = init ? *init : moment_initialization(stats);
    if (current.size() != stats.mean_log.size()) throw DomainError("mle: initial value has wrong dimension");

    double value = stats.mean_loglik(current);
    std::vector<double> score = stats.score(current);
    const std::size_t dim = current.size();

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (detail::max_abs(score) <= options.score_tolerance) return current;

        std::vector<double> step = detail::newton_direction(current, score);
        // Keep any single log-parameter move below e^5.
        const double largest = detail::max_abs(step);
        double scale = largest > 5.0 ? 5.0 / largest : 1.0;

        // The objective is a difference of terms of size log Gamma(gamma_+);
        // changes below their rounding level are noise, not a decrease.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * stats.loglik_magnitude(current);
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            std::vector<double> trial(dim);
            for (std::size_t j = 0; j < dim; ++j) trial[j] = current[j] * std::exp(scale * step[j]);
            bool finite = true;
            for (double t : trial) finite = finite && t > 0.0 && std::isfinite(t);
            if (finite) {
                DirichletParams candidate(std::move(trial));
                const double cand_value = stats.mean_loglik(candidate);
                if (std::isfinite(cand_value) && cand_value >= value - noise) {
                    current = std::move(candidate);
                    value = cand_value;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        score = stats.score(current);
        if (!accepted) break;
    }
    if (detail::max_abs(score) <= options.score_tolerance) return current;
    const double n = static_cast<double>(stats.n);
    std::vector<double> last(current.gamma().begin(), current.gamma().end());
    throw ConvergenceError("Dirichlet MLE did not converge (score max-norm " +
                               std::to_string(detail::max_abs(score) * n) + ")",
                           std::move(last), detail::max_abs(score) * n);
}

inline DirichletParams mle(const LogData& log_v, std::optional<DirichletParams> init = std::nullopt,
                           const MleOptions& options = {}) {
    return mle(DirichletSuffStats::from_logs(log_v), std::move(init), options);
}

inline DirichletParams mle(std::span<const Composition> data, std::optional<DirichletParams> init = std::nullopt,
                           const MleOptions& options = {}) {
    return mle(LogData::from_compositions(data), std::move(init), options);
}

} // namespace alphacomp
