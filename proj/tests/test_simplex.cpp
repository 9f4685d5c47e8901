#include "alphacomp/simplex.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace alphacomp;

namespace {

Composition comp(std::vector<double> v) { return Composition::from_values(std::move(v)); }

Composition random_comp(std::mt19937_64& gen, std::size_t dim) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> raw(dim);
    for (auto& v : raw) v = u(gen);
    return Composition::closure(raw);
}

void expect_rel_near(std::span<const double> got, std::span<const double> want, double rel) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t j = 0; j < got.size(); ++j) EXPECT_NEAR(got[j], want[j], rel * std::abs(want[j])) << "j=" << j;
}

}  // namespace

TEST(Composition, RejectsZeroAndNegative) {
    EXPECT_THROW(comp({0.0, 1.0}), DomainError);
    EXPECT_THROW(comp({-0.1, 1.1}), DomainError);
}

TEST(Composition, RenormalizesSmallDeviationOnly) {
    const auto x = comp({0.2, 0.3, 0.5 + 5e-9});
    EXPECT_NEAR(std::accumulate(x.values().begin(), x.values().end(), 0.0), 1.0, 1e-12);
    EXPECT_THROW(comp({0.2, 0.3, 0.51}), DomainError);
}

TEST(AlphaTransform, IdentityAtOne) {
    const auto u = alpha_transform(comp({0.2, 0.3, 0.5}), 1.0);
    expect_rel_near(u.values(), std::vector<double>{0.2, 0.3, 0.5}, 1e-14);
}

TEST(AlphaTransform, UniformIsFixedPoint) {
    const auto u = alpha_transform(comp({1.0 / 3, 1.0 / 3, 1.0 / 3}), 7.3);
    for (double v : u.values()) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
}

TEST(AlphaTransform, SquareOfTwoParts) {
    const auto u = alpha_transform(comp({0.8, 0.2}), 2.0);
    expect_rel_near(u.values(), std::vector<double>{0.64 / 0.68, 0.04 / 0.68}, 1e-14);
}

TEST(AlphaTransform, ZeroAlphaIsRejected) {
    EXPECT_THROW(alpha_transform(comp({0.5, 0.5}), 0.0), DomainError);
    EXPECT_THROW(alpha_inverse(comp({0.5, 0.5}), 0.0), DomainError);
    EXPECT_THROW(log_jacobian(comp({0.5, 0.5}), 0.0), DomainError);
    EXPECT_THROW(stable_inverse_log(comp({0.5, 0.5}), 0.0), DomainError);
}

TEST(AlphaInverse, Examples) {
    expect_rel_near(alpha_inverse(comp({0.2, 0.3, 0.5}), 1.0).values(), std::vector<double>{0.2, 0.3, 0.5}, 1e-14);
    expect_rel_near(alpha_inverse(comp({0.64 / 0.68, 0.04 / 0.68}), 2.0).values(), std::vector<double>{0.8, 0.2},
                    1e-12);
    const auto x = comp({0.1, 0.2, 0.7});
    expect_rel_near(alpha_inverse(alpha_transform(x, 0.5), 0.5).values(), x.values(), 1e-12);
}

TEST(AlphaInverse, RoundTripOverAlphaSet) {
    std::mt19937_64 gen(11);
    for (double a : {1.0, -1.0, 0.5, -0.5, 0.1, -0.1, 0.01, -0.01}) {
        for (int t = 0; t < 20; ++t) {
            const auto x = random_comp(gen, 2 + t % 5);
            expect_rel_near(alpha_inverse(alpha_transform(x, a), a).values(), x.values(), 1e-9);
        }
    }
}

TEST(AlphaInverse, DirectPathOverflowNamesComponent) {
    // u_1^(1/alpha) underflows to zero for alpha = 0.02
    try {
        alpha_inverse(comp({1e-12, 1.0 - 1e-12}), 0.02);
        FAIL() << "expected NumericalRangeError";
    } catch (const NumericalRangeError& e) {
        EXPECT_EQ(e.component(), 0u);
    }
}

TEST(Clr, Examples) {
    const auto w = clr(comp({1.0 / 3, 1.0 / 3, 1.0 / 3})).w;
    for (double v : w) EXPECT_NEAR(v, 0.0, 1e-15);
    const double c = 1.0 / (1.0 + std::numbers::e);
    const auto r = clr(comp({std::numbers::e * c, c}));
    EXPECT_NEAR(r.w[0], 0.5, 1e-14);
    EXPECT_NEAR(r.w[1], -0.5, 1e-14);
}

TEST(Clr, ZeroSumAndCentring) {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 50; ++t) {
        const auto r = clr(random_comp(gen, 2 + t % 6));
        EXPECT_NEAR(std::accumulate(r.w.begin(), r.w.end(), 0.0), 0.0, 1e-10);
        for (std::size_t j = 0; j < r.w.size(); ++j) EXPECT_DOUBLE_EQ(r.w[j], r.y[j] - r.y_bar);
    }
}

TEST(AlphaMetric, Examples) {
    const auto x = comp({0.5, 0.5});
    const auto y = comp({0.3, 0.7});
    EXPECT_NEAR(alpha_metric(x, y, 1.0), 2.0 * std::sqrt(0.08), 1e-14);
    for (double a : {-1.0, 0.0, 0.3, 2.0}) EXPECT_EQ(alpha_metric(x, x, a), 0.0);
}

TEST(AlphaMetric, ZeroLimit) {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 10; ++t) {
        const auto x = random_comp(gen, 4);
        const auto y = random_comp(gen, 4);
        const double d0 = alpha_metric(x, y, 0.0);
        const auto cx = clr(x).w;
        const auto cy = clr(y).w;
        double s = 0.0;
        for (std::size_t j = 0; j < cx.size(); ++j) s += (cx[j] - cy[j]) * (cx[j] - cy[j]);
        EXPECT_NEAR(d0, std::sqrt(s), 1e-14);
        EXPECT_NEAR(alpha_metric(x, y, 1e-4), d0, 1e-3 * d0);
    }
}

TEST(AlphaMetric, FirstOrderApproachToZero) {
    const auto x = comp({0.1, 0.3, 0.6});
    const auto y = comp({0.5, 0.25, 0.25});
    const double d0 = alpha_metric(x, y, 0.0);
    for (double a : {1e-2, 5e-3, 2.5e-3}) {
        const double ratio = std::abs(alpha_metric(x, y, a) - d0) / std::abs(alpha_metric(x, y, a / 2) - d0);
        EXPECT_NEAR(ratio, 2.0, 0.05) << "alpha=" << a;
    }
}

TEST(AlphaMetric, Axioms) {
    std::mt19937_64 gen(7);
    for (double a : {-0.7, 0.0, 0.2, 1.0}) {
        for (int t = 0; t < 50; ++t) {
            const auto x = random_comp(gen, 3);
            const auto y = random_comp(gen, 3);
            const auto z = random_comp(gen, 3);
            const double dxy = alpha_metric(x, y, a);
            EXPECT_GT(dxy, 0.0);
            EXPECT_EQ(dxy, alpha_metric(y, x, a));
            EXPECT_LE(dxy, alpha_metric(x, z, a) + alpha_metric(z, y, a) + 1e-12);
        }
    }
}

TEST(LogJacobian, IdentityAndHandValue) {
    std::mt19937_64 gen(9);
    for (int t = 0; t < 10; ++t) EXPECT_NEAR(log_jacobian(random_comp(gen, 4), 1.0), 0.0, 1e-14);
    // D=3, alpha=2, uniform: 2 log 2 + 3 log(1/3) - 3 log(3 * 1/9)
    const double want = 2.0 * std::log(2.0) + 3.0 * std::log(1.0 / 3) - 3.0 * std::log(1.0 / 3);
    EXPECT_NEAR(log_jacobian(comp({1.0 / 3, 1.0 / 3, 1.0 / 3}), 2.0), want, 1e-13);
}

TEST(LogJacobian, MatchesFiniteDifferenceDeterminant) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> ua(-1.5, 1.5);
    for (int t = 0; t < 5; ++t) {
        const std::size_t dim = 3 + t % 2;
        const std::size_t d = dim - 1;
        const auto x = random_comp(gen, dim);
        double a = ua(gen);
        if (std::abs(a) < 0.1) a = 0.4;
        // map of the first d coordinates; the last part is 1 - sum
        auto f = [&](const std::vector<double>& head) {
            std::vector<double> full(head);
            full.push_back(1.0 - std::accumulate(head.begin(), head.end(), 0.0));
            const auto u = alpha_transform(Composition::from_values(full), a);
            return std::vector<double>(u.values().begin(), u.values().begin() + static_cast<long>(d));
        };
        std::vector<double> head(x.values().begin(), x.values().begin() + static_cast<long>(d));
        std::vector<std::vector<double>> jac(d, std::vector<double>(d));
        for (std::size_t k = 0; k < d; ++k) {
            const double h = 1e-6 * head[k];
            auto hp = head;
            auto hm = head;
            hp[k] += h;
            hm[k] -= h;
            const auto fp = f(hp);
            const auto fm = f(hm);
            for (std::size_t r = 0; r < d; ++r) jac[r][k] = (fp[r] - fm[r]) / (2.0 * h);
        }
        // Gaussian elimination with partial pivoting
        double det = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            std::size_t p = k;
            for (std::size_t r = k + 1; r < d; ++r) {
                if (std::abs(jac[r][k]) > std::abs(jac[p][k])) p = r;
            }
            if (p != k) {
                std::swap(jac[p], jac[k]);
                det = -det;
            }
            det *= jac[k][k];
            for (std::size_t r = k + 1; r < d; ++r) {
                const double m = jac[r][k] / jac[k][k];
                for (std::size_t c = k; c < d; ++c) jac[r][c] -= m * jac[k][c];
            }
        }
        const double want = std::log(std::abs(det));
        EXPECT_NEAR(log_jacobian(x, a), want, 1e-5 * std::abs(want)) << "alpha=" << a;
    }
}

TEST(LogJacobian, InverseMapCancels) {
    std::mt19937_64 gen(17);
    for (double a : {0.3, -0.6, 1.7, -2.0}) {
        for (int t = 0; t < 10; ++t) {
            const auto x = random_comp(gen, 2 + t % 4);
            EXPECT_NEAR(log_jacobian(x, a) + log_jacobian(alpha_transform(x, a), 1.0 / a), 0.0, 1e-9);
        }
    }
}

TEST(StableInverseLog, UniformGivesMinusLogD) {
    for (double a : {1e-4, 0.05, -0.3, 2.0}) {
        for (double v : stable_inverse_log(comp({0.25, 0.25, 0.25, 0.25}), a)) EXPECT_NEAR(v, -std::log(4.0), 1e-12);
    }
}

TEST(StableInverseLog, AgreesWithNaiveInverse) {
    const auto u = comp({0.5, 0.3, 0.2});
    const auto y = stable_inverse_log(u, 0.05);
    const auto x = alpha_inverse(u, 0.05);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(y[j], std::log(x[j]), 1e-9);
}

TEST(StableInverseLog, FiniteAtTinyAlpha) {
    for (double a : {1e-4, -1e-4}) {
        for (double v : stable_inverse_log(comp({0.4, 0.35, 0.25}), a)) EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(StableInverseLog, ExponentiatedMatchesAlphaInverse) {
    std::mt19937_64 gen(19);
    for (double a : {0.9, -0.9, 0.2, -0.05}) {
        for (int t = 0; t < 20; ++t) {
            const auto u = random_comp(gen, 3 + t % 3);
            const auto back = Composition::from_logs(stable_inverse_log(u, a));
            expect_rel_near(back.values(), alpha_inverse(u, a).values(), 1e-10);
        }
    }
}

TEST(Permutation, EquivariantOutputs) {
    const std::vector<double> x{0.1, 0.25, 0.4, 0.25};
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    std::vector<double> px(4);
    for (std::size_t j = 0; j < 4; ++j) px[j] = x[perm[j]];
    for (double a : {0.3, -0.2, 0.01}) {
        const auto u = alpha_transform(comp(x), a);
        const auto pu = alpha_transform(comp(px), a);
        const auto s = stable_inverse_log(comp(x), a);
        const auto ps = stable_inverse_log(comp(px), a);
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_NEAR(pu[j], u[perm[j]], 1e-15);
            EXPECT_NEAR(ps[j], s[perm[j]], 1e-12);
        }
    }
    const auto w = clr(comp(x)).w;
    const auto pw = clr(comp(px)).w;
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(pw[j], w[perm[j]], 1e-15);
}

TEST(RescaledTransformLimit, UniformIsZero) {
    for (double a : {1e-3, 0.5, -2.0}) {
        for (double v : rescaled_transform_limit(comp({0.2, 0.2, 0.2, 0.2, 0.2}), a)) EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(RescaledTransformLimit, ConvergesToClrAtFirstOrder) {
    const auto x = comp({0.1, 0.3, 0.6});
    const auto w = clr(x).w;
    auto err = [&](double a) {
        const auto r = rescaled_transform_limit(x, a);
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += (r[j] - w[j]) * (r[j] - w[j]);
        return std::sqrt(s);
    };
    double wn = 0.0;
    for (double v : w) wn += v * v;
    EXPECT_LE(err(1e-3), 1e-2 * std::sqrt(wn));
    for (double a : {1e-2, 5e-3, 2e-3}) EXPECT_NEAR(err(a) / err(a / 2), 2.0, 0.05) << "alpha=" << a;
}
