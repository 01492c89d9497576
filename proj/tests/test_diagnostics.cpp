#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "alphamod/diagnostics.hpp"
#include "alphamod/error.hpp"
#include "alphamod/transform.hpp"

using namespace alphamod;

namespace {

const SymbolTable& gaussian_table(double alpha) {
    static const SymbolTable t0 = admissibility_scan(gaussian_window(), 0.0, ScanConfig{40.0, 401});
    static const SymbolTable t5 = admissibility_scan(gaussian_window(), 0.5, ScanConfig{40.0, 801});
    return alpha == 0.0 ? t0 : t5;
}

// Small probe sets and coarse steps keep the gamma tests at desk scale.
TruncationConfig quick_trunc() {
    TruncationConfig t;
    t.max_doublings = 0;
    t.probe_x = 2;
    t.probe_omega = 3;
    t.random_probes = 0;
    t.x_step = 0.5;
    t.omega_step = 0.5;
    return t;
}

}  // namespace

TEST(KernelK, SelfInnerProduct) {
    for (const auto& w : {gaussian_window(), bspline_window(4), bump_window(1.0)}) {
        const double n2 = w.l2_norm() * w.l2_norm();
        for (TFPoint p : {TFPoint{0.0, 0.0}, TFPoint{1.5, -3.0}, TFPoint{-2.0, 12.0}}) {
            const complex k = kernel_K(w, w, 0, 0.5, nullptr, p, p);
            EXPECT_NEAR(k.real(), n2, 1e-10 * n2) << w.spec();
            EXPECT_NEAR(k.imag(), 0.0, 1e-10 * n2) << w.spec();
        }
    }
}

TEST(KernelK, KappaOneIsReproducingKernel) {
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(0.5);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uo(-6.0, 6.0);
    for (int i = 0; i < 20; ++i) {
        const TFPoint p1{ux(rng), uo(rng)};
        const TFPoint p2{ux(rng), p1.omega + 0.3 * uo(rng)};
        const complex k = kernel_K(w, w, 1, 0.5, &tab, p1, p2);
        const complex r = reproducing_kernel(w, 0.5, tab, p1, p2);
        EXPECT_LE(std::abs(k - r), 1e-10);
    }
}

TEST(KernelK, IndependentOfKappaForConstantSymbol) {
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(0.0);
    for (TFPoint p2 : {TFPoint{0.3, 0.2}, TFPoint{-0.5, 1.0}}) {
        const TFPoint p1{0.0, 0.0};
        const complex k0 = kernel_K(w, w, 0, 0.0, &tab, p1, p2);
        EXPECT_LE(std::abs(kernel_K(w, w, 1, 0.0, &tab, p1, p2) - k0), 1e-8);
        EXPECT_LE(std::abs(kernel_K(w, w, 2, 0.0, &tab, p1, p2) - k0), 1e-8);
    }
}

TEST(KernelK, Validation) {
    const auto w = gaussian_window();
    EXPECT_THROW(kernel_K(w, w, 3, 0.5, &gaussian_table(0.5), {}, {}), InvalidArgument);
    EXPECT_THROW(kernel_K(w, w, 1, 0.5, nullptr, {}, {}), InvalidArgument);
    EXPECT_THROW(kernel_K(w, w, 1, 0.0, &gaussian_table(0.5), {}, {}), InvalidArgument);
    EXPECT_THROW(kernel_K(w, w, 0, 1.0, nullptr, {}, {}), InvalidArgument);
}

// |V_g g(x, omega)| = e^{-pi (x^2 + omega^2) / 2} for the unit Gaussian, whose integral is 2.
TEST(Rho, GaussianAtAlphaZero) {
    const auto est = estimate_rho(gaussian_window(), 0.0, 0.0, gaussian_table(0.0));
    EXPECT_NEAR(est.value, 2.0, 1e-6);
    EXPECT_TRUE(est.converged);
    EXPECT_EQ(est.kappa, 1);
    EXPECT_GE(est.probes, 17u);
}

TEST(Rho, StableUnderDoubling) {
    TruncationConfig t;
    t.max_doublings = 1;
    const auto est = estimate_rho(gaussian_window(), 0.5, 0.0, gaussian_table(0.5), t);
    ASSERT_EQ(est.levels.size(), 2u);
    EXPECT_LT(std::abs(est.levels[1] - est.levels[0]), 0.05 * est.levels[1]);
    EXPECT_TRUE(est.converged);
    EXPECT_GT(est.value, 1.0);
}

TEST(Rho, MonotoneInS) {
    TruncationConfig t;
    t.max_doublings = 0;
    const auto r0 = estimate_rho(gaussian_window(), 0.5, 0.0, gaussian_table(0.5), t);
    const auto r1 = estimate_rho(gaussian_window(), 0.5, 1.0, gaussian_table(0.5), t);
    EXPECT_GE(r1.value, r0.value);
    EXPECT_FALSE(r0.converged);  // a single level cannot certify truncation
}

TEST(Rho, ProbeRefinement) {
    TruncationConfig coarse;
    coarse.max_doublings = 0;
    coarse.probe_omega = 9;
    TruncationConfig fine = coarse;
    fine.probe_omega = 17;
    const auto a = estimate_rho(gaussian_window(), 0.5, 0.0, gaussian_table(0.5), coarse);
    const auto b = estimate_rho(gaussian_window(), 0.5, 0.0, gaussian_table(0.5), fine);
    EXPECT_LT(std::abs(b.value - a.value), 0.1 * b.value);
}

TEST(Rho, RejectsBadConfig) {
    TruncationConfig t;
    t.probe_omega_half = 100.0;
    EXPECT_THROW(estimate_rho(gaussian_window(), 0.5, 0.0, gaussian_table(0.5), t), InvalidArgument);
    t = {};
    t.z_samples = 1;
    t.stability = -1.0;
    try {
        estimate_rho(gaussian_window(), 0.5, 0.0, gaussian_table(0.5), t);
        FAIL();
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("z_samples"), std::string::npos);
        EXPECT_NE(msg.find("stability"), std::string::npos);
    }
}

// Brute force: every z of the 7 x 7 box samples by direct Fourier quadrature.
TEST(Oscillation, MatchesQuadrature) {
    const double alpha = 0.5;
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(alpha);
    const auto cov = build_covering(alpha, 0.25, 1.0, {-4, 4}, {-16, 16});
    const TFPoint p2{0.1, 2.3};
    const auto q = q_neighborhood(cov, p2);
    for (TFPoint p1 : {TFPoint{0.4, 2.0}, TFPoint{-0.7, 3.5}}) {
        const complex r12 = reproducing_kernel(w, alpha, tab, p1, p2);
        double brute = 0.0;
        for (auto bi : q.boxes) {
            const auto& b = cov.boxes()[bi];
            for (int a = 0; a < 7; ++a)
                for (int c = 0; c < 7; ++c) {
                    const TFPoint z{b.x + b.hx * (-1.0 + a / 3.0), b.omega + b.homega * (-1.0 + c / 3.0)};
                    const double th = 2.0 * std::numbers::pi * p2.omega * (p2.x - z.x);
                    const complex g(std::cos(th), std::sin(th));
                    brute = std::max(brute, std::abs(r12 - g * reproducing_kernel(w, alpha, tab, p1, z)));
                }
        }
        const double osc = oscillation_kernel(w, alpha, tab, cov, p1, p2);
        EXPECT_NEAR(osc, brute, 1e-6);
        EXPECT_GT(osc, 0.0);
    }
}

TEST(Oscillation, VanishesFarAway) {
    const auto cov = build_covering(0.5, 0.25, 1.0, {-4, 4}, {-16, 16});
    EXPECT_EQ(oscillation_kernel(gaussian_window(), 0.5, gaussian_table(0.5), cov, {0.0, 60.0}, {0.0, 0.0}), 0.0);
}

TEST(Oscillation, UncoveredRejected) {
    const auto cov = build_covering(0.5, 0.25, 1.0, {-4, 4}, {-16, 16});
    EXPECT_THROW(oscillation_kernel(gaussian_window(), 0.5, gaussian_table(0.5), cov, {0.0, 0.0}, {0.0, 500.0}),
                 InvalidArgument);
}

// Mean osc over random pairs roughly halves with eps once the boxes are smaller
// than the kernel; at eps >= 0.25 (c = 1) osc saturates near |R|.
TEST(Oscillation, EpsScaling) {
    const double alpha = 0.5;
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(alpha);
    double prev = 0.0;
    for (double eps : {0.125, 0.0625, 0.03125}) {
        const auto cov = build_covering(alpha, eps, 1.0, {-4, 4}, {-16, 16});
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double sum = 0.0;
        const int pairs = 40;
        for (int i = 0; i < pairs; ++i) {
            const TFPoint p2{u(rng), 6.0 * u(rng)};
            const double b = beta(p2.omega, alpha);
            const TFPoint p1{p2.x + b * u(rng), p2.omega + u(rng) / b};
            sum += oscillation_kernel(w, alpha, tab, cov, p1, p2);
        }
        const double mean = sum / pairs;
        if (prev > 0.0) {
            EXPECT_GT(mean, 0.25 * prev) << eps;
            EXPECT_LT(mean, 0.75 * prev) << eps;
        }
        prev = mean;
    }
}

TEST(Gamma, DecreasesWithEps) {
    const double alpha = 0.5;
    double prev = INFINITY;
    for (double eps : {0.5, 0.25, 0.125}) {
        const auto cov = build_covering(alpha, eps, 1.0, {-8, 8}, {-32, 32});
        const auto g = estimate_gamma(gaussian_window(), alpha, 0.0, gaussian_table(alpha), cov, quick_trunc());
        EXPECT_GE(g.gamma1, 0.0);
        EXPECT_GE(g.gamma2, 0.0);
        EXPECT_EQ(g.gamma, std::max(g.gamma1, g.gamma2));
        EXPECT_LT(g.gamma, prev) << eps;
        prev = g.gamma;
    }
}

TEST(Gamma, ProbeRefinement) {
    const double alpha = 0.5;
    const auto cov = build_covering(alpha, 0.25, 1.0, {-8, 8}, {-32, 32});
    auto coarse = quick_trunc();
    auto fine = coarse;
    fine.probe_x = 3;
    fine.probe_omega = 5;
    const auto a = estimate_gamma(gaussian_window(), alpha, 0.0, gaussian_table(alpha), cov, coarse);
    const auto b = estimate_gamma(gaussian_window(), alpha, 0.0, gaussian_table(alpha), cov, fine);
    EXPECT_LT(std::abs(b.gamma - a.gamma), 0.15 * b.gamma);
}

TEST(Gamma, DoublingLimitedByCovering) {
    const double alpha = 0.0;
    const auto small = build_covering(alpha, 0.5, 1.0, {-4, 4}, {-16, 16});
    auto t = quick_trunc();
    EXPECT_THROW(estimate_gamma(gaussian_window(), alpha, 0.0, gaussian_table(alpha), small, t), InvalidArgument);
    t.x_half = 2.0;
    t.omega_half = 8.0;
    t.max_doublings = 3;
    const auto g = estimate_gamma(gaussian_window(), alpha, 0.0, gaussian_table(alpha), small, t);
    ASSERT_EQ(g.levels.size(), 2u);  // 4 x 16 fits, 8 x 32 does not
    EXPECT_GE(g.levels[1], g.levels[0]);  // nonnegative integrand on nested domains
    EXPECT_LE(g.truncation.x_half, 4.0);
}

TEST(Discretization, Substitution) {
    auto v = discretization_condition(1.0, 0.0, 1.0);
    EXPECT_EQ(v.lhs, 0.0);
    EXPECT_TRUE(v.pass);
    v = discretization_condition(1.0, 0.2, 1.0);
    EXPECT_NEAR(v.lhs, 0.44, 1e-15);
    EXPECT_TRUE(v.pass);
    v = discretization_condition(2.0, 0.5, 3.0);
    EXPECT_EQ(v.lhs, 4.0);
    EXPECT_FALSE(v.pass);
    EXPECT_THROW(discretization_condition(-1.0, 0.1, 1.0), InvalidArgument);
    EXPECT_THROW(discretization_condition(1.0, NAN, 1.0), InvalidArgument);
}

TEST(Lambda, OneAtZeroFrequencyOffset) {
    for (double alpha : {0.0, 0.25, 0.5, 0.75})
        for (double om : {-100.0, -3.0, 0.0, 0.5, 40.0}) EXPECT_DOUBLE_EQ(lambda_fn(0.0, om, alpha), 1.0);
}

// Random samples plus the candidate maximizers xi = 0, -beta(omega) omega and xi*.
TEST(Lambda, BoundedOnRandomSamples) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double alpha : {0.25, 0.5, 0.75}) {
        const double bound = std::pow(2.0, 1.0 / (1.0 - alpha));
        double sup = 0.0;
        for (int i = 0; i < 100000; ++i) {
            const double om = std::copysign(std::expm1(8.0 * std::abs(u(rng))), u(rng));
            const double xi = std::copysign(std::expm1(6.0 * std::abs(u(rng))), u(rng));
            const double b = beta(om, alpha);
            const double xs = (b * (1.0 - om) - 1.0 + alpha) / (2.0 - alpha);
            for (double x : {xi, 0.0, -b * om, xs}) sup = std::max(sup, lambda_fn(x, om, alpha));
        }
        EXPECT_LE(sup, bound);
        EXPECT_GE(sup, 1.0);
    }
}

TEST(Theta, Properties) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
        for (double os : {-10.0, 0.0, 3.0}) EXPECT_DOUBLE_EQ(theta_fn(0.0, os, alpha), 1.0);
        for (int i = 0; i < 10000; ++i) {
            const double om = u(rng), os = u(rng);
            EXPECT_LE(theta_fn(om, os, alpha), std::pow(1.0 + std::abs(om), alpha / (1.0 - alpha)) * (1.0 + 1e-12));
        }
    }
}
