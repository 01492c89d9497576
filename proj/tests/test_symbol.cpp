#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "alphamod/error.hpp"
#include "alphamod/symbol.hpp"

using namespace alphamod;

namespace {

// Plain trapezoid on a uniform grid over [-L, L] (0 is a node, so the kink of beta sits on the grid).
double brute_force_symbol(const Window& w, double alpha, double xi, double L, double h) {
    const auto n = static_cast<long>(std::llround(L / h));
    double sum = 0.0;
    for (long i = -n; i <= n; ++i) {
        const double om = i * h;
        const double b = beta(om, alpha);
        const double v = w.fourier(b * (xi - om)).real();
        sum += (i == -n || i == n ? 0.5 : 1.0) * v * v * b;
    }
    return sum * h;
}

QuadratureConfig tight(double tol) {
    QuadratureConfig q{tol};
    q.max_panels = 200000;
    return q;
}

}  // namespace

TEST(Beta, Examples) {
    EXPECT_EQ(beta(0.0, 0.7), 1.0);
    EXPECT_EQ(beta(123.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(beta(3.0, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(beta(-3.0, 0.5), 0.5);
    for (double w : {0.1, 1.0, 10.0, 1e6}) {
        EXPECT_LE(beta(w, 0.8), 1.0);
        EXPECT_GE(beta(w, 0.8), 1.0 / (1.0 + w));
    }
    EXPECT_THROW(AlphaParams(1.0), InvalidArgument);
    EXPECT_THROW(AlphaParams(-0.1), InvalidArgument);
    EXPECT_DOUBLE_EQ(AlphaParams(0.5).beta(3.0), 0.5);
}

TEST(Rxi, ProfileExamples) {
    EXPECT_EQ(r_xi(7.5, 0.0, 0.3), 7.5);
    const auto p = rxi_profile(5.0, 0.5);
    EXPECT_DOUBLE_EQ(p.omega_star, -3.0);
    EXPECT_DOUBLE_EQ(r_xi(5.0, -3.0, 0.5), 4.0);
    EXPECT_NEAR(p.min_value, 4.0, 1e-14);
    EXPECT_EQ(p.max_value, 5.0);
    EXPECT_THROW(rxi_profile(4.0, 0.5), InvalidArgument);
    EXPECT_THROW(rxi_profile(3.0, 0.5), InvalidArgument);
    EXPECT_THROW(rxi_profile(10.0, 0.0), InvalidArgument);
}

TEST(Rxi, DecreasingForPositiveOmega) {
    for (double xi : {0.0, 0.5, 5.0, 40.0}) {
        double prev = r_xi(xi, 0.0, 0.5);
        for (double w = 0.01; w < 200.0; w += 0.01) {
            const double v = r_xi(xi, w, 0.5);
            ASSERT_LT(v, prev);
            prev = v;
        }
    }
}

TEST(Rxi, DerivativeMatchesFiniteDifference) {
    for (double w : {-7.0, -0.3, 0.4, 12.0}) {
        const double h = 1e-6;
        const double fd = (r_xi(9.0, w + h, 0.6) - r_xi(9.0, w - h, 0.6)) / (2 * h);
        EXPECT_NEAR(r_xi_derivative(9.0, w, 0.6), fd, 1e-7);
    }
}

TEST(Rxi, NumericalMinimumMatchesClosedForm) {
    for (double xi : {4.5, 10.0, 77.0}) {
        const auto p = rxi_profile(xi, 0.5);
        const auto m = locate_rxi_minimum(xi, 0.5);
        EXPECT_NEAR(m.omega, p.omega_star, 1e-9);
        EXPECT_NEAR(m.value / p.min_value, 1.0, 1e-12);
    }
}

TEST(Symbol, GaborCaseIsNormSquared) {
    const std::vector<Window> ws = {gaussian_window(), bump_window(1.0), bandlimited_window(2.0), bspline_window(3)};
    for (const auto& w : ws) {
        // the bump spectrum is an interpolated table, good to ~1e-10 in energy
        const double tol = w.kind() == WindowKind::bump ? 1e-10 : 1e-11;
        for (double xi : {-13.0, 0.0, 0.4, 7.0})
            EXPECT_NEAR(symbol_m(w, 0.0, xi, tight(1e-12)), w.l2_norm() * w.l2_norm(), tol) << w.spec();
    }
}

TEST(Symbol, LargeXiLimit) {
    // Reference differences m(xi) - ||psi||^2 from a 40-digit evaluation of the same integral.
    const auto w = bspline_window(4);
    const double n2 = 151.0 / 315.0;
    const double ref[] = {2.0622e-13, 1.68985e-14, 2.09522e-15};
    const double xis[] = {50.0, 100.0, 200.0};
    double prev = INFINITY;
    for (int i = 0; i < 3; ++i) {
        const double d = std::abs(symbol_m(w, 0.5, xis[i], tight(1e-15)) - n2);
        EXPECT_LT(d, prev);
        EXPECT_NEAR(d, ref[i], 0.05 * ref[i] + 1e-15);
        prev = d;
    }
}

TEST(Symbol, GaussianMatchesBruteForce) {
    const auto w = gaussian_window();
    // 10^6 trapezoid points on each half-line of |omega| <= 10^4
    const double brute = brute_force_symbol(w, 0.5, 1.0, 1e4, 0.01);
    EXPECT_NEAR(symbol_m(w, 0.5, 1.0, tight(1e-10)), brute, 1e-6);
}

TEST(Symbol, RandomTriplesMatchBruteForce) {
    const std::vector<Window> ws = {gaussian_window(), bspline_window(4), bump_window(1.0), bandlimited_window(2.0)};
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ua(0.0, 0.75), ux(-10.0, 10.0);
    const double tol = 1e-6;
    for (int i = 0; i < 20; ++i) {
        const auto& w = ws[i % ws.size()];
        const double a = ua(rng), xi = ux(rng);
        const double m = symbol_m(w, a, xi, tight(tol));
        const double ref = brute_force_symbol(w, a, xi, 1e4, 0.01);
        EXPECT_NEAR(m, ref, 10 * tol) << w.spec() << " alpha=" << a << " xi=" << xi;
    }
}

TEST(Symbol, EvenForRealWindows) {
    for (const auto& w : {bspline_window(2), bump_window(1.0)})
        for (double xi : {0.7, 3.0, 25.0})
            EXPECT_NEAR(symbol_m(w, 0.5, xi, tight(1e-10)), symbol_m(w, 0.5, -xi, tight(1e-10)), 2e-10);
}

TEST(SymbolDeriv, Examples) {
    const auto g = gaussian_window();
    for (double xi : {-4.0, 0.0, 2.5}) EXPECT_NEAR(symbol_m_deriv(g, 0.0, xi, 1, tight(1e-12)), 0.0, 1e-11);
    EXPECT_NEAR(symbol_m_deriv(g, 0.5, 0.0, 1, tight(1e-12)), 0.0, 1e-11);
    EXPECT_NEAR(symbol_m_deriv(bspline_window(4), 0.5, 0.0, 1, tight(1e-12)), 0.0, 1e-11);

    const double h = 1e-3, xi = 2.0;
    const auto q = tight(1e-13);
    const double fd1 = (symbol_m(g, 0.5, xi + h, q) - symbol_m(g, 0.5, xi - h, q)) / (2 * h);
    EXPECT_NEAR(symbol_m_deriv(g, 0.5, xi, 1, q), fd1, 1e-5);
    const double fd2 = (symbol_m_deriv(g, 0.5, xi + h, 1, q) - symbol_m_deriv(g, 0.5, xi - h, 1, q)) / (2 * h);
    EXPECT_NEAR(symbol_m_deriv(g, 0.5, xi, 2, q), fd2, 1e-5);
    EXPECT_THROW(symbol_m_deriv(g, 0.5, xi, 3, q), InvalidArgument);
}

TEST(SymbolDeriv, DecayLikeAlphaPower) {
    // |m^(l)(xi)| (1+|xi|)^{alpha l} stays bounded over the scan range.
    const auto g = gaussian_window();
    const double alpha = 0.5;
    for (int l = 1; l <= 2; ++l) {
        double early = 0.0;
        for (double xi : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
            early = std::max(early, std::abs(symbol_m_deriv(g, alpha, xi, l, tight(1e-12))) * std::pow(1 + xi, alpha * l));
        for (double xi : {50.0, 100.0, 200.0})
            EXPECT_LE(std::abs(symbol_m_deriv(g, alpha, xi, l, tight(1e-12))) * std::pow(1 + xi, alpha * l), 2 * early);
    }
}

TEST(Scan, GaborCaseIsFlat) {
    const auto tab = admissibility_scan(gaussian_window(), 0.0);
    EXPECT_NEAR(tab.A(), 1.0, 1e-8);
    EXPECT_NEAR(tab.B(), 1.0, 1e-8);
    EXPECT_EQ(tab.values().size(), 2001u);
    EXPECT_DOUBLE_EQ(tab.grid().front(), -200.0);
}

TEST(Scan, HatSplineAdmissible) {
    const auto w = bspline_window(2);
    const auto tab = admissibility_scan(w, 0.5);
    EXPECT_TRUE(tab.admissible());
    EXPECT_GT(tab.A(), 0.0);
    EXPECT_DOUBLE_EQ(tab.tail_value(), w.l2_norm() * w.l2_norm());
    for (std::size_t i = 0; i < tab.values().size(); ++i) {
        EXPECT_GT(tab.values()[i], 0.0);
        EXPECT_LE(tab.A(), tab.values()[i]);
        EXPECT_GE(tab.B(), tab.values()[i]);
        EXPECT_EQ(tab.values()[i], tab.values()[tab.values().size() - 1 - i]);
    }
}

TEST(Scan, RejectsZeroWindow) {
    EXPECT_THROW(admissibility_scan(gaussian_window().scaled(0.0), 0.5), InvalidArgument);
}

TEST(Scan, QuadratureFailureNamesNode) {
    ScanConfig cfg;
    cfg.nodes = 11;
    cfg.quad.tol = 1e-15;
    cfg.quad.max_panels = 20;
    try {
        admissibility_scan(bspline_window(2), 0.5, cfg);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
        EXPECT_GT(e.achieved(), 0.0);
    }
}

TEST(Table, InterpolatesAndUsesTail) {
    const auto tab = admissibility_scan(gaussian_window(), 0.5, ScanConfig{20.0, 401, QuadratureConfig{1e-10}, 0.05});
    for (double xi : {0.123, 3.31, -7.77, 15.05})
        EXPECT_NEAR(tab(xi), symbol_m(gaussian_window(), 0.5, xi, tight(1e-10)), 1e-5);
    EXPECT_EQ(tab(25.0), 1.0);
    EXPECT_EQ(tab(-1e9), 1.0);
    EXPECT_DOUBLE_EQ(tab(tab.grid()[17]), tab.values()[17]);
}

TEST(Multiplier, IdentityAndInverse) {
    const auto grid = SampledGrid::centered(512, 1.0 / 16);
    const auto f = Signal::sample(grid, [](double t) { return std::exp(-t * t) * std::polar(1.0, 9.0 * t); });
    const auto tab = admissibility_scan(bspline_window(2), 0.5, ScanConfig{20.0, 401, QuadratureConfig{1e-9}, 0.05});
    EXPECT_LE(norm(apply_multiplier(f, tab, 0) - f), 1e-12 * norm(f));
    const auto there = apply_multiplier(f, tab, 1);
    EXPECT_GT(norm(there - f), 1e-3 * norm(f));
    EXPECT_LE(norm(apply_multiplier(there, tab, -1) - f), 1e-8 * norm(f));

    const auto flat = admissibility_scan(gaussian_window(), 0.0, ScanConfig{20.0, 401, QuadratureConfig{1e-10}, 0.05});
    EXPECT_LE(norm(apply_multiplier(f, flat, 1) - f), 1e-8 * norm(f));

    const SymbolTable singular(SampledGrid::linspace(-1, 1, 3), {0.0, 1.0, 0.0}, 1.0, 0.0, 1.0, 0.5, "x", 1e-8);
    EXPECT_THROW(apply_multiplier(f, singular, -1), InvalidArgument);
    EXPECT_NO_THROW(apply_multiplier(f, singular, 1));
}
