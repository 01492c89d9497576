#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "alphamod/error.hpp"
#include "alphamod/fourier.hpp"
#include "alphamod/io.hpp"
#include "alphamod/signal.hpp"

using namespace alphamod;
constexpr double kPi = std::numbers::pi;

namespace {

SampledGrid gauss_grid() { return SampledGrid::linspace(-8.0, 8.0 - 16.0 / 1024, 1024); }

Signal gaussian(const SampledGrid& g) {
    return Signal::sample(g, [](double t) { return std::exp(-kPi * t * t); });
}

Signal random_signal(const SampledGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    return Signal::sample(g, [&](double) { return complex(d(rng), d(rng)); });
}

}  // namespace

TEST(Grid, RejectsDegenerate) {
    EXPECT_THROW(SampledGrid(1, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(SampledGrid(4, 0.0, 0.0), InvalidArgument);
    EXPECT_THROW(SampledGrid(4, -1.0, 0.0), InvalidArgument);
}

TEST(Grid, CenteredHasZeroNode) {
    const auto g = SampledGrid::centered(9, 0.5);
    EXPECT_DOUBLE_EQ(g[4], 0.0);
    EXPECT_DOUBLE_EQ(g.front(), -2.0);
}

TEST(Signal, RejectsNonFinite) {
    const SampledGrid g(4, 1.0, 0.0);
    EXPECT_THROW(Signal(g, {1.0, NAN, 0.0, 0.0}), InvalidArgument);
    EXPECT_THROW(Signal(g, {1.0, 0.0, INFINITY, 0.0}), InvalidArgument);
    EXPECT_THROW(Signal(g, {1.0, 0.0}), InvalidArgument);
}

TEST(Fourier, GaussianAtZero) {
    const auto F = forward_fourier(gaussian(gauss_grid()));
    const std::size_t zero = F.grid().size() / 2;
    EXPECT_NEAR(F.grid()[zero], 0.0, 1e-15);
    EXPECT_NEAR(F[zero].real(), 1.0, 1e-10);
    EXPECT_NEAR(F[zero].imag(), 0.0, 1e-10);
}

TEST(Fourier, ZeroMapsToZero) {
    const auto F = forward_fourier(Signal::zeros(gauss_grid()));
    for (auto v : F.values()) EXPECT_EQ(v, complex(0.0));
}

TEST(Fourier, IndicatorMatchesSinc) {
    // Half-weights at the jumps make the Riemann sum the trapezoid rule.
    const auto g = SampledGrid::centered(1 << 16, 1.0 / 4096);
    const auto f = Signal::sample(g, [](double t) {
        const double a = std::abs(t);
        return a < 0.5 ? 1.0 : (a == 0.5 ? 0.5 : 0.0);
    });
    const auto F = forward_fourier(f);
    double worst = 0.0;
    for (std::size_t m = 0; m < F.size(); ++m) {
        const double xi = F.grid()[m];
        if (std::abs(xi) > 4.0) continue;
        const double sinc = xi == 0.0 ? 1.0 : std::sin(kPi * xi) / (kPi * xi);
        worst = std::max(worst, std::abs(F[m] - sinc));
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(Fourier, RoundTripRandom) {
    for (unsigned seed : {1u, 2u, 3u}) {
        const SampledGrid g(37 + seed, 0.3, -4.7 * seed);
        const auto f = random_signal(g, seed);
        const auto back = inverse_fourier(forward_fourier(f), g);
        EXPECT_LE(norm(back - f) / norm(f), 1e-12);
    }
}

TEST(Fourier, InverseRejectsWrongGrid) {
    const auto f = gaussian(gauss_grid());
    const auto F = forward_fourier(f);
    EXPECT_THROW(inverse_fourier(F, SampledGrid(1024, 0.01, 0.0)), InvalidArgument);
}

TEST(Fourier, SingleBinGivesExponential) {
    const auto tg = SampledGrid::centered(64, 0.25);
    const auto fg = dual_grid(tg);
    std::vector<complex> bins(64);
    bins[40] = 1.0;
    const auto f = inverse_fourier(Signal(fg, bins), tg);
    for (std::size_t k = 0; k < 64; ++k) {
        const complex expected = fg.spacing() * std::polar(1.0, 2.0 * kPi * fg[40] * tg[k]);
        EXPECT_NEAR(std::abs(f[k] - expected), 0.0, 1e-14);
    }
}

TEST(Fourier, GaussianFixedPoint) {
    const auto tg = gauss_grid();
    const auto fg = dual_grid(tg);
    const auto F = Signal::sample(fg, [](double xi) { return std::exp(-kPi * xi * xi); });
    const auto f = inverse_fourier(F, tg);
    for (std::size_t k = 0; k < tg.size(); ++k) EXPECT_NEAR(std::abs(f[k] - std::exp(-kPi * tg[k] * tg[k])), 0.0, 1e-10);
}

TEST(Fourier, PlancherelAndParseval) {
    const auto g = gauss_grid();
    const auto f = Signal::sample(g, [](double t) { return std::exp(-kPi * (t - 1) * (t - 1)) * std::polar(1.0, 3.0 * t); });
    const auto h = Signal::sample(g, [](double t) { return complex(t, 1.0) * std::exp(-2.0 * t * t); });
    const auto F = forward_fourier(f), H = forward_fourier(h);
    EXPECT_LE(std::abs(norm(f) - norm(F)) / norm(f), 1e-8);
    const complex lhs = inner_product(f, h), rhs = inner_product(F, H);
    EXPECT_LE(std::abs(lhs - rhs) / std::abs(lhs), 1e-10);
}

TEST(Fourier, RealEvenStaysRealEven) {
    const auto g = SampledGrid::centered(512, 0.05);
    const auto f = Signal::sample(g, [](double t) { return std::exp(-t * t) * std::cos(4.0 * t); });
    const auto F = forward_fourier(f);
    const std::size_t n = F.size();
    for (std::size_t m = 1; m < n; ++m) {
        EXPECT_NEAR(F[m].imag(), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(F[m] - F[n - m]), 0.0, 1e-10);
    }
}

TEST(InnerProduct, Properties) {
    const SampledGrid g(50, 0.1, -2.5);
    const auto f = random_signal(g, 7), h = random_signal(g, 8);
    const complex ff = inner_product(f, f);
    EXPECT_GE(ff.real(), 0.0);
    EXPECT_EQ(ff.imag(), 0.0);
    EXPECT_NEAR(std::abs(inner_product(f, h) - std::conj(inner_product(h, f))), 0.0, 1e-13);
    // conjugate-linear in the second slot
    const complex a(0.3, -1.2);
    EXPECT_NEAR(std::abs(inner_product(f, a * h) - std::conj(a) * inner_product(f, h)), 0.0, 1e-12);
    EXPECT_THROW(inner_product(f, random_signal(SampledGrid(50, 0.1, 0.0), 1)), InvalidArgument);
}

TEST(WeightedNorm, PlainL2) {
    const auto xg = SampledGrid::linspace(0.0, 1.0, 11), wg = SampledGrid::linspace(0.0, 2.0, 21);
    TimeFrequencyMap F(xg, wg);
    double expect = 0.0;
    for (std::size_t j = 0; j < 21; ++j)
        for (std::size_t k = 0; k < 11; ++k) {
            F(j, k) = complex(j * 0.1, k * 0.2);
            const double w = ((j == 0 || j == 20) ? 0.5 : 1.0) * ((k == 0 || k == 10) ? 0.5 : 1.0);
            expect += w * std::norm(F(j, k));
        }
    EXPECT_NEAR(weighted_lp_norm(F, 2.0, {0.0}), std::sqrt(expect * 0.1 * 0.1), 1e-14);
}

TEST(WeightedNorm, UnitSquare) {
    const auto g = SampledGrid::linspace(0.0, 1.0, 33);
    TimeFrequencyMap F(g, g, std::vector<complex>(33 * 33, 1.0));
    for (double p : {1.0, 2.0, 3.5, double(INFINITY)}) EXPECT_NEAR(weighted_lp_norm(F, p, {0.0}), 1.0, 1e-14);
}

TEST(WeightedNorm, ExponentialStrip) {
    // int_{-L}^{L} (1+|w|) e^{-|w|} dw = 2 (2 - (L + 2) e^{-L}), times the strip width.
    const double L = 5.0, width = 2.0;
    const auto xg = SampledGrid::linspace(0.0, width, 5), wg = SampledGrid::linspace(-L, L, 4001);
    TimeFrequencyMap F(xg, wg);
    for (std::size_t j = 0; j < wg.size(); ++j)
        for (std::size_t k = 0; k < xg.size(); ++k) F(j, k) = std::exp(-std::abs(wg[j]));
    const double exact = width * 2.0 * (2.0 - (L + 2.0) * std::exp(-L));
    EXPECT_NEAR(weighted_lp_norm(F, 1.0, {1.0}), exact, 1e-5);
}

TEST(WeightedNorm, Rejects) {
    const auto g = SampledGrid::linspace(0.0, 1.0, 3);
    TimeFrequencyMap F(g, g);
    EXPECT_THROW(weighted_lp_norm(F, 0.5, {0.0}), InvalidArgument);
}

TEST(Weight, PairIsMaxRatio) {
    Weight w{2.0};
    EXPECT_DOUBLE_EQ(w(3.0), 16.0);
    EXPECT_DOUBLE_EQ(w.pair(0.0, 3.0), 16.0);
    EXPECT_DOUBLE_EQ(w.pair(-3.0, 0.0), 16.0);
    EXPECT_DOUBLE_EQ(Weight{-2.0}.pair(0.0, 3.0), 16.0);
}

TEST(Io, SignalRoundTripFormats) {
    const auto dir = std::filesystem::temp_directory_path() / "alphamod_io_test";
    std::filesystem::create_directories(dir);
    const SampledGrid g(17, 0.125, -1.0);
    const auto f = random_signal(g, 11);
    for (const char* name : {"sig.csv", "sig.bin"}) {
        io::write_signal(dir / name, f);
        const auto back = io::read_signal(dir / name);
        EXPECT_TRUE(back.grid().matches(g));
        for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(back[k], f[k]);
    }
    TimeFrequencyMap m(g, SampledGrid(3, 1.0, 0.0));
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 17; ++k) m(j, k) = complex(j + 0.1 * k, -1.0 / (k + 1));
    io::write_map(dir / "map.bin", m);
    const auto mb = io::read_map(dir / "map.bin");
    for (std::size_t i = 0; i < m.values().size(); ++i) EXPECT_EQ(mb.values()[i], m.values()[i]);
    std::filesystem::remove_all(dir);
}

TEST(Io, RealColumnCsv) {
    const auto path = std::filesystem::temp_directory_path() / "alphamod_real.csv";
    {
        std::ofstream out(path);
        out << "value\n1.5\n-2\n0.25\n";
    }
    const auto f = io::read_signal(path, SampledGrid(3, 1.0, 0.0));
    EXPECT_EQ(f[1], complex(-2.0, 0.0));
    std::filesystem::remove(path);
}
