#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "alphamod/error.hpp"
#include "alphamod/fourier.hpp"
#include "alphamod/transform.hpp"

using namespace alphamod;

namespace {

constexpr double kPi = std::numbers::pi;

// 4096 samples, dt = 1/64, covering [-32, 32).
SampledGrid signal_grid() { return SampledGrid::centered(4096, 1.0 / 64.0); }

Signal gaussian_packet(const SampledGrid& g, double x0, double w0, double width) {
    return Signal::sample(g, [&](double t) {
        const double u = (t - x0) / width;
        return std::exp(-kPi * u * u) * complex(std::cos(2 * kPi * w0 * t), std::sin(2 * kPi * w0 * t));
    });
}

double max_diff(const TimeFrequencyMap& a, const TimeFrequencyMap& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    return d;
}

const SymbolTable& gaussian_table(double alpha) {
    static const SymbolTable t0 = admissibility_scan(gaussian_window(), 0.0, ScanConfig{40.0, 401});
    static const SymbolTable t5 = admissibility_scan(gaussian_window(), 0.5, ScanConfig{40.0, 801});
    return alpha == 0.0 ? t0 : t5;
}

}  // namespace

TEST(Atom, OriginIsWindow) {
    const auto g = signal_grid();
    const auto w = bspline_window(4);
    const auto a = make_atom(w, 0.5, 0.0, 0.0, g);
    EXPECT_FALSE(a.spills);
    for (std::size_t i = 0; i < g.size(); i += 7) EXPECT_NEAR(std::abs(a.samples.values()[i] - w.time(g[i])), 0.0, 1e-15);
}

TEST(Atom, Unitarity) {
    // The B-spline spectrum decays like xi^-4; a finer grid keeps the aliasing below 1e-8.
    const auto g = SampledGrid::centered(1u << 15, 1.0 / 512.0);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(-10.0, 10.0), uw(-10.0, 10.0);
    for (const auto& w : {gaussian_window(), bspline_window(4)}) {
        for (int i = 0; i < 10; ++i) {
            const double x = ux(rng), om = uw(rng);
            const auto a = make_atom(w, 0.5, x, om, g);
            EXPECT_NEAR(norm(a.samples), w.l2_norm(), 1e-8) << w.spec() << " x=" << x << " omega=" << om;
        }
    }
}

TEST(Atom, GaborAtAlphaZero) {
    const auto g = signal_grid();
    const auto w = gaussian_window();
    const double x = 1.3, om = -2.7;
    const auto a = make_atom(w, 0.0, x, om, g);
    for (std::size_t i = 0; i < g.size(); i += 11) {
        const double t = g[i];
        const complex ref = std::exp(complex(0.0, 2 * kPi * om * (t - x))) * w.time(t - x);
        EXPECT_NEAR(std::abs(a.samples.values()[i] - ref), 0.0, 1e-13);
    }
}

TEST(Atom, FourierMatchesSamples) {
    const auto g = signal_grid();
    const Atom atom{gaussian_window(), 0.5, 2.0, 3.0};
    const Signal F = forward_fourier(Signal::sample(g, [&](double t) { return atom(t); }));
    for (std::size_t i = 0; i < F.size(); i += 97)
        EXPECT_NEAR(std::abs(F.values()[i] - atom.fourier(F.grid()[i])), 0.0, 1e-12);
}

TEST(Atom, SpillFlag) {
    const auto g = signal_grid();
    const auto w = gaussian_window();
    EXPECT_FALSE(make_atom(w, 0.5, 0.0, 5.0, g).spills);
    const auto edge = make_atom(w, 0.5, 31.9, 0.0, g);
    EXPECT_TRUE(edge.spills);
    EXPECT_GT(edge.spilled_fraction, 0.3);
}

TEST(VoiceTransform, SelfInnerProduct) {
    const auto g = signal_grid();
    const auto w = bspline_window(4);
    const double x0 = 1.0, w0 = 3.0;
    const auto f = make_atom(w, 0.5, x0, w0, g).samples;
    const auto V = voice_transform(f, w, 0.5, SampledGrid(5, 0.5, 0.0), SampledGrid(5, 1.0, 1.0));
    EXPECT_NEAR(std::abs(V(2, 2) - norm(f) * norm(f)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(V(2, 2) - w.l2_norm() * w.l2_norm()), 0.0, 1e-7);
}

TEST(VoiceTransform, StftAtAlphaZero) {
    const auto g = signal_grid();
    const auto w = gaussian_window();
    const auto f = gaussian_packet(g, 0.5, 1.5, 2.0);
    const SampledGrid xs(16, 0.25, -2.0), ws(16, 0.3, -1.0);
    const auto V = voice_transform(f, w, 0.0, xs, ws);
    for (std::size_t j = 0; j < ws.size(); ++j)
        for (std::size_t k = 0; k < xs.size(); ++k) {
            // Textbook STFT int f(t) g(t - x) e^{-2 pi i omega t} dt; V carries the phase e^{2 pi i omega x}.
            complex stft = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                stft += f.values()[i] * w.time(g[i] - xs[k]) * std::exp(complex(0.0, -2 * kPi * ws[j] * g[i]));
            stft *= g.spacing();
            const complex ref = std::exp(complex(0.0, 2 * kPi * ws[j] * xs[k])) * stft;
            EXPECT_NEAR(std::abs(V(j, k) - ref), 0.0, 1e-8);
        }
}

TEST(VoiceTransform, FastPathMatchesDirect) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, -3.0, 4.0, 1.5) + gaussian_packet(g, 5.0, -2.0, 0.7);
    const SampledGrid xs(32, 0.5, -8.0), ws(32, 0.75, -12.0);
    for (const auto& w : {bspline_window(4), gaussian_window()}) {
        const auto fast = voice_transform(f, w, 0.5, xs, ws, TransformPath::fft);
        const auto direct = voice_transform(f, w, 0.5, xs, ws, TransformPath::direct);
        EXPECT_LE(max_diff(fast, direct), 1e-10) << w.spec();
    }
}

TEST(VoiceTransform, FastPathNeedsSublattice) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 0.0, 0.0, 1.0);
    EXPECT_THROW(voice_transform(f, gaussian_window(), 0.5, SampledGrid(8, 0.3, 0.0), SampledGrid(4, 1.0, 0.0),
                                 TransformPath::fft),
                 InvalidArgument);
    // automatic falls back to the direct path
    EXPECT_NO_THROW(voice_transform(f, gaussian_window(), 0.5, SampledGrid(8, 0.3, 0.0), SampledGrid(4, 1.0, 0.0)));
}

TEST(DualTransform, UnitWindowAtAlphaZeroIsVoice) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 1.0, 2.0, 1.0);
    const SampledGrid xs(16, 0.5, -4.0), ws(16, 0.5, -2.0);
    const auto& tab = gaussian_table(0.0);
    EXPECT_LE(max_diff(dual_transform(f, gaussian_window(), 0.0, tab, xs, ws), voice_transform(f, gaussian_window(), 0.0, xs, ws)),
              1e-8);
}

TEST(DualTransform, Linear) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 1.0, 2.0, 1.0), h = gaussian_packet(g, -2.0, -1.0, 0.5);
    const SampledGrid xs(16, 0.5, -4.0), ws(16, 0.5, -2.0);
    const auto& tab = gaussian_table(0.5);
    const auto w = gaussian_window();
    const complex a(2.0, -1.0), b(0.5, 3.0);
    const auto lhs = dual_transform(a * f + b * h, w, 0.5, tab, xs, ws);
    const auto wf = dual_transform(f, w, 0.5, tab, xs, ws), wh = dual_transform(h, w, 0.5, tab, xs, ws);
    double d = 0.0;
    for (std::size_t i = 0; i < lhs.values().size(); ++i)
        d = std::max(d, std::abs(lhs.values()[i] - a * wf.values()[i] - b * wh.values()[i]));
    EXPECT_LE(d, 1e-10);
}

TEST(DualTransform, ReproducingPairing) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 1.0, 2.0, 1.0), h = gaussian_packet(g, 0.5, 1.5, 0.8);
    const SampledGrid xs = SampledGrid::linspace(-10.0, 10.0, 161), ws = SampledGrid::linspace(-14.0, 14.0, 225);
    const auto& tab = gaussian_table(0.5);
    const auto w = gaussian_window();
    const auto W = dual_transform(f, w, 0.5, tab, xs, ws);
    const auto V = voice_transform(h, w, 0.5, xs, ws);
    complex pairing = 0.0;
    for (std::size_t j = 0; j < ws.size(); ++j)
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double wt = ((j == 0 || j + 1 == ws.size()) ? 0.5 : 1.0) * ((k == 0 || k + 1 == xs.size()) ? 0.5 : 1.0);
            pairing += wt * W(j, k) * std::conj(V(j, k));
        }
    pairing *= xs.spacing() * ws.spacing();
    const complex ref = inner_product(f, h);
    EXPECT_LE(std::abs(pairing - ref) / std::abs(ref), 1e-3);
}

TEST(DualTransform, RejectsNonAdmissibleTable) {
    const auto g = signal_grid();
    SymbolTable bad(SampledGrid(3, 1.0, -1.0), {0.0, 0.0, 0.0}, 0.0, 0.0, 0.0, 0.5, "gaussian", 1e-8);
    EXPECT_THROW(dual_transform(gaussian_packet(g, 0, 0, 1), gaussian_window(), 0.5, bad, SampledGrid(4, 1.0, 0.0),
                                SampledGrid(4, 1.0, 0.0)),
                 InvalidArgument);
}

TEST(ReproducingKernel, DiagonalAtAlphaZero) {
    const complex r = reproducing_kernel(gaussian_window(), 0.0, gaussian_table(0.0), {0.7, -1.2}, {0.7, -1.2});
    EXPECT_NEAR(std::abs(r - 1.0), 0.0, 1e-10);
}

TEST(ReproducingKernel, ConjugateSymmetry) {
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(0.5);
    for (auto [p, q] : {std::pair{TFPoint{0.0, 1.0}, TFPoint{0.3, 1.5}}, std::pair{TFPoint{-1.0, -4.0}, TFPoint{0.5, -3.0}},
                        std::pair{TFPoint{2.0, 10.0}, TFPoint{1.7, 12.0}}}) {
        const complex a = reproducing_kernel(w, 0.5, tab, p, q);
        const complex b = reproducing_kernel(w, 0.5, tab, q, p);
        EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-10);
    }
}

TEST(ReproducingKernel, MatchesAtomInnerProduct) {
    // <A^{-1} a1, a2> computed in time from sampled atoms.
    const auto g = signal_grid();
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(0.5);
    const TFPoint p{0.4, 2.0}, q{-0.3, 2.5};
    const auto a1 = make_atom(w, 0.5, p.x, p.omega, g).samples;
    const auto a2 = make_atom(w, 0.5, q.x, q.omega, g).samples;
    const complex ref = inner_product(apply_multiplier(a1, tab, -1), a2);
    EXPECT_NEAR(std::abs(reproducing_kernel(w, 0.5, tab, p, q) - ref), 0.0, 1e-6);
}

TEST(ReproducingKernel, DecaysAlongTime) {
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(0.5);
    double prev = INFINITY;
    for (double d = 0.0; d <= 4.0; d += 0.25) {
        const double v = std::abs(reproducing_kernel(w, 0.5, tab, {d, 2.0}, {0.0, 2.3}));
        EXPECT_LE(v, prev * (1.0 + 1e-9)) << d;
        prev = v;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(KernelSlice, MatchesQuadrature) {
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(0.5);
    const detail::KernelSlice slice(w, 3.0, w, 2.2, 0.5, &tab, 1, 6.0);
    for (double d : {-5.9, -2.3, -0.51, 0.0, 0.37, 1.9, 4.4})
        EXPECT_NEAR(std::abs(slice(d) - reproducing_kernel(w, 0.5, tab, {d, 3.0}, {0.0, 2.2})), 0.0, 1e-6) << d;
    EXPECT_THROW(slice(7.0), InvalidArgument);
    const detail::KernelSlice lat(w, 3.0, w, 2.2, 0.5, &tab, 1, 6.0, 0.3);
    for (long long l = -20; l <= 20; l += 5)
        EXPECT_NEAR(std::abs(lat.at_lattice(l) - reproducing_kernel(w, 0.5, tab, {0.3 * l, 3.0}, {0.0, 2.2})), 0.0, 1e-10) << l;
    const detail::KernelSlice far(w, -40.0, w, 40.0, 0.5, &tab, 1, 6.0);
    EXPECT_TRUE(far.zero());
}

TEST(CheckReproducing, GaussianAtAlphaZero) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 0.0, 0.0, 1.0);
    const auto grid = SampledGrid::linspace(-6.0, 6.0, 64);
    const auto res = check_reproducing(f, gaussian_window(), 0.0, gaussian_table(0.0), grid, grid);
    EXPECT_LE(res.residual, 1e-2);
    EXPECT_GE(res.captured_fraction, 0.999);
}

TEST(CheckReproducing, ZeroSignal) {
    const auto g = signal_grid();
    const auto grid = SampledGrid::linspace(-6.0, 6.0, 16);
    EXPECT_EQ(check_reproducing(Signal::zeros(g), gaussian_window(), 0.0, gaussian_table(0.0), grid, grid).residual, 0.0);
}

TEST(CheckReproducing, RefinementReducesResidual) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 0.5, 1.0, 1.0);
    const auto w = gaussian_window();
    const auto& tab = gaussian_table(0.5);
    const auto coarse = check_reproducing(f, w, 0.5, tab, SampledGrid::linspace(-5, 5, 41), SampledGrid::linspace(-10, 12, 89));
    const auto fine = check_reproducing(f, w, 0.5, tab, SampledGrid::linspace(-5, 5, 81), SampledGrid::linspace(-10, 12, 177));
    std::printf("residual coarse %.3e fine %.3e\n", coarse.residual, fine.residual);
    EXPECT_LT(fine.residual, 0.5 * coarse.residual);
}

TEST(CheckReproducing, MassCaptureRejected) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 0.0, 0.0, 1.0);
    const auto grid = SampledGrid::linspace(-1.0, 1.0, 8);
    try {
        check_reproducing(f, gaussian_window(), 0.0, gaussian_table(0.0), grid, grid);
        FAIL() << "expected MassCaptureError";
    } catch (const MassCaptureError& e) {
        EXPECT_LT(e.captured(), 0.999);
        EXPECT_GT(e.captured(), 0.0);
    }
}

TEST(CoorbitNorm, PlancherelAtAlphaZero) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 1.0, 2.0, 1.5);
    const auto xs = SampledGrid::linspace(-8.0, 10.0, 145), ws = SampledGrid::linspace(-4.0, 8.0, 97);
    EXPECT_NEAR(coorbit_norm(f, gaussian_window(), 0.0, 2.0, 0.0, xs, ws), norm(f), 1e-3);
}

TEST(CoorbitNorm, Homogeneous) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 1.0, 2.0, 1.5);
    const SampledGrid xs(32, 0.5, -8.0), ws(32, 0.5, -6.0);
    const double a = coorbit_norm(f, gaussian_window(), 0.5, 1.5, 1.0, xs, ws);
    EXPECT_EQ(coorbit_norm(2.0 * f, gaussian_window(), 0.5, 1.5, 1.0, xs, ws), 2.0 * a);
    EXPECT_THROW(coorbit_norm(f, gaussian_window(), 0.5, 0.5, 1.0, xs, ws), InvalidArgument);
}

TEST(CoorbitNorm, WeightDominance) {
    const auto g = signal_grid();
    const auto f = gaussian_packet(g, 0.0, 12.0, 1.0);
    const SampledGrid xs(64, 0.25, -8.0), ws(64, 0.5, 0.0);
    EXPECT_GT(coorbit_norm(f, gaussian_window(), 0.5, 2.0, 2.0, xs, ws),
              coorbit_norm(f, gaussian_window(), 0.5, 2.0, 0.0, xs, ws));
}
