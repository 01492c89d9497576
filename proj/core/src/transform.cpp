#include "alphamod/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "alphamod/error.hpp"
#include "alphamod/fourier.hpp"
#include "alphamod/parallel.hpp"

namespace alphamod {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpillLimit = 1e-6;
constexpr double kMassCapture = 0.999;
constexpr double kSpectralCap = 1e3;  // spectral cut-off cap for windows with slow spectral decay
constexpr double kTimeCap = 64.0;     // time support cap for windows without compact support

// v e^{i theta}; unlike std::polar, v may be negative.
complex scaled_phase(double v, double theta) { return {v * std::cos(theta), v * std::sin(theta)}; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Energy of |psi|^2 on [a, b] (window units), panels of unit length.
double window_energy(const Window& w, double a, double b) {
    if (!(b > a)) return 0.0;
    const std::size_t panels = std::min<std::size_t>(4096, static_cast<std::size_t>(std::ceil(b - a)) + 1);
    std::vector<double> breaks(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) breaks[i] = a + (b - a) * static_cast<double>(i) / panels;
    auto res = integrate_adaptive(
        [&](double t) {
            const double v = w.time(t);
            return v * v;
        },
        std::span<const double>(breaks), QuadratureConfig{1e-14, 1e-12});
    return res.value;
}

// Integer offset of value/step, or nullopt if not within 1e-9 of an integer.
std::optional<long long> lattice_index(double value, double step) {
    const double r = value / step;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 * std::max(1.0, std::abs(r))) return std::nullopt;
    return static_cast<long long>(k);
}

struct Sublattice {
    long long first;   // signal index of x_grid[0]
    long long stride;  // signal samples per x step
};

std::optional<Sublattice> sublattice(const SampledGrid& signal, const SampledGrid& x_grid) {
    auto stride = lattice_index(x_grid.spacing(), signal.spacing());
    auto first = lattice_index(x_grid.origin() - signal.origin(), signal.spacing());
    if (!stride || !first || *stride < 1) return std::nullopt;
    return Sublattice{*first, *stride};
}

void validate_grids(const SampledGrid& x_grid, const SampledGrid& omega_grid) {
    if (!std::isfinite(x_grid.back()) || !std::isfinite(omega_grid.back()))
        throw InvalidArgument("voice transform grids must be finite");
}

// Row of the direct path: inner products with analytically sampled atoms.
void direct_row(const Signal& f, const Window& w, double alpha, const SampledGrid& x_grid, double omega,
                std::span<complex> out) {
    const auto& grid = f.grid();
    const auto fv = f.values();
    std::vector<complex> buf;
    for (std::size_t k = 0; k < x_grid.size(); ++k) {
        const auto [first, last] = atom_index_range(w, alpha, x_grid[k], omega, grid);
        buf.resize(last - first);
        sample_atom(w, alpha, x_grid[k], omega, grid, first, buf);
        complex acc = 0.0;
        for (std::size_t i = first; i < last; ++i) acc += fv[i] * std::conj(buf[i - first]);
        out[k] = grid.spacing() * acc;
    }
}

// Row of the FFT path: c_l = sum_i f_i h_{i-l} with h_d = conj(atom at x = 0)(d dt),
// evaluated for the needed lags l by one zero-padded circular correlation.
void fft_row(const Signal& f, const Window& w, double alpha, const SampledGrid& x_grid, const Sublattice& lat,
             double omega, std::span<complex> out) {
    const auto& grid = f.grid();
    const auto fv = f.values();
    const long long n = static_cast<long long>(grid.size());
    const double dt = grid.spacing();
    const double b = beta(omega, alpha);
    const double amp = 1.0 / std::sqrt(b);

    const long long L0 = lat.first;
    const long long L1 = lat.first + lat.stride * static_cast<long long>(x_grid.size() - 1);
    const double radius = b * w.support_radius(1e-18);
    const long long D = std::isfinite(radius) ? std::min<long long>(n + (L1 - L0), static_cast<long long>(std::ceil(radius / dt)) + 1)
                                              : n + (L1 - L0);
    const long long dmin = std::max(-L1, -D);
    const long long dmax = std::min(n - 1 - L0, D);
    if (dmax < dmin) {
        std::fill(out.begin(), out.end(), complex(0.0));
        return;
    }
    const long long M = dmax - dmin + 1;
    const long long L = L1 - L0 + 1;
    const std::size_t N = next_pow2(static_cast<std::size_t>(M + L - 1));
    const long long e = L0 + dmin;

    std::vector<complex> P(N, 0.0), Q(N, 0.0);
    for (long long i = 0; i < M + L - 1; ++i) {
        const long long src = i + e;
        if (src >= 0 && src < n) P[i] = fv[src];
    }
    // Q_m = h_{m + dmin}; conj(Q) enters the transform.
    for (long long m = 0; m < M; ++m) {
        const double u = static_cast<double>(m + dmin) * dt;
        const double v = amp * w.time(u / b);
        // h = conj(atom(u)) = v e^{-2 pi i omega u}; we store conj(h).
        Q[m] = scaled_phase(v, 2.0 * kPi * omega * u);
    }
    detail::dft(P, -1);
    detail::dft(Q, -1);
    for (std::size_t k = 0; k < N; ++k) P[k] *= std::conj(Q[k]);
    detail::dft(P, +1);
    const double scale = dt / static_cast<double>(N);
    for (std::size_t k = 0; k < x_grid.size(); ++k) out[k] = scale * P[static_cast<std::size_t>(lat.stride) * k];
}

std::vector<double> trapezoid_weights(const SampledGrid& g) {
    std::vector<double> wts(g.size(), g.spacing());
    wts.front() *= 0.5;
    wts.back() *= 0.5;
    return wts;
}

}  // namespace

double Atom::dilation() const { return beta(omega, alpha); }

complex Atom::operator()(double t) const {
    const double b = dilation();
    return scaled_phase(window.time((t - x) / b) / std::sqrt(b), 2.0 * kPi * omega * (t - x));
}

complex Atom::fourier(double xi) const {
    const double b = dilation();
    return scaled_phase(std::sqrt(b) * window.fourier_deriv_real(0, b * (xi - omega)), -2.0 * kPi * xi * x);
}

std::pair<std::size_t, std::size_t> atom_index_range(const Window& w, double alpha, double x, double omega,
                                                     const SampledGrid& grid, double rel) {
    const double radius = beta(omega, alpha) * w.support_radius(rel);
    const double n = static_cast<double>(grid.size());
    if (!std::isfinite(radius)) return {0, grid.size()};
    const double lo = std::ceil((x - radius - grid.origin()) / grid.spacing());
    const double hi = std::floor((x + radius - grid.origin()) / grid.spacing()) + 1.0;
    const auto first = static_cast<std::size_t>(std::clamp(lo, 0.0, n));
    const auto last = static_cast<std::size_t>(std::clamp(hi, 0.0, n));
    return {first, std::max(first, last)};
}

void sample_atom(const Window& w, double alpha, double x, double omega, const SampledGrid& grid, std::size_t first,
                 std::span<complex> out) {
    const double b = beta(omega, alpha);
    const double amp = 1.0 / std::sqrt(b);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = grid[first + i] - x;
        out[i] = scaled_phase(amp * w.time(u / b), 2.0 * kPi * omega * u);
    }
}

SampledAtom make_atom(const Window& w, double alpha, double x, double omega, const SampledGrid& grid) {
    const Atom atom{w, alpha, x, omega};
    SampledAtom out{Signal::sample(grid, [&](double t) { return atom(t); })};

    // Mass outside the cells of the grid, in window units.
    const double b = atom.dilation();
    const double lo = (grid.front() - 0.5 * grid.spacing() - x) / b;
    const double hi = (grid.back() + 0.5 * grid.spacing() - x) / b;
    double radius = w.support_radius(1e-18);
    if (!std::isfinite(radius)) radius = 1e6;
    const double outside = window_energy(w, -radius, std::min(lo, radius)) + window_energy(w, std::max(hi, -radius), radius);
    const double total = w.l2_norm() * w.l2_norm();
    out.spilled_fraction = total > 0.0 ? outside / total : 0.0;
    out.spills = out.spilled_fraction > kSpillLimit;
    return out;
}

VoiceMap voice_transform(const Signal& f, const Window& w, double alpha, const SampledGrid& x_grid,
                         const SampledGrid& omega_grid, TransformPath path) {
    validate_grids(x_grid, omega_grid);
    (void)AlphaParams(alpha);
    const auto lat = sublattice(f.grid(), x_grid);
    if (path == TransformPath::fft && !lat)
        throw InvalidArgument("x-grid is not a sublattice of the signal grid; FFT path unavailable");
    const bool use_fft = path != TransformPath::direct && lat.has_value();

    VoiceMap map(x_grid, omega_grid);
    parallel_for(omega_grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            if (use_fft)
                fft_row(f, w, alpha, x_grid, *lat, omega_grid[j], map.row(j));
            else
                direct_row(f, w, alpha, x_grid, omega_grid[j], map.row(j));
        }
    });
    return map;
}

VoiceMap dual_transform(const Signal& f, const Window& w, double alpha, const SymbolTable& tab,
                        const SampledGrid& x_grid, const SampledGrid& omega_grid, TransformPath path) {
    if (!tab.admissible()) throw InvalidArgument("dual transform needs an admissible symbol table");
    return voice_transform(apply_multiplier(f, tab, -1), w, alpha, x_grid, omega_grid, path);
}

complex reproducing_kernel(const Window& w, double alpha, const SymbolTable& tab, TFPoint p1, TFPoint p2,
                           const QuadratureConfig& quad) {
    if (!tab.admissible()) throw InvalidArgument("reproducing kernel needs an admissible symbol table");
    return detail::pair_kernel(w, w, 1, alpha, &tab, p1, p2, quad);
}

ReproducingCheck check_reproducing(const Signal& f, const Window& w, double alpha, const SymbolTable& tab,
                                   const SampledGrid& x_grid, const SampledGrid& omega_grid) {
    if (!tab.admissible()) throw InvalidArgument("reproducing check needs an admissible symbol table");
    const VoiceMap V = voice_transform(f, w, alpha, x_grid, omega_grid);

    // ||V f||^2 over the whole plane is <A f, f> = int m |f_hat|^2.
    const Signal F = forward_fourier(f);
    double full = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) full += tab(F.grid()[i]) * std::norm(F.values()[i]);
    full *= F.grid().spacing();
    if (full == 0.0) return {0.0, 1.0};

    const auto wx = trapezoid_weights(x_grid);
    const auto wo = trapezoid_weights(omega_grid);
    double on_grid = 0.0;
    for (std::size_t j = 0; j < omega_grid.size(); ++j)
        for (std::size_t k = 0; k < x_grid.size(); ++k) on_grid += wo[j] * wx[k] * std::norm(V(j, k));
    const double captured = on_grid / full;
    if (captured < kMassCapture)
        throw MassCaptureError("grid captures only " + std::to_string(captured) + " of the voice transform energy",
                               captured);

    // I(x_k, w_j) = sum_{j', k'} wt V(x_k', w_j') R((x_k', w_j'), (x_k, w_j)); R depends on x_k' - x_k.
    const std::size_t nx = x_grid.size();
    const std::size_t no = omega_grid.size();
    const double d_max = x_grid.back() - x_grid.front();
    TimeFrequencyMap I(x_grid, omega_grid);
    std::vector<std::vector<complex>> partial(no, std::vector<complex>(no * nx, 0.0));
    parallel_for(no, [&](std::size_t begin, std::size_t end) {
        std::vector<complex> lags(2 * nx - 1);
        for (std::size_t jp = begin; jp < end; ++jp) {
            auto& acc = partial[jp];
            for (std::size_t j = 0; j < no; ++j) {
                const detail::KernelSlice slice(w, omega_grid[jp], w, omega_grid[j], alpha, &tab, 1, d_max, x_grid.spacing());
                if (slice.zero()) continue;
                for (std::size_t l = 0; l < lags.size(); ++l)
                    lags[l] = slice.at_lattice(static_cast<long long>(l) - static_cast<long long>(nx - 1));
                const auto row = V.row(jp);
                for (std::size_t k = 0; k < nx; ++k) {
                    complex s = 0.0;
                    for (std::size_t kp = 0; kp < nx; ++kp) s += wx[kp] * row[kp] * lags[kp + nx - 1 - k];
                    acc[j * nx + k] += wo[jp] * s;
                }
            }
        }
    });
    for (std::size_t jp = 0; jp < no; ++jp)
        for (std::size_t j = 0; j < no; ++j)
            for (std::size_t k = 0; k < nx; ++k) I(j, k) += partial[jp][j * nx + k];

    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < no; ++j)
        for (std::size_t k = 0; k < nx; ++k) {
            num += wo[j] * wx[k] * std::norm(V(j, k) - I(j, k));
            den += wo[j] * wx[k] * std::norm(V(j, k));
        }
    return {std::sqrt(num / den), captured};
}

double coorbit_norm(const Signal& f, const Window& w, double alpha, double p, double s, const SampledGrid& x_grid,
                    const SampledGrid& omega_grid) {
    if (!(p >= 1.0)) throw InvalidArgument("coorbit norm needs p >= 1");
    return weighted_lp_norm(voice_transform(f, w, alpha, x_grid, omega_grid), p, Weight{s});
}

namespace detail {

PairSupport pair_support(const Window& w1, double omega1, const Window& w2, double omega2, double alpha, double rel) {
    const double b1 = beta(omega1, alpha), b2 = beta(omega2, alpha);
    const double z1 = std::min(w1.spectral_radius(rel), kSpectralCap);
    const double z2 = std::min(w2.spectral_radius(rel), kSpectralCap);
    return {std::max(omega1 - z1 / b1, omega2 - z2 / b2), std::min(omega1 + z1 / b1, omega2 + z2 / b2)};
}

complex pair_kernel(const Window& w1, const Window& w2, int kappa, double alpha, const SymbolTable* tab, TFPoint p1,
                    TFPoint p2, const QuadratureConfig& quad) {
    if (kappa != 0 && tab == nullptr) throw InvalidArgument("kernel with kappa != 0 needs a symbol table");
    const auto sup = pair_support(w1, p1.omega, w2, p2.omega, alpha);
    if (sup.empty()) return 0.0;
    const double b1 = beta(p1.omega, alpha), b2 = beta(p2.omega, alpha);
    const double amp = std::sqrt(b1 * b2);
    const double dx = p1.x - p2.x;
    auto integrand = [&](double xi) {
        const double g = amp * w1.fourier_deriv_real(0, b1 * (xi - p1.omega)) *
                         w2.fourier_deriv_real(0, b2 * (xi - p2.omega));
        const double m = kappa == 0 ? 1.0 : std::pow((*tab)(xi), -kappa);
        return scaled_phase(m * g, -2.0 * kPi * xi * dx);
    };
    // Panels short enough to resolve both the envelope and the oscillation.
    const double width = sup.hi - sup.lo;
    const double panel = std::min({0.25 / b1, 0.25 / b2, dx != 0.0 ? 0.5 / std::abs(dx) : width});
    const std::size_t panels = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(width / panel)), 8, 20000);
    std::vector<double> breaks(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) breaks[i] = sup.lo + width * static_cast<double>(i) / panels;
    for (double o : {p1.omega, p2.omega, 0.0})
        if (o > sup.lo && o < sup.hi) breaks.push_back(o);
    auto res = integrate_adaptive(integrand, std::span<const double>(breaks), quad);
    if (!res.converged)
        throw NumericalError("kernel quadrature did not converge (error " + std::to_string(res.error) + ")",
                             res.error);
    return res.value;
}

KernelSlice::KernelSlice(const Window& w1, double omega1, const Window& w2, double omega2, double alpha,
                         const SymbolTable* tab, int kappa, double d_max, double lattice, int oversample, double rel)
    : d_max_(d_max), lattice_(lattice) {
    if (kappa != 0 && tab == nullptr) throw InvalidArgument("kernel with kappa != 0 needs a symbol table");
    if (!(d_max >= 0.0) || oversample < 2 || !(lattice >= 0.0))
        throw InvalidArgument("kernel slice needs d_max >= 0, lattice >= 0 and oversample >= 2");
    const auto sup = pair_support(w1, omega1, w2, omega2, alpha, rel);
    if (sup.empty()) return;
    const double b1 = beta(omega1, alpha), b2 = beta(omega2, alpha);
    const double amp = std::sqrt(b1 * b2);

    // d-width where the two atoms overlap; beyond it the slice is negligible.
    const double reach = std::min(b1 * w1.support_radius(rel) + b2 * w2.support_radius(rel), kTimeCap);
    const double period = 2.0 * (d_max + 2.0 * reach);  // alias period in d
    const double width = sup.hi - sup.lo;
    // xi-span of the samples; the d-step is 1 / span. A barely overlapping pair has a tiny
    // width, so keep at least 16 steps per alias period for the interpolation stencil.
    double span = std::max(oversample * width, 32.0 / period);
    if (lattice > 0.0) {
        per_lattice_ = std::max<long long>(1, static_cast<long long>(std::ceil(width * lattice)));
        span = static_cast<double>(per_lattice_) / lattice;
    }
    const std::size_t n = next_pow2(static_cast<std::size_t>(std::ceil(span * period)) + 1);
    const double dxi = span / static_cast<double>(n);
    center_ = 0.5 * (sup.lo + sup.hi);

    // H on xi_q = center + (q - n/2) dxi, transformed onto d_l = (l - n/2) / span.
    const auto xi_grid = SampledGrid::centered(n, dxi);
    std::vector<complex> H(n, 0.0);
    const double half = static_cast<double>(n / 2);
    const auto q0 = static_cast<std::size_t>(std::max(0.0, std::ceil((sup.lo - center_) / dxi + half)));
    const auto q1 = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor((sup.hi - center_) / dxi + half)) + 1);
    for (std::size_t q = q0; q < q1; ++q) {
        const double xi = center_ + xi_grid[q];
        double g = amp * w1.fourier_deriv_real(0, b1 * (xi - omega1)) * w2.fourier_deriv_real(0, b2 * (xi - omega2));
        if (kappa != 0) {
            const double m = (*tab)(xi);
            for (int k = 0; k < std::abs(kappa); ++k) g = kappa > 0 ? g / m : g * m;
        }
        H[q] = g;
    }
    const Signal P = forward_fourier(Signal(xi_grid, std::move(H)));
    step_ = P.grid().spacing();
    // Keep |d| <= d_max plus the interpolation stencil.
    const double keep = d_max + 4.0 * step_;
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor((-keep - P.grid().origin()) / step_)));
    const auto hi = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil((keep - P.grid().origin()) / step_)) + 1);
    d0_ = P.grid()[lo];
    zero_index_ = n / 2 - lo;
    values_.assign(P.values().begin() + lo, P.values().begin() + hi);
}

complex KernelSlice::at_lattice(long long l) const {
    if (!(lattice_ > 0.0)) throw InvalidArgument("kernel slice was built without a lattice");
    if (values_.empty()) return 0.0;
    const long long idx = static_cast<long long>(zero_index_) + l * per_lattice_;
    if (idx < 0 || idx >= static_cast<long long>(values_.size()))
        throw InvalidArgument("kernel slice evaluated beyond d_max");
    const double d = static_cast<double>(l) * lattice_;
    return scaled_phase(1.0, -2.0 * kPi * center_ * d) * values_[static_cast<std::size_t>(idx)];
}

complex KernelSlice::operator()(double d) const {
    if (values_.empty()) return 0.0;
    if (std::abs(d) > d_max_ * (1.0 + 1e-12) + 1e-12) throw InvalidArgument("kernel slice evaluated beyond d_max");
    const double u = (d - d0_) / step_;
    const auto base = static_cast<long long>(std::floor(u)) - 2;
    const long long last = static_cast<long long>(values_.size()) - 6;
    const long long i0 = std::clamp<long long>(base, 0, std::max<long long>(last, 0));
    // Lagrange weights from prefix/suffix products of (t - b); denominators prod_{b != a} (a - b).
    static constexpr double denom[6] = {-120.0, 24.0, -12.0, 12.0, -24.0, 120.0};
    const double t = u - static_cast<double>(i0);
    double pre[6], suf[6];
    pre[0] = 1.0;
    suf[5] = 1.0;
    for (int b = 1; b < 6; ++b) pre[b] = pre[b - 1] * (t - (b - 1));
    for (int b = 4; b >= 0; --b) suf[b] = suf[b + 1] * (t - (b + 1));
    const complex* v = values_.data() + i0;
    double re = 0.0, im = 0.0;
    for (int a = 0; a < 6; ++a) {
        const double l = pre[a] * suf[a] / denom[a];
        re += l * v[a].real();
        im += l * v[a].imag();
    }
    const complex ph = scaled_phase(1.0, -2.0 * kPi * center_ * d);
    return {ph.real() * re - ph.imag() * im, ph.real() * im + ph.imag() * re};
}

}  // namespace detail

}  // namespace alphamod
