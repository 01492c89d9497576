#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "alphamod/error.hpp"
#include "alphamod/quadrature.hpp"
#include "alphamod/signal.hpp"
#include "alphamod/symbol.hpp"
#include "alphamod/windows.hpp"

namespace alphamod {

// T_x M_omega D_beta(omega) psi: t -> e^{2 pi i omega (t - x)} beta^{-1/2} psi((t - x) / beta).
struct Atom {
    Window window;
    double alpha = 0.0;
    double x = 0.0;
    double omega = 0.0;

    complex operator()(double t) const;
    // e^{-2 pi i xi x} beta^{1/2} psi_hat(beta (xi - omega)).
    complex fourier(double xi) const;
    double dilation() const;
};

struct SampledAtom {
    Signal samples;
    bool spills = false;         // more than 1e-6 of the energy falls outside the grid
    double spilled_fraction = 0.0;
};

SampledAtom make_atom(const Window& w, double alpha, double x, double omega, const SampledGrid& grid);

// Grid index range [first, last) outside which the atom is below rel * peak.
std::pair<std::size_t, std::size_t> atom_index_range(const Window& w, double alpha, double x, double omega,
                                                     const SampledGrid& grid, double rel = 1e-18);
// Analytic samples of the atom at grid indices [first, first + out.size()).
void sample_atom(const Window& w, double alpha, double x, double omega, const SampledGrid& grid, std::size_t first,
                 std::span<complex> out);

using VoiceMap = TimeFrequencyMap;

enum class TransformPath {
    automatic,  // FFT when the x-grid is a sublattice of the signal grid, else direct
    fft,
    direct,
};

VoiceMap voice_transform(const Signal& f, const Window& w, double alpha, const SampledGrid& x_grid,
                         const SampledGrid& omega_grid, TransformPath path = TransformPath::automatic);

// V(A^{-1} f).
VoiceMap dual_transform(const Signal& f, const Window& w, double alpha, const SymbolTable& tab,
                        const SampledGrid& x_grid, const SampledGrid& omega_grid,
                        TransformPath path = TransformPath::automatic);

// R(p1, p2) = <A^{-1} pi(p1) psi, pi(p2) psi>, evaluated in the Fourier domain.
complex reproducing_kernel(const Window& w, double alpha, const SymbolTable& tab, TFPoint p1, TFPoint p2,
                           const QuadratureConfig& quad = QuadratureConfig{1e-12});

class MassCaptureError : public InvalidArgument {
public:
    MassCaptureError(const std::string& what, double captured) : InvalidArgument(what), captured_(captured) {}
    double captured() const noexcept { return captured_; }

private:
    double captured_;
};

struct ReproducingCheck {
    double residual = 0.0;
    double captured_fraction = 1.0;
};

// Relative L2 gap between V f and the trapezoid discretization of int V f(y) R(y, .) dy on the grid.
// Throws MassCaptureError when the grid holds less than 99.9% of ||V f||^2 = int m |f_hat|^2.
ReproducingCheck check_reproducing(const Signal& f, const Window& w, double alpha, const SymbolTable& tab,
                                   const SampledGrid& x_grid, const SampledGrid& omega_grid);

// weighted_lp_norm of the voice transform with weight v_s.
double coorbit_norm(const Signal& f, const Window& w, double alpha, double p, double s, const SampledGrid& x_grid,
                    const SampledGrid& omega_grid);

namespace detail {

// Integrand of K^kappa(p1, p2) = int m^{-kappa} g1 conj(g2) e^{-2 pi i xi (x1 - x2)} dxi with
// g = beta^{1/2} psi_hat(beta (xi - omega)); the xi-interval where both factors matter.
struct PairSupport {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(hi > lo); }
};
PairSupport pair_support(const Window& w1, double omega1, const Window& w2, double omega2, double alpha,
                         double rel = 1e-16);

complex pair_kernel(const Window& w1, const Window& w2, int kappa, double alpha, const SymbolTable* tab, TFPoint p1,
                    TFPoint p2, const QuadratureConfig& quad);

// d -> K^kappa((d, omega1), (0, omega2)) for |d| <= d_max, from one FFT of the
// xi-integrand, demodulated about the support centre. operator() interpolates
// with 6-point Lagrange on an oversampled d-grid. With a lattice step h > 0 the
// d-grid contains every multiple of h and at_lattice(l) returns the sample at
// d = l h without interpolation (oversampling is then not applied).
class KernelSlice {
public:
    KernelSlice(const Window& w1, double omega1, const Window& w2, double omega2, double alpha,
                const SymbolTable* tab, int kappa, double d_max, double lattice = 0.0, int oversample = 8,
                double rel = 1e-16);

    bool zero() const noexcept { return values_.empty(); }
    double d_max() const noexcept { return d_max_; }
    complex operator()(double d) const;
    complex at_lattice(long long l) const;

private:
    double d_max_;
    double lattice_ = 0.0;
    long long per_lattice_ = 0;  // d-grid steps per lattice step
    std::size_t zero_index_ = 0;  // index of d = 0 in values_
    double center_ = 0.0;
    double d0_ = 0.0;
    double step_ = 1.0;
    std::vector<complex> values_;
};

}  // namespace detail

}  // namespace alphamod
