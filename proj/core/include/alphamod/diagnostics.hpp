#pragma once

#include <cstdint>
#include <vector>

#include "alphamod/covering.hpp"
#include "alphamod/signal.hpp"
#include "alphamod/symbol.hpp"
#include "alphamod/windows.hpp"

namespace alphamod {

// K^kappa(p1, p2) = <pi(p1) psi, A^{-kappa} pi(p2) phi> by Fourier-domain quadrature.
// kappa in {0, 1, 2}; tab may be null for kappa = 0.
complex kernel_K(const Window& w1, const Window& w2, int kappa, double alpha, const SymbolTable* tab, TFPoint p1,
                 TFPoint p2, const QuadratureConfig& quad = QuadratureConfig{1e-12});

// Integration domain |x| <= x_half, |omega| <= omega_half, doubled up to
// max_doublings times until the estimate moves less than `stability`.
// Suprema run over a probe grid plus seeded uniform random probes.
struct TruncationConfig {
    double x_half = 8.0;
    double omega_half = 32.0;
    int max_doublings = 2;
    double stability = 0.05;

    double probe_x_half = 1.0;
    double probe_omega_half = 8.0;
    std::size_t probe_x = 5;
    std::size_t probe_omega = 17;
    std::size_t random_probes = 8;
    std::uint64_t seed = 42;

    double omega_step = 0.25;  // absolute
    double x_step = 0.25;      // relative to the narrower atom dilation
    int z_samples = 7;         // per box axis for the Q_y supremum
    double rel = 1e-10;        // negligible kernel level
};

struct Truncation {
    double x_half = 0.0;
    double omega_half = 0.0;
    int doublings = 0;  // doublings applied to reach this domain
};

struct KernelEstimate {
    int kappa = 1;
    double s = 0.0;
    double value = 0.0;
    Truncation truncation;
    double error_bound = 0.0;   // change over the last doubling
    bool converged = false;     // change below the stability threshold
    std::vector<double> levels;  // estimate per doubling level
    TFPoint argmax;              // probe attaining the value
    std::size_t probes = 0;
};

// sup over probes y of int int |K^kappa(x, y)| w_s(x, y) dx domega. K depends on
// x - y only through the time difference, so probes vary in frequency only.
KernelEstimate estimate_kernel_integral(const Window& w1, const Window& w2, int kappa, double alpha, double s,
                                        const SymbolTable* tab, const TruncationConfig& trunc = {});

// The fundamental constant rho for the reproducing kernel R = K^1.
KernelEstimate estimate_rho(const Window& w, double alpha, double s, const SymbolTable& tab,
                            const TruncationConfig& trunc = {});

// sup over z in Q_{p2} of |R(p1, p2) - Gamma(p2, z) R(p1, z)| with
// Gamma(y, z) = e^{2 pi i omega_y (x_y - x_z)}; z runs over a z_samples^2 grid
// per box of Q_{p2} (edges included) and p2 itself.
double oscillation_kernel(const Window& w, double alpha, const SymbolTable& tab, const AlphaCovering& cov, TFPoint p1,
                          TFPoint p2, int z_samples = 7, double rel = 1e-10);

struct GammaEstimate {
    double gamma1 = 0.0;  // sup_x int osc(x, y) w dy
    double gamma2 = 0.0;  // sup_y int osc(x, y) w dx
    double gamma = 0.0;
    Truncation truncation;
    double error_bound = 0.0;
    bool converged = false;
    std::vector<double> levels;  // gamma per doubling level
    std::size_t probes = 0;
};

// Doubling stops at the covering's region; throws if the covering does not
// contain the undoubled domain.
GammaEstimate estimate_gamma(const Window& w, double alpha, double s, const SymbolTable& tab, const AlphaCovering& cov,
                             const TruncationConfig& trunc = {});

struct DiscretizationVerdict {
    double rho = 0.0;
    double gamma = 0.0;
    double C_w = 0.0;
    double lhs = 0.0;
    bool pass = false;
};

// lhs = gamma (rho + max(rho C_w, rho + gamma)); pass iff lhs < 1.
DiscretizationVerdict discretization_condition(double rho, double gamma, double C_w);

// (1 + |omega|) / ((1 + |xi|)^{1/(1-alpha)} (1 + |xi / beta(omega) + omega|)).
double lambda_fn(double xi, double omega, double alpha);
// beta(omega* + omega / beta(omega*)) / beta(omega*).
double theta_fn(double omega, double omega_star, double alpha);

}  // namespace alphamod
