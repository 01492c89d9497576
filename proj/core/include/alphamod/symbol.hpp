#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alphamod/quadrature.hpp"
#include "alphamod/signal.hpp"
#include "alphamod/windows.hpp"

namespace alphamod {

class AlphaParams {
public:
    explicit AlphaParams(double alpha);
    double alpha() const noexcept { return alpha_; }
    double beta(double omega) const;

private:
    double alpha_;
};

// beta(omega) = (1 + |omega|)^-alpha.
double beta(double omega, double alpha);

// r_xi(omega) = beta(omega) (xi - omega), and its omega-derivative (omega != 0).
double r_xi(double xi, double omega, double alpha);
double r_xi_derivative(double xi, double omega, double alpha);

struct RxiProfile {
    double xi;
    double omega_star;  // local minimum on omega < 0
    double min_value;
    double max_value;   // r_xi(0) = xi
};

// Closed-form critical structure; only valid for alpha > 0 and xi > 2 / alpha.
RxiProfile rxi_profile(double xi, double alpha);

struct RxiMinimum {
    double omega;
    double value;
};

// Minimizer of r_xi over omega < 0 by bisection on the sign of r_xi'.
RxiMinimum locate_rxi_minimum(double xi, double alpha);

// m(xi) = int |psi_hat(beta(omega)(xi - omega))|^2 beta(omega) domega.
QuadratureResult<double> symbol_m_quadrature(const Window& w, double alpha, double xi, const QuadratureConfig& quad = {});
// As above; throws NumericalError carrying the achieved error if the budget runs out.
double symbol_m(const Window& w, double alpha, double xi, const QuadratureConfig& quad = {});

// l = 1, 2: derivatives taken under the integral sign.
QuadratureResult<double> symbol_m_deriv_quadrature(const Window& w, double alpha, double xi, int l,
                                                   const QuadratureConfig& quad = {});
double symbol_m_deriv(const Window& w, double alpha, double xi, int l, const QuadratureConfig& quad = {});

struct ScanConfig {
    double xi_max = 200.0;
    std::size_t nodes = 2001;
    QuadratureConfig quad{1e-8};
    double tail_margin = 0.05;
};

// m sampled on [-xi_max, xi_max]; natural cubic spline between nodes, the tail
// limit ||psi||^2 beyond them.
class SymbolTable {
public:
    SymbolTable(SampledGrid grid, std::vector<double> values, double tail_value, double A, double B, double alpha,
                std::string window, double tol);

    const SampledGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double tail_value() const noexcept { return tail_; }
    double A() const noexcept { return A_; }
    double B() const noexcept { return B_; }
    bool admissible() const noexcept { return A_ > 0.0; }
    double alpha() const noexcept { return alpha_; }
    const std::string& window_spec() const noexcept { return window_; }
    double tol() const noexcept { return tol_; }

    double operator()(double xi) const;

private:
    SampledGrid grid_;
    std::vector<double> values_;
    std::vector<double> curvature_;
    double tail_;
    double A_, B_;
    double alpha_;
    std::string window_;
    double tol_;
};

SymbolTable admissibility_scan(const Window& w, double alpha, const ScanConfig& scan = {});

// inverse_fourier(m^kappa f_hat).
Signal apply_multiplier(const Signal& f, const SymbolTable& tab, int kappa);

// xi,m(xi) per line with 17 significant digits.
void write_symbol_csv(const std::filesystem::path& path, const SymbolTable& tab);

}  // namespace alphamod
