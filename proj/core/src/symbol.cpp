#include "alphamod/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "alphamod/error.hpp"
#include "alphamod/fourier.hpp"
#include "alphamod/parallel.hpp"

namespace alphamod {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
}

// Outer radius beyond which the symbol integrand (any derivative form) carries
// less than tail_cut in total, from |psi_hat^(l)(u)| <= C (1+|u|)^-r and
// |r_xi(omega)| >= (k-1)/(2k) (1+|omega|)^{1-alpha} once |omega| >= k (|xi| + 1).
double tail_radius(const Window& w, double alpha, double xi, double tail_cut) {
    constexpr double k = 10.0;
    const double q = 1.0 - alpha;
    const double base = k * (std::abs(xi) + 1.0);
    const auto cert = w.decay_certificate();
    if (!cert || std::isinf(cert->r)) {
        const double Z = w.spectral_radius(1e-17);
        if (std::isinf(Z)) throw InvalidArgument("window has neither a finite decay certificate nor a spectral radius");
        return std::max(base, std::pow(2.0 * k * Z / (k - 1.0), 1.0 / q));
    }
    const double r = cert->r;
    const double expo = 2.0 * r * q + alpha - 1.0;
    if (!(expo > 0.0)) throw InvalidArgument("decay exponent too small for a convergent symbol integral");
    // 2 C^2 (2k/(k-1))^{2r} (1+Omega)^{-expo} / expo <= tail_cut
    const double log_need = std::log(2.0 * cert->C * cert->C / (expo * tail_cut)) + 2.0 * r * std::log(2.0 * k / (k - 1.0));
    return std::max(base, std::exp(log_need / expo));
}

// Panel anchors: 0 and omega* (kink and dip of r_xi), a uniform core around the
// peak at omega = xi, then geometric steps out to the tail radius.
std::vector<double> symbol_breaks(const Window& w, double alpha, double xi, double omega_max) {
    std::vector<double> b{-omega_max, 0.0, omega_max};
    if (alpha > 0.0) {
        const double a = std::abs(xi);
        const double star = (1.0 - alpha * a) / (1.0 - alpha);
        if (star < 0.0) b.push_back(xi >= 0.0 ? star : -star);
    }
    const double width = std::min(w.spectral_radius(1e-3), 20.0) / beta(xi, alpha);
    for (int i = -8; i <= 8; ++i) b.push_back(xi + 0.25 * width * i);
    for (double step = 2.0 * width; step < 2.0 * omega_max; step *= 2.0) {
        b.push_back(xi + step);
        b.push_back(xi - step);
    }
    std::erase_if(b, [&](double v) { return std::abs(v) > omega_max; });
    return b;
}

template <class Integrand>
QuadratureResult<double> integrate_symbol(const Window& w, double alpha, double xi, const QuadratureConfig& quad,
                                          Integrand&& f) {
    check_alpha(alpha);
    if (!std::isfinite(xi)) throw InvalidArgument("xi must be finite");
    if (!(quad.tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
    const double omega_max = tail_radius(w, alpha, xi, quad.effective_tail_cut());
    const auto breaks = symbol_breaks(w, alpha, xi, omega_max);
    QuadratureConfig inner = quad;
    inner.tol = std::max(quad.tol - quad.effective_tail_cut(), 0.5 * quad.tol);
    auto r = integrate_adaptive(f, std::span<const double>(breaks), inner);
    r.error += quad.effective_tail_cut();
    return r;
}

double value_or_throw(const QuadratureResult<double>& r, const char* what, double xi) {
    if (!r.converged)
        throw NumericalError(std::string(what) + " quadrature did not converge at xi = " + std::to_string(xi), r.error);
    return r.value;
}

}  // namespace

AlphaParams::AlphaParams(double alpha) : alpha_(alpha) { check_alpha(alpha); }

double AlphaParams::beta(double omega) const { return alphamod::beta(omega, alpha_); }

double beta(double omega, double alpha) { return alpha == 0.0 ? 1.0 : std::pow(1.0 + std::abs(omega), -alpha); }

double r_xi(double xi, double omega, double alpha) { return beta(omega, alpha) * (xi - omega); }

double r_xi_derivative(double xi, double omega, double alpha) {
    const double sgn = omega > 0.0 ? 1.0 : (omega < 0.0 ? -1.0 : 0.0);
    return -beta(omega, alpha) * (1.0 + sgn * alpha * (xi - omega) / (1.0 + std::abs(omega)));
}

RxiProfile rxi_profile(double xi, double alpha) {
    check_alpha(alpha);
    if (alpha == 0.0 || !(xi > 2.0 / alpha))
        throw InvalidArgument("critical point not applicable: the closed form needs alpha > 0 and xi > 2/alpha");
    const double q = 1.0 - alpha;
    return RxiProfile{xi, (1.0 - alpha * xi) / q, std::pow(alpha, -alpha) * std::pow((xi - 1.0) / q, q), xi};
}

RxiMinimum locate_rxi_minimum(double xi, double alpha) {
    check_alpha(alpha);
    if (alpha == 0.0) throw InvalidArgument("r_xi has no interior minimum at alpha = 0");
    auto slope = [&](double w) { return r_xi_derivative(xi, w, alpha); };
    double hi = -std::numeric_limits<double>::min();
    if (slope(hi) <= 0.0) throw InvalidArgument("r_xi is not increasing towards 0 from the left; no minimum on omega < 0");
    double lo = -1.0;
    while (slope(lo) >= 0.0) {
        lo *= 2.0;
        if (lo < -1e300) throw NumericalError("could not bracket the r_xi minimum", lo);
    }
    for (int it = 0; it < 2000 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    const double w = 0.5 * (lo + hi);
    return {w, r_xi(xi, w, alpha)};
}

QuadratureResult<double> symbol_m_quadrature(const Window& w, double alpha, double xi, const QuadratureConfig& quad) {
    return integrate_symbol(w, alpha, xi, quad, [&](double om) {
        const double b = beta(om, alpha);
        const double v = w.fourier_deriv_real(0, b * (xi - om));
        return v * v * b;
    });
}

double symbol_m(const Window& w, double alpha, double xi, const QuadratureConfig& quad) {
    return value_or_throw(symbol_m_quadrature(w, alpha, xi, quad), "symbol", xi);
}

QuadratureResult<double> symbol_m_deriv_quadrature(const Window& w, double alpha, double xi, int l,
                                                   const QuadratureConfig& quad) {
    if (l < 1 || l > 2) throw InvalidArgument("symbol derivative order must be 1 or 2");
    if (w.max_deriv() < l) throw InvalidArgument("window lacks the spectral derivatives needed");
    if (l == 1) {
        return integrate_symbol(w, alpha, xi, quad, [&](double om) {
            const double b = beta(om, alpha), u = b * (xi - om);
            return 2.0 * w.fourier_deriv_real(1, u) * w.fourier_deriv_real(0, u) * b * b;
        });
    }
    return integrate_symbol(w, alpha, xi, quad, [&](double om) {
        const double b = beta(om, alpha), u = b * (xi - om);
        const double d1 = w.fourier_deriv_real(1, u);
        return 2.0 * (w.fourier_deriv_real(2, u) * w.fourier_deriv_real(0, u) + d1 * d1) * b * b * b;
    });
}

double symbol_m_deriv(const Window& w, double alpha, double xi, int l, const QuadratureConfig& quad) {
    return value_or_throw(symbol_m_deriv_quadrature(w, alpha, xi, l, quad), "symbol derivative", xi);
}

SymbolTable::SymbolTable(SampledGrid grid, std::vector<double> values, double tail_value, double A, double B,
                         double alpha, std::string window, double tol)
    : grid_(grid), values_(std::move(values)), tail_(tail_value), A_(A), B_(B), alpha_(alpha),
      window_(std::move(window)), tol_(tol) {
    const std::size_t n = values_.size();
    if (n != grid_.size()) throw InvalidArgument("symbol table size does not match its grid");
    // Natural spline: M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2, M_0 = M_{n-1} = 0.
    curvature_.assign(n, 0.0);
    if (n > 2) {
        const double h2 = grid_.spacing() * grid_.spacing();
        std::vector<double> diag(n - 2, 4.0), rhs(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) rhs[i - 1] = 6.0 * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / h2;
        for (std::size_t i = 1; i < n - 2; ++i) {
            const double f = 1.0 / diag[i - 1];
            diag[i] -= f;
            rhs[i] -= f * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i-- > 0;) {
            const double next = i + 1 < n - 2 ? curvature_[i + 2] : 0.0;
            curvature_[i + 1] = (rhs[i] - next) / diag[i];
        }
    }
}

double SymbolTable::operator()(double xi) const {
    const double pos = (xi - grid_.front()) / grid_.spacing();
    const double last = static_cast<double>(grid_.size() - 1);
    if (pos < 0.0 || pos > last) return tail_;
    const auto i = std::min(static_cast<std::size_t>(pos), grid_.size() - 2);
    const double t = pos - static_cast<double>(i), s = 1.0 - t;
    const double h2 = grid_.spacing() * grid_.spacing();
    return s * values_[i] + t * values_[i + 1] +
           h2 / 6.0 * ((s * s * s - s) * curvature_[i] + (t * t * t - t) * curvature_[i + 1]);
}

SymbolTable admissibility_scan(const Window& w, double alpha, const ScanConfig& scan) {
    check_alpha(alpha);
    if (!(w.l2_norm() > 0.0)) throw InvalidArgument("the zero window is not admissible");
    if (!(scan.xi_max > 0.0) || scan.nodes < 3) throw InvalidArgument("scan needs xi_max > 0 and at least 3 nodes");
    if (!(scan.tail_margin >= 0.0 && scan.tail_margin < 1.0)) throw InvalidArgument("tail_margin must lie in [0, 1)");

    const auto grid = SampledGrid::linspace(-scan.xi_max, scan.xi_max, scan.nodes);
    const std::size_t n = scan.nodes;
    std::vector<double> values(n);
    // Real windows give an even symbol: compute xi >= 0 and mirror.
    const std::size_t first = n / 2;
    parallel_for(n - first, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = first + begin; i < first + end; ++i) {
            const double xi = (n % 2 == 1 && i == first) ? 0.0 : grid[i];
            const auto r = symbol_m_quadrature(w, alpha, xi, scan.quad);
            if (!r.converged)
                throw NumericalError("admissibility scan: quadrature failed at node " + std::to_string(i) +
                                         " (xi = " + std::to_string(xi) + ")",
                                     r.error);
            values[i] = r.value;
            values[n - 1 - i] = r.value;
        }
    });
    const double tail = w.l2_norm() * w.l2_norm();
    double A = *std::min_element(values.begin(), values.end());
    double B = *std::max_element(values.begin(), values.end());
    if (alpha > 0.0) {
        A = std::min(A, tail * (1.0 - scan.tail_margin));
        B = std::max(B, tail * (1.0 + scan.tail_margin));
    }
    return SymbolTable(grid, std::move(values), tail, A, B, alpha, w.spec(), scan.quad.tol);
}

Signal apply_multiplier(const Signal& f, const SymbolTable& tab, int kappa) {
    if (kappa < 0 && !tab.admissible()) throw InvalidArgument("symbol is not invertible (A <= 0)");
    if (kappa == 0) return f;
    Signal F = forward_fourier(f);
    for (std::size_t m = 0; m < F.size(); ++m) F[m] *= std::pow(tab(F.grid()[m]), kappa);
    return inverse_fourier(F, f.grid());
}

void write_symbol_csv(const std::filesystem::path& path, const SymbolTable& tab) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17) << "xi,m\n";
    for (std::size_t i = 0; i < tab.values().size(); ++i) out << tab.grid()[i] << ',' << tab.values()[i] << '\n';
}

}  // namespace alphamod
