#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "alphamod/signal.hpp"

namespace alphamod {

enum class WindowKind { bspline, gaussian, bump, bandlimited };

// |psi^(l)(xi)| <= C (1 + |xi|)^-r for all l <= max_deriv; r = +inf means
// faster than any polynomial (C is then the sup of the derivatives).
struct DecayCertificate {
    double r = 0.0;
    double C = 0.0;
};

namespace detail {
class WindowModel;
}

// Immutable, cheap to copy; all windows here are real and even in time.
class Window {
public:
    explicit Window(std::shared_ptr<const detail::WindowModel> model, double scale = 1.0);

    WindowKind kind() const;
    // Family parameter: order m, bump radius, bandlimited cutoff; 0 for gaussian.
    double parameter() const;
    // Spec string as accepted by parse_window ("bspline:4", "gaussian", ...).
    std::string spec() const;

    double l2_norm() const;
    int max_deriv() const;
    std::optional<DecayCertificate> decay_certificate() const;

    double time(double t) const;
    complex fourier(double xi) const { return fourier_deriv(0, xi); }
    complex fourier_deriv(int l, double xi) const;
    // Real part of fourier_deriv without the range check; hot path for quadrature.
    double fourier_deriv_real(int l, double xi) const;

    // |psi(t)| <= rel * max|psi| for |t| beyond this radius (exact for compact support).
    double support_radius(double rel = 1e-16) const;
    // Same for the spectrum; infinite when no finite radius is known.
    double spectral_radius(double rel = 1e-16) const;

    // The window multiplied by a constant factor.
    Window scaled(double factor) const;
    double scale() const noexcept { return scale_; }

private:
    std::shared_ptr<const detail::WindowModel> model_;
    double scale_;
};

struct BumpTableConfig {
    std::size_t points = 1u << 16;  // spectral samples
    double band = 128.0;            // table covers [-band, band)
};

Window bspline_window(int m);
Window gaussian_window();
Window bump_window(double radius, const BumpTableConfig& table = {});
Window bandlimited_window(double cutoff);

// "bspline:<m>", "gaussian", "bump:<radius>", "bandlimited:<cutoff>".
Window parse_window(std::string_view spec);

complex eval_fourier_deriv(const Window& w, int l, double xi);

struct DecayEstimate {
    double r = 0.0;
    double C = 0.0;
    double log_C = 0.0;                 // C may overflow for very fast decay
    std::optional<double> support;      // set when the spectrum vanishes beyond it
};

// Fits log max_{l <= l_max} |psi^(l)| against -r log(1 + |xi|) on the envelope's
// record points in the upper half of the resolved range, then raises C until
// the bound holds on every sample of [0, xi_range].
DecayEstimate estimate_decay_rate(const Window& w, int l_max, double xi_range, std::size_t samples = 20001);

enum class HypothesisPurpose { admissibility, kernel_integrability, discretization };

struct HypothesisVerdict {
    HypothesisPurpose purpose;
    double s = 0.0;
    double required_r = 0.0;
    double certified_r = 0.0;
    bool pass = false;
};

double required_decay(HypothesisPurpose purpose, double alpha, double s);
// Derivative order the purpose needs from the spectrum.
int required_derivatives(HypothesisPurpose purpose);
std::string to_string(HypothesisPurpose purpose);

HypothesisVerdict check_hypotheses(const Window& w, double alpha, double s, HypothesisPurpose purpose,
                                   bool allow_estimate = true);

}  // namespace alphamod
