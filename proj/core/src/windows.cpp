#include "alphamod/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "alphamod/error.hpp"
#include "alphamod/fourier.hpp"

namespace alphamod {

namespace detail {

class WindowModel {
public:
    virtual ~WindowModel() = default;
    virtual WindowKind kind() const = 0;
    virtual double parameter() const = 0;
    virtual double l2_norm() const = 0;
    virtual int max_deriv() const { return 3; }
    virtual std::optional<DecayCertificate> certificate() const = 0;
    virtual double time(double t) const = 0;
    virtual double deriv(int l, double xi) const = 0;
    virtual double support_radius(double rel) const = 0;
    virtual double spectral_radius(double rel) const = 0;
};

}  // namespace detail

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// l-th derivative of sin(u)/u.
double sinc_u_deriv(int l, double u) {
    if (std::abs(u) < 1.0) {
        // Taylor series; the closed forms below cancel catastrophically near 0.
        double sum = 0.0;
        double fact = 1.0;  // (2k+1)!
        for (int k = 0; k <= 14; ++k) {
            if (k > 0) fact *= (2.0 * k) * (2.0 * k + 1.0);
            const int p = 2 * k - l;
            if (p < 0) continue;
            double falling = 1.0;  // (2k)! / (2k-l)!
            for (int i = 0; i < l; ++i) falling *= 2.0 * k - i;
            const double term = falling / fact * std::pow(u, p);
            sum += (k % 2 == 0) ? term : -term;
        }
        return sum;
    }
    const double s = std::sin(u), c = std::cos(u);
    const double u2 = u * u, u3 = u2 * u;
    switch (l) {
        case 0: return s / u;
        case 1: return c / u - s / u2;
        case 2: return -s / u - 2.0 * c / u2 + 2.0 * s / u3;
        case 3: return -c / u + 3.0 * s / u2 + 6.0 * c / u3 - 6.0 * s / (u3 * u);
        default: throw InvalidArgument("sinc derivative order above 3");
    }
}

// sup over xi in [0, xi_max] of max_{l <= 3} |w^(l)(xi)| (1+xi)^r on a grid of step h.
double grid_constant(const detail::WindowModel& m, double r, double xi_max, double h) {
    double best = 0.0;
    const auto n = static_cast<std::size_t>(std::ceil(xi_max / h));
    for (std::size_t i = 0; i <= n; ++i) {
        const double xi = static_cast<double>(i) * h;
        const double grow = std::isinf(r) ? 1.0 : std::pow(1.0 + xi, r);
        for (int l = 0; l <= m.max_deriv(); ++l) best = std::max(best, std::abs(m.deriv(l, xi)) * grow);
    }
    return best;
}

class BsplineModel final : public detail::WindowModel {
public:
    explicit BsplineModel(int m) : m_(m) {
        // ||B_m||^2 = B_{2m}(0), the autocorrelation at zero lag.
        norm_ = std::sqrt(cardinal(2 * m_, 0.0));
        // The product (1+xi)^m |d^l sinc^m| tends to a constant, so the sup sits at moderate xi.
        cert_ = DecayCertificate{static_cast<double>(m_), 1.0001 * grid_constant(*this, m_, 200.0, 1e-3)};
    }

    WindowKind kind() const override { return WindowKind::bspline; }
    double parameter() const override { return m_; }
    double l2_norm() const override { return norm_; }
    std::optional<DecayCertificate> certificate() const override { return cert_; }
    double time(double t) const override { return cardinal(m_, t); }

    double deriv(int l, double xi) const override {
        const double u = kPi * xi;
        const double s = sinc_u_deriv(0, u);
        if (l == 0) return ipow(s, m_);
        const double m = m_;
        const double s1 = kPi * sinc_u_deriv(1, u);
        if (l == 1) return m * ipow(s, m_ - 1) * s1;
        const double s2 = kPi * kPi * sinc_u_deriv(2, u);
        if (l == 2) return m * (m - 1) * ipow(s, m_ - 2) * s1 * s1 + m * ipow(s, m_ - 1) * s2;
        const double s3 = kPi * kPi * kPi * sinc_u_deriv(3, u);
        return m * (m - 1) * (m - 2) * ipow(s, m_ - 3) * s1 * s1 * s1 +
               3.0 * m * (m - 1) * ipow(s, m_ - 2) * s1 * s2 + m * ipow(s, m_ - 1) * s3;
    }

    double support_radius(double) const override { return 0.5 * m_; }
    double spectral_radius(double rel) const override { return std::pow(1.0 / rel, 1.0 / m_) / kPi; }

private:
    // Zero powers carry a zero coefficient in the chain rule; avoid 0 * inf.
    static double ipow(double s, int p) { return p < 0 ? 0.0 : std::pow(s, p); }

    // Centered cardinal B-spline of order m via Cox-de Boor on integer knots.
    static double cardinal(int m, double t) {
        const double x = t + 0.5 * m;
        if (!(x >= 0.0 && x < m)) return 0.0;
        std::vector<double> n(m);
        for (int i = 0; i < m; ++i) n[i] = (x >= i && x < i + 1) ? 1.0 : 0.0;
        for (int k = 2; k <= m; ++k)
            for (int i = 0; i + k <= m; ++i)
                n[i] = ((x - i) * n[i] + (i + k - x) * n[i + 1]) / (k - 1);
        return n[0];
    }

    int m_;
    double norm_;
    DecayCertificate cert_;
};

class GaussianModel final : public detail::WindowModel {
public:
    GaussianModel() {
        double c = 0.0;
        for (int l = 0; l <= 3; ++l)
            for (double xi = 0.0; xi <= 4.0; xi += 1e-3) c = std::max(c, std::abs(deriv(l, xi)));
        cert_ = DecayCertificate{kInf, 1.0001 * c};
    }

    WindowKind kind() const override { return WindowKind::gaussian; }
    double parameter() const override { return 0.0; }
    double l2_norm() const override { return 1.0; }
    std::optional<DecayCertificate> certificate() const override { return cert_; }
    double time(double t) const override { return kAmp * std::exp(-kPi * t * t); }

    double deriv(int l, double xi) const override {
        const double e = kAmp * std::exp(-kPi * xi * xi);
        switch (l) {
            case 0: return e;
            case 1: return -2.0 * kPi * xi * e;
            case 2: return (4.0 * kPi * kPi * xi * xi - 2.0 * kPi) * e;
            default: return (-8.0 * kPi * kPi * kPi * xi * xi * xi + 12.0 * kPi * kPi * xi) * e;
        }
    }

    double support_radius(double rel) const override { return std::sqrt(std::log(1.0 / rel) / kPi); }
    double spectral_radius(double rel) const override {
        // The cubic prefactor of the third derivative needs a little extra room.
        return std::sqrt(std::log(1.0 / rel) / kPi) + 1.0;
    }

private:
    static constexpr double kAmp = 1.189207115002721;  // 2^{1/4}
    DecayCertificate cert_;
};

// a cos^4(pi xi / (2c)) on |xi| < c, written as a (3 + 4 cos(pi xi/c) + cos(2 pi xi/c)) / 8.
class BandlimitedModel final : public detail::WindowModel {
public:
    explicit BandlimitedModel(double cutoff) : c_(cutoff), a_(std::sqrt(64.0 / (35.0 * cutoff))) {
        double best = 0.0;
        for (int l = 0; l <= 3; ++l)
            for (int i = 0; i <= 4000; ++i) best = std::max(best, std::abs(deriv(l, c_ * i / 4000.0)));
        cert_ = DecayCertificate{kInf, 1.0001 * best};
        // |psi(t)| ~ K |t|^-5 once t is many periods out.
        double k = 0.0;
        for (double t = 50.0 / c_; t <= 60.0 / c_; t += 0.01 / c_) k = std::max(k, std::abs(time(t)) * std::pow(t, 5));
        tail_k_ = k;
    }

    WindowKind kind() const override { return WindowKind::bandlimited; }
    double parameter() const override { return c_; }
    double l2_norm() const override { return 1.0; }
    std::optional<DecayCertificate> certificate() const override { return cert_; }

    double time(double t) const override {
        const double b = 2.0 * kPi * c_ * t;
        auto S = [](double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; };
        return a_ * c_ / 8.0 *
               (6.0 * S(b) + 4.0 * (S(kPi - b) + S(kPi + b)) + S(2.0 * kPi - b) + S(2.0 * kPi + b));
    }

    double deriv(int l, double xi) const override {
        if (std::abs(xi) >= c_) return 0.0;
        const double k1 = kPi / c_, k2 = 2.0 * kPi / c_;
        const double shift = l * kPi / 2.0;
        double v = 4.0 * std::pow(k1, l) * std::cos(k1 * xi + shift) + std::pow(k2, l) * std::cos(k2 * xi + shift);
        if (l == 0) v += 3.0;
        return a_ / 8.0 * v;
    }

    double support_radius(double rel) const override { return std::pow(tail_k_ / (rel * time(0.0)), 0.2); }
    double spectral_radius(double) const override { return c_; }

private:
    double c_;
    double a_;
    double tail_k_ = 0.0;
    DecayCertificate cert_;
};

// Spectrum tables of (-2 pi i t)^l psi(t), l = 0..4, from dense FFTs; between
// nodes each table is a cubic Hermite interpolant whose slopes come from the
// next table, so every derivative keeps full accuracy.
class BumpModel final : public detail::WindowModel {
public:
    BumpModel(double radius, const BumpTableConfig& cfg) : radius_(radius) {
        const std::size_t n = cfg.points;
        if (n < 1024 || (n & (n - 1)) != 0) throw InvalidArgument("bump table size must be a power of two >= 1024");
        if (!(cfg.band > 0.0)) throw InvalidArgument("bump table band must be positive");
        const SampledGrid tg = SampledGrid::centered(n, 1.0 / (2.0 * cfg.band));
        if (radius >= -tg.front()) throw InvalidArgument("bump radius exceeds the table's time window");

        std::vector<double> profile(n);
        double energy = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            profile[k] = raw(tg[k]);
            energy += profile[k] * profile[k];
        }
        amp_ = 1.0 / std::sqrt(energy * tg.spacing());

        tables_.resize(kTables);
        for (int l = 0; l < kTables; ++l) {
            std::vector<complex> v(n);
            for (std::size_t k = 0; k < n; ++k) {
                const complex factor = std::pow(complex(0.0, -2.0 * kPi * tg[k]), l);
                v[k] = factor * amp_ * profile[k];
            }
            Signal spec = forward_fourier(Signal(tg, std::move(v)));
            if (l == 0) grid_ = spec.grid();
            tables_[l].resize(n);
            for (std::size_t m = 0; m < n; ++m) tables_[l][m] = spec[m].real();
        }
        // suffix maxima of |psi_hat| over |xi|, for spectral_radius
        const std::size_t half = n / 2;
        tail_max_.assign(half + 1, 0.0);
        for (std::size_t i = half; i-- > 0;) {
            const double a = std::abs(tables_[0][half + i]);
            const double b = i <= half ? std::abs(tables_[0][half - i]) : 0.0;
            tail_max_[i] = std::max({tail_max_[i + 1], a, b});
        }
    }

    void set_certificate(DecayCertificate c) { cert_ = c; }
    double band_edge() const { return -grid_.front(); }

    WindowKind kind() const override { return WindowKind::bump; }
    double parameter() const override { return radius_; }
    double l2_norm() const override { return 1.0; }
    std::optional<DecayCertificate> certificate() const override { return cert_; }
    double time(double t) const override { return amp_ * raw(t); }

    double deriv(int l, double xi) const override {
        const double pos = (xi - grid_.front()) / grid_.spacing();
        if (!(pos >= 0.0) || pos >= static_cast<double>(grid_.size() - 1)) return 0.0;
        const auto i = static_cast<std::size_t>(pos);
        const double u = pos - static_cast<double>(i), h = grid_.spacing();
        const auto& f = tables_[l];
        const auto& d = tables_[l + 1];
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * f[i] + (u3 - 2 * u2 + u) * h * d[i] + (-2 * u3 + 3 * u2) * f[i + 1] +
               (u3 - u2) * h * d[i + 1];
    }

    double support_radius(double) const override { return radius_; }
    double spectral_radius(double rel) const override {
        const double target = rel * tail_max_[0];
        // first index whose suffix max drops to the target
        auto it = std::find_if(tail_max_.begin(), tail_max_.end(), [&](double v) { return v <= target; });
        return static_cast<double>(it - tail_max_.begin()) * grid_.spacing();
    }

private:
    static constexpr int kTables = 5;

    double raw(double t) const {
        const double u = t / radius_;
        if (!(std::abs(u) < 1.0)) return 0.0;
        return std::exp(-1.0 / (1.0 - u * u));
    }

    double radius_;
    double amp_ = 1.0;
    SampledGrid grid_{2, 1.0, 0.0};
    std::vector<std::vector<double>> tables_;
    std::vector<double> tail_max_;
    std::optional<DecayCertificate> cert_;
};

double parse_number(std::string_view text, std::string_view what) {
    std::string s(text);
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("window spec: bad " + std::string(what) + " '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("window spec: bad " + std::string(what) + " '" + s + "'");
    return v;
}

}  // namespace

Window::Window(std::shared_ptr<const detail::WindowModel> model, double scale) : model_(std::move(model)), scale_(scale) {
    if (!model_) throw InvalidArgument("window model is null");
}

WindowKind Window::kind() const { return model_->kind(); }
double Window::parameter() const { return model_->parameter(); }

std::string Window::spec() const {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (s.back() == '.') s.pop_back();
        return s;
    };
    switch (kind()) {
        case WindowKind::bspline: return "bspline:" + std::to_string(static_cast<int>(parameter()));
        case WindowKind::gaussian: return "gaussian";
        case WindowKind::bump: return "bump:" + num(parameter());
        case WindowKind::bandlimited: return "bandlimited:" + num(parameter());
    }
    return "unknown";
}

double Window::l2_norm() const { return std::abs(scale_) * model_->l2_norm(); }
int Window::max_deriv() const { return model_->max_deriv(); }

std::optional<DecayCertificate> Window::decay_certificate() const {
    auto c = model_->certificate();
    if (c) c->C *= std::abs(scale_);
    return c;
}

double Window::time(double t) const { return scale_ * model_->time(t); }

complex Window::fourier_deriv(int l, double xi) const {
    if (l < 0 || l > max_deriv())
        throw InvalidArgument("derivative order " + std::to_string(l) + " exceeds max_deriv " +
                              std::to_string(max_deriv()));
    return scale_ * model_->deriv(l, xi);
}

double Window::fourier_deriv_real(int l, double xi) const { return scale_ * model_->deriv(l, xi); }

double Window::support_radius(double rel) const { return model_->support_radius(rel); }
double Window::spectral_radius(double rel) const { return model_->spectral_radius(rel); }

Window Window::scaled(double factor) const { return Window(model_, scale_ * factor); }

Window bspline_window(int m) {
    if (m < 1) throw InvalidArgument("bspline order must be >= 1");
    return Window(std::make_shared<BsplineModel>(m));
}

Window gaussian_window() {
    static const auto model = std::make_shared<GaussianModel>();
    return Window(model);
}

Window bump_window(double radius, const BumpTableConfig& table) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("bump radius must be positive");
    auto model = std::make_shared<BumpModel>(radius, table);
    const Window probe(model);
    // Decay sets in around xi ~ 1/radius; fit well inside the table band.
    const double range = std::max(10.0, std::min(100.0 / radius, 0.8 * model->band_edge()));
    const DecayEstimate fit = estimate_decay_rate(probe, 3, range);
    const double r = 0.9 * fit.r;
    // Constant over the whole table band, sampled at half the table step.
    const double c = grid_constant(*model, r, model->band_edge(), 0.5 * 2.0 * table.band / table.points);
    model->set_certificate(DecayCertificate{r, 1.0001 * c});
    return Window(std::move(model));
}

Window bandlimited_window(double cutoff) {
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw InvalidArgument("bandlimited cutoff must be positive");
    return Window(std::make_shared<BandlimitedModel>(cutoff));
}

Window parse_window(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    if (name == "gaussian") {
        if (!arg.empty()) throw InvalidArgument("window spec: gaussian takes no parameter");
        return gaussian_window();
    }
    if (arg.empty()) throw InvalidArgument("window spec '" + std::string(spec) + "' needs a parameter");
    if (name == "bspline") {
        const double m = parse_number(arg, "order");
        if (m != std::floor(m)) throw InvalidArgument("window spec: bspline order must be an integer");
        return bspline_window(static_cast<int>(m));
    }
    if (name == "bump") return bump_window(parse_number(arg, "radius"));
    if (name == "bandlimited") return bandlimited_window(parse_number(arg, "cutoff"));
    throw InvalidArgument("unknown window kind '" + std::string(name) + "'");
}

complex eval_fourier_deriv(const Window& w, int l, double xi) { return w.fourier_deriv(l, xi); }

DecayEstimate estimate_decay_rate(const Window& w, int l_max, double xi_range, std::size_t samples) {
    if (!(xi_range >= 10.0)) throw InvalidArgument("decay fit needs xi_range >= 10");
    if (l_max < 0 || l_max > w.max_deriv()) throw InvalidArgument("decay fit derivative order out of range");
    if (samples < 100) throw InvalidArgument("decay fit needs at least 100 samples");

    std::vector<double> xi(samples), env(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        xi[i] = xi_range * static_cast<double>(i) / static_cast<double>(samples - 1);
        double e = 0.0;
        for (int l = 0; l <= l_max; ++l)
            e = std::max({e, std::abs(w.fourier_deriv_real(l, xi[i])), std::abs(w.fourier_deriv_real(l, -xi[i]))});
        env[i] = e;
    }
    if (std::all_of(env.begin(), env.end(), [](double e) { return e == 0.0; }))
        throw InvalidArgument("decay fit of an all-zero spectrum");

    constexpr double kFloor = 1e-290;
    std::size_t last = samples;
    while (last > 0 && env[last - 1] <= kFloor) --last;

    DecayEstimate out;
    auto log_constant = [&](double r) {
        double best = -kInf;
        for (std::size_t i = 0; i < samples; ++i)
            if (env[i] > 0.0) best = std::max(best, std::log(env[i]) + r * std::log1p(xi[i]));
        return best;
    };

    // A jump from a resolvable value straight to exact zeros means compact support.
    if (last < samples && env[last - 1] > 1e-250 &&
        std::all_of(env.begin() + last, env.end(), [](double e) { return e == 0.0; })) {
        out.r = kInf;
        out.log_C = log_constant(0.0);
        out.C = std::exp(out.log_C);
        out.support = xi[last - 1];
        return out;
    }

    // Record points of the envelope (running max from the right) in the upper half.
    const double hi = xi[last - 1], lo = 0.5 * hi;
    std::vector<double> lx, ly;
    double running = 0.0;
    for (std::size_t i = last; i-- > 0;) {
        if (env[i] >= running) {
            running = env[i];
            if (xi[i] >= lo && env[i] > kFloor) {
                lx.push_back(std::log1p(xi[i]));
                ly.push_back(std::log(env[i]));
            }
        }
    }
    if (lx.size() < 2) throw NumericalError("decay fit found fewer than two envelope points", 0.0);
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.r = -slope;
    out.log_C = log_constant(out.r);
    out.C = std::exp(out.log_C);
    return out;
}

double required_decay(HypothesisPurpose purpose, double alpha, double s) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
    if (purpose == HypothesisPurpose::admissibility) return std::max(1.0, alpha / (2.0 * (1.0 - alpha)));
    if (!(s >= 0.0)) throw InvalidArgument("weight exponent s must be >= 0");
    const double q = 1.0 - alpha;
    const double base = (2.0 + 2.0 * s + 7.0 * alpha - 4.0 * alpha * alpha) / (2.0 * q * q);
    return purpose == HypothesisPurpose::kernel_integrability ? base : base + 1.0;
}

int required_derivatives(HypothesisPurpose purpose) {
    switch (purpose) {
        case HypothesisPurpose::admissibility: return 0;
        case HypothesisPurpose::kernel_integrability: return 2;
        case HypothesisPurpose::discretization: return 3;
    }
    return 3;
}

std::string to_string(HypothesisPurpose purpose) {
    switch (purpose) {
        case HypothesisPurpose::admissibility: return "admissibility";
        case HypothesisPurpose::kernel_integrability: return "kernel_integrability";
        case HypothesisPurpose::discretization: return "discretization";
    }
    return "unknown";
}

HypothesisVerdict check_hypotheses(const Window& w, double alpha, double s, HypothesisPurpose purpose,
                                   bool allow_estimate) {
    HypothesisVerdict v{purpose, s, required_decay(purpose, alpha, s), 0.0, false};
    if (auto cert = w.decay_certificate()) {
        v.certified_r = cert->r;
    } else if (allow_estimate) {
        v.certified_r = 0.9 * estimate_decay_rate(w, std::min(w.max_deriv(), 3), 200.0).r;
    } else {
        throw InvalidArgument("window has no decay certificate and estimation is disabled");
    }
    v.pass = v.certified_r > v.required_r && w.max_deriv() >= required_derivatives(purpose);
    return v;
}

}  // namespace alphamod
