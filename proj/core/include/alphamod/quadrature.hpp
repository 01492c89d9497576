#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace alphamod {

struct QuadratureConfig {
    double tol = 1e-8;       // absolute error target
    double rel_tol = 0.0;    // optional relative target, whichever is looser wins
    double tail_cut = 0.0;   // bound on discarded tail mass; 0 means tol / 10
    std::size_t max_panels = 20000;

    double effective_tail_cut() const { return tail_cut > 0.0 ? tail_cut : tol / 10.0; }
};

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

namespace detail {

// Neumaier-compensated accumulator.
template <class T>
class CompensatedSum {
public:
    void add(T x) {
        if constexpr (std::is_same_v<T, double>) {
            add_real(sum_, c_, x);
        } else {
            double sr = sum_.real(), cr = c_.real(), si = sum_.imag(), ci = c_.imag();
            add_real(sr, cr, x.real());
            add_real(si, ci, x.imag());
            sum_ = {sr, si};
            c_ = {cr, ci};
        }
    }
    T value() const { return sum_ + c_; }

private:
    static void add_real(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    T sum_{};
    T c_{};
};

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

// QUADPACK-style error scaling for one real component, with a roundoff floor
// of a few ulps of the absolute integral.
inline double scaled_error(double diff, double resabs, double resasc) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double err = std::abs(diff);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (4.0 * eps)) err = std::max(4.0 * eps * resabs, err);
    return err;
}

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gauss_kronrod15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<T, 15> fv;
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    T k = fv[7] * kWgk[7];
    T g = fv[7] * kWg[3];
    for (int i = 0; i < 7; ++i) {
        k += (fv[i] + fv[14 - i]) * kWgk[i];
        if (i % 2 == 1) g += (fv[i] + fv[14 - i]) * kWg[i / 2];
    }
    const T mean = k * 0.5;
    auto component_error = [&](auto part) {
        double resabs = 0.0, resasc = 0.0;
        for (int i = 0; i < 15; ++i) {
            const double w = i == 7 ? kWgk[7] : kWgk[i < 7 ? i : 14 - i];
            resabs += w * std::abs(part(fv[i]));
            resasc += w * std::abs(part(fv[i]) - part(mean));
        }
        return scaled_error(part(k - g) * h, resabs * std::abs(h), resasc * std::abs(h));
    };
    double err;
    if constexpr (std::is_same_v<T, double>) {
        err = component_error([](double v) { return v; });
    } else {
        err = component_error([](const T& v) { return v.real(); }) +
              component_error([](const T& v) { return v.imag(); });
    }
    return {a, b, k * h, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) over [breaks.front(), breaks.back()],
// seeded with one panel per breakpoint interval; bisects the worst panel until
// the summed error estimate meets the target or the panel budget runs out.
template <class F>
auto integrate_adaptive(F&& f, std::span<const double> breaks, const QuadratureConfig& cfg)
    -> QuadratureResult<decltype(f(0.0))> {
    using T = decltype(f(0.0));
    QuadratureResult<T> out;
    std::vector<double> pts(breaks.begin(), breaks.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) {
        out.converged = true;
        return out;
    }

    std::priority_queue<detail::Panel<T>> heap;
    double total_error = 0.0;
    T total_value{};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto p = detail::gauss_kronrod15<T>(f, pts[i], pts[i + 1]);
        total_error += p.error;
        total_value += p.value;
        heap.push(p);
    }
    auto target = [&] { return std::max(cfg.tol, cfg.rel_tol * detail::magnitude(total_value)); };

    std::size_t panels = heap.size();
    std::size_t since_resum = 0;
    while (!heap.empty() && total_error > target() && panels < cfg.max_panels) {
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further
        heap.pop();
        auto left = detail::gauss_kronrod15<T>(f, worst.a, mid);
        auto right = detail::gauss_kronrod15<T>(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        total_value += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        ++panels;
        if (++since_resum == 512) {
            // refresh the running sums to keep drift out of the stopping test
            since_resum = 0;
            auto copy = heap;
            double e = 0.0;
            detail::CompensatedSum<T> v;
            while (!copy.empty()) {
                e += copy.top().error;
                v.add(copy.top().value);
                copy.pop();
            }
            total_error = e;
            total_value = v.value();
        }
    }

    detail::CompensatedSum<T> sum;
    double err = 0.0;
    while (!heap.empty()) {
        sum.add(heap.top().value);
        err += heap.top().error;
        heap.pop();
    }
    out.value = sum.value();
    out.error = err;
    out.panels = panels;
    out.converged = err <= std::max(cfg.tol, cfg.rel_tol * detail::magnitude(out.value));
    return out;
}

template <class F>
auto integrate_adaptive(F&& f, std::initializer_list<double> breaks, const QuadratureConfig& cfg) {
    std::vector<double> b(breaks);
    return integrate_adaptive(std::forward<F>(f), std::span<const double>(b), cfg);
}

}  // namespace alphamod
