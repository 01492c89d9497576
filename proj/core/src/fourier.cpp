#include "alphamod/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "alphamod/error.hpp"

namespace alphamod {

namespace detail {
namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* buf = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!plan) throw Error("FFTW planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

void dft(std::span<complex> data, int sign) {
    if (data.empty()) return;
    auto plan = plan_cache().get(data.size(), sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

}  // namespace detail

namespace {

// e^{2 pi i q / n} with q reduced mod n first, so large k*h products stay exact.
complex unit_root(std::size_t q, std::size_t n) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(q % n) / static_cast<double>(n));
}

}  // namespace

SampledGrid dual_grid(const SampledGrid& time) {
    const double dxi = 1.0 / (static_cast<double>(time.size()) * time.spacing());
    return SampledGrid::centered(time.size(), dxi);
}

// xi_m = (m - h) dxi with h = floor(n/2); e^{-2 pi i xi_m t_k} splits into
// e^{-2 pi i xi_m t0} * e^{2 pi i h k / n} * e^{-2 pi i m k / n}.
Signal forward_fourier(const Signal& f) {
    const auto& tg = f.grid();
    const std::size_t n = tg.size(), h = n / 2;
    const SampledGrid fg = dual_grid(tg);
    std::vector<complex> buf(f.values().begin(), f.values().end());
    for (std::size_t k = 0; k < n; ++k) buf[k] *= unit_root(h * k, n);
    detail::dft(buf, -1);
    const double t0 = tg.origin();
    for (std::size_t m = 0; m < n; ++m)
        buf[m] *= tg.spacing() * std::polar(1.0, -2.0 * std::numbers::pi * fg[m] * t0);
    return Signal(fg, std::move(buf));
}

Signal inverse_fourier(const Signal& F, const SampledGrid& time) {
    const SampledGrid fg = dual_grid(time);
    if (!F.grid().matches(fg)) throw InvalidArgument("spectrum grid is not the dual of the requested time grid");
    const std::size_t n = time.size(), h = n / 2;
    std::vector<complex> buf(F.values().begin(), F.values().end());
    const double t0 = time.origin();
    for (std::size_t m = 0; m < n; ++m) buf[m] *= std::polar(1.0, 2.0 * std::numbers::pi * fg[m] * t0);
    detail::dft(buf, +1);
    for (std::size_t k = 0; k < n; ++k) buf[k] *= fg.spacing() * std::conj(unit_root(h * k, n));
    return Signal(time, std::move(buf));
}

}  // namespace alphamod
