#include "alphamod/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alphamod/error.hpp"

namespace alphamod {

SampledGrid::SampledGrid(std::size_t n, double spacing, double origin)
    : n_(n), spacing_(spacing), origin_(origin) {
    if (n < 2) throw InvalidArgument("grid needs at least 2 samples");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidArgument("grid spacing must be positive and finite");
    if (!std::isfinite(origin)) throw InvalidArgument("grid origin must be finite");
}

SampledGrid SampledGrid::centered(std::size_t n, double spacing) {
    return SampledGrid(n, spacing, -static_cast<double>(n / 2) * spacing);
}

SampledGrid SampledGrid::linspace(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw InvalidArgument("linspace needs n >= 2 and hi > lo");
    return SampledGrid(n, (hi - lo) / static_cast<double>(n - 1), lo);
}

bool SampledGrid::matches(const SampledGrid& other) const noexcept {
    if (n_ != other.n_) return false;
    const double tol = 1e-12;
    if (std::abs(spacing_ - other.spacing_) > tol * spacing_) return false;
    const double scale = std::max({std::abs(origin_), std::abs(other.origin_), spacing_ * static_cast<double>(n_)});
    return std::abs(origin_ - other.origin_) <= tol * scale;
}

Signal::Signal(SampledGrid grid, std::vector<complex> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("signal length does not match grid");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("signal has non-finite values");
}

Signal Signal::zeros(const SampledGrid& grid) { return Signal(grid, std::vector<complex>(grid.size())); }

Signal Signal::sample(const SampledGrid& grid, const std::function<complex(double)>& fn) {
    std::vector<complex> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid[k]);
    return Signal(grid, std::move(v));
}

Signal& Signal::operator+=(const Signal& other) {
    if (!grid_.matches(other.grid_)) throw InvalidArgument("grid mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

Signal& Signal::operator-=(const Signal& other) {
    if (!grid_.matches(other.grid_)) throw InvalidArgument("grid mismatch");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

Signal& Signal::operator*=(complex a) noexcept {
    for (auto& v : values_) v *= a;
    return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(complex a, Signal f) { return f *= a; }

complex inner_product(const Signal& f, const Signal& g) {
    if (!f.grid().matches(g.grid())) throw InvalidArgument("inner product of signals on different grids");
    complex acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * std::conj(g[k]);
    return acc * f.grid().spacing();
}

double norm(const Signal& f) {
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::norm(v);
    return std::sqrt(acc * f.grid().spacing());
}

double Weight::operator()(double omega) const { return std::pow(1.0 + std::abs(omega), s); }

double Weight::pair(double omega1, double omega2) const {
    const double a = 1.0 + std::abs(omega1), b = 1.0 + std::abs(omega2);
    return std::pow(std::max(a / b, b / a), std::abs(s));
}

TimeFrequencyMap::TimeFrequencyMap(SampledGrid x_grid, SampledGrid omega_grid)
    : x_grid_(x_grid), omega_grid_(omega_grid), values_(x_grid.size() * omega_grid.size()) {}

TimeFrequencyMap::TimeFrequencyMap(SampledGrid x_grid, SampledGrid omega_grid, std::vector<complex> values)
    : x_grid_(x_grid), omega_grid_(omega_grid), values_(std::move(values)) {
    if (values_.size() != x_grid_.size() * omega_grid_.size()) throw InvalidArgument("map size does not match grids");
}

double weighted_lp_norm(const TimeFrequencyMap& F, double p, const Weight& weight) {
    if (F.rows() == 0 || F.cols() == 0) throw InvalidArgument("empty grid");
    if (!(p >= 1.0)) throw InvalidArgument("p must be >= 1");
    // Powers are taken relative to the largest weighted magnitude, which keeps
    // the norm exactly homogeneous and avoids overflow for large p.
    double peak = 0.0;
    for (std::size_t j = 0; j < F.rows(); ++j) {
        const double v = weight(F.omega_grid()[j]);
        for (std::size_t k = 0; k < F.cols(); ++k) peak = std::max(peak, std::abs(F(j, k)) * v);
    }
    if (std::isinf(p) || peak == 0.0) return peak;
    auto trap = [](std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; };
    double acc = 0.0;
    for (std::size_t j = 0; j < F.rows(); ++j) {
        const double v = weight(F.omega_grid()[j]);
        const double wj = trap(j, F.rows());
        for (std::size_t k = 0; k < F.cols(); ++k) acc += wj * trap(k, F.cols()) * std::pow(std::abs(F(j, k)) * v / peak, p);
    }
    return peak * std::pow(acc * F.x_grid().spacing() * F.omega_grid().spacing(), 1.0 / p);
}

}  // namespace alphamod
