#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace alphamod {

using complex = std::complex<double>;

// Uniform grid origin + k * spacing, k = 0..n-1, in physical coordinates.
class SampledGrid {
public:
    SampledGrid(std::size_t n, double spacing, double origin);

    // n samples with spacing h, origin -floor(n/2) h, so 0 is a node.
    static SampledGrid centered(std::size_t n, double spacing);
    // n samples covering [lo, hi] with both ends included.
    static SampledGrid linspace(double lo, double hi, std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return spacing_; }
    double origin() const noexcept { return origin_; }
    double operator[](std::size_t k) const noexcept {
        return origin_ + static_cast<double>(k) * spacing_;
    }
    double front() const noexcept { return origin_; }
    double back() const noexcept { return (*this)[n_ - 1]; }

    // Equal up to rounding in spacing and origin.
    bool matches(const SampledGrid& other) const noexcept;

private:
    std::size_t n_;
    double spacing_;
    double origin_;
};

class Signal {
public:
    Signal(SampledGrid grid, std::vector<complex> values);

    static Signal zeros(const SampledGrid& grid);
    static Signal sample(const SampledGrid& grid, const std::function<complex(double)>& fn);

    const SampledGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const complex> values() const noexcept { return values_; }
    std::span<complex> values() noexcept { return values_; }
    complex operator[](std::size_t k) const noexcept { return values_[k]; }
    complex& operator[](std::size_t k) noexcept { return values_[k]; }

    Signal& operator+=(const Signal& other);
    Signal& operator-=(const Signal& other);
    Signal& operator*=(complex a) noexcept;

private:
    SampledGrid grid_;
    std::vector<complex> values_;
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(complex a, Signal f);

// Delta_t * sum f_k conj(g_k).
complex inner_product(const Signal& f, const Signal& g);
double norm(const Signal& f);

// v_s(omega) = (1 + |omega|)^s.
struct Weight {
    double s = 0.0;

    double operator()(double omega) const;
    // w_s for a pair of frequencies: max of the two v_s ratios.
    double pair(double omega1, double omega2) const;
};

struct TFPoint {
    double x = 0.0;
    double omega = 0.0;
};

// Samples on an (x, omega) product grid; row j holds omega_j, column k holds x_k.
class TimeFrequencyMap {
public:
    TimeFrequencyMap(SampledGrid x_grid, SampledGrid omega_grid);
    TimeFrequencyMap(SampledGrid x_grid, SampledGrid omega_grid, std::vector<complex> values);

    const SampledGrid& x_grid() const noexcept { return x_grid_; }
    const SampledGrid& omega_grid() const noexcept { return omega_grid_; }
    std::size_t rows() const noexcept { return omega_grid_.size(); }
    std::size_t cols() const noexcept { return x_grid_.size(); }

    complex operator()(std::size_t j, std::size_t k) const noexcept { return values_[j * cols() + k]; }
    complex& operator()(std::size_t j, std::size_t k) noexcept { return values_[j * cols() + k]; }
    std::span<const complex> row(std::size_t j) const noexcept { return {values_.data() + j * cols(), cols()}; }
    std::span<complex> row(std::size_t j) noexcept { return {values_.data() + j * cols(), cols()}; }
    std::span<const complex> values() const noexcept { return values_; }

private:
    SampledGrid x_grid_;
    SampledGrid omega_grid_;
    std::vector<complex> values_;
};

// Trapezoid approximation of (int int |F v_s|^p dx domega)^(1/p); p = infinity gives the max.
double weighted_lp_norm(const TimeFrequencyMap& F, double p, const Weight& weight);

}  // namespace alphamod
