#pragma once

#include "alphamod/signal.hpp"

namespace alphamod {

// Frequency grid dual to a time grid: spacing 1/(n dt), origin -floor(n/2)/(n dt).
SampledGrid dual_grid(const SampledGrid& time);

// Riemann sum dt * sum f(t_k) e^{-2 pi i xi t_k} on the dual grid.
Signal forward_fourier(const Signal& f);

// dxi * sum F(xi_m) e^{2 pi i xi_m t}; exact inverse of forward_fourier on `time`.
Signal inverse_fourier(const Signal& F, const SampledGrid& time);

namespace detail {

// Unnormalized in-place DFT, sign -1 (forward) or +1 (backward). Thread-safe.
void dft(std::span<complex> data, int sign);

}  // namespace detail

}  // namespace alphamod
