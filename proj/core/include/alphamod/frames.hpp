#pragma once

#include <atomic>
#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "alphamod/covering.hpp"
#include "alphamod/signal.hpp"
#include "alphamod/windows.hpp"

namespace alphamod {

struct FrameConfig {
    std::size_t cache_bytes = std::size_t{512} << 20;  // LRU budget for materialized atoms
};

struct NodeIndex {
    long j = 0;
    long k = 0;
    bool operator==(const NodeIndex&) const = default;
};

// Atoms pi(sigma(x_{j,k}, omega_j)) psi at the covering's box centres, sampled on a signal grid.
class AlphaFrame {
public:
    // Samples of one atom on [first, first + values->size()); zero elsewhere (below 1e-18 of the peak).
    struct SparseAtom {
        std::size_t first = 0;
        std::shared_ptr<const std::vector<complex>> values;
    };

    AlphaFrame(AlphaCovering covering, Window window, SampledGrid signal_grid, FrameConfig config = {});

    const AlphaCovering& covering() const noexcept { return covering_; }
    const Window& window() const noexcept { return window_; }
    const SampledGrid& signal_grid() const noexcept { return grid_; }
    double alpha() const noexcept { return covering_.alpha(); }
    std::size_t size() const noexcept { return covering_.size(); }

    NodeIndex node_index(std::size_t i) const;
    TFPoint node(std::size_t i) const;

    // Thread-safe; computed on first use and kept while the cache budget allows.
    SparseAtom atom(std::size_t i) const;
    Signal atom_signal(std::size_t i) const;

    std::size_t cache_hits() const;
    std::size_t cache_misses() const;

private:
    AlphaCovering covering_;
    Window window_;
    SampledGrid grid_;
    FrameConfig config_;

    SparseAtom compute_atom(std::size_t i) const;

    // When every atom fits the budget they live in write-once slots; otherwise an LRU map.
    struct Slot {
        std::once_flag once;
        SparseAtom atom;
    };
    std::unique_ptr<Slot[]> slots_;
    mutable std::atomic<std::size_t> calls_{0};
    mutable std::atomic<std::size_t> computed_{0};

    mutable std::mutex mutex_;
    mutable std::list<std::size_t> lru_;  // most recent first
    struct Entry {
        SparseAtom atom;
        std::list<std::size_t>::iterator pos;
    };
    mutable std::unordered_map<std::size_t, Entry> cache_;
    mutable std::size_t cached_bytes_ = 0;
};

struct Coefficients {
    std::vector<NodeIndex> nodes;
    std::vector<complex> values;

    std::size_t size() const noexcept { return values.size(); }
};

Coefficients zero_coefficients(const AlphaFrame& fr);
// sum c_i conj(d_i)
complex inner_product(const Coefficients& c, const Coefficients& d);

// c_i = <f, atom_i>.
Coefficients analysis(const Signal& f, const AlphaFrame& fr);
// sum c_i atom_i.
Signal synthesis(const Coefficients& c, const AlphaFrame& fr);
// S f = synthesis(analysis(f)).
Signal frame_operator_apply(const Signal& f, const AlphaFrame& fr);

struct FrameBoundsConfig {
    double tol = 1e-8;             // Ritz residual relative to the Ritz value
    std::size_t max_iter = 10000;  // Krylov dimension cap (also capped by the signal length)
    unsigned seed = 42;
    std::optional<Interval> band;  // subspace for A; defaults to the covering's frequency range
};

struct FrameBounds {
    double A = 0.0;
    double B = 0.0;
    std::size_t iterations_A = 0;
    std::size_t iterations_B = 0;
    bool converged_A = false;
    bool converged_B = false;
};

// Orthogonal projector onto signals whose DFT lives in `band` (default: the covering's frequency range).
Signal band_project(const Signal& f, const AlphaFrame& fr, std::optional<Interval> band = std::nullopt);

// B = largest eigenvalue of S; A = smallest eigenvalue of P S P on the range of
// P = band_project. Both by Lanczos with full reorthogonalization from a seeded
// random start; a bound that misses the tolerance is returned with its flag
// cleared and the last Ritz value. The covering must span the signal grid in time.
FrameBounds estimate_frame_bounds(const AlphaFrame& fr, const FrameBoundsConfig& cfg = {});

struct ReconstructionConfig {
    double tol = 1e-8;
    std::size_t max_iter = 1000;
    std::size_t stagnation_window = 50;  // stop if the residual has not improved over this many iterations
};

struct Reconstruction {
    Signal f_rec;
    std::size_t iterations = 0;
    double residual = 0.0;  // ||S f - S f_rec|| / ||S f||
    double error = 0.0;     // ||f_rec - f|| / ||f||
    bool converged = false;
    bool stagnated = false;
};

// Solves S g = S f by conjugate gradients from g = 0.
Reconstruction reconstruct(const Signal& f, const AlphaFrame& fr, const ReconstructionConfig& cfg = {});
// Canonical dual synthesis: solves S g = synthesis(c). The error field stays 0 (no reference signal).
Reconstruction reconstruct(const Coefficients& c, const AlphaFrame& fr, const ReconstructionConfig& cfg = {});

// Metadata stored with coefficient files; enough to rebuild the frame.
struct FrameHeader {
    double alpha = 0.0;
    double eps = 0.0;
    double c = 0.0;
    std::string window;
    SampledGrid grid = SampledGrid(2, 1.0, 0.0);
    Interval time_range;
    Interval freq_range;
};

FrameHeader frame_header(const AlphaFrame& fr);
AlphaFrame make_frame(const FrameHeader& h, FrameConfig config = {});

}  // namespace alphamod
