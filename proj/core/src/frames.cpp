#include "alphamod/frames.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "alphamod/error.hpp"
#include "alphamod/fourier.hpp"
#include "alphamod/parallel.hpp"
#include "alphamod/symbol.hpp"
#include "alphamod/transform.hpp"

namespace alphamod {

namespace {

void check_grid(const Signal& f, const AlphaFrame& fr) {
    if (!f.grid().matches(fr.signal_grid())) throw InvalidArgument("signal grid does not match the frame grid");
}

void check_nodes(const Coefficients& c, const AlphaFrame& fr) {
    if (c.values.size() != fr.size() || c.nodes.size() != fr.size())
        throw InvalidArgument("coefficient count " + std::to_string(c.values.size()) + " does not match " +
                              std::to_string(fr.size()) + " frame nodes");
    for (std::size_t i = 0; i < fr.size(); ++i)
        if (!(c.nodes[i] == fr.node_index(i)))
            throw InvalidArgument("coefficient node " + std::to_string(i) + " does not match the frame");
}

// a * conj(b) and a * b without the NaN-recovery path of operator*, which dominates the inner loops.
inline complex mul_conj(complex a, complex b) {
    return {a.real() * b.real() + a.imag() * b.imag(), a.imag() * b.real() - a.real() * b.imag()};
}
inline complex mul(complex a, complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

Signal normalized(Signal v) {
    const double n = norm(v);
    if (n == 0.0) throw NumericalError("iteration vector vanished", 0.0);
    v *= 1.0 / n;
    return v;
}

struct Extreme {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Extreme eigenvalue of a Hermitian operator restricted to the range of `project`.
template <class Op, class Proj>
Extreme lanczos_extreme(const Op& apply, const Proj& project, Signal start, bool largest, double tol,
                        std::size_t max_dim) {
    std::vector<Signal> basis;
    std::vector<double> diag, off;
    basis.push_back(normalized(project(start)));
    Extreme out;
    for (std::size_t k = 0; k < max_dim; ++k) {
        Signal w = project(apply(basis[k]));
        diag.push_back(inner_product(w, basis[k]).real());
        // Two passes of classical Gram-Schmidt keep the basis orthogonal to rounding level.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= inner_product(w, q) * q;
        w = project(w);
        const double beta = norm(w);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
        const Eigen::Map<const Eigen::VectorXd> d(diag.data(), static_cast<Eigen::Index>(diag.size()));
        const Eigen::Map<const Eigen::VectorXd> e(off.data(), static_cast<Eigen::Index>(off.size()));
        eig.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        const Eigen::Index idx = largest ? static_cast<Eigen::Index>(diag.size()) - 1 : 0;
        out.value = eig.eigenvalues()(idx);
        out.iterations = k + 1;
        const double residual = beta * std::abs(eig.eigenvectors()(static_cast<Eigen::Index>(k), idx));
        if (residual <= tol * std::abs(out.value) || beta <= 1e-14 * std::abs(out.value)) {
            out.converged = true;
            break;
        }
        off.push_back(beta);
        w *= 1.0 / beta;
        basis.push_back(std::move(w));
    }
    return out;
}

Signal random_signal(const SampledGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<complex> v(g.size());
    for (auto& z : v) z = {nd(rng), nd(rng)};
    return Signal(g, std::move(v));
}

struct CgResult {
    Signal x;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
    bool stagnated = false;
};

// CG on a self-adjoint positive semidefinite operator, from x = 0.
template <class Op>
CgResult conjugate_gradient(const Op& apply, const Signal& b, double tol, std::size_t max_iter, std::size_t window) {
    CgResult out{Signal::zeros(b.grid())};
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    Signal r = b, p = b;
    double rr = inner_product(r, r).real();
    double best = 1.0;
    std::size_t best_at = 0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const Signal Ap = apply(p);
        const double pAp = inner_product(Ap, p).real();
        if (!(pAp > 0.0)) {
            out.stagnated = true;
            break;
        }
        const double a = rr / pAp;
        out.x += a * p;
        r -= a * Ap;
        const double rr_new = inner_product(r, r).real();
        out.iterations = it;
        out.residual = std::sqrt(rr_new) / bnorm;
        if (out.residual <= tol) {
            out.converged = true;
            break;
        }
        if (out.residual < 0.99 * best) {
            best = out.residual;
            best_at = it;
        } else if (it - best_at >= window) {
            out.stagnated = true;
            break;
        }
        p *= rr_new / rr;
        p += r;
        rr = rr_new;
    }
    return out;
}

}  // namespace

AlphaFrame::AlphaFrame(AlphaCovering covering, Window window, SampledGrid signal_grid, FrameConfig config)
    : covering_(std::move(covering)), window_(std::move(window)), grid_(signal_grid), config_(config) {
    if (covering_.empty()) throw InvalidArgument("frame needs a non-empty covering");
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        const auto p = node(i);
        const auto [first, last] = atom_index_range(window_, alpha(), p.x, p.omega, grid_);
        bytes += (last - first) * sizeof(complex);
    }
    if (bytes <= config_.cache_bytes) slots_ = std::make_unique<Slot[]>(size());
}

NodeIndex AlphaFrame::node_index(std::size_t i) const {
    const auto& b = covering_.boxes().at(i);
    return {b.j, b.k};
}

TFPoint AlphaFrame::node(std::size_t i) const {
    const auto& b = covering_.boxes().at(i);
    return {b.x, b.omega};
}

AlphaFrame::SparseAtom AlphaFrame::compute_atom(std::size_t i) const {
    computed_.fetch_add(1, std::memory_order_relaxed);
    const auto p = node(i);
    const auto [first, last] = atom_index_range(window_, alpha(), p.x, p.omega, grid_);
    auto values = std::make_shared<std::vector<complex>>(last - first);
    sample_atom(window_, alpha(), p.x, p.omega, grid_, first, *values);
    return {first, std::move(values)};
}

AlphaFrame::SparseAtom AlphaFrame::atom(std::size_t i) const {
    if (i >= size()) throw InvalidArgument("atom index out of range");
    calls_.fetch_add(1, std::memory_order_relaxed);
    if (slots_) {
        Slot& slot = slots_[i];
        std::call_once(slot.once, [&] { slot.atom = compute_atom(i); });
        return slot.atom;
    }
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(i); it != cache_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.pos);
            return it->second.atom;
        }
    }
    SparseAtom a = compute_atom(i);
    const std::size_t bytes = a.values->size() * sizeof(complex);
    std::lock_guard lock(mutex_);
    if (cache_.count(i) || bytes > config_.cache_bytes) return a;
    while (cached_bytes_ + bytes > config_.cache_bytes && !lru_.empty()) {
        const auto victim = lru_.back();
        lru_.pop_back();
        cached_bytes_ -= cache_[victim].atom.values->size() * sizeof(complex);
        cache_.erase(victim);
    }
    lru_.push_front(i);
    cache_.emplace(i, Entry{a, lru_.begin()});
    cached_bytes_ += bytes;
    return a;
}

Signal AlphaFrame::atom_signal(std::size_t i) const {
    const auto a = atom(i);
    Signal s = Signal::zeros(grid_);
    std::copy(a.values->begin(), a.values->end(), s.values().begin() + static_cast<std::ptrdiff_t>(a.first));
    return s;
}

std::size_t AlphaFrame::cache_hits() const { return calls_.load() - computed_.load(); }

std::size_t AlphaFrame::cache_misses() const { return computed_.load(); }

Coefficients zero_coefficients(const AlphaFrame& fr) {
    Coefficients c;
    c.nodes.reserve(fr.size());
    for (std::size_t i = 0; i < fr.size(); ++i) c.nodes.push_back(fr.node_index(i));
    c.values.assign(fr.size(), 0.0);
    return c;
}

complex inner_product(const Coefficients& c, const Coefficients& d) {
    if (c.size() != d.size()) throw InvalidArgument("coefficient sizes differ");
    complex acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += c.values[i] * std::conj(d.values[i]);
    return acc;
}

Coefficients analysis(const Signal& f, const AlphaFrame& fr) {
    check_grid(f, fr);
    Coefficients c = zero_coefficients(fr);
    const auto fv = f.values();
    const double dt = fr.signal_grid().spacing();
    parallel_for(fr.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto a = fr.atom(i);
            complex acc = 0.0;
            const complex* av = a.values->data();
            const complex* fp = fv.data() + a.first;
            for (std::size_t t = 0; t < a.values->size(); ++t) acc += mul_conj(fp[t], av[t]);
            c.values[i] = dt * acc;
        }
    });
    return c;
}

Signal synthesis(const Coefficients& c, const AlphaFrame& fr) {
    check_nodes(c, fr);
    std::mutex merge;
    Signal out = Signal::zeros(fr.signal_grid());
    parallel_for(fr.size(), [&](std::size_t begin, std::size_t end) {
        std::vector<complex> local(fr.signal_grid().size(), 0.0);
        for (std::size_t i = begin; i < end; ++i) {
            if (c.values[i] == 0.0) continue;
            const auto a = fr.atom(i);
            const complex* av = a.values->data();
            complex* out = local.data() + a.first;
            for (std::size_t t = 0; t < a.values->size(); ++t) out[t] += mul(c.values[i], av[t]);
        }
        std::lock_guard lock(merge);
        auto ov = out.values();
        for (std::size_t t = 0; t < local.size(); ++t) ov[t] += local[t];
    });
    return out;
}

Signal frame_operator_apply(const Signal& f, const AlphaFrame& fr) { return synthesis(analysis(f, fr), fr); }

Signal band_project(const Signal& f, const AlphaFrame& fr, std::optional<Interval> band_opt) {
    check_grid(f, fr);
    Signal F = forward_fourier(f);
    const auto band = band_opt.value_or(fr.covering().freq_range());
    for (std::size_t m = 0; m < F.size(); ++m) {
        const double xi = F.grid()[m];
        if (xi < band.lo || xi > band.hi) F[m] = 0.0;
    }
    return inverse_fourier(F, f.grid());
}

FrameBounds estimate_frame_bounds(const AlphaFrame& fr, const FrameBoundsConfig& cfg) {
    const auto& g = fr.signal_grid();
    const auto t = fr.covering().time_range();
    if (t.lo > g.front() + 0.5 * g.spacing() || t.hi < g.back() - 0.5 * g.spacing())
        throw InvalidArgument("covering time range must span the signal grid for frame-bound estimation");
    FrameBounds out;
    const std::size_t dim = std::min(cfg.max_iter, g.size());
    auto identity = [](const Signal& x) { return x; };
    auto S = [&](const Signal& x) { return frame_operator_apply(x, fr); };
    const auto top = lanczos_extreme(S, identity, random_signal(g, cfg.seed), true, cfg.tol, dim);
    out.B = top.value;
    out.iterations_B = top.iterations;
    out.converged_B = top.converged;

    auto project = [&](const Signal& x) { return band_project(x, fr, cfg.band); };
    const auto bottom = lanczos_extreme(S, project, random_signal(g, cfg.seed + 1), false, cfg.tol, dim);
    out.A = bottom.value;
    out.iterations_A = bottom.iterations;
    out.converged_A = bottom.converged;
    return out;
}

namespace {

Reconstruction solve_frame_system(const Signal& b, const AlphaFrame& fr, const ReconstructionConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw InvalidArgument("reconstruction tolerance must be positive");
    auto cg = conjugate_gradient([&](const Signal& x) { return frame_operator_apply(x, fr); }, b, cfg.tol,
                                 cfg.max_iter, cfg.stagnation_window);
    Reconstruction out{std::move(cg.x)};
    out.iterations = cg.iterations;
    out.residual = cg.residual;
    out.converged = cg.converged;
    out.stagnated = cg.stagnated;
    return out;
}

}  // namespace

Reconstruction reconstruct(const Signal& f, const AlphaFrame& fr, const ReconstructionConfig& cfg) {
    check_grid(f, fr);
    auto out = solve_frame_system(frame_operator_apply(f, fr), fr, cfg);
    const double fn = norm(f);
    out.error = fn > 0.0 ? norm(out.f_rec - f) / fn : norm(out.f_rec);
    return out;
}

Reconstruction reconstruct(const Coefficients& c, const AlphaFrame& fr, const ReconstructionConfig& cfg) {
    return solve_frame_system(synthesis(c, fr), fr, cfg);
}

FrameHeader frame_header(const AlphaFrame& fr) {
    const auto& cov = fr.covering();
    return {cov.alpha(), cov.eps(), cov.c(), fr.window().spec(), fr.signal_grid(), cov.time_range(), cov.freq_range()};
}

AlphaFrame make_frame(const FrameHeader& h, FrameConfig config) {
    return AlphaFrame(build_covering(h.alpha, h.eps, h.c, h.time_range, h.freq_range), parse_window(h.window), h.grid,
                      config);
}

}  // namespace alphamod
