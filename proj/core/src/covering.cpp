#include "alphamod/covering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>

#include "alphamod/error.hpp"
#include "alphamod/parallel.hpp"
#include "alphamod/symbol.hpp"

namespace alphamod {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double p_alpha(double omega, double alpha) {
    check_alpha(alpha);
    if (alpha == 0.0) return omega;
    return sgn(omega) * std::expm1(std::log1p((1.0 - alpha) * std::abs(omega)) / (1.0 - alpha));
}

double p_alpha_derivative(double omega, double alpha) {
    check_alpha(alpha);
    return std::pow(1.0 + (1.0 - alpha) * std::abs(omega), alpha / (1.0 - alpha));
}

double p_alpha_inverse(double y, double alpha) {
    check_alpha(alpha);
    if (alpha == 0.0) return y;
    return sgn(y) * std::expm1((1.0 - alpha) * std::log1p(std::abs(y))) / (1.0 - alpha);
}

AlphaCovering::AlphaCovering(double alpha, double eps, double c, Interval time_range, Interval freq_range)
    : alpha_(alpha), eps_(eps), c_(c), time_(time_range), freq_(freq_range) {
    check_alpha(alpha);
    if (!(eps > 0.0) || !(c > 0.0)) throw InvalidArgument("covering needs eps > 0 and c > 0");
    for (const auto& r : {time_range, freq_range})
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.hi > r.lo))
            throw InvalidArgument("covering ranges must be finite and non-empty");

    auto homega = [&](long j) { return 2.0 * eps * c / beta(omega_node(j), alpha); };
    // Rows whose frequency interval meets [lo, hi]; the half-width grows with |omega| slower than the
    // node spacing, so stepping outward from the inverse image terminates.
    long j_lo = static_cast<long>(std::floor(p_alpha_inverse(freq_range.lo, alpha) / eps));
    while (omega_node(j_lo) + homega(j_lo) > freq_range.lo) --j_lo;
    ++j_lo;
    long j_hi = static_cast<long>(std::ceil(p_alpha_inverse(freq_range.hi, alpha) / eps));
    while (omega_node(j_hi) - homega(j_hi) < freq_range.hi) ++j_hi;
    --j_hi;

    for (long j = j_lo; j <= j_hi; ++j) {
        const double om = omega_node(j);
        const double b = beta(om, alpha);
        const double h = eps * b;
        const long k_min = static_cast<long>(std::floor(time_range.lo / h)) - 1;
        const long k_max = static_cast<long>(std::ceil(time_range.hi / h)) + 1;
        rows_.push_back({j, k_min, k_max, boxes_.size()});
        for (long k = k_min; k <= k_max; ++k)
            boxes_.push_back({j, k, h * static_cast<double>(k), om, h, 2.0 * eps * c / b});
    }
}

double AlphaCovering::omega_node(long j) const { return p_alpha(eps_ * static_cast<double>(j), alpha_); }

double AlphaCovering::x_node(long j, long k) const {
    return eps_ * beta(omega_node(j), alpha_) * static_cast<double>(k);
}

std::optional<std::size_t> AlphaCovering::find(long j, long k) const {
    if (rows_.empty() || j < rows_.front().j || j > rows_.back().j) return std::nullopt;
    const auto& row = rows_[static_cast<std::size_t>(j - rows_.front().j)];
    if (k < row.k_min || k > row.k_max) return std::nullopt;
    return row.offset + static_cast<std::size_t>(k - row.k_min);
}

template <class Visit>
void AlphaCovering::visit_containing(TFPoint p, Visit&& visit) const {
    if (rows_.empty()) return;
    const long guess = static_cast<long>(std::llround(p_alpha_inverse(p.omega, alpha_) / eps_));
    auto scan = [&](long j) {
        const auto& row = rows_[static_cast<std::size_t>(j - rows_.front().j)];
        const CoveringBox& first = boxes_[row.offset];
        if (!(std::abs(p.omega - first.omega) < first.homega)) return false;
        const long kc = static_cast<long>(std::floor(p.x / first.hx));
        for (long k = std::max(kc - 1, row.k_min); k <= std::min(kc + 2, row.k_max); ++k) {
            const std::size_t idx = row.offset + static_cast<std::size_t>(k - row.k_min);
            if (boxes_[idx].contains(p)) visit(idx);
        }
        return true;
    };
    const long j0 = std::clamp(guess, rows_.front().j, rows_.back().j);
    for (long j = j0; j >= rows_.front().j && scan(j); --j) {}
    for (long j = j0 + 1; j <= rows_.back().j && scan(j); ++j) {}
}

std::vector<std::size_t> AlphaCovering::containing(TFPoint p) const {
    std::vector<std::size_t> out;
    visit_containing(p, [&](std::size_t idx) { out.push_back(idx); });
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t AlphaCovering::count_containing(TFPoint p) const {
    std::size_t n = 0;
    visit_containing(p, [&](std::size_t) { ++n; });
    return n;
}

AlphaCovering build_covering(double alpha, double eps, double c, Interval time_range, Interval freq_range) {
    AlphaCovering cov(alpha, eps, c, time_range, freq_range);
    const auto& rows = cov.rows();
    const auto& boxes = cov.boxes();
    for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
        const auto& a = boxes[rows[r].offset];
        const auto& b = boxes[rows[r + 1].offset];
        if (!(a.omega + a.homega > b.omega - b.homega))
            throw InvalidArgument("eps = " + std::to_string(eps) + ", c = " + std::to_string(c) +
                                  " leaves a frequency gap between rows " + std::to_string(a.j) + " and " +
                                  std::to_string(b.j));
    }
    return cov;
}

CoveringDiagnostics covering_diagnostics(const AlphaCovering& cov, double s, int probe_density) {
    if (cov.empty()) throw InvalidArgument("empty covering");
    if (probe_density < 10) throw InvalidArgument("probe density must be >= 10 per box side");
    const auto& boxes = cov.boxes();
    const auto& rows = cov.rows();
    CoveringDiagnostics d;

    // Overlap by interval arithmetic: rows are scanned outward until their frequency intervals stop meeting.
    std::atomic<int> overlap{0};
    parallel_for(boxes.size(), [&](std::size_t begin, std::size_t end) {
        int local = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& b = boxes[i];
            const std::size_t r0 = static_cast<std::size_t>(b.j - rows.front().j);
            int count = 0;
            auto row_count = [&](std::size_t r) {
                const auto& row = rows[r];
                const auto& first = boxes[row.offset];
                if (!(std::abs(first.omega - b.omega) < first.homega + b.homega)) return false;
                // k with |k h' - x| < h' + hx
                const double reach = first.hx + b.hx;
                const long lo = std::max(row.k_min, static_cast<long>(std::floor((b.x - reach) / first.hx)));
                const long hi = std::min(row.k_max, static_cast<long>(std::ceil((b.x + reach) / first.hx)));
                for (long k = lo; k <= hi; ++k)
                    if (boxes[row.offset + static_cast<std::size_t>(k - row.k_min)].intersects(b)) ++count;
                return true;
            };
            for (std::size_t r = r0 + 1; r-- > 0 && row_count(r);) {}
            for (std::size_t r = r0 + 1; r < rows.size() && row_count(r); ++r) {}
            local = std::max(local, count);
        }
        int cur = overlap.load();
        while (local > cur && !overlap.compare_exchange_weak(cur, local)) {}
    });
    d.max_overlap = overlap.load();

    // Probes on a (density + 1)^2 lattice over each closed box, clipped to the requested rectangle.
    const auto t = cov.time_range();
    const auto f = cov.freq_range();
    std::atomic<std::size_t> probes{0}, uncovered{0};
    std::atomic<int> mult{0};
    parallel_for(boxes.size(), [&](std::size_t begin, std::size_t end) {
        std::size_t np = 0, nu = 0;
        int local = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& b = boxes[i];
            for (int a = 0; a <= probe_density; ++a) {
                const double x = b.x - b.hx + 2.0 * b.hx * a / probe_density;
                if (x < t.lo || x > t.hi) continue;
                for (int e = 0; e <= probe_density; ++e) {
                    const double om = b.omega - b.homega + 2.0 * b.homega * e / probe_density;
                    if (om < f.lo || om > f.hi) continue;
                    ++np;
                    const int n = static_cast<int>(cov.count_containing({x, om}));
                    if (n == 0) ++nu;
                    local = std::max(local, n);
                }
            }
        }
        probes += np;
        uncovered += nu;
        int cur = mult.load();
        while (local > cur && !mult.compare_exchange_weak(cur, local)) {}
    });
    d.probes = probes.load();
    d.uncovered = uncovered.load();
    d.covers_region = d.uncovered == 0;
    d.point_multiplicity = mult.load();

    const double area = 8.0 * cov.eps() * cov.eps() * cov.c();
    d.moderate = std::all_of(boxes.begin(), boxes.end(),
                             [&](const CoveringBox& b) { return std::abs(b.area() - area) <= 1e-12 * area; });

    d.C_w = weight_constant(cov, s);
    return d;
}

double weight_constant(const AlphaCovering& cov, double s) {
    double C = 1.0;
    for (const auto& row : cov.rows()) {
        const auto& b = cov.boxes()[row.offset];  // boxes in a row share the frequency extent
        const double lo = b.omega - b.homega, hi = b.omega + b.homega;
        const double amax = std::max(std::abs(lo), std::abs(hi));
        const double amin = (lo < 0.0 && hi > 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
        C = std::max(C, std::pow((1.0 + amax) / (1.0 + amin), std::abs(s)));
    }
    return C;
}

QNeighborhood q_neighborhood(const AlphaCovering& cov, TFPoint p) {
    QNeighborhood q;
    q.boxes = cov.containing(p);
    if (q.boxes.empty())
        throw InvalidArgument("point (" + std::to_string(p.x) + ", " + std::to_string(p.omega) +
                              ") is not covered");
    q.x_bounds = {INFINITY, -INFINITY};
    q.omega_bounds = {INFINITY, -INFINITY};
    for (auto i : q.boxes) {
        const auto& b = cov.boxes()[i];
        q.x_bounds.lo = std::min(q.x_bounds.lo, b.x - b.hx);
        q.x_bounds.hi = std::max(q.x_bounds.hi, b.x + b.hx);
        q.omega_bounds.lo = std::min(q.omega_bounds.lo, b.omega - b.homega);
        q.omega_bounds.hi = std::max(q.omega_bounds.hi, b.omega + b.homega);
    }
    const double b = beta(p.omega, cov.alpha());
    q.C1 = std::max(p.x - q.x_bounds.lo, q.x_bounds.hi - p.x) / (cov.eps() * b);
    q.C2 = std::max(p.omega - q.omega_bounds.lo, q.omega_bounds.hi - p.omega) / (cov.eps() / b);
    return q;
}

void write_covering_csv(const AlphaCovering& cov, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open " + path.string());
    out.precision(17);
    out << "j,k,x,omega,x_lo,x_hi,omega_lo,omega_hi\n";
    for (const auto& b : cov.boxes())
        out << b.j << ',' << b.k << ',' << b.x << ',' << b.omega << ',' << b.x - b.hx << ',' << b.x + b.hx << ','
            << b.omega - b.homega << ',' << b.omega + b.homega << '\n';
    if (!out) throw InvalidArgument("failed writing " + path.string());
}

}  // namespace alphamod
