#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "alphamod/signal.hpp"

namespace alphamod {

// p_alpha(omega) = sgn(omega) ((1 + (1 - alpha)|omega|)^{1/(1-alpha)} - 1); odd, increasing.
double p_alpha(double omega, double alpha);
// p_alpha'(omega) = (1 + (1 - alpha)|omega|)^{alpha/(1-alpha)} = 1 / beta(p_alpha(omega)).
double p_alpha_derivative(double omega, double alpha);
// sgn(y) ((1 + |y|)^{1-alpha} - 1) / (1 - alpha).
double p_alpha_inverse(double y, double alpha);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Open box (x - hx, x + hx) x (omega - homega, omega + homega) around node (x_{j,k}, omega_j).
struct CoveringBox {
    long j = 0;
    long k = 0;
    double x = 0.0;
    double omega = 0.0;
    double hx = 0.0;      // eps beta(omega_j)
    double homega = 0.0;  // 2 eps c / beta(omega_j)

    double area() const { return 4.0 * hx * homega; }
    bool contains(TFPoint p) const { return std::abs(p.x - x) < hx && std::abs(p.omega - omega) < homega; }
    bool intersects(const CoveringBox& b) const {
        return std::abs(b.x - x) < hx + b.hx && std::abs(b.omega - omega) < homega + b.homega;
    }
};

class AlphaCovering {
public:
    struct Row {
        long j;
        long k_min;
        long k_max;
        std::size_t offset;  // index of (j, k_min) in boxes()
    };

    AlphaCovering(double alpha, double eps, double c, Interval time_range, Interval freq_range);

    double alpha() const noexcept { return alpha_; }
    double eps() const noexcept { return eps_; }
    double c() const noexcept { return c_; }
    Interval time_range() const noexcept { return time_; }
    Interval freq_range() const noexcept { return freq_; }

    const std::vector<CoveringBox>& boxes() const noexcept { return boxes_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return boxes_.size(); }
    bool empty() const noexcept { return boxes_.empty(); }

    double omega_node(long j) const;
    double x_node(long j, long k) const;
    // Index into boxes() of (j, k) if present.
    std::optional<std::size_t> find(long j, long k) const;
    // Indices of the boxes containing p.
    std::vector<std::size_t> containing(TFPoint p) const;
    std::size_t count_containing(TFPoint p) const;

private:
    template <class Visit>
    void visit_containing(TFPoint p, Visit&& visit) const;

    double alpha_, eps_, c_;
    Interval time_, freq_;
    std::vector<CoveringBox> boxes_;
    std::vector<Row> rows_;
};

// All boxes meeting the rectangle, with one box of slack in x. Throws when
// eps or c <= 0, a range is empty or non-finite, or neighbouring rows leave a
// frequency gap.
AlphaCovering build_covering(double alpha, double eps, double c, Interval time_range, Interval freq_range);

struct CoveringDiagnostics {
    int max_overlap = 0;         // sup over boxes of #{boxes meeting it}, itself included
    int point_multiplicity = 0;  // max number of boxes containing one probe point
    bool covers_region = false;
    std::size_t probes = 0;
    std::size_t uncovered = 0;
    bool moderate = false;       // all areas equal 8 eps^2 c
    double C_w = 1.0;            // max over boxes of ((1 + |w|max) / (1 + |w|min))^{|s|}
};

CoveringDiagnostics covering_diagnostics(const AlphaCovering& cov, double s, int probe_density = 20);
// The C_w field alone, without probing.
double weight_constant(const AlphaCovering& cov, double s);

struct QNeighborhood {
    std::vector<std::size_t> boxes;
    Interval x_bounds;
    Interval omega_bounds;
    double C1 = 0.0;  // max |x - y| / (eps beta(omega)) over the union
    double C2 = 0.0;  // max |omega - eta| / (eps / beta(omega)) over the union
};

// Union of the boxes containing p. Throws if p is not covered.
QNeighborhood q_neighborhood(const AlphaCovering& cov, TFPoint p);

// j,k,x,omega,x_lo,x_hi,omega_lo,omega_hi per box.
void write_covering_csv(const AlphaCovering& cov, const std::filesystem::path& path);

}  // namespace alphamod
