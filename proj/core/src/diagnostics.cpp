#include "alphamod/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "alphamod/error.hpp"
#include "alphamod/parallel.hpp"
#include "alphamod/transform.hpp"

namespace alphamod {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTimeCap = 64.0;  // matches the kernel slice cap

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in [0, 1)");
}

void check_table(const SymbolTable& tab, double alpha) {
    if (!tab.admissible()) throw InvalidArgument("symbol table is not admissible");
    if (tab.alpha() != alpha) throw InvalidArgument("symbol table was scanned for a different alpha");
}

void check_trunc(const TruncationConfig& t) {
    std::string bad;
    if (!(t.x_half > 0.0) || !(t.omega_half > 0.0)) bad += " domain half-widths must be positive;";
    if (t.max_doublings < 0 || t.max_doublings > 8) bad += " max_doublings must lie in [0, 8];";
    if (!(t.stability > 0.0)) bad += " stability must be positive;";
    if (!(t.probe_x_half >= 0.0 && t.probe_x_half <= t.x_half)) bad += " probe_x_half must lie in [0, x_half];";
    if (!(t.probe_omega_half >= 0.0 && t.probe_omega_half <= t.omega_half))
        bad += " probe_omega_half must lie in [0, omega_half];";
    if (t.probe_x == 0 || t.probe_omega == 0) bad += " probe grid must be non-empty;";
    if (!(t.omega_step > 0.0) || !(t.x_step > 0.0)) bad += " integration steps must be positive;";
    if (t.z_samples < 2) bad += " z_samples must be >= 2;";
    if (!(t.rel > 0.0 && t.rel < 1.0)) bad += " rel must lie in (0, 1);";
    if (!bad.empty()) throw InvalidArgument("truncation config:" + bad);
}

double x_half(const TruncationConfig& t, int k) { return std::ldexp(t.x_half, k); }
double omega_half(const TruncationConfig& t, int k) { return std::ldexp(t.omega_half, k); }

// Length of the cell [c - h/2, c + h/2] inside [-half, half].
double cell(double c, double h, double half) {
    return std::max(0.0, std::min(c + 0.5 * h, half) - std::max(c - 0.5 * h, -half));
}

std::vector<double> linspace(double half, std::size_t n) {
    if (n == 1) return {0.0};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<TFPoint> probe_points(const TruncationConfig& t, bool vary_x) {
    std::vector<TFPoint> out;
    const auto xs = vary_x ? linspace(t.probe_x_half, t.probe_x) : std::vector<double>{0.0};
    for (double om : linspace(t.probe_omega_half, t.probe_omega))
        for (double x : xs) out.push_back({x, om});
    std::mt19937_64 rng(t.seed);
    std::uniform_real_distribution<double> ux(-t.probe_x_half, t.probe_x_half);
    std::uniform_real_distribution<double> uo(-t.probe_omega_half, t.probe_omega_half);
    for (std::size_t i = 0; i < t.random_probes; ++i) {
        const double x = ux(rng);
        const double om = uo(rng);
        out.push_back({vary_x ? x : 0.0, om});
    }
    return out;
}

double reach(const Window& w1, double omega1, const Window& w2, double omega2, double alpha, double rel) {
    return std::min(beta(omega1, alpha) * w1.support_radius(rel) + beta(omega2, alpha) * w2.support_radius(rel),
                    kTimeCap);
}

complex eval(const detail::KernelSlice& s, double d) {
    if (s.zero() || std::abs(d) > s.d_max()) return 0.0;
    return s(d);
}

complex phase(double theta) { return {std::cos(theta), std::sin(theta)}; }

struct LevelPick {
    std::size_t level = 0;
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

LevelPick pick_level(const std::vector<double>& v, double stability) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double change = std::abs(v[k + 1] - v[k]);
        if (change <= stability * std::abs(v[k + 1])) return {k + 1, v[k + 1], change, true};
    }
    const std::size_t last = v.size() - 1;
    return {last, v[last], last > 0 ? std::abs(v[last] - v[last - 1]) : v[last], false};
}

struct ZPoint {
    double x;
    std::size_t slice;  // index into the slice list
    complex gamma;      // Gamma(y, z)
};

// Sample points of Q_y: z_samples^2 per box, edges included, plus y itself.
// Frequencies go to `zetas` (deduplicated), points refer to them by index.
std::vector<ZPoint> q_samples(const AlphaCovering& cov, const std::vector<std::size_t>& boxes, TFPoint y, int n,
                              std::vector<double>& zetas) {
    auto zeta_index = [&](double om) {
        const auto it = std::find(zetas.begin(), zetas.end(), om);
        if (it != zetas.end()) return static_cast<std::size_t>(it - zetas.begin());
        zetas.push_back(om);
        return zetas.size() - 1;
    };
    std::vector<ZPoint> zs;
    zs.push_back({y.x, zeta_index(y.omega), 1.0});
    for (auto bi : boxes) {
        const auto& b = cov.boxes()[bi];
        for (int a = 0; a < n; ++a) {
            const double om = b.omega + b.homega * (-1.0 + 2.0 * a / (n - 1));
            const std::size_t iz = zeta_index(om);
            for (int c = 0; c < n; ++c) {
                const double x = b.x + b.hx * (-1.0 + 2.0 * c / (n - 1));
                zs.push_back({x, iz, phase(2.0 * kPi * y.omega * (y.x - x))});
            }
        }
    }
    return zs;
}

std::vector<std::size_t> covering_boxes(const AlphaCovering& cov, TFPoint y) {
    auto boxes = cov.containing(y);
    if (boxes.empty())
        throw InvalidArgument("point (" + std::to_string(y.x) + ", " + std::to_string(y.omega) +
                              ") is not covered");
    return boxes;
}

// Largest doubling level whose domain lies inside the covering's region.
int covering_levels(const AlphaCovering& cov, const TruncationConfig& t) {
    const auto tr = cov.time_range();
    const auto fr = cov.freq_range();
    int level = -1;
    for (int k = 0; k <= t.max_doublings; ++k) {
        if (tr.lo <= -x_half(t, k) && tr.hi >= x_half(t, k) && fr.lo <= -omega_half(t, k) && fr.hi >= omega_half(t, k))
            level = k;
        else
            break;
    }
    if (level < 0) throw InvalidArgument("covering does not contain the truncated domain");
    return level;
}

// Per-probe integrals of osc(x, y) w dx with y fixed, for probes sharing y.omega.
void gamma2_group(const Window& w, double alpha, double s, const SymbolTable& tab, const AlphaCovering& cov,
                  const TruncationConfig& t, int levels, const std::vector<TFPoint>& ys,
                  std::vector<std::vector<double>>& acc) {
    const double eta = ys.front().omega;
    std::vector<double> zetas;
    std::vector<std::vector<ZPoint>> zsets;
    std::vector<double> zspan;
    for (const auto& y : ys) {
        zsets.push_back(q_samples(cov, covering_boxes(cov, y), y, t.z_samples, zetas));
        double m = 0.0;
        for (const auto& z : zsets.back()) m = std::max(m, std::abs(z.x - y.x));
        zspan.push_back(m);
    }
    const Weight weight{s};
    const double X = x_half(t, levels), W = omega_half(t, levels);
    const auto rows = static_cast<long>(std::floor(W / t.omega_step));
    for (long r = -rows; r <= rows; ++r) {
        const double om = static_cast<double>(r) * t.omega_step;
        std::vector<detail::KernelSlice> slices;
        slices.reserve(zetas.size());
        bool any = false;
        double rmax = 0.0;
        for (double z : zetas) {
            const double d = reach(w, om, w, z, alpha, t.rel);
            slices.emplace_back(w, om, w, z, alpha, &tab, 1, d, 0.0, 8, t.rel);
            any = any || !slices.back().zero();
            rmax = std::max(rmax, d);
        }
        if (!any) continue;
        const double h = t.x_step * std::min(beta(om, alpha), beta(eta, alpha));
        const double wt = weight.pair(om, eta);
        for (std::size_t p = 0; p < ys.size(); ++p) {
            const auto& y = ys[p];
            const auto n = static_cast<long>(std::ceil((rmax + zspan[p]) / h));
            for (long i = -n; i <= n; ++i) {
                const double x = y.x + static_cast<double>(i) * h;
                if (cell(x, h, X) == 0.0) continue;
                const complex ry = eval(slices[zsets[p].front().slice], x - y.x);
                double osc = 0.0;
                for (const auto& z : zsets[p]) osc = std::max(osc, std::abs(ry - z.gamma * eval(slices[z.slice], x - z.x)));
                if (osc == 0.0) continue;
                for (int k = 0; k <= levels; ++k)
                    acc[p][k] += osc * wt * cell(x, h, x_half(t, k)) * cell(om, t.omega_step, omega_half(t, k));
            }
        }
    }
}

// Per-probe integrals of osc(x, y) w dy with x fixed, for probes sharing x.omega.
void gamma1_group(const Window& w, double alpha, double s, const SymbolTable& tab, const AlphaCovering& cov,
                  const TruncationConfig& t, int levels, const std::vector<TFPoint>& xs,
                  std::vector<std::vector<double>>& acc) {
    const double om0 = xs.front().omega;
    const Weight weight{s};
    const double X = x_half(t, levels), W = omega_half(t, levels);
    const auto rows = static_cast<long>(std::floor(W / t.omega_step));
    const int n = t.z_samples;
    std::map<double, detail::KernelSlice> cache;
    auto slice = [&](double z) -> const detail::KernelSlice& {
        auto it = cache.find(z);
        if (it == cache.end())
            it = cache.emplace(z, detail::KernelSlice(w, om0, w, z, alpha, &tab, 1, reach(w, om0, w, z, alpha, t.rel),
                                                      0.0, 8, t.rel))
                     .first;
        return it->second;
    };
    for (long r = -rows; r <= rows; ++r) {
        const double eta = static_cast<double>(r) * t.omega_step;
        // Covering rows whose boxes contain frequency eta, with their sample frequencies.
        std::map<long, std::vector<const detail::KernelSlice*>> row_slices;
        double rmax = reach(w, om0, w, eta, alpha, t.rel), hx_max = 0.0;
        bool any = !detail::pair_support(w, om0, w, eta, alpha, t.rel).empty();
        for (const auto& row : cov.rows()) {
            const auto& b = cov.boxes()[row.offset];
            if (!(std::abs(eta - b.omega) < b.homega)) continue;
            hx_max = std::max(hx_max, b.hx);
            auto& v = row_slices[row.j];
            for (int a = 0; a < n; ++a) {
                const double z = b.omega + b.homega * (-1.0 + 2.0 * a / (n - 1));
                if (detail::pair_support(w, om0, w, z, alpha, t.rel).empty()) {
                    v.push_back(nullptr);
                    continue;
                }
                any = true;
                v.push_back(&slice(z));
                rmax = std::max(rmax, reach(w, om0, w, z, alpha, t.rel));
            }
        }
        if (!any) continue;
        const detail::KernelSlice* sy = detail::pair_support(w, om0, w, eta, alpha, t.rel).empty() ? nullptr : &slice(eta);
        const double h = t.x_step * std::min(beta(om0, alpha), beta(eta, alpha));
        const double wt = weight.pair(om0, eta);
        const auto m = static_cast<long>(std::ceil((rmax + 4.0 * hx_max) / h));
        // |R(x, y) - Gamma(y, z) R(x, z)| = |a_y - c_z| with a_y = e^{-2 pi i eta y_x} R(x, y) and
        // c_z = e^{-2 pi i eta z_x} R(x, z); c_z depends on the box only, so it is cached per box.
        std::map<std::size_t, std::vector<complex>> box_values;
        for (std::size_t p = 0; p < xs.size(); ++p) {
            const auto& x = xs[p];
            box_values.clear();
            for (long i = -m; i <= m; ++i) {
                const TFPoint y{x.x + static_cast<double>(i) * h, eta};
                if (cell(y.x, h, X) == 0.0) continue;
                const complex ay =
                    sy ? eval(*sy, x.x - y.x) * phase(-2.0 * kPi * eta * y.x) : complex(0.0);
                double osc = 0.0;
                for (auto bi : covering_boxes(cov, y)) {
                    auto it = box_values.find(bi);
                    if (it == box_values.end()) {
                        const auto& b = cov.boxes()[bi];
                        const auto& v = row_slices.at(b.j);
                        std::vector<complex> c(static_cast<std::size_t>(n * n), 0.0);
                        for (int q = 0; q < n; ++q) {
                            const double zx = b.x + b.hx * (-1.0 + 2.0 * q / (n - 1));
                            const complex g = phase(-2.0 * kPi * eta * zx);
                            for (int a = 0; a < n; ++a)
                                if (v[a]) c[static_cast<std::size_t>(q * n + a)] = g * eval(*v[a], x.x - zx);
                        }
                        it = box_values.emplace(bi, std::move(c)).first;
                    }
                    for (const complex& cz : it->second) osc = std::max(osc, std::abs(ay - cz));
                }
                if (osc == 0.0) continue;
                for (int k = 0; k <= levels; ++k)
                    acc[p][k] += osc * wt * cell(y.x, h, x_half(t, k)) * cell(eta, t.omega_step, omega_half(t, k));
            }
        }
    }
}

// Groups probe indices by frequency.
std::vector<std::vector<std::size_t>> by_frequency(const std::vector<TFPoint>& probes) {
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < probes.size(); ++i) groups[probes[i].omega].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [om, idx] : groups) out.push_back(std::move(idx));
    return out;
}

std::vector<double> level_sup(const std::vector<std::vector<double>>& acc, std::size_t levels) {
    std::vector<double> v(levels, 0.0);
    for (const auto& a : acc)
        for (std::size_t k = 0; k < levels; ++k) v[k] = std::max(v[k], a[k]);
    return v;
}

}  // namespace

complex kernel_K(const Window& w1, const Window& w2, int kappa, double alpha, const SymbolTable* tab, TFPoint p1,
                 TFPoint p2, const QuadratureConfig& quad) {
    check_alpha(alpha);
    if (kappa < 0 || kappa > 2) throw InvalidArgument("kappa must be 0, 1 or 2");
    if (kappa > 0) {
        if (tab == nullptr) throw InvalidArgument("kernel with kappa > 0 needs a symbol table");
        check_table(*tab, alpha);
    }
    return detail::pair_kernel(w1, w2, kappa, alpha, tab, p1, p2, quad);
}

KernelEstimate estimate_kernel_integral(const Window& w1, const Window& w2, int kappa, double alpha, double s,
                                        const SymbolTable* tab, const TruncationConfig& trunc) {
    check_alpha(alpha);
    check_trunc(trunc);
    if (!std::isfinite(s)) throw InvalidArgument("s must be finite");
    if (kappa < 0 || kappa > 2) throw InvalidArgument("kappa must be 0, 1 or 2");
    if (kappa > 0) {
        if (tab == nullptr) throw InvalidArgument("kernel with kappa > 0 needs a symbol table");
        check_table(*tab, alpha);
    }
    const int L = trunc.max_doublings;
    const auto probes = probe_points(trunc, false);
    std::vector<std::vector<double>> acc(probes.size(), std::vector<double>(L + 1, 0.0));
    const Weight weight{s};
    const double X = x_half(trunc, L), W = omega_half(trunc, L);
    const auto rows = static_cast<long>(std::floor(W / trunc.omega_step));

    parallel_for(probes.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const double om2 = probes[p].omega;
            for (long r = -rows; r <= rows; ++r) {
                const double om = static_cast<double>(r) * trunc.omega_step;
                if (detail::pair_support(w1, om, w2, om2, alpha, trunc.rel).empty()) continue;
                const double h = trunc.x_step * std::min(beta(om, alpha), beta(om2, alpha));
                const auto n = static_cast<long>(std::ceil(std::min(reach(w1, om, w2, om2, alpha, trunc.rel), X) / h));
                const detail::KernelSlice slice(w1, om, w2, om2, alpha, tab, kappa, static_cast<double>(n) * h, 0.0, 8,
                                                trunc.rel);
                if (slice.zero()) continue;
                const double wt = weight.pair(om, om2);
                for (long i = -n; i <= n; ++i) {
                    const double d = static_cast<double>(i) * h;
                    const double v = std::abs(slice(d)) * wt;
                    for (int k = 0; k <= L; ++k)
                        acc[p][k] += v * cell(d, h, x_half(trunc, k)) * cell(om, trunc.omega_step, omega_half(trunc, k));
                }
            }
        }
    });

    KernelEstimate est;
    est.kappa = kappa;
    est.s = s;
    est.levels = level_sup(acc, L + 1);
    est.probes = probes.size();
    const auto pick = pick_level(est.levels, trunc.stability);
    est.value = pick.value;
    est.error_bound = pick.error;
    est.converged = pick.converged;
    est.truncation = {x_half(trunc, static_cast<int>(pick.level)), omega_half(trunc, static_cast<int>(pick.level)),
                      static_cast<int>(pick.level)};
    for (std::size_t p = 0; p < probes.size(); ++p)
        if (acc[p][pick.level] == pick.value) {
            est.argmax = probes[p];
            break;
        }
    return est;
}

KernelEstimate estimate_rho(const Window& w, double alpha, double s, const SymbolTable& tab,
                            const TruncationConfig& trunc) {
    return estimate_kernel_integral(w, w, 1, alpha, s, &tab, trunc);
}

double oscillation_kernel(const Window& w, double alpha, const SymbolTable& tab, const AlphaCovering& cov, TFPoint p1,
                          TFPoint p2, int z_samples, double rel) {
    check_alpha(alpha);
    check_table(tab, alpha);
    if (cov.alpha() != alpha) throw InvalidArgument("covering was built for a different alpha");
    if (z_samples < 2) throw InvalidArgument("z_samples must be >= 2");
    std::vector<double> zetas;
    const auto zs = q_samples(cov, covering_boxes(cov, p2), p2, z_samples, zetas);
    double d_max = 0.0;
    for (const auto& z : zs) d_max = std::max(d_max, std::abs(p1.x - z.x));
    std::vector<detail::KernelSlice> slices;
    slices.reserve(zetas.size());
    for (double z : zetas) slices.emplace_back(w, p1.omega, w, z, alpha, &tab, 1, d_max, 0.0, 8, rel);
    const complex r12 = slices[zs.front().slice](p1.x - p2.x);
    double osc = 0.0;
    for (const auto& z : zs) osc = std::max(osc, std::abs(r12 - z.gamma * slices[z.slice](p1.x - z.x)));
    return osc;
}

GammaEstimate estimate_gamma(const Window& w, double alpha, double s, const SymbolTable& tab, const AlphaCovering& cov,
                             const TruncationConfig& trunc) {
    check_alpha(alpha);
    check_table(tab, alpha);
    check_trunc(trunc);
    if (!std::isfinite(s)) throw InvalidArgument("s must be finite");
    if (cov.alpha() != alpha) throw InvalidArgument("covering was built for a different alpha");
    const int L = covering_levels(cov, trunc);
    const auto probes = probe_points(trunc, true);
    const auto groups = by_frequency(probes);
    std::vector<std::vector<double>> acc1(probes.size(), std::vector<double>(L + 1, 0.0));
    std::vector<std::vector<double>> acc2 = acc1;

    // Two tasks per frequency group: gamma1 and gamma2.
    parallel_for(2 * groups.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t task = begin; task < end; ++task) {
            const auto& idx = groups[task / 2];
            std::vector<TFPoint> pts;
            for (auto i : idx) pts.push_back(probes[i]);
            std::vector<std::vector<double>> local(pts.size(), std::vector<double>(L + 1, 0.0));
            if (task % 2 == 0)
                gamma1_group(w, alpha, s, tab, cov, trunc, L, pts, local);
            else
                gamma2_group(w, alpha, s, tab, cov, trunc, L, pts, local);
            auto& acc = task % 2 == 0 ? acc1 : acc2;
            for (std::size_t q = 0; q < idx.size(); ++q) acc[idx[q]] = std::move(local[q]);
        }
    });

    const auto g1 = level_sup(acc1, L + 1);
    const auto g2 = level_sup(acc2, L + 1);
    GammaEstimate est;
    est.probes = probes.size();
    for (int k = 0; k <= L; ++k) est.levels.push_back(std::max(g1[k], g2[k]));
    const auto pick = pick_level(est.levels, trunc.stability);
    est.gamma1 = g1[pick.level];
    est.gamma2 = g2[pick.level];
    est.gamma = pick.value;
    est.error_bound = pick.error;
    est.converged = pick.converged;
    est.truncation = {x_half(trunc, static_cast<int>(pick.level)), omega_half(trunc, static_cast<int>(pick.level)),
                      static_cast<int>(pick.level)};
    return est;
}

DiscretizationVerdict discretization_condition(double rho, double gamma, double C_w) {
    if (!(rho >= 0.0) || !(gamma >= 0.0) || !(C_w >= 0.0) || !std::isfinite(rho) || !std::isfinite(gamma) ||
        !std::isfinite(C_w))
        throw InvalidArgument("discretization condition needs finite nonnegative rho, gamma and C_w");
    DiscretizationVerdict v{rho, gamma, C_w, 0.0, false};
    v.lhs = gamma * (rho + std::max(rho * C_w, rho + gamma));
    v.pass = v.lhs < 1.0;
    return v;
}

double lambda_fn(double xi, double omega, double alpha) {
    check_alpha(alpha);
    const double b = beta(omega, alpha);
    return (1.0 + std::abs(omega)) /
           (std::pow(1.0 + std::abs(xi), 1.0 / (1.0 - alpha)) * (1.0 + std::abs(xi / b + omega)));
}

double theta_fn(double omega, double omega_star, double alpha) {
    check_alpha(alpha);
    const double b = beta(omega_star, alpha);
    return beta(omega_star + omega / b, alpha) / b;
}

}  // namespace alphamod
