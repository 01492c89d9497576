#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "alphamod/error.hpp"
#include "alphamod/windows.hpp"

namespace alphamod::cli {

namespace {

using nlohmann::json;

bool uses(const std::string& command, std::initializer_list<const char*> list) {
    return std::any_of(list.begin(), list.end(), [&](const char* c) { return command == c; });
}

void check_range(const std::vector<double>& r, const char* key, std::vector<std::string>& out) {
    if (r.empty()) return;
    if (r.size() != 2 || !std::isfinite(r[0]) || !std::isfinite(r[1]) || !(r[0] < r[1]))
        out.push_back(std::string(key) + ": expected two finite values lo < hi");
}

}  // namespace

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"config", &RunConfig::config, "JSON config file; flags override its values"},
        {"out", &RunConfig::out, "output directory"},
        {"input", &RunConfig::input, "input signal (CSV re,im or raw float64; grid from <file>.json)"},
        {"coefficients", &RunConfig::coefficients, "coefficient file written by analyze"},
        {"window", &RunConfig::window, "window spec: gaussian, bspline:<m>, bump:<r>, bandlimited:<c>"},
        {"alpha", &RunConfig::alpha, "alpha in [0, 1)"},
        {"eps", &RunConfig::eps, "covering density eps > 0"},
        {"c", &RunConfig::c, "covering frequency stretch c > 0"},
        {"s", &RunConfig::s, "weight exponent s"},
        {"p", &RunConfig::p, "Lebesgue exponent p >= 1"},
        {"n", &RunConfig::n, "signal length when no input grid is given"},
        {"dt", &RunConfig::dt, "sample spacing when no input grid is given"},
        {"time_range", &RunConfig::time_range, "covering time range lo hi"},
        {"freq_range", &RunConfig::freq_range, "covering frequency range lo hi"},
        {"x_range", &RunConfig::x_range, "voice-transform time range lo hi"},
        {"omega_range", &RunConfig::omega_range, "voice-transform frequency range lo hi"},
        {"x_points", &RunConfig::x_points, "voice-transform time samples"},
        {"omega_points", &RunConfig::omega_points, "voice-transform frequency samples"},
        {"xi_max", &RunConfig::xi_max, "symbol scan half-width"},
        {"scan_nodes", &RunConfig::scan_nodes, "symbol scan nodes"},
        {"scan_tol", &RunConfig::scan_tol, "symbol quadrature tolerance"},
        {"tail_margin", &RunConfig::tail_margin, "margin folded into A and B for alpha > 0"},
        {"cg_tol", &RunConfig::cg_tol, "conjugate-gradient tolerance"},
        {"max_iter", &RunConfig::max_iter, "conjugate-gradient iteration cap"},
        {"threshold", &RunConfig::threshold, "round-trip relative error threshold"},
        {"bounds_tol", &RunConfig::bounds_tol, "frame-bound Ritz tolerance"},
        {"cache_mb", &RunConfig::cache_mb, "atom cache budget in MiB"},
        {"csv", &RunConfig::csv, "also write coefficients as CSV"},
        {"eps_list", &RunConfig::eps_list, "eps values for the diagnostics sweep (default 0.5,0.25,0.125)"},
        {"x_half", &RunConfig::x_half, "diagnostics time half-width"},
        {"omega_half", &RunConfig::omega_half, "diagnostics frequency half-width"},
        {"max_doublings", &RunConfig::max_doublings, "truncation doublings for rho"},
        {"gamma_doublings", &RunConfig::gamma_doublings, "truncation doublings for gamma"},
        {"probe_x", &RunConfig::probe_x, "probe grid points in time"},
        {"probe_omega", &RunConfig::probe_omega, "probe grid points in frequency"},
        {"random_probes", &RunConfig::random_probes, "seeded random probes"},
        {"x_step", &RunConfig::x_step, "time step relative to the atom dilation"},
        {"omega_step", &RunConfig::omega_step, "frequency step"},
        {"z_samples", &RunConfig::z_samples, "samples per box side for the oscillation supremum"},
        {"seed", &RunConfig::seed, "seed for randomized estimates"},
        {"threads", &RunConfig::threads, "worker threads (0: ALPHAMOD_THREADS or all cores)"},
    };
    return table;
}

const Field& field(const std::string& key) {
    for (const auto& f : fields())
        if (f.key == key) return f;
    throw std::logic_error("unknown config field " + key);
}

ConfigError::ConfigError(const std::vector<std::string>& violations)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& v : violations) msg += "\n  " + v;
          return msg;
      }()),
      violations_(violations) {}

void apply_json(const json& j, RunConfig& cfg, std::vector<std::string>& violations) {
    if (!j.is_object()) {
        violations.push_back("config file: expected a JSON object");
        return;
    }
    for (const auto& [key, value] : j.items()) {
        const auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) { return f.key == key; });
        if (it == fields().end()) {
            violations.push_back(key + ": unknown key");
            continue;
        }
        std::visit(
            [&](auto m) {
                using T = std::remove_reference_t<decltype(cfg.*m)>;
                try {
                    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, int>) {
                        if (!value.is_number_integer()) throw std::invalid_argument("integer");
                        if constexpr (std::is_same_v<T, std::size_t>)
                            if (value.get<long long>() < 0) throw std::invalid_argument("nonnegative integer");
                    }
                    cfg.*m = value.get<T>();
                } catch (const std::invalid_argument& e) {
                    violations.push_back(key + ": expected " + e.what());
                } catch (const json::exception&) {
                    violations.push_back(key + ": wrong type");
                }
            },
            it->member);
    }
}

json to_json(const RunConfig& cfg) {
    json j;
    for (const auto& f : fields()) std::visit([&](auto m) { j[f.key] = cfg.*m; }, f.member);
    return j;
}

std::vector<std::string> validate(const RunConfig& cfg, const std::string& command) {
    std::vector<std::string> out;
    try {
        (void)parse_window(cfg.window);
    } catch (const Error& e) {
        out.push_back("window: " + std::string(e.what()));
    }
    if (!(cfg.alpha >= 0.0 && cfg.alpha < 1.0)) out.push_back("alpha: must lie in [0, 1)");
    if (cfg.out.empty()) out.push_back("out: must not be empty");

    const bool framed = uses(command, {"frame-info", "analyze", "roundtrip", "covering-dump"});
    if (framed) {
        if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) out.push_back("eps: must be positive");
        if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) out.push_back("c: must be positive");
        check_range(cfg.time_range, "time_range", out);
        check_range(cfg.freq_range, "freq_range", out);
        if (!(cfg.cache_mb > 0.0)) out.push_back("cache_mb: must be positive");
    }
    if (framed || command == "coorbit-norm") {
        if (cfg.input.empty() && cfg.n < 2) out.push_back("n: must be >= 2");
        if (cfg.input.empty() && !(cfg.dt > 0.0 && std::isfinite(cfg.dt))) out.push_back("dt: must be positive");
    }
    if (uses(command, {"analyze", "roundtrip", "coorbit-norm"}) && cfg.input.empty())
        out.push_back("input: required by " + command);
    if (command == "synthesize" && cfg.coefficients.empty()) out.push_back("coefficients: required by synthesize");
    if (uses(command, {"synthesize", "roundtrip"})) {
        if (!(cfg.cg_tol > 0.0)) out.push_back("cg_tol: must be positive");
        if (cfg.max_iter < 1) out.push_back("max_iter: must be >= 1");
    }
    if (uses(command, {"frame-info", "roundtrip"}) && !(cfg.bounds_tol > 0.0))
        out.push_back("bounds_tol: must be positive");
    if (command == "roundtrip" && !(cfg.threshold > 0.0)) out.push_back("threshold: must be positive");
    if (uses(command, {"admissible", "diagnostics"})) {
        if (!(cfg.xi_max > 0.0)) out.push_back("xi_max: must be positive");
        if (cfg.scan_nodes < 3) out.push_back("scan_nodes: must be >= 3");
        if (!(cfg.scan_tol > 0.0)) out.push_back("scan_tol: must be positive");
        if (!(cfg.tail_margin >= 0.0 && cfg.tail_margin < 1.0)) out.push_back("tail_margin: must lie in [0, 1)");
    }
    if (uses(command, {"admissible", "diagnostics", "coorbit-norm", "covering-dump"}) && !std::isfinite(cfg.s))
        out.push_back("s: must be finite");
    if (command == "admissible" && cfg.s < 0.0) out.push_back("s: must be >= 0");
    if (command == "coorbit-norm") {
        if (!(cfg.p >= 1.0)) out.push_back("p: must be >= 1");
        check_range(cfg.x_range, "x_range", out);
        check_range(cfg.omega_range, "omega_range", out);
        if (cfg.x_points < 2) out.push_back("x_points: must be >= 2");
        if (cfg.omega_points < 2) out.push_back("omega_points: must be >= 2");
    }
    if (command == "diagnostics") {
        if (cfg.eps_list.empty()) out.push_back("eps_list: must not be empty");
        if (std::any_of(cfg.eps_list.begin(), cfg.eps_list.end(), [](double e) { return !(e > 0.0) || !std::isfinite(e); }))
            out.push_back("eps_list: values must be positive");
        if (!(cfg.x_half > 0.0) || !(cfg.omega_half > 0.0)) out.push_back("x_half, omega_half: must be positive");
        if (cfg.max_doublings < 0 || cfg.max_doublings > 8) out.push_back("max_doublings: must lie in [0, 8]");
        if (cfg.gamma_doublings < 0 || cfg.gamma_doublings > 3) out.push_back("gamma_doublings: must lie in [0, 3]");
        if (cfg.probe_x < 1 || cfg.probe_omega < 1) out.push_back("probe_x, probe_omega: must be >= 1");
        if (!(cfg.x_step > 0.0) || !(cfg.omega_step > 0.0)) out.push_back("x_step, omega_step: must be positive");
        if (cfg.z_samples < 2) out.push_back("z_samples: must be >= 2");
    }
    return out;
}

}  // namespace alphamod::cli
