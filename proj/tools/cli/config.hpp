#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace alphamod::cli {

// Every key is accepted in the JSON config file and as --kebab-case flag.
struct RunConfig {
    std::string config;  // JSON config file; flags override its values
    std::string out = ".";
    std::string input;         // signal file (CSV or raw, optional JSON sidecar)
    std::string coefficients;  // coefficient file for synthesize

    std::string window = "gaussian";
    double alpha = 0.5;
    double eps = 0.25;
    double c = 1.0;
    double s = 0.0;
    double p = 2.0;

    // Signal grid when no input file or sidecar provides one.
    std::size_t n = 1024;
    double dt = 1.0 / 32.0;
    // Covering region; empty means the signal support padded by 2 and the Nyquist band.
    std::vector<double> time_range;
    std::vector<double> freq_range;

    // Voice-transform grid for coorbit-norm; empty ranges mean signal support and Nyquist band.
    std::vector<double> x_range;
    std::vector<double> omega_range;
    std::size_t x_points = 128;
    std::size_t omega_points = 128;

    double xi_max = 200.0;
    std::size_t scan_nodes = 2001;
    double scan_tol = 1e-8;
    double tail_margin = 0.05;

    double cg_tol = 1e-10;
    std::size_t max_iter = 1000;
    double threshold = 1e-6;
    double bounds_tol = 1e-4;  // reported bounds only; the library default is 1e-8
    double cache_mb = 512.0;
    bool csv = false;

    std::vector<double> eps_list = {0.5, 0.25, 0.125};
    double x_half = 8.0;
    double omega_half = 32.0;
    int max_doublings = 2;
    int gamma_doublings = 0;
    std::size_t probe_x = 3;
    std::size_t probe_omega = 9;
    std::size_t random_probes = 4;
    double x_step = 0.25;
    double omega_step = 0.25;
    int z_samples = 7;

    std::size_t seed = 42;
    std::size_t threads = 0;  // 0: ALPHAMOD_THREADS or hardware concurrency
};

using Member = std::variant<double RunConfig::*, std::size_t RunConfig::*, int RunConfig::*, bool RunConfig::*,
                            std::string RunConfig::*, std::vector<double> RunConfig::*>;

struct Field {
    std::string key;
    Member member;
    std::string help;
};

const std::vector<Field>& fields();
const Field& field(const std::string& key);

// Rejected configuration; what() lists every violation, one per line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::vector<std::string>& violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Applies the keys of a JSON object; unknown keys and type mismatches are appended to `violations`.
void apply_json(const nlohmann::json& j, RunConfig& cfg, std::vector<std::string>& violations);
nlohmann::json to_json(const RunConfig& cfg);

// Preconditions of `command`; empty when the config is usable.
std::vector<std::string> validate(const RunConfig& cfg, const std::string& command);

}  // namespace alphamod::cli
