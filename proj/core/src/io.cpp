#include "alphamod/io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "alphamod/error.hpp"

namespace alphamod::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json grid_json(const SampledGrid& g) { return {{"n", g.size()}, {"spacing", g.spacing()}, {"origin", g.origin()}}; }

SampledGrid grid_from_json(const json& j) {
    try {
        return SampledGrid(j.at("n").get<std::size_t>(), j.at("spacing").get<double>(), j.at("origin").get<double>());
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed grid metadata: ") + e.what());
    }
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("cannot parse " + path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17) << j.dump(2) << '\n';
}

bool is_csv(const fs::path& p) { return p.extension() == ".csv"; }

std::uint64_t swap_bytes(std::uint64_t v) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffu);
    return r;
}

void put_le(std::ofstream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = swap_bytes(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_le(const char* p) {
    std::uint64_t bits;
    std::memcpy(&bits, p, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = swap_bytes(bits);
    return std::bit_cast<double>(bits);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) v = swap_bytes(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(const char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, sizeof v);
    if constexpr (std::endian::native == std::endian::big) v = swap_bytes(v);
    return v;
}

std::vector<complex> read_raw(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 16 != 0) throw InvalidArgument(path.string() + ": size is not a multiple of 16 bytes");
    std::vector<complex> v(bytes.size() / 16);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = {get_le(&bytes[16 * k]), get_le(&bytes[16 * k + 8])};
    return v;
}

void write_raw(const fs::path& path, std::span<const complex> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& v : values) {
        put_le(out, v.real());
        put_le(out, v.imag());
    }
}

std::vector<complex> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::vector<complex> v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        std::getline(ls, a, ',');
        const bool two = static_cast<bool>(std::getline(ls, b, ','));
        try {
            std::size_t used = 0;
            const double re = std::stod(a, &used);
            const double im = two ? std::stod(b) : 0.0;
            v.emplace_back(re, im);
        } catch (const std::exception&) {
            if (v.empty() && lineno == 1) continue;  // header row
            throw InvalidArgument(path.string() + ": bad number on line " + std::to_string(lineno));
        }
    }
    return v;
}

}  // namespace

fs::path sidecar_path(const fs::path& data) { return fs::path(data.string() + ".json"); }

void write_grid_sidecar(const fs::path& data, const SampledGrid& grid) { write_json(sidecar_path(data), grid_json(grid)); }

SampledGrid read_grid_sidecar(const fs::path& data) { return grid_from_json(read_json(sidecar_path(data))); }

void write_signal_csv(const fs::path& path, const Signal& f) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17);
    for (const auto& v : f.values()) out << v.real() << ',' << v.imag() << '\n';
}

void write_signal_raw(const fs::path& path, const Signal& f) { write_raw(path, f.values()); }

Signal read_signal(const fs::path& path, const std::optional<SampledGrid>& grid) {
    auto values = is_csv(path) ? read_csv(path) : read_raw(path);
    SampledGrid g = fs::exists(sidecar_path(path)) ? read_grid_sidecar(path)
                    : grid                         ? *grid
                                                   : throw InvalidArgument("no grid metadata for " + path.string());
    return Signal(g, std::move(values));
}

Signal read_signal(const fs::path& path, double spacing) {
    auto values = is_csv(path) ? read_csv(path) : read_raw(path);
    if (fs::exists(sidecar_path(path))) return Signal(read_grid_sidecar(path), std::move(values));
    if (values.size() < 2) throw InvalidArgument(path.string() + ": need at least 2 samples");
    const std::size_t n = values.size();
    return Signal(SampledGrid::centered(n, spacing), std::move(values));
}

void write_signal(const fs::path& path, const Signal& f) {
    if (is_csv(path))
        write_signal_csv(path, f);
    else
        write_signal_raw(path, f);
    write_grid_sidecar(path, f.grid());
}

void write_map(const fs::path& path, const TimeFrequencyMap& map) {
    write_raw(path, map.values());
    write_json(sidecar_path(path), {{"x_grid", grid_json(map.x_grid())},
                                    {"omega_grid", grid_json(map.omega_grid())},
                                    {"layout", "row-major, rows = omega, interleaved complex float64 LE"}});
}

TimeFrequencyMap read_map(const fs::path& path) {
    const json meta = read_json(sidecar_path(path));
    return TimeFrequencyMap(grid_from_json(meta.at("x_grid")), grid_from_json(meta.at("omega_grid")), read_raw(path));
}

void write_map_magnitude_csv(const fs::path& path, const TimeFrequencyMap& map) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17) << "x,omega,magnitude\n";
    for (std::size_t j = 0; j < map.rows(); ++j)
        for (std::size_t k = 0; k < map.cols(); ++k)
            out << map.x_grid()[k] << ',' << map.omega_grid()[j] << ',' << std::abs(map(j, k)) << '\n';
}

namespace {

constexpr char kCoefMagic[8] = {'A', 'M', 'C', 'F', '0', '0', '0', '1'};

json interval_json(Interval r) { return json::array({r.lo, r.hi}); }
Interval json_interval(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void write_coefficients(const fs::path& path, const Coefficients& c, const FrameHeader& h) {
    if (c.nodes.size() != c.values.size()) throw InvalidArgument("coefficient nodes and values differ in length");
    const json header = {{"alpha", h.alpha},
                         {"eps", h.eps},
                         {"c", h.c},
                         {"window", h.window},
                         {"grid", grid_json(h.grid)},
                         {"time_range", interval_json(h.time_range)},
                         {"freq_range", interval_json(h.freq_range)}};
    const std::string text = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(kCoefMagic, sizeof kCoefMagic);
    put_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_u64(out, c.size());
    for (const auto& n : c.nodes) {
        put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(n.j)));
        put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(n.k)));
    }
    for (const auto& v : c.values) {
        put_le(out, v.real());
        put_le(out, v.imag());
    }
    if (!out) throw Error("failed writing " + path.string());
}

std::pair<Coefficients, FrameHeader> read_coefficients(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto fail = [&](const std::string& why) { return InvalidArgument(path.string() + ": " + why); };
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kCoefMagic, sizeof kCoefMagic) != 0)
        throw fail("not a coefficient file");
    std::size_t pos = 8;
    const auto hlen = get_u64(&bytes[pos]);
    pos += 8;
    if (hlen > bytes.size() - pos - 8) throw fail("truncated header");
    FrameHeader h;
    try {
        const json j = json::parse(std::string(&bytes[pos], hlen));
        h.alpha = j.at("alpha").get<double>();
        h.eps = j.at("eps").get<double>();
        h.c = j.at("c").get<double>();
        h.window = j.at("window").get<std::string>();
        h.grid = grid_from_json(j.at("grid"));
        h.time_range = json_interval(j.at("time_range"));
        h.freq_range = json_interval(j.at("freq_range"));
    } catch (const json::exception& e) {
        throw fail(std::string("bad header: ") + e.what());
    }
    pos += hlen;
    const auto n = get_u64(&bytes[pos]);
    pos += 8;
    if (n > (bytes.size() - pos) / 32 || bytes.size() - pos != 32 * n) throw fail("size does not match the node count");
    Coefficients c;
    c.nodes.resize(n);
    c.values.resize(n);
    for (std::size_t i = 0; i < n; ++i, pos += 16)
        c.nodes[i] = {static_cast<long>(static_cast<std::int64_t>(get_u64(&bytes[pos]))),
                      static_cast<long>(static_cast<std::int64_t>(get_u64(&bytes[pos + 8])))};
    for (std::size_t i = 0; i < n; ++i, pos += 16) c.values[i] = {get_le(&bytes[pos]), get_le(&bytes[pos + 8])};
    return {std::move(c), h};
}

void write_coefficients_csv(const fs::path& path, const Coefficients& c, const AlphaFrame& fr) {
    if (c.size() != fr.size()) throw InvalidArgument("coefficient count does not match the frame");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17) << "j,k,x,omega,re,im\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto p = fr.node(i);
        out << c.nodes[i].j << ',' << c.nodes[i].k << ',' << p.x << ',' << p.omega << ',' << c.values[i].real() << ','
            << c.values[i].imag() << '\n';
    }
}

}  // namespace alphamod::io
