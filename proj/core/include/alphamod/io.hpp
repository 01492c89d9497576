#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "alphamod/frames.hpp"
#include "alphamod/signal.hpp"

namespace alphamod::io {

// Sidecar path for a data file: "<path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& data);

void write_grid_sidecar(const std::filesystem::path& data, const SampledGrid& grid);
SampledGrid read_grid_sidecar(const std::filesystem::path& data);

// CSV with "re,im" per line (17 significant digits); reading also accepts a single real column.
void write_signal_csv(const std::filesystem::path& path, const Signal& f);
// Raw little-endian float64, interleaved re/im.
void write_signal_raw(const std::filesystem::path& path, const Signal& f);

// Dispatches on extension (.csv, otherwise raw). The grid comes from the sidecar,
// or from `grid` when no sidecar exists.
Signal read_signal(const std::filesystem::path& path, const std::optional<SampledGrid>& grid = std::nullopt);
// As above; without a sidecar the grid is SampledGrid::centered(sample count, spacing).
Signal read_signal(const std::filesystem::path& path, double spacing);
// Writes data plus sidecar; format picked by extension as in read_signal.
void write_signal(const std::filesystem::path& path, const Signal& f);

// Binary matrix (row-major, interleaved complex) with a JSON sidecar holding both grids.
void write_map(const std::filesystem::path& path, const TimeFrequencyMap& map);
TimeFrequencyMap read_map(const std::filesystem::path& path);
// x, omega, |value| per line.
void write_map_magnitude_csv(const std::filesystem::path& path, const TimeFrequencyMap& map);

// Frame coefficients: magic "AMCF0001", u64 header length, JSON header
// {alpha, eps, c, window, grid, time_range, freq_range}, u64 count, count
// (i64 j, i64 k) pairs, count interleaved complex values; all little-endian.
void write_coefficients(const std::filesystem::path& path, const Coefficients& c, const FrameHeader& header);
std::pair<Coefficients, FrameHeader> read_coefficients(const std::filesystem::path& path);
// j,k,x,omega,re,im per node.
void write_coefficients_csv(const std::filesystem::path& path, const Coefficients& c, const AlphaFrame& fr);

}  // namespace alphamod::io
