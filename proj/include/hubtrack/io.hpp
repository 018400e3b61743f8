#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hubtrack/dynamics.hpp"
#include "hubtrack/spectral.hpp"

namespace hubtrack {

/**
 * Whitespace-delimited numeric table: '#' comment lines, one line of column
 * names, then one row per sample. Numbers are written in shortest
 * round-trip form so parse(write(x)) == x.
 */
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
  bool has(const std::string& name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Columns t phi J [J_target] R theta C kappa norm energy X doublons [O].
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                      const std::string& kind);
/// Inverse of write_trajectory for the series; snapshots and final state are not stored.
Trajectory read_trajectory(const std::filesystem::path& path);

void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum,
                    const std::string& source);

/// Amplitudes of a state as index, real and imaginary parts.
void write_state(const std::filesystem::path& path, const StateVector& psi);
/// Strided snapshots as t, index, real and imaginary parts.
void write_snapshots(const std::filesystem::path& path,
                     const std::vector<std::pair<double, StateVector>>& snapshots);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace hubtrack
