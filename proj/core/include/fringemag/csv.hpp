#pragma once

// Comma-separated files with a header row. Lines starting with '#' carry
// "key: value" metadata. Numbers are written with 17 significant digits, so a
// write/read cycle is lossless. Writes go to a temporary file that is renamed
// into place, so a failed run never leaves a truncated file behind.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fringemag/beamline.hpp"
#include "fringemag/fit.hpp"
#include "fringemag/visibility.hpp"

namespace fringemag {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // columns[j][row]
  std::map<std::string, std::string> metadata;

  /// Index of the first column whose name equals or starts with `prefix`.
  std::optional<std::size_t> find(std::string_view prefix) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Throws IoError if unreadable and DataError on an empty file, non-numeric
/// cells or ragged rows (with the 1-based line number).
Table read_table(const std::filesystem::path& path);
Table parse_table(std::string_view text);

void write_table(const std::filesystem::path& path, const Table& table);
std::string format_table(const Table& table);

/// First column is the abscissa, then "visibility" and optionally "sigma"
/// (defaulted to 1 with sigma_defaulted set when absent).
Dataset read_dataset(const std::filesystem::path& path);
Dataset dataset_from_table(const Table& table);

/// Columns: abscissa, v_over_v0, c_permanent_T_m, c_induced_T2_m and, when
/// `v0` is given, the absolute visibility.
void write_curve(const std::filesystem::path& path, const VisibilityCurve& curve,
                 std::optional<double> v0 = std::nullopt);
Table curve_table(const VisibilityCurve& curve, std::optional<double> v0 = std::nullopt);
VisibilityCurve read_curve(const std::filesystem::path& path);

void write_profile(const std::filesystem::path& path, const std::vector<ProfileSample>& profile);

/// Columns "position..." (m) and "counts".
FringeScan read_fringe_scan(const std::filesystem::path& path);

/// Data, model and normalized residual per point.
void write_residuals(const std::filesystem::path& path, const Dataset& data, const FitResult& fit);

}  // namespace fringemag
