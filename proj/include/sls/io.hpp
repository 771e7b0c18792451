#pragma once

// Persistence: NDJSON observable streams, snapshot CSVs and JSON summaries.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sls/grid.hpp"
#include "sls/observables.hpp"
#include "sls/params.hpp"

namespace sls {

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

nlohmann::ordered_json to_json(const ObservableRecord<double>& r);
nlohmann::ordered_json to_json(const DerivedParams<double>& p);
nlohmann::ordered_json to_json(const MediumConfig<double>& m);

void write_ndjson_line(std::ostream& os, const nlohmann::ordered_json& j);
void write_observables(const std::filesystem::path& file, const ObservableSeries<double>& series);
void write_json(const std::filesystem::path& file, const nlohmann::ordered_json& j);
ObservableSeries<double> read_observables(const std::filesystem::path& file);

/// CSV columns: z, then re_<name>, im_<name> per field, then intensity.
/// Every stride-th grid point is written.
void write_snapshot_mb(const std::filesystem::path& file, const Grid<double>& grid,
                       const MBState<double>& s, int stride = 1);
void write_snapshot_spinor(const std::filesystem::path& file, const Grid<double>& grid,
                           const SpinorState<double>& bare, int stride = 1);
void write_snapshot_sum_mode(const std::filesystem::path& file, const Grid<double>& grid,
                             const SumModeState<double>& s, int stride = 1);

/// CSV columns: omega, magnitude.
void write_spectrum(const std::filesystem::path& file, const Spectrum<double>& spectrum);

}  // namespace sls
