#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hwf/types.hpp"

namespace hwf {

/// Canonical input file names expected inside a dataset directory.
/// sector_split.csv is optional (extended model only).
struct DatasetPaths {
    std::filesystem::path stocks;
    std::filesystem::path inflow;
    std::filesystem::path population;
    std::filesystem::path sector_split;  // may not exist

    static DatasetPaths in_dir(const std::filesystem::path& dir);
};

AgeGroup parse_age_group(const std::string& text);
std::string format_age_group(const AgeGroup& group);

StockTable parse_stocks_csv(const std::filesystem::path& path);
InflowSeries parse_inflow_csv(const std::filesystem::path& path);
std::vector<PopulationProjection> parse_population_csv(
    const std::filesystem::path& path);
SectorSplit parse_sector_split(const std::filesystem::path& path);

/// Parses all canonical files and validates the bundle. Throws
/// ValidationFailed with the full violation list on invalid data and
/// HwfError("SchemaError"/"DuplicateKey", ...) with file/line context on
/// malformed rows.
Dataset parse_canonical(const DatasetPaths& paths);

/// Writes a bundle back out in the canonical schemas. parse_canonical of the
/// result reproduces the bundle (field-order-insensitive equality).
void write_canonical(const Dataset& dataset, const DatasetPaths& paths);

bool bundles_equal(const Dataset& a, const Dataset& b, double tol = 1e-9);

/// First year where every field has data and no later year in the observation
/// window carries a break-in-series flag. Throws
/// HwfError("NoValidCalibrationYear") when no such year exists.
int select_calibration_year(const StockTable& stocks);

}  // namespace hwf
