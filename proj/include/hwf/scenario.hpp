#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "hwf/types.hpp"

namespace hwf {

/// Per-year sector shares for both professions; each (profession, year) slice
/// is a distribution over the three sectors.
using SectorShares =
    std::map<int, std::map<std::pair<Sector, Profession>, double>>;

/// Linear additional-graduate schedule: zero up to start_year, rising to
/// `peak` at end_year, constant afterwards.
struct InflowRamp {
    int start_year = 0;
    int end_year = 0;
    double peak = 0.0;

    double at(int year) const;
};

/// Named inflow intervention: explicit per-year additions and/or a ramp.
struct Intervention {
    std::string name;
    std::map<int, double> additions;
    std::optional<InflowRamp> ramp;

    /// Total extra inflow per year over [first_year, last_year].
    std::map<int, double> schedule(int first_year, int last_year) const;
};

/// The new Austrian medical faculty: linear growth from zero in 2019 to 300
/// graduates per year in 2029.
double new_faculty_inflow(int year);

/// Extrapolates the line through the two anchor shares over the window; per
/// profession and year the sector shares are clipped to [0,1] and
/// renormalized to sum to 1.
SectorShares sector_share_trend(const SectorSplit& anchors, int from_year,
                                int to_year);

/// Splits a two-field stock table into six sector-resolved fields by the
/// per-year shares. The three sector stocks of a cell sum to the minimal
/// stock exactly.
StockTable split_fields(const StockTable& minimal, const SectorShares& shares);

/// Reads an intervention file: {"name", "inflow_additions": [{year, amount}],
/// "ramp": {"start_year", "end_year", "peak"}}; both parts optional.
Intervention parse_intervention(const std::filesystem::path& path);

}  // namespace hwf
