#pragma once

#include <optional>
#include <string>

#include "hwf/calibrate.hpp"
#include "hwf/forecast.hpp"
#include "hwf/scenario.hpp"
#include "hwf/types.hpp"

namespace hwf {

enum class ModelKind { Minimal, Extended };
enum class GofMode { FinalYear, AllYears };

struct PipelineOptions {
    ModelKind model = ModelKind::Minimal;
    GofMode gof = GofMode::FinalYear;
    double grid_step = 0.01;
    int horizon = 2040;
    std::optional<Params> params;  // skip calibration when provided
    std::optional<Intervention> intervention;
    std::optional<ReferenceRates> reference;
    bool want_surface = true;  // minimal model only
};

/// Plot-data series for one field: the columns of the per-field forecast CSV.
struct SeriesRow {
    double model = 0.0;
    std::optional<double> sd;
    std::optional<double> iso_baseline;
    std::optional<double> env_min;
    std::optional<double> env_max;
    std::optional<double> observed;
};

struct FieldSeries {
    FieldId field;
    std::map<int, SeriesRow> rows;
};

struct PipelineResult {
    int t0 = 0;
    int last_observed = 0;
    Params params;
    double chi2 = 0.0;
    std::optional<GofSurface> surface;
    Trajectory trajectory;
    std::map<FieldId, double> rmse;
    GapReport report;
    std::vector<FieldSeries> series;
    std::vector<std::string> warnings;
};

/// Full run: calibration-year selection, rate estimation, calibration (unless
/// parameters are supplied), forecast to the horizon, isodensity lines and
/// density gaps. The dataset must already be validated.
PipelineResult run_pipeline(const Dataset& dataset,
                            const PipelineOptions& options);

}  // namespace hwf
