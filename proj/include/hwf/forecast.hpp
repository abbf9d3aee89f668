#pragma once

#include <map>
#include <string>
#include <vector>

#include "hwf/engine.hpp"
#include "hwf/types.hpp"

namespace hwf {

/// Physician count needed each year to hold the reference-year density
/// constant, per population scenario, with the min/max envelope over the
/// non-baseline scenarios.
struct IsodensityLine {
    int ref_year = 0;
    std::map<std::string, std::map<int, double>> by_scenario;
    std::map<int, std::pair<double, double>> envelope;

    const std::map<int, double>& baseline() const;
};

struct Significance {
    double z = 0.0;
    double p = 1.0;
    std::string stars;
};

struct FieldGap {
    FieldId field;
    double dg = 0.0;
    double sd = 0.0;
    Significance significance;
    double model_horizon = 0.0;      // M_i(t0 + T)
    double isodensity_horizon = 0.0; // C_i(T)
    double rmse = 0.0;
};

struct GapReport {
    std::string country;
    std::string model;  // "minimal" or "extended"
    int horizon_year = 0;
    int ref_year = 0;
    int horizon_span = 0;       // T
    double inflow_horizon = 0;  // Y(t0 + T)
    std::vector<FieldGap> fields;
    FieldGap aggregate;
    Params params;
    double chi2 = 0.0;

    std::string to_json() const;
};

/// C_i(t) = Z_ref * Pop(t) / Pop(ref_year) per scenario, evaluated over
/// [ref_year, horizon]. Throws HwfError("MissingYear") when a scenario does
/// not cover a required year.
IsodensityLine isodensity(double z_ref, int ref_year, int horizon,
                          const std::vector<PopulationProjection>& scenarios);

/// Root mean squared error between model and observed field totals over the
/// validation-phase years.
std::map<FieldId, double> validation_rmse(const Trajectory& trajectory,
                                          const StockTable& stocks);

/// Forecast SD at h years past the forecast start: RMSE scaled linearly in
/// the horizon, anchored at the validation-window length.
double forecast_sd(double rmse, int h, int h_val);

/// DG(T) = (M(t0+T) - C(T)) / (T * Y(t0+T)). Negative: forecast supply falls
/// short of the constant-density line.
double density_gap(double m_horizon, double c_horizon, int horizon_span,
                   double y_horizon);

/// Two-sided normal z-test of DG against zero. Stars: p < 0.01 "*",
/// p < 0.001 "**", p < 0.0001 "***".
Significance gap_significance(double dg, double sd);

}  // namespace hwf
