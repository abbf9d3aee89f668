#include "hwf/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "hwf/demography.hpp"
#include "hwf/ingest.hpp"

namespace hwf {

namespace {

Params uniform_params(const std::vector<FieldId>& fields) {
    Params p;
    p.p_enter = 0.5;
    for (const auto& f : fields)
        p.field_choice[f] = 1.0 / static_cast<double>(fields.size());
    return p;
}

void fill_missing_rates(ExitRates& rates, const ReferenceRates& ref,
                        int min_age, int max_age) {
    for (auto sex : {Sex::Male, Sex::Female})
        for (int a = min_age; a <= max_age; ++a)
            if (!rates.at(sex, a))
                if (auto g = ref.rates.at(sex, a)) rates.gamma[{sex, a}] = *g;
}

}  // namespace

PipelineResult run_pipeline(const Dataset& dataset,
                            const PipelineOptions& options) {
    PipelineResult result;

    const StockTable& minimal = dataset.stocks;
    result.t0 = select_calibration_year(minimal);
    result.last_observed = minimal.years().back();
    if (options.horizon <= result.last_observed)
        throw HwfError("BadHorizon", "horizon must lie past the observed data");

    // Exit rates always come from the all-field aggregate of the minimal
    // table; the sector split conserves those sums.
    ExitRates rates;
    bool own_rates = !minimal.cohorts.empty();
    if (own_rates)
        rates = exit_rates(net_change_rates(per_age_stocks(minimal)));
    else if (options.reference)
        rates = options.reference->rates;
    else
        throw HwfError("MissingField",
                       "no cohort detail and no reference rates");
    if (options.reference)
        fill_missing_rates(rates, *options.reference, 20, 79);

    EntrantDistribution entrants;
    try {
        entrants = entrant_distribution(minimal, result.last_observed);
    } catch (const HwfError& e) {
        if (options.reference)
            entrants = options.reference->entrants;
        else
            throw;
    }

    // Extended model: split the observed stocks by the extrapolated sector
    // share trend.
    StockTable working = minimal;
    if (options.model == ModelKind::Extended) {
        if (!dataset.sector_split)
            throw HwfError("MissingShare",
                           "extended model requires sector split data");
        const auto shares = sector_share_trend(*dataset.sector_split,
                                               result.t0, options.horizon);
        working = split_fields(minimal, shares);
    }
    const auto fields = working.fields();

    std::map<int, double> interventions;
    if (options.intervention)
        interventions = options.intervention->schedule(result.t0 + 1,
                                                       options.horizon);
    InflowPlan plan = project_inflow(dataset.inflow, entrants, result.t0 + 1,
                                     options.horizon, interventions);
    for (const auto& w : plan.warnings) result.warnings.push_back(w);

    const auto* ref_shares =
        options.reference ? &options.reference->age_sex_shares : nullptr;
    ModelState init =
        init_state(working, result.t0, fields, ref_shares);

    CalibrationSetup setup;
    setup.init = init;
    setup.rates = rates;
    setup.inflow = plan;
    setup.observed = &working;
    setup.last_observed = result.last_observed;
    if (options.gof == GofMode::AllYears)
        for (int y = result.t0 + 1; y <= result.last_observed; ++y)
            setup.eval_years.push_back(y);

    if (options.params) {
        result.params = *options.params;
        auto violations = validate_params(result.params);
        if (!violations.empty()) throw ValidationFailed(std::move(violations));
    } else if (options.model == ModelKind::Minimal) {
        auto surface = grid_search(setup, options.grid_step);
        result.params = surface.argmin;
        if (options.want_surface) result.surface = std::move(surface);
    } else {
        result.params = calibrate_extended(setup, uniform_params(fields));
    }
    result.chi2 = objective(setup, result.params);

    result.trajectory = run(init, result.params, rates, plan, options.horizon,
                            result.last_observed);
    for (const auto& w : result.trajectory.warnings)
        result.warnings.push_back(w);
    result.rmse = validation_rmse(result.trajectory, working);

    const int ref_year = result.last_observed;
    const int span = options.horizon - ref_year;
    const int h_val = std::max(1, result.last_observed - result.t0);
    const double y_horizon = plan.totals.at(options.horizon);

    result.report.country = working.country;
    result.report.model =
        options.model == ModelKind::Minimal ? "minimal" : "extended";
    result.report.horizon_year = options.horizon;
    result.report.ref_year = ref_year;
    result.report.horizon_span = span;
    result.report.inflow_horizon = y_horizon;
    result.report.params = result.params;
    result.report.chi2 = result.chi2;

    double m_sum = 0.0, c_sum = 0.0, var_sum = 0.0, rmse_sq_sum = 0.0;
    std::vector<IsodensityLine> iso_lines;
    for (std::size_t f = 0; f < fields.size(); ++f) {
        const double z_ref = working.field_total(fields[f], ref_year);
        auto iso = isodensity(z_ref, ref_year, options.horizon,
                              dataset.projections);
        FieldGap gap;
        gap.field = fields[f];
        gap.model_horizon = result.trajectory.field_total(f, options.horizon);
        gap.isodensity_horizon = iso.baseline().at(options.horizon);
        gap.rmse = result.rmse.at(fields[f]);
        gap.dg = density_gap(gap.model_horizon, gap.isodensity_horizon, span,
                             y_horizon);
        const double sd_m = forecast_sd(gap.rmse, span, h_val);
        gap.sd = sd_m / (span * y_horizon);
        if (gap.sd > 0.0) gap.significance = gap_significance(gap.dg, gap.sd);
        result.report.fields.push_back(gap);

        m_sum += gap.model_horizon;
        c_sum += gap.isodensity_horizon;
        var_sum += gap.sd * gap.sd;
        rmse_sq_sum += gap.rmse * gap.rmse;
        iso_lines.push_back(std::move(iso));
    }
    result.report.aggregate.model_horizon = m_sum;
    result.report.aggregate.isodensity_horizon = c_sum;
    result.report.aggregate.rmse = std::sqrt(rmse_sq_sum);
    result.report.aggregate.dg = density_gap(m_sum, c_sum, span, y_horizon);
    result.report.aggregate.sd = std::sqrt(var_sum);
    if (result.report.aggregate.sd > 0.0)
        result.report.aggregate.significance = gap_significance(
            result.report.aggregate.dg, result.report.aggregate.sd);

    for (std::size_t f = 0; f < fields.size(); ++f) {
        FieldSeries series;
        series.field = fields[f];
        const auto& iso = iso_lines[f];
        const double rmse = result.rmse.at(fields[f]);
        for (std::size_t k = 0; k < result.trajectory.states.size(); ++k) {
            const int year = result.trajectory.states[k].year;
            SeriesRow row;
            row.model = result.trajectory.states[k].field_total(f);
            if (result.trajectory.phases[k] == Phase::Validation)
                row.sd = rmse;
            else if (result.trajectory.phases[k] == Phase::Forecast)
                row.sd = forecast_sd(rmse, year - result.last_observed, h_val);
            if (auto it = iso.baseline().find(year);
                it != iso.baseline().end())
                row.iso_baseline = it->second;
            if (auto it = iso.envelope.find(year); it != iso.envelope.end()) {
                row.env_min = it->second.first;
                row.env_max = it->second.second;
            }
            try {
                row.observed = working.field_total(fields[f], year);
            } catch (const HwfError&) {
            }
            series.rows[year] = row;
        }
        result.series.push_back(std::move(series));
    }

    return result;
}

}  // namespace hwf
