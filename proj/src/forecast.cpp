#include "hwf/forecast.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace hwf {

const std::map<int, double>& IsodensityLine::baseline() const {
    auto it = by_scenario.find("baseline");
    if (it == by_scenario.end())
        throw HwfError("MissingBaselineScenario", "no baseline isodensity line");
    return it->second;
}

IsodensityLine isodensity(double z_ref, int ref_year, int horizon,
                          const std::vector<PopulationProjection>& scenarios) {
    IsodensityLine line;
    line.ref_year = ref_year;
    for (const auto& proj : scenarios) {
        auto ref = proj.values.find(ref_year);
        if (ref == proj.values.end())
            throw HwfError("MissingYear",
                           "scenario " + proj.scenario + " misses year " +
                               std::to_string(ref_year));
        auto& values = line.by_scenario[proj.scenario];
        for (int year = ref_year; year <= horizon; ++year) {
            auto it = proj.values.find(year);
            if (it == proj.values.end())
                throw HwfError("MissingYear",
                               "scenario " + proj.scenario + " misses year " +
                                   std::to_string(year));
            values[year] = z_ref * it->second / ref->second;
        }
    }
    for (const auto& [name, values] : line.by_scenario) {
        if (name == "baseline") continue;
        for (const auto& [year, v] : values) {
            auto [it, inserted] = line.envelope.try_emplace(year, v, v);
            if (!inserted) {
                it->second.first = std::min(it->second.first, v);
                it->second.second = std::max(it->second.second, v);
            }
        }
    }
    // A baseline-only scenario set still gets a degenerate envelope.
    if (line.envelope.empty())
        for (const auto& [year, v] : line.baseline()) line.envelope[year] = {v, v};
    return line;
}

std::map<FieldId, double> validation_rmse(const Trajectory& trajectory,
                                          const StockTable& stocks) {
    const auto& fields = trajectory.states.front().fields;
    std::map<FieldId, double> out;
    for (std::size_t f = 0; f < fields.size(); ++f) {
        double sq_sum = 0.0;
        int n = 0;
        for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
            if (trajectory.phases[k] != Phase::Validation) continue;
            const double m = trajectory.states[k].field_total(f);
            const double z =
                stocks.field_total(fields[f], trajectory.states[k].year);
            sq_sum += (m - z) * (m - z);
            ++n;
        }
        if (n == 0)
            throw HwfError("EmptyValidationWindow",
                           "no validation years for " + fields[f].label());
        out[fields[f]] = std::sqrt(sq_sum / n);
    }
    return out;
}

double forecast_sd(double rmse, int h, int h_val) {
    if (h <= 0 || h_val <= 0)
        throw HwfError("BadHorizon", "horizon lengths must be positive");
    return rmse * static_cast<double>(h) / static_cast<double>(h_val);
}

double density_gap(double m_horizon, double c_horizon, int horizon_span,
                   double y_horizon) {
    if (horizon_span <= 0)
        throw HwfError("BadHorizon", "horizon span must be positive");
    if (y_horizon <= 0.0)
        throw HwfError("ZeroInflow", "horizon inflow must be positive");
    return (m_horizon - c_horizon) / (horizon_span * y_horizon);
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

Significance gap_significance(double dg, double sd) {
    if (sd <= 0.0) throw HwfError("ZeroSD", "SD must be positive");
    Significance sig;
    sig.z = dg / sd;
    sig.p = std::min(1.0, 2.0 * normal_cdf(-std::abs(sig.z)));
    if (sig.p < 0.0001)
        sig.stars = "***";
    else if (sig.p < 0.001)
        sig.stars = "**";
    else if (sig.p < 0.01)
        sig.stars = "*";
    return sig;
}

std::string GapReport::to_json() const {
    nlohmann::json j;
    j["country"] = country;
    j["model"] = model;
    j["horizon"] = horizon_year;
    j["reference_year"] = ref_year;
    j["horizon_span"] = horizon_span;
    j["inflow_at_horizon"] = inflow_horizon;
    auto field_json = [](const FieldGap& g) {
        nlohmann::json f;
        f["dg"] = g.dg;
        f["sd"] = g.sd;
        f["z"] = g.significance.z;
        f["p"] = g.significance.p;
        f["stars"] = g.significance.stars;
        f["model_at_horizon"] = g.model_horizon;
        f["isodensity_at_horizon"] = g.isodensity_horizon;
        f["rmse"] = g.rmse;
        return f;
    };
    j["fields"] = nlohmann::json::array();
    for (const auto& g : fields) {
        auto f = field_json(g);
        f["field"] = g.field.label();
        j["fields"].push_back(f);
    }
    j["aggregate"] = field_json(aggregate);
    j["gof"]["p_enter"] = params.p_enter;
    j["gof"]["chi2"] = chi2;
    for (const auto& [field, p] : params.field_choice)
        j["gof"]["field_choice"][field.label()] = p;
    return j.dump(2);
}

}  // namespace hwf
