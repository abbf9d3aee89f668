#include "hwf/engine.hpp"

#include <algorithm>
#include <cmath>

namespace hwf {

const ModelState& Trajectory::at_year(int year) const {
    for (const auto& s : states)
        if (s.year == year) return s;
    throw HwfError("MissingYear",
                   "trajectory has no state for year " + std::to_string(year));
}

double Trajectory::field_total(std::size_t field, int year) const {
    return at_year(year).field_total(field);
}

double InflowPlan::at(Sex sex, int age, int year) const {
    if (!entry_ages.contains(age)) return 0.0;
    auto it = totals.find(year);
    if (it == totals.end()) return 0.0;
    auto share = sex_share.find(sex);
    if (share == sex_share.end()) return 0.0;
    return it->second * share->second / entry_ages.width();
}

ModelState init_state(const StockTable& stocks, int t0,
                      const std::vector<FieldId>& fields,
                      const std::map<std::pair<Sex, int>, double>* ref_shares,
                      int min_age, int max_age) {
    ModelState state(t0, fields, min_age, max_age);
    for (std::size_t f = 0; f < fields.size(); ++f) {
        if (stocks.has_cohorts(fields[f], t0)) {
            for (auto sex : {Sex::Male, Sex::Female}) {
                std::map<AgeGroup, double> grouped;
                for (const auto& [cell, count] : stocks.cohorts)
                    if (cell.field == fields[f] && cell.year == t0 &&
                        cell.sex == sex)
                        grouped[cell.group] += count;
                for (const auto& [age, v] : interpolate_age_groups(grouped)) {
                    if (age < min_age || age > max_age)
                        throw HwfError("BadAgeRange",
                                       "interpolated age " +
                                           std::to_string(age) +
                                           " outside the model age span");
                    state.at(f, sex, age) = v;
                }
            }
            continue;
        }
        // No age/sex detail: distribute the field total by reference shares.
        if (!ref_shares)
            throw HwfError("MissingField",
                           "no cohort data for " + fields[f].label() + " at " +
                               std::to_string(t0) +
                               " and no reference distribution");
        const double total = stocks.field_total(fields[f], t0);
        for (const auto& [cohort, share] : *ref_shares) {
            const auto& [sex, age] = cohort;
            if (age >= min_age && age <= max_age)
                state.at(f, sex, age) = total * share;
        }
    }
    return state;
}

InflowPlan project_inflow(const InflowSeries& history,
                          const EntrantDistribution& entrants, int first_year,
                          int t_end, const std::map<int, double>& interventions) {
    InflowPlan plan;
    plan.sex_share = entrants.sex_share;
    plan.entry_ages = entrants.ages;

    const auto observed = history.years();
    if (observed.empty())
        throw HwfError("InsufficientHistory", "no inflow history at all");
    const int last_observed = observed.back();

    // Forecast level: mean of the three most recent observed totals.
    int n = 0;
    double sum = 0.0;
    for (auto it = observed.rbegin(); it != observed.rend() && n < 3; ++it) {
        sum += history.total(*it);
        ++n;
    }
    if (n < 3)
        plan.warnings.push_back(
            "fewer than 3 observed inflow years; forecast inflow uses the "
            "mean of " + std::to_string(n));
    const double forecast_level = sum / n;

    for (int year = first_year; year <= t_end; ++year) {
        double y = year <= last_observed && history.total(year) >= 0.0 &&
                           (history.graduates.count(year) ||
                            history.migrants.count(year))
                       ? history.total(year)
                       : forecast_level;
        if (auto it = interventions.find(year); it != interventions.end())
            y += it->second;
        plan.totals[year] = std::max(0.0, y);
    }
    return plan;
}

ModelState step(const ModelState& state, const Params& params,
                const ExitRates& rates, const InflowPlan& inflow,
                StepFlows* flows,
                std::set<std::pair<Sex, int>>* missing_rate_warnings) {
    ModelState next(state.year + 1, state.fields, state.min_age, state.max_age);
    if (flows) {
        flows->entered.assign(state.fields.size(), 0.0);
        flows->exited.assign(state.fields.size(), 0.0);
    }
    for (std::size_t f = 0; f < state.fields.size(); ++f) {
        const double p_i = [&] {
            auto it = params.field_choice.find(state.fields[f]);
            return it == params.field_choice.end() ? 0.0 : it->second;
        }();
        for (auto sex : {Sex::Male, Sex::Female}) {
            for (int a = state.min_age; a <= state.max_age; ++a) {
                const double n = state.at(f, sex, a);
                if (a == state.max_age) {
                    // Top of the age table: the whole cohort exits.
                    if (flows && n != 0.0) flows->exited[f] += n;
                    continue;
                }
                double gamma = 0.0;
                if (auto g = rates.at(sex, a))
                    gamma = *g;
                else if (n > 0.0 && missing_rate_warnings)
                    missing_rate_warnings->insert({sex, a});
                next.at(f, sex, a + 1) += (1.0 - gamma) * n;
                if (flows) flows->exited[f] += gamma * n;
            }
            for (int a = inflow.entry_ages.lo;
                 a < inflow.entry_ages.hi && a <= state.max_age; ++a) {
                const double entry =
                    params.p_enter * p_i * inflow.at(sex, a, next.year);
                next.at(f, sex, a) += entry;
                if (flows) flows->entered[f] += entry;
            }
        }
    }
    return next;
}

Trajectory run(const ModelState& init, const Params& params,
               const ExitRates& rates, const InflowPlan& inflow, int t_end,
               int last_observed) {
    if (t_end < init.year)
        throw HwfError("BadHorizon", "t_end precedes the initial year");
    Trajectory traj;
    traj.states.push_back(init);
    traj.phases.push_back(Phase::Calibration);
    std::set<std::pair<Sex, int>> missing;
    while (traj.states.back().year < t_end) {
        StepFlows flows;
        traj.states.push_back(
            step(traj.states.back(), params, rates, inflow, &flows, &missing));
        traj.flows.push_back(std::move(flows));
        traj.phases.push_back(traj.states.back().year <= last_observed
                                  ? Phase::Validation
                                  : Phase::Forecast);
    }
    for (const auto& [sex, age] : missing)
        traj.warnings.push_back("no exit rate for occupied cohort " +
                                to_string(sex) + "/" + std::to_string(age) +
                                "; using 0");
    return traj;
}

}  // namespace hwf
