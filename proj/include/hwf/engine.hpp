#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hwf/demography.hpp"
#include "hwf/types.hpp"

namespace hwf {

enum class Phase { Calibration, Validation, Forecast };

/// Entries and exits of one step, per field, for stock-flow accounting.
struct StepFlows {
    std::vector<double> entered;
    std::vector<double> exited;
};

struct Trajectory {
    std::vector<ModelState> states;
    std::vector<Phase> phases;     // parallel to states
    std::vector<StepFlows> flows;  // one per transition, size states-1
    std::vector<std::string> warnings;

    const ModelState& at_year(int year) const;
    double field_total(std::size_t field, int year) const;
};

/// Total yearly inflow with its decomposition over sex and entry age.
struct InflowPlan {
    std::map<int, double> totals;
    std::map<Sex, double> sex_share;
    AgeGroup entry_ages{25, 35};
    std::vector<std::string> warnings;

    /// Y(s, a, t): total spread by sex share and uniformly over entry ages.
    double at(Sex sex, int age, int year) const;
};

/// Copies the (interpolated) observed stocks into a model state at t0.
/// Fields without cohort detail are distributed by the reference age/sex
/// shares; without either, throws HwfError("MissingField").
ModelState init_state(const StockTable& stocks, int t0,
                      const std::vector<FieldId>& fields,
                      const std::map<std::pair<Sex, int>, double>* ref_shares,
                      int min_age = 20, int max_age = 79);

/// Observed totals inside the observation window; the mean of the three most
/// recent observed totals for every later year. Interventions are additive
/// per year. Fewer than three observed years fall back to the mean of what is
/// available, with a warning.
InflowPlan project_inflow(const InflowSeries& history,
                          const EntrantDistribution& entrants,
                          int first_year, int t_end,
                          const std::map<int, double>& interventions = {});

/// One application of the yearly protocol (age, exit, enter):
///   N_i(s,a+1,t+1) = (1 - gamma(s,a)) N_i(s,a,t) + p_enter p_i Y(s,a+1,t+1).
/// Cohorts at max_age exit entirely. Missing gamma for an occupied cohort is
/// treated as 0; the cohort is recorded in `missing_rate_warnings` when given.
ModelState step(const ModelState& state, const Params& params,
                const ExitRates& rates, const InflowPlan& inflow,
                StepFlows* flows = nullptr,
                std::set<std::pair<Sex, int>>* missing_rate_warnings = nullptr);

/// Iterates `step` from the initialized state through t_end. Years up to
/// last_observed are tagged Validation (t0 itself Calibration), later years
/// Forecast. Deterministic: equal inputs give bit-identical trajectories.
Trajectory run(const ModelState& init, const Params& params,
               const ExitRates& rates, const InflowPlan& inflow, int t_end,
               int last_observed);

}  // namespace hwf
