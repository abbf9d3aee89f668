#pragma once

#include <map>
#include <tuple>

#include "hwf/types.hpp"

namespace hwf {

/// Relative year-over-year change of a cohort tracked one age-year forward;
/// may be negative. Defined only where the base cohort is occupied.
struct NetRateTable {
    // (sex, age, year) -> alpha
    std::map<std::tuple<Sex, int, int>, double> rates;
};

/// All-field aggregate stocks at per-age-year resolution.
struct PerAgeStocks {
    // (sex, age, year) -> count
    std::map<std::tuple<Sex, int, int>, double> values;

    double at(Sex s, int age, int year) const;
};

struct EntrantDistribution {
    std::map<Sex, double> sex_share;
    AgeGroup ages{25, 35};
};

struct ReferenceRates {
    ExitRates rates;
    // (sex, age) -> share of the pooled stock, summing to 1
    std::map<std::pair<Sex, int>, double> age_sex_shares;
    EntrantDistribution entrants;
};

/// Disaggregates grouped counts to per-age-year values: per-age density
/// anchored at group midpoints, piecewise-linear between midpoints, flat
/// beyond, then rescaled within each group so group sums are conserved.
std::map<int, double> interpolate_age_groups(
    const std::map<AgeGroup, double>& grouped);

/// Builds the all-field aggregate per-age-year table from grouped stock data.
PerAgeStocks per_age_stocks(const StockTable& stocks);

/// alpha(s,a,t) = (X(s,a+1,t+1) - X(s,a,t)) / X(s,a,t), computed wherever the
/// base cell is positive and the shifted cell is defined.
NetRateTable net_change_rates(const PerAgeStocks& stocks);

/// gamma(s,a) = mean over years of min(1, max(0, -alpha(s,a,t))). Cohorts with
/// no defined alpha in any year are absent from the result; the caller
/// substitutes reference rates for those.
ExitRates exit_rates(const NetRateTable& net);

/// Rates and stock distribution recomputed on the element-wise sum of all
/// complete countries' aggregate stocks (not a mean of per-country rates).
ReferenceRates reference_rates(const std::vector<StockTable>& datasets);

/// Sex shares of the all-field stock within the entry age band at ref_year.
/// Throws HwfError("EmptyEntryBand") when the band holds no stock; the caller
/// then falls back to the reference distribution.
EntrantDistribution entrant_distribution(const StockTable& stocks, int ref_year,
                                         AgeGroup entry_ages = {25, 35});

}  // namespace hwf
