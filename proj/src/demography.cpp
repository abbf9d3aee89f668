#include "hwf/demography.hpp"

#include <algorithm>
#include <cmath>

namespace hwf {

double PerAgeStocks::at(Sex s, int age, int year) const {
    auto it = values.find({s, age, year});
    return it == values.end() ? 0.0 : it->second;
}

std::map<int, double> interpolate_age_groups(
    const std::map<AgeGroup, double>& grouped) {
    if (grouped.empty()) return {};

    std::vector<AgeGroup> groups;
    std::vector<double> counts;
    for (const auto& [g, c] : grouped) {
        if (c < 0.0) throw HwfError("NegativeInput", "negative group count");
        if (g.width() <= 0)
            throw HwfError("OverlappingGroups", "group with non-positive width");
        if (!groups.empty() && g.lo < groups.back().hi)
            throw HwfError("OverlappingGroups", "age groups overlap");
        groups.push_back(g);
        counts.push_back(c);
    }

    // Density anchored at group midpoints, linear in between, flat beyond.
    std::vector<double> mid(groups.size()), density(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
        mid[k] = groups[k].midpoint();
        density[k] = counts[k] / groups[k].width();
    }
    auto density_at = [&](double a) {
        if (a <= mid.front()) return density.front();
        if (a >= mid.back()) return density.back();
        auto hi = std::upper_bound(mid.begin(), mid.end(), a) - mid.begin();
        auto lo = hi - 1;
        const double w = (a - mid[lo]) / (mid[hi] - mid[lo]);
        return density[lo] + w * (density[hi] - density[lo]);
    };

    std::map<int, double> out;
    for (std::size_t k = 0; k < groups.size(); ++k) {
        double raw_sum = 0.0;
        for (int a = groups[k].lo; a < groups[k].hi; ++a)
            raw_sum += density_at(a);
        const double scale = raw_sum > 0.0 ? counts[k] / raw_sum : 0.0;
        for (int a = groups[k].lo; a < groups[k].hi; ++a)
            out[a] = density_at(a) * scale;
    }
    return out;
}

PerAgeStocks per_age_stocks(const StockTable& stocks) {
    PerAgeStocks table;
    // Aggregate over fields per (sex, year), then disaggregate ages.
    std::map<std::pair<Sex, int>, std::map<AgeGroup, double>> grouped;
    for (const auto& [cell, count] : stocks.cohorts)
        grouped[{cell.sex, cell.year}][cell.group] += count;
    for (const auto& [key, by_group] : grouped) {
        const auto per_age = interpolate_age_groups(by_group);
        for (const auto& [age, v] : per_age)
            table.values[{key.first, age, key.second}] = v;
    }
    return table;
}

NetRateTable net_change_rates(const PerAgeStocks& stocks) {
    NetRateTable net;
    for (const auto& [key, x] : stocks.values) {
        if (x <= 0.0) continue;
        const auto& [sex, age, year] = key;
        auto next = stocks.values.find({sex, age + 1, year + 1});
        if (next == stocks.values.end()) continue;
        net.rates[key] = (next->second - x) / x;
    }
    return net;
}

ExitRates exit_rates(const NetRateTable& net) {
    if (net.rates.empty()) throw HwfError("EmptyNetRates", "no net rates");
    std::map<std::pair<Sex, int>, std::pair<double, int>> acc;
    for (const auto& [key, alpha] : net.rates) {
        const auto& [sex, age, year] = key;
        // Exit part of the net change, clamped to a probability.
        const double g = std::min(1.0, std::max(0.0, -alpha));
        auto& [sum, n] = acc[{sex, age}];
        sum += g;
        ++n;
    }
    ExitRates rates;
    for (const auto& [cohort, sum_n] : acc)
        rates.gamma[cohort] = sum_n.first / sum_n.second;
    return rates;
}

namespace {

EntrantDistribution entrants_from_per_age(const PerAgeStocks& table, int year,
                                          AgeGroup band) {
    std::map<Sex, double> mass{{Sex::Male, 0.0}, {Sex::Female, 0.0}};
    double total = 0.0;
    for (int a = band.lo; a < band.hi; ++a)
        for (auto s : {Sex::Male, Sex::Female}) {
            const double v = table.at(s, a, year);
            mass[s] += v;
            total += v;
        }
    if (total <= 0.0)
        throw HwfError("EmptyEntryBand",
                       "no stock in the entry age band at year " +
                           std::to_string(year));
    EntrantDistribution dist;
    dist.ages = band;
    for (auto& [s, m] : mass) dist.sex_share[s] = m / total;
    return dist;
}

}  // namespace

ReferenceRates reference_rates(const std::vector<StockTable>& datasets) {
    PerAgeStocks pooled;
    bool any = false;
    for (const auto& table : datasets) {
        if (table.cohorts.empty()) continue;  // not a complete country
        any = true;
        const auto per_age = per_age_stocks(table);
        for (const auto& [key, v] : per_age.values) pooled.values[key] += v;
    }
    if (!any)
        throw HwfError("NoCompleteCountry",
                       "no country with age- and sex-resolved stocks");

    ReferenceRates ref;
    ref.rates = exit_rates(net_change_rates(pooled));

    int last_year = 0;
    for (const auto& [key, v] : pooled.values)
        last_year = std::max(last_year, std::get<2>(key));
    double total = 0.0;
    for (const auto& [key, v] : pooled.values)
        if (std::get<2>(key) == last_year) total += v;
    for (const auto& [key, v] : pooled.values)
        if (std::get<2>(key) == last_year && total > 0.0)
            ref.age_sex_shares[{std::get<0>(key), std::get<1>(key)}] = v / total;

    ref.entrants = entrants_from_per_age(pooled, last_year, {25, 35});
    return ref;
}

EntrantDistribution entrant_distribution(const StockTable& stocks, int ref_year,
                                         AgeGroup entry_ages) {
    return entrants_from_per_age(per_age_stocks(stocks), ref_year, entry_ages);
}

}  // namespace hwf
