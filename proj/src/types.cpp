#include "hwf/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hwf {

std::string to_string(Profession p) {
    return p == Profession::GP ? "GP" : "SP";
}

std::string to_string(Sector s) {
    switch (s) {
        case Sector::Contracted: return "CON";
        case Sector::Employed: return "EMP";
        case Sector::NonContracted: return "NON";
    }
    return "?";
}

std::string to_string(Sex s) {
    return s == Sex::Male ? "M" : "F";
}

Profession parse_profession(const std::string& s) {
    if (s == "GP") return Profession::GP;
    if (s == "SP") return Profession::Specialist;
    throw HwfError("SchemaError", "unknown profession '" + s + "'");
}

Sector parse_sector(const std::string& s) {
    if (s == "CON") return Sector::Contracted;
    if (s == "EMP") return Sector::Employed;
    if (s == "NON") return Sector::NonContracted;
    throw HwfError("SchemaError", "unknown sector '" + s + "'");
}

Sex parse_sex(const std::string& s) {
    if (s == "M") return Sex::Male;
    if (s == "F") return Sex::Female;
    throw HwfError("SchemaError", "unknown sex '" + s + "'");
}

std::string FieldId::label() const {
    if (sector) return to_string(*sector) + "_" + to_string(profession);
    return to_string(profession);
}

std::vector<FieldId> StockTable::fields() const {
    std::set<FieldId> seen;
    for (const auto& [cell, count] : cohorts) seen.insert(cell.field);
    for (const auto& [key, count] : totals) seen.insert(key.first);
    return {seen.begin(), seen.end()};
}

std::vector<int> StockTable::years() const {
    std::set<int> seen;
    for (const auto& [cell, count] : cohorts) seen.insert(cell.year);
    for (const auto& [key, count] : totals) seen.insert(key.second);
    return {seen.begin(), seen.end()};
}

bool StockTable::has_cohorts(const FieldId& field, int year) const {
    for (const auto& [cell, count] : cohorts)
        if (cell.field == field && cell.year == year) return true;
    return false;
}

bool StockTable::has_break(int year) const {
    auto it = flags.find(year);
    return it != flags.end() && it->second.count("b") > 0;
}

double StockTable::field_total(const FieldId& field, int year) const {
    double sum = 0.0;
    bool any = false;
    for (const auto& [cell, count] : cohorts) {
        if (cell.field == field && cell.year == year) {
            sum += count;
            any = true;
        }
    }
    if (any) return sum;
    auto it = totals.find({field, year});
    if (it != totals.end()) return it->second;
    throw HwfError("MissingField",
                   "no stock data for field " + field.label() + " in year " +
                       std::to_string(year));
}

double StockTable::total(int year) const {
    double sum = 0.0;
    for (const auto& f : fields()) sum += field_total(f, year);
    return sum;
}

double InflowSeries::total(int year) const {
    double y = 0.0;
    if (auto it = graduates.find(year); it != graduates.end()) y += it->second;
    if (auto it = migrants.find(year); it != migrants.end()) y += it->second;
    return y;
}

std::vector<int> InflowSeries::years() const {
    std::set<int> seen;
    for (const auto& [y, c] : graduates) seen.insert(y);
    for (const auto& [y, c] : migrants) seen.insert(y);
    return {seen.begin(), seen.end()};
}

double Params::choice_sum() const {
    double s = 0.0;
    for (const auto& [field, p] : field_choice) s += p;
    return s;
}

std::optional<double> ExitRates::at(Sex s, int age) const {
    auto it = gamma.find({s, age});
    if (it == gamma.end()) return std::nullopt;
    return it->second;
}

ModelState::ModelState(int year_, std::vector<FieldId> fields_, int min_age_,
                       int max_age_)
    : year(year_),
      fields(std::move(fields_)),
      min_age(min_age_),
      max_age(max_age_),
      stocks(fields.size() * 2 * static_cast<std::size_t>(max_age - min_age + 1),
             0.0) {
    if (max_age < min_age)
        throw HwfError("BadAgeRange", "max_age below min_age");
}

std::size_t ModelState::index(std::size_t field, Sex sex, int age) const {
    const auto span = static_cast<std::size_t>(ages());
    const auto s = static_cast<std::size_t>(sex == Sex::Female ? 1 : 0);
    return (field * 2 + s) * span + static_cast<std::size_t>(age - min_age);
}

double& ModelState::at(std::size_t field, Sex sex, int age) {
    return stocks[index(field, sex, age)];
}

double ModelState::at(std::size_t field, Sex sex, int age) const {
    return stocks[index(field, sex, age)];
}

double ModelState::field_total(std::size_t field) const {
    const auto span = static_cast<std::size_t>(ages()) * 2;
    const auto begin = stocks.begin() + static_cast<std::ptrdiff_t>(field * span);
    return std::accumulate(begin, begin + static_cast<std::ptrdiff_t>(span), 0.0);
}

double ModelState::total() const {
    return std::accumulate(stocks.begin(), stocks.end(), 0.0);
}

ValidationFailed::ValidationFailed(std::vector<Violation> v)
    : HwfError("ValidationFailed",
               v.empty() ? "validation failed"
                         : "validation failed: " + v.front().code + ": " +
                               v.front().message + (v.size() > 1 ? " (+" +
                               std::to_string(v.size() - 1) + " more)" : "")),
      violations(std::move(v)) {}

namespace {

bool contiguous(const std::vector<int>& years) {
    for (std::size_t i = 1; i < years.size(); ++i)
        if (years[i] != years[i - 1] + 1) return false;
    return true;
}

void check_stocks(const StockTable& stocks, std::vector<Violation>& out) {
    for (const auto& [cell, count] : stocks.cohorts) {
        if (count < 0.0)
            out.push_back({"NegativeCount",
                           "negative cohort count for " + cell.field.label() +
                               "/" + to_string(cell.sex) + "/" +
                               std::to_string(cell.group.lo) + "-" +
                               std::to_string(cell.group.hi - 1) + " in " +
                               std::to_string(cell.year)});
        if (cell.group.lo < 0 || cell.group.width() <= 0)
            out.push_back({"BadAgeGroup",
                           "invalid age group [" + std::to_string(cell.group.lo) +
                               "," + std::to_string(cell.group.hi) + ")"});
    }
    for (const auto& [key, count] : stocks.totals) {
        if (count < 0.0)
            out.push_back({"NegativeCount",
                           "negative field total for " + key.first.label() +
                               " in " + std::to_string(key.second)});
        // Cohort detail and an explicit total must agree.
        double sum = 0.0;
        bool any = false;
        for (const auto& [cell, c] : stocks.cohorts) {
            if (cell.field == key.first && cell.year == key.second) {
                sum += c;
                any = true;
            }
        }
        if (any && std::abs(sum - count) > 1e-9 * std::max(1.0, std::abs(count)))
            out.push_back({"TotalMismatch",
                           "cohort sum " + std::to_string(sum) +
                               " differs from stored total " +
                               std::to_string(count) + " for " +
                               key.first.label() + " in " +
                               std::to_string(key.second)});
    }

    // Minimal and extended fields must not be mixed.
    const auto fields = stocks.fields();
    bool any_sector = false, any_plain = false;
    for (const auto& f : fields) (f.sector ? any_sector : any_plain) = true;
    if (any_sector && any_plain)
        out.push_back({"MixedModelFields",
                       "dataset mixes sectorless and sector-resolved fields"});

    if (!contiguous(stocks.years()))
        out.push_back({"NonContiguousYears", "stock years are not contiguous"});

    // Per (field, sex, year), age groups must not overlap.
    std::map<std::tuple<FieldId, Sex, int>, std::vector<AgeGroup>> groups;
    for (const auto& [cell, count] : stocks.cohorts)
        groups[{cell.field, cell.sex, cell.year}].push_back(cell.group);
    for (auto& [key, gs] : groups) {
        std::sort(gs.begin(), gs.end());
        for (std::size_t i = 1; i < gs.size(); ++i)
            if (gs[i].lo < gs[i - 1].hi)
                out.push_back({"OverlappingGroups",
                               "overlapping age groups for " +
                                   std::get<0>(key).label() + " in year " +
                                   std::to_string(std::get<2>(key))});
    }
}

void check_inflow(const InflowSeries& inflow, std::vector<Violation>& out) {
    for (const auto& [year, c] : inflow.graduates)
        if (c < 0.0)
            out.push_back({"NegativeCount", "negative graduate count in " +
                                                std::to_string(year)});
    for (const auto& [year, c] : inflow.migrants)
        if (c < 0.0)
            out.push_back({"NegativeCount", "negative migrant count in " +
                                                std::to_string(year)});
    if (!inflow.entrant_sex_share.empty()) {
        double sum = 0.0;
        for (const auto& [s, share] : inflow.entrant_sex_share) sum += share;
        if (std::abs(sum - 1.0) > 1e-9)
            out.push_back({"ShareSumViolation",
                           "entrant sex shares sum to " + std::to_string(sum)});
    }
}

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& dataset) {
    std::vector<Violation> out;

    check_stocks(dataset.stocks, out);
    check_inflow(dataset.inflow, out);

    for (const auto& proj : dataset.projections) {
        for (const auto& [year, pop] : proj.values)
            if (pop <= 0.0)
                out.push_back({"NegativeCount",
                               "non-positive population in scenario " +
                                   proj.scenario + " year " +
                                   std::to_string(year)});
        if (proj.country != dataset.stocks.country)
            out.push_back({"CountryMismatch",
                           "projection country " + proj.country +
                               " does not match " + dataset.stocks.country});
    }
    bool baseline = false;
    for (const auto& proj : dataset.projections)
        if (proj.scenario == "baseline") baseline = true;
    if (!baseline)
        out.push_back({"MissingBaselineScenario",
                       "no population projection labelled 'baseline'"});

    if (dataset.inflow.country != dataset.stocks.country)
        out.push_back({"CountryMismatch",
                       "inflow country " + dataset.inflow.country +
                           " does not match " + dataset.stocks.country});

    if (dataset.sector_split) {
        const auto& split = *dataset.sector_split;
        for (auto prof : {Profession::GP, Profession::Specialist}) {
            for (const auto* shares : {&split.shares_a, &split.shares_b}) {
                double sum = 0.0;
                for (const auto& [key, share] : *shares)
                    if (key.second == prof) sum += share;
                if (std::abs(sum - 1.0) > 1e-9)
                    out.push_back({"ShareSumViolation",
                                   "sector shares for " + to_string(prof) +
                                       " sum to " + std::to_string(sum)});
            }
        }
    }

    return out;
}

std::vector<Violation> validate_params(const Params& params) {
    std::vector<Violation> out;
    if (params.p_enter < 0.0 || params.p_enter > 1.0)
        out.push_back({"BadProbability",
                       "p_enter = " + std::to_string(params.p_enter)});
    for (const auto& [field, p] : params.field_choice)
        if (p < 0.0 || p > 1.0)
            out.push_back({"BadProbability", "field choice for " +
                                                 field.label() + " = " +
                                                 std::to_string(p)});
    const double sum = params.choice_sum();
    if (std::abs(sum - 1.0) > 1e-9)
        out.push_back({"ShareSumViolation",
                       "field choices sum to " + std::to_string(sum)});
    return out;
}

}  // namespace hwf
