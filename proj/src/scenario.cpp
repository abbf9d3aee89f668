#include "hwf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace hwf {

double InflowRamp::at(int year) const {
    if (year <= start_year) return 0.0;
    if (year >= end_year) return peak;
    return peak * static_cast<double>(year - start_year) /
           static_cast<double>(end_year - start_year);
}

std::map<int, double> Intervention::schedule(int first_year,
                                             int last_year) const {
    std::map<int, double> out;
    for (int year = first_year; year <= last_year; ++year) {
        double v = 0.0;
        if (auto it = additions.find(year); it != additions.end())
            v += it->second;
        if (ramp) v += ramp->at(year);
        if (v != 0.0) out[year] = v;
    }
    return out;
}

double new_faculty_inflow(int year) {
    return InflowRamp{2019, 2029, 300.0}.at(year);
}

SectorShares sector_share_trend(const SectorSplit& anchors, int from_year,
                                int to_year) {
    if (anchors.year_a == anchors.year_b)
        throw HwfError("DegenerateAnchors", "anchor years are equal");

    SectorShares out;
    for (int year = from_year; year <= to_year; ++year) {
        auto& slice = out[year];
        const double w = static_cast<double>(year - anchors.year_a) /
                         static_cast<double>(anchors.year_b - anchors.year_a);
        for (const auto& [key, share_a] : anchors.shares_a) {
            auto it = anchors.shares_b.find(key);
            if (it == anchors.shares_b.end())
                throw HwfError("MissingShare",
                               "sector share missing at second anchor");
            slice[key] = std::clamp(share_a + w * (it->second - share_a), 0.0,
                                    1.0);
        }
        for (auto prof : {Profession::GP, Profession::Specialist}) {
            double sum = 0.0;
            for (const auto& [key, v] : slice)
                if (key.second == prof) sum += v;
            if (sum <= 0.0)
                throw HwfError("ShareSumViolation",
                               "all sector shares vanished for " +
                                   to_string(prof) + " in " +
                                   std::to_string(year));
            for (auto& [key, v] : slice)
                if (key.second == prof) v /= sum;
        }
    }
    return out;
}

StockTable split_fields(const StockTable& minimal, const SectorShares& shares) {
    StockTable out;
    out.country = minimal.country;
    out.flags = minimal.flags;

    auto shares_at = [&](int year) -> const auto& {
        auto it = shares.find(year);
        if (it == shares.end())
            throw HwfError("MissingShare",
                           "no sector shares for year " + std::to_string(year));
        return it->second;
    };

    for (const auto& [cell, count] : minimal.cohorts) {
        if (cell.field.sector)
            throw HwfError("BadModel", "input table is already sector-resolved");
        const auto& slice = shares_at(cell.year);
        for (auto sector :
             {Sector::Contracted, Sector::Employed, Sector::NonContracted}) {
            auto it = slice.find({sector, cell.field.profession});
            if (it == slice.end())
                throw HwfError("MissingShare", "incomplete sector share slice");
            CohortCell split_cell = cell;
            split_cell.field.sector = sector;
            out.cohorts[split_cell] = count * it->second;
        }
    }
    for (const auto& [key, count] : minimal.totals) {
        const auto& slice = shares_at(key.second);
        for (auto sector :
             {Sector::Contracted, Sector::Employed, Sector::NonContracted}) {
            auto it = slice.find({sector, key.first.profession});
            if (it == slice.end())
                throw HwfError("MissingShare", "incomplete sector share slice");
            FieldId field{key.first.profession, sector};
            out.totals[{field, key.second}] = count * it->second;
        }
    }
    return out;
}

Intervention parse_intervention(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw HwfError("FileError", "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw HwfError("SchemaError",
                       path.filename().string() + ": " + e.what());
    }
    Intervention intervention;
    intervention.name = j.value("name", path.stem().string());
    if (j.contains("inflow_additions"))
        for (const auto& item : j["inflow_additions"])
            intervention.additions[item.at("year").get<int>()] +=
                item.at("amount").get<double>();
    if (j.contains("ramp")) {
        const auto& r = j["ramp"];
        intervention.ramp = InflowRamp{r.at("start_year").get<int>(),
                                       r.at("end_year").get<int>(),
                                       r.at("peak").get<double>()};
        if (intervention.ramp->end_year <= intervention.ramp->start_year)
            throw HwfError("SchemaError", "ramp must end after it starts");
    }
    return intervention;
}

}  // namespace hwf
