#pragma once

// Shared builders for small in-memory datasets used across the test suite.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "hwf/engine.hpp"
#include "hwf/types.hpp"

namespace hwf_test {

inline const hwf::FieldId kGp{hwf::Profession::GP, std::nullopt};
inline const hwf::FieldId kSp{hwf::Profession::Specialist, std::nullopt};

inline std::filesystem::path fixture_dir() { return FIXTURE_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hwf_test_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_temp(const std::string& dir_name,
                                        const std::string& file_name,
                                        const std::string& content) {
    auto path = temp_dir(dir_name) / file_name;
    std::ofstream out(path);
    out << content;
    return path;
}

/// Minimal well-formed bundle: two fields, grouped cohorts, three scenarios.
inline hwf::Dataset small_bundle() {
    hwf::Dataset d;
    d.stocks.country = "AT";
    for (int year = 2014; year <= 2016; ++year)
        for (const auto& field : {kGp, kSp})
            for (auto sex : {hwf::Sex::Male, hwf::Sex::Female}) {
                d.stocks.cohorts[{field, sex, {25, 35}, year}] = 100.0;
                d.stocks.cohorts[{field, sex, {35, 45}, year}] = 200.0;
                d.stocks.cohorts[{field, sex, {45, 55}, year}] = 150.0;
            }
    for (int year = 2014; year <= 2016; ++year) {
        d.inflow.graduates[year] = 500.0;
        d.inflow.migrants[year] = 50.0;
    }
    d.inflow.country = "AT";
    for (const auto* name : {"baseline", "high", "low"}) {
        hwf::PopulationProjection proj;
        proj.country = "AT";
        proj.scenario = name;
        const double rate = std::string(name) == "high"   ? 1.01
                            : std::string(name) == "low"  ? 0.999
                                                          : 1.005;
        for (int year = 2014; year <= 2040; ++year)
            proj.values[year] = 1.0e6 * std::pow(rate, year - 2014);
        d.projections.push_back(std::move(proj));
    }
    return d;
}

/// Flat exit-rate table over an age span.
inline hwf::ExitRates flat_rates(double gamma, int min_age = 20,
                                 int max_age = 79) {
    hwf::ExitRates rates;
    for (auto sex : {hwf::Sex::Male, hwf::Sex::Female})
        for (int a = min_age; a <= max_age; ++a)
            rates.gamma[{sex, a}] = gamma;
    return rates;
}

inline hwf::InflowPlan constant_inflow(double total, int first_year,
                                       int last_year,
                                       hwf::AgeGroup entry_ages = {25, 35}) {
    hwf::InflowPlan plan;
    plan.entry_ages = entry_ages;
    plan.sex_share = {{hwf::Sex::Male, 0.45}, {hwf::Sex::Female, 0.55}};
    for (int year = first_year; year <= last_year; ++year)
        plan.totals[year] = total;
    return plan;
}

inline hwf::Params two_field_params(double p_enter, double p_gp) {
    hwf::Params p;
    p.p_enter = p_enter;
    p.field_choice[kGp] = p_gp;
    p.field_choice[kSp] = 1.0 - p_gp;
    return p;
}

/// Random dense state over the given fields and age span.
inline hwf::ModelState random_state(std::mt19937& rng,
                                    const std::vector<hwf::FieldId>& fields,
                                    int year, int min_age, int max_age) {
    hwf::ModelState state(year, fields, min_age, max_age);
    std::uniform_real_distribution<double> unit(0.0, 500.0);
    for (auto& v : state.stocks) v = unit(rng);
    return state;
}

inline hwf::ExitRates random_rates(std::mt19937& rng, int min_age,
                                   int max_age) {
    hwf::ExitRates rates;
    std::uniform_real_distribution<double> unit(0.0, 0.3);
    for (auto sex : {hwf::Sex::Male, hwf::Sex::Female})
        for (int a = min_age; a <= max_age; ++a)
            rates.gamma[{sex, a}] = unit(rng);
    return rates;
}

}  // namespace hwf_test
