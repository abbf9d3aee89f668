#include <doctest.h>

#include "helpers.hpp"
#include "hwf/types.hpp"

using namespace hwf;
using namespace hwf_test;

namespace {

bool has_code(const std::vector<Violation>& violations,
              const std::string& code) {
    for (const auto& v : violations)
        if (v.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("well-formed bundle validates with no violations") {
    auto bundle = small_bundle();
    CHECK(validate_dataset(bundle).empty());
    // Idempotence: a validated bundle keeps validating clean.
    CHECK(validate_dataset(bundle).empty());
}

TEST_CASE("entrant sex share off by 0.02 is a ShareSumViolation") {
    auto bundle = small_bundle();
    bundle.inflow.entrant_sex_share = {{Sex::Male, 0.44}, {Sex::Female, 0.54}};
    CHECK(has_code(validate_dataset(bundle), "ShareSumViolation"));
}

TEST_CASE("missing baseline projection is reported") {
    auto bundle = small_bundle();
    std::erase_if(bundle.projections,
                  [](const auto& p) { return p.scenario == "baseline"; });
    CHECK(has_code(validate_dataset(bundle), "MissingBaselineScenario"));
}

TEST_CASE("negative counts are located, and all violations are collected") {
    auto bundle = small_bundle();
    bundle.stocks.cohorts.begin()->second = -1.0;
    bundle.inflow.graduates[2015] = -10.0;
    std::erase_if(bundle.projections,
                  [](const auto& p) { return p.scenario == "baseline"; });
    auto violations = validate_dataset(bundle);
    CHECK(has_code(violations, "NegativeCount"));
    CHECK(has_code(violations, "MissingBaselineScenario"));
    CHECK(violations.size() >= 3);  // no fail-fast
}

TEST_CASE("explicit field totals must match cohort sums") {
    auto bundle = small_bundle();
    bundle.stocks.totals[{kGp, 2016}] = 900.0;  // cohorts sum to 900
    CHECK(validate_dataset(bundle).empty());
    bundle.stocks.totals[{kGp, 2016}] = 950.0;
    CHECK(has_code(validate_dataset(bundle), "TotalMismatch"));
}

TEST_CASE("params validation reports the offending sum") {
    auto good = two_field_params(0.75, 0.32);
    CHECK(validate_params(good).empty());

    Params bad = good;
    bad.field_choice[kGp] = 0.30;  // sum 0.98
    auto violations = validate_params(bad);
    REQUIRE(!violations.empty());
    CHECK(violations.front().code == "ShareSumViolation");
    CHECK(violations.front().message.find("0.98") != std::string::npos);

    Params out_of_range = good;
    out_of_range.p_enter = 1.5;
    CHECK(has_code(validate_params(out_of_range), "BadProbability"));
}

TEST_CASE("random params accepted exactly when the choice sum is 1") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double p_gp = unit(rng);
        Params p = two_field_params(unit(rng), p_gp);
        CHECK(validate_params(p).empty());
        p.field_choice[kSp] += 1e-6;
        CHECK(!validate_params(p).empty());
    }
}

TEST_CASE("model state layout and totals") {
    ModelState state(2000, {kGp, kSp}, 25, 30);
    state.at(0, Sex::Male, 25) = 10.0;
    state.at(0, Sex::Female, 30) = 5.0;
    state.at(1, Sex::Female, 27) = 2.5;
    CHECK(state.field_total(0) == 15.0);
    CHECK(state.field_total(1) == 2.5);
    CHECK(state.total() == 17.5);
}

TEST_CASE("stock table derives field totals from cohorts") {
    auto bundle = small_bundle();
    CHECK(bundle.stocks.field_total(kGp, 2016) == doctest::Approx(900.0));
    CHECK(bundle.stocks.total(2016) == doctest::Approx(1800.0));
    CHECK_THROWS_AS((void)bundle.stocks.field_total(kGp, 1990), HwfError);
}
