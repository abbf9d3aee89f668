// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 8 needs externally supplied statistics-office extracts
// (point HWF_EUROSTAT_DIR at them) and is skipped otherwise.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "hwf/calibrate.hpp"
#include "hwf/demography.hpp"
#include "hwf/forecast.hpp"
#include "hwf/ingest.hpp"
#include "hwf/pipeline.hpp"
#include "hwf/scenario.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace hwf;
using namespace hwf_test;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << number << ". " << name
              << "\n";
    if (!ok) ++failures;
}

template <typename Check>
void run_criterion(int number, const std::string& name, Check check) {
    bool ok = false;
    try {
        ok = check();
    } catch (const std::exception& e) {
        std::cout << "      " << number << ": " << e.what() << "\n";
    }
    report(number, name, ok);
}

void report_skip(int number, const std::string& name,
                 const std::string& why) {
    std::cout << "SKIP  " << number << ". " << name << " (" << why << ")\n";
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

// 1. Stock-flow consistency on randomized small instances.
bool stock_flow_consistency() {
    std::mt19937 rng(101);
    std::uniform_int_distribution<int> n_fields(1, 3);
    const std::vector<FieldId> pool{
        kGp, kSp, {Profession::GP, Sector::Employed}};
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<FieldId> fields(pool.begin(),
                                    pool.begin() + n_fields(rng));
        const int min_age = 30, max_age = 39;  // <= 20 cohorts per field
        auto state = random_state(rng, fields, 2000, min_age, max_age);
        auto rates = random_rates(rng, min_age, max_age);
        auto plan = constant_inflow(400.0, 2001, 2040, {31, 36});
        Params params;
        params.p_enter = 0.7;
        for (const auto& f : fields)
            params.field_choice[f] = 1.0 / static_cast<double>(fields.size());
        auto traj = run(state, params, rates, plan, 2040, 2016);
        for (std::size_t k = 0; k + 1 < traj.states.size(); ++k)
            for (std::size_t f = 0; f < fields.size(); ++f) {
                const double delta = traj.states[k + 1].field_total(f) -
                                     traj.states[k].field_total(f);
                const double net =
                    traj.flows[k].entered[f] - traj.flows[k].exited[f];
                if (std::abs(delta - net) >
                    1e-9 * std::max(1.0, std::abs(delta)))
                    return false;
            }
    }
    return true;
}

// 2. Element-wise oracle equivalence on 100 random instances, < 1 s.
bool oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(102);
    for (int trial = 0; trial < 100; ++trial) {
        auto state = random_state(rng, {kGp, kSp}, 2000, 25, 50);
        auto rates = random_rates(rng, 25, 50);
        auto plan = constant_inflow(600.0, 2001, 2001, {26, 35});
        auto params = two_field_params(0.8, 0.3);
        auto next = step(state, params, rates, plan);
        auto naive = naive_step(to_naive(state), {0.3, 0.7}, 0.8, rates, plan,
                                2001, 25, 50);
        for (const auto& [key, v] : naive) {
            const auto& [f, s, a] = key;
            const auto sex = s == 1 ? Sex::Female : Sex::Male;
            if (std::abs(next.at(static_cast<std::size_t>(f), sex, a) - v) >=
                1e-12)
                return false;
        }
    }
    return elapsed_s(start) < 1.0;
}

// 3. Exact grid recovery on the bundled self-generated dataset, full
//    101x101 grid in < 10 s.
bool grid_recovery() {
    const auto start = std::chrono::steady_clock::now();
    auto dataset = parse_canonical(DatasetPaths::in_dir(fixture_dir() / "at"));
    PipelineOptions options;
    options.horizon = 2017;
    options.want_surface = true;
    auto result = run_pipeline(dataset, options);
    if (elapsed_s(start) >= 10.0) return false;
    if (!result.surface || result.surface->grid.size() != 101 * 101)
        return false;
    return std::abs(result.params.p_enter - 0.75) < 1e-12 &&
           std::abs(result.params.field_choice.at(kGp) - 0.32) < 1e-12 &&
           result.chi2 < 1e-12;
}

// 4. Extended recovery within l-infinity 0.02 on 10 random instances.
bool extended_recovery() {
    std::vector<FieldId> fields;
    for (auto prof : {Profession::GP, Profession::Specialist})
        for (auto sector :
             {Sector::Contracted, Sector::Employed, Sector::NonContracted})
            fields.push_back({prof, sector});

    std::mt19937 rng(104);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Params truth;
        truth.p_enter = 0.3 + 0.6 * unit(rng);
        std::vector<double> raw(fields.size());
        double sum = 0.0;
        for (auto& v : raw) {
            v = 0.05 + unit(rng);
            sum += v;
        }
        for (std::size_t k = 0; k < fields.size(); ++k)
            truth.field_choice[fields[k]] = raw[k] / sum;

        CalibrationSetup setup{random_state(rng, fields, 2004, 25, 55),
                               random_rates(rng, 25, 55),
                               constant_inflow(1500.0, 2005, 2016),
                               nullptr,
                               2016,
                               {2016}};
        auto traj =
            run(setup.init, truth, setup.rates, setup.inflow, 2016, 2016);
        StockTable observed;
        observed.country = "AT";
        for (std::size_t f = 0; f < fields.size(); ++f)
            observed.totals[{fields[f], 2016}] = traj.field_total(f, 2016);
        setup.observed = &observed;

        Params init;
        init.p_enter = 0.5;
        for (const auto& f : fields)
            init.field_choice[f] = 1.0 / static_cast<double>(fields.size());
        auto fitted = calibrate_extended(setup, init);

        if (std::abs(fitted.p_enter - truth.p_enter) > 0.02) return false;
        for (const auto& [field, share] : truth.field_choice)
            if (std::abs(fitted.field_choice.at(field) - share) > 0.02)
                return false;
    }
    return true;
}

// 5. Hand-computed oracles.
bool hand_oracles() {
    // chi2 for Z = {1000, 3000}, M = {900, 3100}.
    ModelState state(2016, {kGp, kSp}, 25, 60);
    state.at(0, Sex::Female, 40) = 900.0;
    state.at(1, Sex::Female, 40) = 3100.0;
    Trajectory traj;
    traj.states.push_back(state);
    traj.phases.push_back(Phase::Validation);
    StockTable observed;
    observed.country = "AT";
    observed.totals[{kGp, 2016}] = 1000.0;
    observed.totals[{kSp, 2016}] = 3000.0;
    if (std::abs(gof_chi2(traj, observed, {2016}) - 0.0033333333333333335) >
        1e-6)
        return false;

    if (std::abs(density_gap(11900.0, 12000.0, 12, 1000.0) - (-1.0 / 120.0)) >
        1e-9)
        return false;

    return new_faculty_inflow(2019) == 0.0 &&
           new_faculty_inflow(2024) == 150.0 &&
           new_faculty_inflow(2029) == 300.0;
}

// 6. Interpolation conservation and non-negativity on 1000 random inputs.
bool interpolation_conservation() {
    std::mt19937 rng(106);
    std::uniform_real_distribution<double> count(0.0, 2000.0);
    std::uniform_int_distribution<int> width(1, 15);
    for (int trial = 0; trial < 1000; ++trial) {
        std::map<AgeGroup, double> grouped;
        int lo = 20 + width(rng);
        const int n_groups = 1 + width(rng) % 7;
        for (int g = 0; g < n_groups; ++g) {
            const int w = width(rng);
            grouped[{lo, lo + w}] = count(rng);
            lo += w;
        }
        auto out = interpolate_age_groups(grouped);
        for (const auto& [age, v] : out)
            if (v < 0.0) return false;
        for (const auto& [group, c] : grouped) {
            double sum = 0.0;
            for (int a = group.lo; a < group.hi; ++a) sum += out.at(a);
            if (std::abs(sum - c) > 1e-9 * std::max(1.0, c)) return false;
        }
    }
    return true;
}

// 7. Quadrature of field SDs (3, 12) is 12.37, rounding to 12.
bool quadrature_consistency() {
    const double agg = std::hypot(3.0, 12.0);
    return std::abs(agg - 12.36931687685298) < 1e-10 &&
           std::abs(std::round(agg * 100.0) / 100.0 - 12.37) < 1e-12 &&
           std::lround(agg) == 12;
}

// 8. Best-effort reproduction on externally supplied extracts.
bool reproduction(bool* skipped) {
    const char* dir = std::getenv("HWF_EUROSTAT_DIR");
    if (dir == nullptr || !fs::exists(dir)) {
        *skipped = true;
        return true;
    }
    *skipped = false;
    auto dataset = parse_canonical(DatasetPaths::in_dir(fs::path(dir)));
    PipelineOptions options;
    auto result = run_pipeline(dataset, options);
    return std::abs(result.params.p_enter - 0.75) <= 0.05 &&
           std::abs(result.params.field_choice.at(kGp) - 0.32) <= 0.05;
}

// 9. Isodensity anchoring and envelope containment on the fixture scenarios.
bool isodensity_properties() {
    auto dataset = parse_canonical(DatasetPaths::in_dir(fixture_dir() / "at"));
    const double z_ref = dataset.stocks.total(2016);
    auto line = isodensity(z_ref, 2016, 2040, dataset.projections);
    for (const auto& [scenario, values] : line.by_scenario)
        if (values.at(2016) != z_ref) return false;
    for (const auto& [year, env] : line.envelope) {
        const double base = line.baseline().at(year);
        if (env.first > base || env.second < base) return false;
    }
    return true;
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream content;
        content << in.rdbuf();
        files[fs::relative(entry.path(), dir).string()] = content.str();
    }
    return files;
}

// 10. Two full CLI runs over the fixture produce byte-identical outputs.
bool cli_determinism() {
    const fs::path data = fixture_dir() / "at";
    std::vector<fs::path> out_dirs;
    for (const char* name : {"acc_run_a", "acc_run_b"}) {
        const fs::path out = fs::temp_directory_path() / name;
        fs::remove_all(out);
        fs::create_directories(out);
        out_dirs.push_back(out);
        std::ostringstream cmd;
        cmd << HWFCAST_PATH << " calibrate --grid-step 0.05 --data-dir "
            << data << " --out-dir " << out << " && " << HWFCAST_PATH
            << " forecast --grid-step 0.05 --data-dir " << data
            << " --out-dir " << out;
        if (std::system(cmd.str().c_str()) != 0) return false;
    }
    auto a = read_dir(out_dirs[0]);
    auto b = read_dir(out_dirs[1]);
    return !a.empty() && a == b;
}

}  // namespace

int main() {
    run_criterion(1, "stock-flow consistency on random instances",
                  stock_flow_consistency);
    run_criterion(2, "oracle equivalence of step/run", oracle_equivalence);
    run_criterion(3, "exact minimal-model grid recovery", grid_recovery);
    run_criterion(4, "extended-model parameter recovery", extended_recovery);
    run_criterion(5, "hand-computed oracles", hand_oracles);
    run_criterion(6, "interpolation conservation", interpolation_conservation);
    run_criterion(7, "quadrature aggregation", quadrature_consistency);
    bool skipped = false;
    bool repro = false;
    try {
        repro = reproduction(&skipped);
    } catch (const std::exception& e) {
        std::cout << "      8: " << e.what() << "\n";
    }
    if (skipped)
        report_skip(8, "published-estimate reproduction",
                    "set HWF_EUROSTAT_DIR to a canonical extract directory");
    else
        report(8, "published-estimate reproduction", repro);
    run_criterion(9, "isodensity and envelope properties",
                  isodensity_properties);
    run_criterion(10, "CLI determinism", cli_determinism);
    return failures == 0 ? 0 : 1;
}
