// hwfcast: stock-flow-consistent health-workforce supply forecasting.
//
// Subcommands: ingest, calibrate, forecast, gaps, surface. All outputs are
// UTF-8 CSV/JSON written into --out-dir; runs are deterministic, so repeated
// invocations overwrite byte-identical files.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwf/ingest.hpp"
#include "hwf/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// usage=1, data validation=2, numerical failure=3
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string fnv1a_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << h;
    return ss.str();
}

json provenance(const fs::path& data_dir, const json& options) {
    json p;
    p["tool_version"] = kToolVersion;
    p["options"] = options;
    for (const auto& name :
         {"stocks.csv", "inflow.csv", "population.csv", "sector_split.csv"})
        if (fs::exists(data_dir / name))
            p["inputs"][name] = fnv1a_hex(data_dir / name);
    return p;
}

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

std::string opt_num(const std::optional<double>& v) {
    return v ? num(*v) : std::string{};
}

hwf::FieldId parse_field_label(const std::string& label) {
    auto sep = label.find('_');
    if (sep == std::string::npos)
        return {hwf::parse_profession(label), std::nullopt};
    return {hwf::parse_profession(label.substr(sep + 1)),
            hwf::parse_sector(label.substr(0, sep))};
}

json params_json(const hwf::Params& params) {
    json j;
    j["p_enter"] = params.p_enter;
    for (const auto& [field, p] : params.field_choice)
        j["field_choice"][field.label()] = p;
    return j;
}

hwf::Params params_from_json(const json& j) {
    hwf::Params p;
    p.p_enter = j.at("p_enter").get<double>();
    for (const auto& [label, v] : j.at("field_choice").items())
        p.field_choice[parse_field_label(label)] = v.get<double>();
    return p;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "."
                                                      : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hwf::HwfError("FileError", "cannot write " + path.string());
    out << content;
}

void write_surface(const fs::path& path, const hwf::GofSurface& surface) {
    std::ostringstream out;
    out << "p_enter,p_gp,chi2\n";
    for (const auto& point : surface.grid)
        out << num(point.p_enter) << ',' << num(point.p_gp) << ','
            << num(point.chi2) << '\n';
    write_file(path, out.str());
}

void write_series(const fs::path& out_dir, const hwf::PipelineResult& result) {
    for (const auto& series : result.series) {
        std::ostringstream out;
        out << "year,model,sd,iso_baseline,env_min,env_max,observed\n";
        for (const auto& [year, row] : series.rows)
            out << year << ',' << num(row.model) << ',' << opt_num(row.sd)
                << ',' << opt_num(row.iso_baseline) << ','
                << opt_num(row.env_min) << ',' << opt_num(row.env_max) << ','
                << opt_num(row.observed) << '\n';
        write_file(out_dir / ("forecast_" + series.field.label() + ".csv"),
                   out.str());
    }
}

struct CommonArgs {
    std::string data_dir;
    std::string out_dir = ".";
    std::string model = "minimal";
    std::string gof = "final-year";
    double grid_step = 0.01;
    int horizon = 2040;
    std::string intervention_file;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--data-dir", args.data_dir,
                    "directory with the canonical CSV files")
        ->required();
    cmd->add_option("--out-dir", args.out_dir, "output directory");
    cmd->add_option("--model", args.model, "minimal|extended")
        ->check(CLI::IsMember({"minimal", "extended"}));
    cmd->add_option("--gof", args.gof, "final-year|all-years")
        ->check(CLI::IsMember({"final-year", "all-years"}));
    cmd->add_option("--grid-step", args.grid_step,
                    "grid increment for the minimal-model search");
    cmd->add_option("--to", args.horizon, "forecast horizon year");
    cmd->add_option("--intervention", args.intervention_file,
                    "JSON file with inflow interventions");
}

hwf::PipelineOptions to_options(const CommonArgs& args) {
    hwf::PipelineOptions options;
    options.model = args.model == "extended" ? hwf::ModelKind::Extended
                                             : hwf::ModelKind::Minimal;
    options.gof = args.gof == "all-years" ? hwf::GofMode::AllYears
                                          : hwf::GofMode::FinalYear;
    options.grid_step = args.grid_step;
    options.horizon = args.horizon;
    if (!args.intervention_file.empty())
        options.intervention = hwf::parse_intervention(args.intervention_file);
    return options;
}

void check_grid_step(double step) {
    const int n = static_cast<int>(std::lround(1.0 / step));
    if (step <= 0.0 || n < 1 || std::abs(n * step - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "--grid-step must divide 1 evenly, got " << step;
        throw CLI::ValidationError(msg.str());
    }
}

json options_json(const CommonArgs& args) {
    return json{{"model", args.model},
                {"gof", args.gof},
                {"grid_step", args.grid_step},
                {"horizon", args.horizon}};
}

hwf::Dataset load(const CommonArgs& args) {
    return hwf::parse_canonical(
        hwf::DatasetPaths::in_dir(fs::path(args.data_dir)));
}

int cmd_ingest(const CommonArgs& args) {
    auto dataset = load(args);
    std::cout << "dataset " << dataset.stocks.country << ": "
              << dataset.stocks.fields().size() << " fields, years "
              << dataset.stocks.years().front() << "-"
              << dataset.stocks.years().back() << ", "
              << dataset.projections.size() << " population scenarios"
              << (dataset.sector_split ? ", sector split present" : "")
              << "\n";
    std::cout << "calibration year: "
              << hwf::select_calibration_year(dataset.stocks) << "\n";
    return 0;
}

int cmd_calibrate(const CommonArgs& args, bool surface_only) {
    auto dataset = load(args);
    auto options = to_options(args);
    auto result = hwf::run_pipeline(dataset, options);

    const fs::path out_dir(args.out_dir);
    if (result.surface)
        write_surface(out_dir / "surface.csv", *result.surface);
    if (surface_only) return 0;

    json j = params_json(result.params);
    j["chi2"] = result.chi2;
    j["model"] = result.report.model;
    j["calibration_year"] = result.t0;
    j["provenance"] = provenance(args.data_dir, options_json(args));
    write_file(out_dir / "params.json", j.dump(2) + "\n");
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_forecast(const CommonArgs& args, const std::string& params_file,
                 bool gaps_only) {
    auto dataset = load(args);
    auto options = to_options(args);
    options.want_surface = false;

    fs::path params_path =
        params_file.empty() ? fs::path(args.out_dir) / "params.json"
                            : fs::path(params_file);
    if (fs::exists(params_path)) {
        std::ifstream in(params_path);
        json j;
        in >> j;
        options.params = params_from_json(j);
    }
    auto result = hwf::run_pipeline(dataset, options);

    const fs::path out_dir(args.out_dir);
    json report = json::parse(result.report.to_json());
    report["provenance"] = provenance(args.data_dir, options_json(args));
    write_file(out_dir / "gaps.json", report.dump(2) + "\n");
    if (!gaps_only) write_series(out_dir, result);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stock-flow-consistent health workforce supply forecasting"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string params_file;

    auto* ingest = app.add_subcommand("ingest", "parse and validate a dataset");
    add_common(ingest, args);

    auto* calibrate =
        app.add_subcommand("calibrate", "fit p_enter and the field choices");
    add_common(calibrate, args);

    auto* surface =
        app.add_subcommand("surface", "export the goodness-of-fit surface");
    add_common(surface, args);

    auto* forecast = app.add_subcommand(
        "forecast", "run the forecast and emit plot-data series");
    add_common(forecast, args);
    forecast->add_option("--params", params_file,
                         "params.json from a calibrate run");

    auto* gaps = app.add_subcommand("gaps", "compute density gaps only");
    add_common(gaps, args);
    gaps->add_option("--params", params_file,
                     "params.json from a calibrate run");

    try {
        app.parse(argc, argv);
        check_grid_step(args.grid_step);
        if (ingest->parsed()) return cmd_ingest(args);
        if (calibrate->parsed()) return cmd_calibrate(args, false);
        if (surface->parsed()) return cmd_calibrate(args, true);
        if (forecast->parsed()) return cmd_forecast(args, params_file, false);
        if (gaps->parsed()) return cmd_forecast(args, params_file, true);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const hwf::ValidationFailed& e) {
        for (const auto& v : e.violations)
            std::cerr << v.code << ": " << v.message << "\n";
        return kExitValidation;
    } catch (const hwf::HwfError& e) {
        std::cerr << e.code << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
