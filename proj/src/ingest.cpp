#include "hwf/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hwf {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(line);
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void schema_error(const std::filesystem::path& file, int line,
                               const std::string& what) {
    throw HwfError("SchemaError", file.filename().string() + ":" +
                                      std::to_string(line) + ": " + what);
}

double parse_count(const std::filesystem::path& file, int line,
                   const std::string& text) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        schema_error(file, line, "not a number: '" + text + "'");
    }
}

int parse_year(const std::filesystem::path& file, int line,
               const std::string& text) {
    try {
        return std::stoi(text);
    } catch (const std::exception&) {
        schema_error(file, line, "not a year: '" + text + "'");
    }
}

struct CsvReader {
    std::filesystem::path path;
    std::ifstream in;
    int line_no = 0;

    explicit CsvReader(const std::filesystem::path& p, std::size_t ncols)
        : path(p), in(p) {
        if (!in) throw HwfError("FileError", "cannot open " + p.string());
        std::string header;
        if (!std::getline(in, header))
            schema_error(path, 1, "missing header row");
        line_no = 1;
        if (split(strip(header), ',').size() != ncols)
            schema_error(path, 1, "header has wrong column count");
    }

    bool next(std::vector<std::string>& cols, std::size_t ncols) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            line = strip(line);
            if (line.empty()) continue;
            cols = split(line, ',');
            for (auto& c : cols) c = strip(c);
            if (cols.size() != ncols)
                schema_error(path, line_no,
                             "expected " + std::to_string(ncols) +
                                 " columns, got " + std::to_string(cols.size()));
            return true;
        }
        return false;
    }
};

void set_country(std::string& country, const std::string& row_country,
                 const std::filesystem::path& file, int line) {
    if (country.empty())
        country = row_country;
    else if (country != row_country)
        schema_error(file, line, "mixed countries in one file");
}

}  // namespace

DatasetPaths DatasetPaths::in_dir(const std::filesystem::path& dir) {
    return {dir / "stocks.csv", dir / "inflow.csv", dir / "population.csv",
            dir / "sector_split.csv"};
}

AgeGroup parse_age_group(const std::string& text) {
    if (text.size() >= 2 && text.front() == '<') {
        int hi = std::stoi(text.substr(1));
        return {std::max(0, hi - 5), hi};
    }
    if (text.size() >= 2 && text.back() == '+') {
        int lo = std::stoi(text.substr(0, text.size() - 1));
        return {lo, lo + 5};
    }
    auto dash = text.find('-');
    if (dash == std::string::npos)
        throw HwfError("SchemaError", "bad age group '" + text + "'");
    int lo = std::stoi(text.substr(0, dash));
    int hi_incl = std::stoi(text.substr(dash + 1));
    if (hi_incl < lo)
        throw HwfError("SchemaError", "bad age group '" + text + "'");
    return {lo, hi_incl + 1};
}

std::string format_age_group(const AgeGroup& group) {
    return std::to_string(group.lo) + "-" + std::to_string(group.hi - 1);
}

StockTable parse_stocks_csv(const std::filesystem::path& path) {
    StockTable table;
    CsvReader reader(path, 8);
    std::vector<std::string> c;
    while (reader.next(c, 8)) {
        set_country(table.country, c[0], path, reader.line_no);
        const int year = parse_year(path, reader.line_no, c[1]);
        FieldId field;
        try {
            field.profession = parse_profession(c[2]);
            if (!c[3].empty()) field.sector = parse_sector(c[3]);
        } catch (const HwfError& e) {
            schema_error(path, reader.line_no, e.what());
        }
        const double count = parse_count(path, reader.line_no, c[6]);
        if (!c[7].empty())
            for (const auto& f : split(c[7], ';'))
                if (!f.empty()) table.flags[year].insert(f);

        const bool has_sex = !c[4].empty();
        const bool has_age = !c[5].empty();
        if (has_sex != has_age)
            schema_error(path, reader.line_no,
                         "sex and age_group must be both present or both empty");
        if (!has_sex) {
            auto key = std::make_pair(field, year);
            if (table.totals.count(key))
                throw HwfError("DuplicateKey",
                               path.filename().string() + ":" +
                                   std::to_string(reader.line_no) +
                                   ": duplicate field total");
            table.totals[key] = count;
            continue;
        }
        Sex sex = Sex::Male;
        AgeGroup group;
        try {
            sex = parse_sex(c[4]);
            group = parse_age_group(c[5]);
        } catch (const HwfError& e) {
            schema_error(path, reader.line_no, e.what());
        } catch (const std::exception&) {
            schema_error(path, reader.line_no, "bad age group '" + c[5] + "'");
        }
        CohortCell cell{field, sex, group, year};
        if (table.cohorts.count(cell))
            throw HwfError("DuplicateKey",
                           path.filename().string() + ":" +
                               std::to_string(reader.line_no) +
                               ": duplicate cohort row");
        table.cohorts[cell] = count;
    }
    return table;
}

InflowSeries parse_inflow_csv(const std::filesystem::path& path) {
    InflowSeries series;
    CsvReader reader(path, 4);
    std::vector<std::string> c;
    while (reader.next(c, 4)) {
        set_country(series.country, c[0], path, reader.line_no);
        const int year = parse_year(path, reader.line_no, c[1]);
        const double count = parse_count(path, reader.line_no, c[3]);
        std::map<int, double>* target = nullptr;
        if (c[2] == "GRAD")
            target = &series.graduates;
        else if (c[2] == "MIGR")
            target = &series.migrants;
        else
            schema_error(path, reader.line_no, "unknown source '" + c[2] + "'");
        if (target->count(year))
            throw HwfError("DuplicateKey",
                           path.filename().string() + ":" +
                               std::to_string(reader.line_no) +
                               ": duplicate inflow row");
        (*target)[year] = count;
    }
    return series;
}

std::vector<PopulationProjection> parse_population_csv(
    const std::filesystem::path& path) {
    std::map<std::string, PopulationProjection> by_scenario;
    CsvReader reader(path, 4);
    std::vector<std::string> c;
    std::string country;
    while (reader.next(c, 4)) {
        set_country(country, c[0], path, reader.line_no);
        const int year = parse_year(path, reader.line_no, c[2]);
        const double pop = parse_count(path, reader.line_no, c[3]);
        auto& proj = by_scenario[c[1]];
        proj.country = country;
        proj.scenario = c[1];
        if (proj.values.count(year))
            throw HwfError("DuplicateKey",
                           path.filename().string() + ":" +
                               std::to_string(reader.line_no) +
                               ": duplicate population row");
        proj.values[year] = pop;
    }
    std::vector<PopulationProjection> out;
    for (auto& [name, proj] : by_scenario) out.push_back(std::move(proj));
    return out;
}

SectorSplit parse_sector_split(const std::filesystem::path& path) {
    SectorSplit split;
    std::map<int, std::map<std::pair<Sector, Profession>, double>> counts;
    CsvReader reader(path, 5);
    std::vector<std::string> c;
    while (reader.next(c, 5)) {
        set_country(split.country, c[0], path, reader.line_no);
        const int year = parse_year(path, reader.line_no, c[1]);
        Profession prof;
        Sector sector;
        try {
            prof = parse_profession(c[2]);
            sector = parse_sector(c[3]);
        } catch (const HwfError& e) {
            schema_error(path, reader.line_no, e.what());
        }
        auto key = std::make_pair(sector, prof);
        if (counts[year].count(key))
            throw HwfError("DuplicateKey",
                           path.filename().string() + ":" +
                               std::to_string(reader.line_no) +
                               ": duplicate sector split row");
        counts[year][key] = parse_count(path, reader.line_no, c[4]);
    }
    if (counts.size() != 2)
        throw HwfError("AnchorYearMissing",
                       path.filename().string() + ": expected exactly two "
                       "anchor years, found " + std::to_string(counts.size()));

    auto it = counts.begin();
    split.year_a = it->first;
    split.year_b = std::next(it)->first;

    // Normalize counts to shares per profession and anchor year.
    for (auto* pair : {&split.shares_a, &split.shares_b}) {
        const auto& year_counts = (pair == &split.shares_a)
                                      ? counts[split.year_a]
                                      : counts[split.year_b];
        for (auto prof : {Profession::GP, Profession::Specialist}) {
            double total = 0.0;
            for (const auto& [key, v] : year_counts)
                if (key.second == prof) total += v;
            if (total <= 0.0)
                throw HwfError("ShareSumViolation",
                               "no sector counts for " + to_string(prof));
            for (const auto& [key, v] : year_counts)
                if (key.second == prof) (*pair)[key] = v / total;
        }
    }
    return split;
}

Dataset parse_canonical(const DatasetPaths& paths) {
    Dataset dataset;
    dataset.stocks = parse_stocks_csv(paths.stocks);
    dataset.inflow = parse_inflow_csv(paths.inflow);
    dataset.projections = parse_population_csv(paths.population);
    if (std::filesystem::exists(paths.sector_split))
        dataset.sector_split = parse_sector_split(paths.sector_split);
    auto violations = validate_dataset(dataset);
    if (!violations.empty()) throw ValidationFailed(std::move(violations));
    return dataset;
}

namespace {

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

void write_canonical(const Dataset& dataset, const DatasetPaths& paths) {
    {
        std::ofstream out(paths.stocks);
        out << "country,year,field,sector,sex,age_group,count,flags\n";
        auto flag_text = [&](int year) {
            auto it = dataset.stocks.flags.find(year);
            if (it == dataset.stocks.flags.end()) return std::string{};
            std::string s;
            for (const auto& f : it->second) s += (s.empty() ? "" : ";") + f;
            return s;
        };
        // Flags are per year; attach them to the first row written for a year.
        std::set<int> flagged;
        auto emit_flags = [&](int year) {
            if (flagged.insert(year).second) return flag_text(year);
            return std::string{};
        };
        for (const auto& [cell, count] : dataset.stocks.cohorts)
            out << dataset.stocks.country << ',' << cell.year << ','
                << to_string(cell.field.profession) << ','
                << (cell.field.sector ? to_string(*cell.field.sector) : "")
                << ',' << to_string(cell.sex) << ','
                << format_age_group(cell.group) << ',' << num(count) << ','
                << emit_flags(cell.year) << '\n';
        for (const auto& [key, count] : dataset.stocks.totals)
            out << dataset.stocks.country << ',' << key.second << ','
                << to_string(key.first.profession) << ','
                << (key.first.sector ? to_string(*key.first.sector) : "")
                << ",,," << num(count) << ',' << emit_flags(key.second) << '\n';
    }
    {
        std::ofstream out(paths.inflow);
        out << "country,year,source,count\n";
        for (const auto& [year, c] : dataset.inflow.graduates)
            out << dataset.inflow.country << ',' << year << ",GRAD,"
                << num(c) << '\n';
        for (const auto& [year, c] : dataset.inflow.migrants)
            out << dataset.inflow.country << ',' << year << ",MIGR,"
                << num(c) << '\n';
    }
    {
        std::ofstream out(paths.population);
        out << "country,scenario,year,population\n";
        for (const auto& proj : dataset.projections)
            for (const auto& [year, pop] : proj.values)
                out << proj.country << ',' << proj.scenario << ',' << year
                    << ',' << num(pop) << '\n';
    }
    if (dataset.sector_split) {
        const auto& s = *dataset.sector_split;
        std::ofstream out(paths.sector_split);
        out << "country,year,profession,sector,count\n";
        for (const auto& [key, share] : s.shares_a)
            out << s.country << ',' << s.year_a << ','
                << to_string(key.second) << ',' << to_string(key.first) << ','
                << num(share) << '\n';
        for (const auto& [key, share] : s.shares_b)
            out << s.country << ',' << s.year_b << ','
                << to_string(key.second) << ',' << to_string(key.first) << ','
                << num(share) << '\n';
    }
}

namespace {

template <typename Map>
bool maps_close(const Map& a, const Map& b, double tol) {
    if (a.size() != b.size()) return false;
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return false;
        if (std::abs(ia->second - ib->second) >
            tol * std::max(1.0, std::abs(ib->second)))
            return false;
    }
    return true;
}

}  // namespace

bool bundles_equal(const Dataset& a, const Dataset& b, double tol) {
    if (a.stocks.country != b.stocks.country) return false;
    if (!maps_close(a.stocks.cohorts, b.stocks.cohorts, tol)) return false;
    if (!maps_close(a.stocks.totals, b.stocks.totals, tol)) return false;
    if (a.stocks.flags != b.stocks.flags) return false;
    if (!maps_close(a.inflow.graduates, b.inflow.graduates, tol)) return false;
    if (!maps_close(a.inflow.migrants, b.inflow.migrants, tol)) return false;
    if (a.projections.size() != b.projections.size()) return false;
    for (std::size_t i = 0; i < a.projections.size(); ++i) {
        if (a.projections[i].scenario != b.projections[i].scenario) return false;
        if (!maps_close(a.projections[i].values, b.projections[i].values, tol))
            return false;
    }
    if (a.sector_split.has_value() != b.sector_split.has_value()) return false;
    if (a.sector_split) {
        if (a.sector_split->year_a != b.sector_split->year_a ||
            a.sector_split->year_b != b.sector_split->year_b)
            return false;
        if (!maps_close(a.sector_split->shares_a, b.sector_split->shares_a, tol))
            return false;
        if (!maps_close(a.sector_split->shares_b, b.sector_split->shares_b, tol))
            return false;
    }
    return true;
}

int select_calibration_year(const StockTable& stocks) {
    const auto years = stocks.years();
    if (years.empty()) throw HwfError("NoValidCalibrationYear", "empty table");
    const int last = years.back();
    const auto fields = stocks.fields();
    for (int y : years) {
        bool all_fields = true;
        for (const auto& f : fields) {
            try {
                stocks.field_total(f, y);
            } catch (const HwfError&) {
                all_fields = false;
                break;
            }
        }
        if (!all_fields) continue;
        bool clean = true;
        for (int t = y; t <= last; ++t)
            if (stocks.has_break(t)) {
                clean = false;
                break;
            }
        if (clean) return y;
    }
    throw HwfError("NoValidCalibrationYear",
                   "every candidate window contains a break in series");
}

}  // namespace hwf
