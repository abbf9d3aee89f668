#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hwf {

enum class Profession { GP, Specialist };
enum class Sector { Contracted, Employed, NonContracted };
enum class Sex { Male, Female };

std::string to_string(Profession p);
std::string to_string(Sector s);
std::string to_string(Sex s);
Profession parse_profession(const std::string& s);
Sector parse_sector(const std::string& s);
Sex parse_sex(const std::string& s);

/// A model compartment: profession in the minimal model, (sector, profession)
/// in the extended model. The sector is absent for all fields or present for
/// all fields within one dataset.
struct FieldId {
    Profession profession;
    std::optional<Sector> sector;

    auto operator<=>(const FieldId&) const = default;

    /// Short label used in file names and CSV columns, e.g. "GP" or "CON_GP".
    std::string label() const;
};

/// Half-open integer age range [lo, hi). Open-ended source groups are bounded
/// on parse: "<25" becomes [20,25), "75+" becomes [75,80).
struct AgeGroup {
    int lo = 0;
    int hi = 0;

    auto operator<=>(const AgeGroup&) const = default;

    int width() const { return hi - lo; }
    bool contains(int age) const { return age >= lo && age < hi; }
    double midpoint() const { return (lo + (hi - 1)) / 2.0; }
};

struct CohortCell {
    FieldId field;
    Sex sex;
    AgeGroup group;
    int year;

    auto operator<=>(const CohortCell&) const = default;
};

/// Observed physician counts by field, sex, age group and year. Field totals
/// are derived from cohort rows whenever cohort detail exists; an explicit
/// all-sex/all-age row is kept only for countries without that detail.
struct StockTable {
    std::string country;
    std::map<CohortCell, double> cohorts;
    std::map<std::pair<FieldId, int>, double> totals;
    std::map<int, std::set<std::string>> flags;

    std::vector<FieldId> fields() const;
    std::vector<int> years() const;
    bool has_cohorts(const FieldId& field, int year) const;
    bool has_break(int year) const;

    /// Sum over sex and age if cohort rows exist, else the stored total.
    /// Throws if neither is present.
    double field_total(const FieldId& field, int year) const;

    /// Sum over all fields; requires every field present at the year.
    double total(int year) const;
};

/// Yearly graduate and migrant counts plus the entrant decomposition.
/// The sex shares are filled in from the observed stocks (see demography);
/// an empty map means "not yet computed".
struct InflowSeries {
    std::string country;
    std::map<int, double> graduates;
    std::map<int, double> migrants;
    std::map<Sex, double> entrant_sex_share;
    AgeGroup entry_ages{25, 35};

    double total(int year) const;
    std::vector<int> years() const;
};

struct PopulationProjection {
    std::string country;
    std::string scenario;
    std::map<int, double> values;
};

/// Sector head counts or shares at two anchor years, per profession.
struct SectorSplit {
    std::string country;
    int year_a = 0;
    int year_b = 0;
    std::map<std::pair<Sector, Profession>, double> shares_a;
    std::map<std::pair<Sector, Profession>, double> shares_b;
};

/// Entry probability plus field-choice distribution. In the minimal model
/// field_choice is {GP: p_gp, SP: 1 - p_gp}; in the extended model it holds
/// the six entries of the sector-by-profession matrix.
struct Params {
    double p_enter = 0.0;
    std::map<FieldId, double> field_choice;

    double choice_sum() const;
};

/// Net exit probability per (sex, age-year), field-independent, constant over
/// the forecast window.
struct ExitRates {
    std::map<std::pair<Sex, int>, double> gamma;

    std::optional<double> at(Sex s, int age) const;
};

/// Simulated stocks for one year, dense over [min_age, max_age] per field and
/// sex. Real-valued: the dynamics are the deterministic expected-value form of
/// the yearly protocol.
struct ModelState {
    int year = 0;
    std::vector<FieldId> fields;
    int min_age = 20;
    int max_age = 79;
    std::vector<double> stocks;

    ModelState() = default;
    ModelState(int year, std::vector<FieldId> fields, int min_age, int max_age);

    int ages() const { return max_age - min_age + 1; }
    std::size_t index(std::size_t field, Sex sex, int age) const;
    double& at(std::size_t field, Sex sex, int age);
    double at(std::size_t field, Sex sex, int age) const;
    double field_total(std::size_t field) const;
    double total() const;
};

struct Dataset {
    StockTable stocks;
    InflowSeries inflow;
    std::vector<PopulationProjection> projections;
    std::optional<SectorSplit> sector_split;
};

struct Violation {
    std::string code;
    std::string message;
};

struct HwfError : std::runtime_error {
    std::string code;
    HwfError(std::string code_, const std::string& message)
        : std::runtime_error(message), code(std::move(code_)) {}
};

struct ValidationFailed : HwfError {
    std::vector<Violation> violations;
    explicit ValidationFailed(std::vector<Violation> v);
};

/// Checks every dataset invariant and returns the complete list of violations
/// (no fail-fast). An empty list means the dataset is valid.
std::vector<Violation> validate_dataset(const Dataset& dataset);

/// Params invariant check: p_enter in [0,1], all choices in [0,1], sum 1
/// within 1e-9. Violations carry the offending sum.
std::vector<Violation> validate_params(const Params& params);

}  // namespace hwf
