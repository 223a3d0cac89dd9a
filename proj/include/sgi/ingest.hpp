#pragma once

#include "sgi/csv.hpp"
#include "sgi/errors.hpp"
#include "sgi/model.hpp"
#include "sgi/smam.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sgi {

/// Lower/upper plausibility bounds on females per male; outside them only a warning is raised.
inline constexpr double PLAUSIBLE_SEX_RATIO_MIN = 0.5;
inline constexpr double PLAUSIBLE_SEX_RATIO_MAX = 1.5;

struct BundlePaths {
    BundlePaths() = default;
    BundlePaths(std::string regions_path, std::optional<std::string> marital_path = {},
                std::optional<std::string> sources_path = {})
        : regions{std::move(regions_path)}, marital{std::move(marital_path)},
          sources{std::move(sources_path)} {}

    std::string regions;
    std::optional<std::string> marital;
    std::optional<std::string> sources;
};

struct LoadOptions {
    double smam_upper_limit = DEFAULT_SMAM_UPPER_LIMIT;
};

struct Warning {
    std::string file;
    std::size_t line;
    std::string column;
    std::string message;

    std::string str() const {
        return file + ":" + std::to_string(line) + (column.empty() ? "" : " [" + column + "]") +
               ": " + message;
    }
};

/// One row of regions.csv after validation. Marriage ages may still need SMAM estimation.
struct RegionRecord {
    std::string region_id;
    std::string name;
    SexRatioAtBirth sex_ratio;
    FertilityInputs fertility;
    bool u5mr_is_proxy;
    std::optional<std::int64_t> male_pop_15_54;
    std::optional<double> male_age;
    std::optional<double> female_age;
    std::optional<double> birth_interval;
    std::size_t line;
};

struct MaritalTables {
    std::optional<MaritalStatusTable> male;
    std::optional<MaritalStatusTable> female;
};

struct DatasetBundle {
    std::vector<RegionRecord> regions;
    std::map<std::string, MaritalTables> marital_tables;
    /// field -> where its values came from
    std::map<std::string, std::string> provenance;
    /// field -> period the values refer to
    std::map<std::string, std::string> vintage;
    std::vector<Warning> warnings;

    const RegionRecord &region(const std::string &region_id) const {
        for (const auto &r : regions) {
            if (r.region_id == region_id) {
                return r;
            }
        }
        throw missing_data_error{"unknown region '" + region_id + "'"};
    }

    const MaritalTables *tables(const std::string &region_id) const {
        const auto it = marital_tables.find(region_id);
        return it == marital_tables.end() ? nullptr : &it->second;
    }
};

namespace detail {

class CellReader {
  public:
    CellReader(const csv::Table &table, const csv::Record &record)
        : table_{table}, record_{record} {}

    const std::string &text(std::size_t column) const { return record_.fields[column]; }

    bool blank(std::size_t column) const { return record_.fields[column].empty(); }

    double real(std::size_t column) const {
        if (auto v = csv::to_double(text(column))) {
            return *v;
        }
        fail(column, "not a number: '" + text(column) + "'");
    }

    std::optional<double> optional_real(std::optional<std::size_t> column) const {
        if (!column || blank(*column)) {
            return std::nullopt;
        }
        return real(*column);
    }

    std::int64_t count(std::size_t column) const {
        auto v = csv::to_int(text(column));
        if (!v) {
            fail(column, "not an integer count: '" + text(column) + "'");
        }
        if (*v < 0) {
            fail(column, "count must be non-negative");
        }
        return *v;
    }

    bool boolean(std::size_t column) const {
        const auto &t = text(column);
        if (t.empty() || t == "false" || t == "FALSE" || t == "False") {
            return false;
        }
        if (t == "true" || t == "TRUE" || t == "True") {
            return true;
        }
        fail(column, "expected true or false, got '" + t + "'");
    }

    [[noreturn]] void fail(std::size_t column, const std::string &message) const {
        throw validation_error{table_.source(), record_.line, table_.header()[column], message};
    }

    [[noreturn]] void fail(const std::string &column, const std::string &message) const {
        throw validation_error{table_.source(), record_.line, column, message};
    }

  private:
    const csv::Table &table_;
    const csv::Record &record_;
};

inline const std::vector<std::string> &region_columns() {
    static const std::vector<std::string> columns{
        "region_id", "name",           "srb_value",      "srb_convention",
        "tfr",       "u5mr",           "u5mr_units",     "u5mr_is_proxy",
        "male_pop_15_54", "a_m",       "a_f",            "alpha",
    };
    return columns;
}

inline void warn_unknown_columns(const csv::Table &table, const std::set<std::string> &known,
                                 std::vector<Warning> &warnings) {
    for (const auto &name : table.header()) {
        if (!known.contains(name)) {
            warnings.push_back({table.source(), 1, name, "unrecognised column ignored"});
        }
    }
}

inline std::vector<RegionRecord> load_regions(const std::string &path, DatasetBundle &bundle) {
    const auto table = csv::read_file(path);
    std::set<std::string> known{region_columns().begin(), region_columns().end()};
    known.insert("imr");
    warn_unknown_columns(table, known, bundle.warnings);

    const auto c_id = table.require_column("region_id");
    const auto c_name = table.require_column("name");
    const auto c_srb = table.require_column("srb_value");
    const auto c_conv = table.require_column("srb_convention");
    const auto c_tfr = table.require_column("tfr");
    const auto c_u5mr = table.require_column("u5mr");
    const auto c_units = table.require_column("u5mr_units");
    const auto c_proxy = table.require_column("u5mr_is_proxy");
    const auto c_pop = table.require_column("male_pop_15_54");
    const auto c_am = table.column("a_m");
    const auto c_af = table.column("a_f");
    const auto c_alpha = table.column("alpha");
    const auto c_imr = table.column("imr");

    std::vector<RegionRecord> out;
    std::set<std::string> seen;
    for (const auto &record : table.records()) {
        const CellReader cell{table, record};
        const auto &id = cell.text(c_id);
        if (id.empty()) {
            cell.fail(c_id, "region_id is blank");
        }
        if (!seen.insert(id).second) {
            cell.fail(c_id, "duplicate region '" + id + "'");
        }

        const auto convention = parse_sex_ratio_convention(cell.text(c_conv));
        if (!convention) {
            cell.fail(c_conv, "unknown convention '" + cell.text(c_conv) +
                                  "' (females_per_male, females_per_1000_males, "
                                  "males_per_100_females)");
        }
        const double srb_raw = cell.real(c_srb);
        if (srb_raw <= 0.0) {
            cell.fail(c_srb, "sex ratio must be positive");
        }
        const auto sex_ratio = canonicalize_sex_ratio(srb_raw, *convention);
        if (sex_ratio.females_per_male() < PLAUSIBLE_SEX_RATIO_MIN ||
            sex_ratio.females_per_male() > PLAUSIBLE_SEX_RATIO_MAX) {
            bundle.warnings.push_back(
                {table.source(), record.line, "srb_value",
                 "females per male " + csv::format_double(sex_ratio.females_per_male()) +
                     " outside plausible range [0.5, 1.5]"});
        }

        MortalityUnits units = MortalityUnits::proportion;
        if (cell.text(c_units) == "per_1000") {
            units = MortalityUnits::per_1000;
        } else if (cell.text(c_units) != "proportion") {
            cell.fail(c_units, "expected proportion or per_1000, got '" + cell.text(c_units) + "'");
        }

        bool proxy = cell.boolean(c_proxy);
        double mortality = 0.0;
        std::string mortality_column = "u5mr";
        if (!cell.blank(c_u5mr)) {
            mortality = cell.real(c_u5mr);
        } else if (c_imr && !cell.blank(*c_imr)) {
            mortality = cell.real(*c_imr);
            mortality_column = "imr";
            if (!proxy) {
                bundle.warnings.push_back({table.source(), record.line, "u5mr_is_proxy",
                                           "infant mortality substituted for missing under-five "
                                           "mortality; proxy flag set"});
            }
            proxy = true;
        } else {
            cell.fail(c_u5mr, "under-five mortality missing and no infant mortality proxy given");
        }

        const double tfr = cell.real(c_tfr);
        auto fertility = [&] {
            try {
                return FertilityInputs{tfr, mortality, units};
            } catch (const invalid_input_error &e) {
                cell.fail(e.field() == "tfr" ? "tfr" : mortality_column, e.what());
            }
        }();

        std::optional<std::int64_t> pop;
        if (!cell.blank(c_pop)) {
            pop = cell.count(c_pop);
        }

        RegionRecord region{
            .region_id = id,
            .name = cell.text(c_name),
            .sex_ratio = sex_ratio,
            .fertility = fertility,
            .u5mr_is_proxy = proxy,
            .male_pop_15_54 = pop,
            .male_age = cell.optional_real(c_am),
            .female_age = cell.optional_real(c_af),
            .birth_interval = cell.optional_real(c_alpha),
            .line = record.line,
        };
        if (region.male_age && *region.male_age <= 0.0) {
            cell.fail("a_m", "age at marriage must be positive");
        }
        if (region.female_age && *region.female_age <= 0.0) {
            cell.fail("a_f", "age at marriage must be positive");
        }
        if (region.birth_interval && *region.birth_interval < 0.0) {
            cell.fail("alpha", "birth interval must be non-negative");
        }
        out.push_back(std::move(region));
    }
    return out;
}

/// Parses marital.csv into per-region tables. When `known_ids` is given, rows for other
/// regions are rejected.
inline std::map<std::string, MaritalTables>
load_marital(const std::string &path, const LoadOptions &options,
             const std::set<std::string> *known_ids, std::vector<Warning> &warnings) {
    const auto table = csv::read_file(path);
    warn_unknown_columns(table,
                         {"region_id", "sex", "age_lower", "age_upper", "total", "never_married"},
                         warnings);
    const auto c_id = table.require_column("region_id");
    const auto c_sex = table.require_column("sex");
    const auto c_lo = table.require_column("age_lower");
    const auto c_hi = table.require_column("age_upper");
    const auto c_total = table.require_column("total");
    const auto c_never = table.require_column("never_married");

    struct Pending {
        std::size_t first_line;
        std::vector<std::pair<std::size_t, MaritalRow>> rows;
    };
    std::map<std::pair<std::string, Sex>, Pending> grouped;

    for (const auto &record : table.records()) {
        const CellReader cell{table, record};
        const auto &id = cell.text(c_id);
        if (id.empty()) {
            cell.fail(c_id, "region_id is blank");
        }
        if (known_ids && !known_ids->contains(id)) {
            cell.fail(c_id, "region '" + id + "' is not listed in the regions file");
        }
        const auto sex = parse_sex(cell.text(c_sex));
        if (!sex) {
            cell.fail(c_sex, "expected male or female, got '" + cell.text(c_sex) + "'");
        }
        const double lo = cell.real(c_lo);
        const double hi = cell.real(c_hi);
        if (!(hi > lo) || lo < 0.0) {
            cell.fail(c_hi, "age_upper must exceed a non-negative age_lower");
        }
        const auto total = cell.count(c_total);
        const auto never = cell.count(c_never);
        if (never > total) {
            cell.fail(c_never, "never_married (" + std::to_string(never) + ") exceeds total (" +
                                   std::to_string(total) + ")");
        }
        auto &pending = grouped[{id, *sex}];
        if (pending.rows.empty()) {
            pending.first_line = record.line;
        }
        pending.rows.push_back({record.line, MaritalRow{{lo, hi}, total, never}});
    }

    std::map<std::string, MaritalTables> tables;
    for (auto &[key, pending] : grouped) {
        auto &rows = pending.rows;
        std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) {
            return a.second.group.lower < b.second.group.lower;
        });
        std::vector<MaritalRow> ordered;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].second.group.lower < rows[i - 1].second.group.upper) {
                throw validation_error{path, rows[i].first, "age_lower",
                                       "age group overlaps line " +
                                           std::to_string(rows[i - 1].first)};
            }
            ordered.push_back(rows[i].second);
        }
        try {
            MaritalStatusTable built{key.second, std::move(ordered), options.smam_upper_limit};
            auto &slot = tables[key.first];
            (key.second == Sex::male ? slot.male : slot.female) = std::move(built);
        } catch (const error &e) {
            throw validation_error{path, pending.first_line, "",
                                   "region '" + key.first + "' " +
                                       std::string{to_string(key.second)} + ": " + e.what()};
        }
    }
    return tables;
}

inline void load_sources(const std::string &path, DatasetBundle &bundle) {
    const auto table = csv::read_file(path);
    const auto c_field = table.require_column("field");
    const auto c_source = table.require_column("source");
    const auto c_vintage = table.column("vintage");
    for (const auto &record : table.records()) {
        const auto &field = record.fields[c_field];
        if (field.empty()) {
            throw validation_error{path, record.line, "field", "field name is blank"};
        }
        bundle.provenance[field] = record.fields[c_source];
        if (c_vintage && !record.fields[*c_vintage].empty()) {
            bundle.vintage[field] = record.fields[*c_vintage];
        }
    }
}

} // namespace detail

/// Reads and validates regions, optional marital-status tables and optional source notes.
inline DatasetBundle load_bundle(const BundlePaths &paths, const LoadOptions &options = {}) {
    DatasetBundle bundle;
    bundle.regions = detail::load_regions(paths.regions, bundle);
    for (const auto &column : detail::region_columns()) {
        if (column != "region_id" && column != "name") {
            bundle.provenance[column] = paths.regions + ":" + column;
        }
    }
    if (paths.marital) {
        std::set<std::string> ids;
        for (const auto &r : bundle.regions) {
            ids.insert(r.region_id);
        }
        bundle.marital_tables = detail::load_marital(*paths.marital, options, &ids, bundle.warnings);
        bundle.provenance["marital"] = *paths.marital;
    }
    if (paths.sources) {
        detail::load_sources(*paths.sources, bundle);
    }

    for (const auto &region : bundle.regions) {
        const auto *tables = bundle.tables(region.region_id);
        if (!region.male_age && !(tables && tables->male)) {
            throw validation_error{paths.regions, region.line, "a_m",
                                   "no male age at marriage and no male marital table for '" +
                                       region.region_id + "'"};
        }
        if (!region.female_age && !(tables && tables->female)) {
            throw validation_error{paths.regions, region.line, "a_f",
                                   "no female age at marriage and no female marital table for '" +
                                       region.region_id + "'"};
        }
    }
    return bundle;
}

/// Marital-status tables keyed by region, without a regions file.
inline std::map<std::string, MaritalTables> load_marital_tables(const std::string &path,
                                                                const LoadOptions &options = {}) {
    std::vector<Warning> ignored;
    return detail::load_marital(path, options, nullptr, ignored);
}

struct TimingResolution {
    MarriageTiming timing;
    std::string male_age_source;
    std::string female_age_source;
    std::string birth_interval_source;
};

inline TimingResolution resolve_timing_detailed(const DatasetBundle &bundle,
                                                const std::string &region_id,
                                                std::optional<double> alpha_override = {}) {
    const auto &region = bundle.region(region_id);
    const auto *tables = bundle.tables(region_id);

    auto age_for = [&](Sex sex, const std::optional<double> &supplied,
                       std::string &source) -> double {
        if (supplied) {
            source = "supplied";
            return *supplied;
        }
        const auto *table = tables ? (sex == Sex::male ? &tables->male : &tables->female) : nullptr;
        if (!table || !*table) {
            throw missing_data_error{"region '" + region_id + "' has no " +
                                     std::string{to_string(sex)} +
                                     " age at marriage and no marital table"};
        }
        source = "smam";
        return compute_smam(**table);
    };

    std::string male_source;
    std::string female_source;
    const double male = age_for(Sex::male, region.male_age, male_source);
    const double female = age_for(Sex::female, region.female_age, female_source);

    double alpha = DEFAULT_BIRTH_INTERVAL;
    std::string alpha_source = "default";
    if (alpha_override) {
        alpha = *alpha_override;
        alpha_source = "override";
    } else if (region.birth_interval) {
        alpha = *region.birth_interval;
        alpha_source = "supplied";
    }
    return TimingResolution{MarriageTiming{male, female, alpha}, std::move(male_source),
                            std::move(female_source), std::move(alpha_source)};
}

/// Marriage ages and birth interval for a region: supplied ages win over SMAM estimates;
/// the interval comes from the override, then the region row, then the 2-year default.
inline MarriageTiming resolve_timing(const DatasetBundle &bundle, const std::string &region_id,
                                     std::optional<double> alpha_override = {}) {
    return resolve_timing_detailed(bundle, region_id, alpha_override).timing;
}

inline RegionInputs resolve_region(const DatasetBundle &bundle, const std::string &region_id,
                                   std::optional<double> alpha_override = {}) {
    const auto &record = bundle.region(region_id);
    return RegionInputs{
        .region_id = record.region_id,
        .name = record.name,
        .sex_ratio = record.sex_ratio,
        .fertility = record.fertility,
        .timing = resolve_timing(bundle, region_id, alpha_override),
        .male_pop_15_54 = record.male_pop_15_54,
        .u5mr_is_proxy = record.u5mr_is_proxy,
    };
}

inline nlohmann::json to_json(const MaritalStatusTable &table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : table.rows()) {
        rows.push_back({{"age_lower", row.group.lower},
                        {"age_upper", row.group.upper},
                        {"total", row.total},
                        {"never_married", row.never_married}});
    }
    return {{"sex", to_string(table.sex())}, {"upper_limit", table.upper_limit()}, {"rows", rows}};
}

/// Canonical serialization of a bundle; identical inputs give identical text.
inline nlohmann::json to_json(const DatasetBundle &bundle) {
    nlohmann::json regions = nlohmann::json::array();
    for (const auto &r : bundle.regions) {
        auto optional = [](const auto &v) -> nlohmann::json {
            return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        };
        regions.push_back({
            {"region_id", r.region_id},
            {"name", r.name},
            {"females_per_male", r.sex_ratio.females_per_male()},
            {"tfr", r.fertility.tfr()},
            {"u5mr", r.fertility.u5mr()},
            {"u5mr_is_proxy", r.u5mr_is_proxy},
            {"male_pop_15_54", optional(r.male_pop_15_54)},
            {"a_m", optional(r.male_age)},
            {"a_f", optional(r.female_age)},
            {"alpha", optional(r.birth_interval)},
        });
    }
    nlohmann::json tables = nlohmann::json::object();
    for (const auto &[id, t] : bundle.marital_tables) {
        tables[id] = {{"male", t.male ? to_json(*t.male) : nlohmann::json(nullptr)},
                      {"female", t.female ? to_json(*t.female) : nlohmann::json(nullptr)}};
    }
    nlohmann::json warnings = nlohmann::json::array();
    for (const auto &w : bundle.warnings) {
        warnings.push_back(w.str());
    }
    return {{"regions", regions},
            {"marital_tables", tables},
            {"provenance", bundle.provenance},
            {"vintage", bundle.vintage},
            {"warnings", warnings}};
}

} // namespace sgi
