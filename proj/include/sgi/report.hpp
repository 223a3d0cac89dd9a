#pragma once

#include "sgi/csv.hpp"
#include "sgi/density.hpp"
#include "sgi/errors.hpp"
#include "sgi/index.hpp"
#include "sgi/ingest.hpp"
#include "sgi/model.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgi {

enum class ShareConvention { paper, ratio, both };

inline std::string_view to_string(ShareConvention c) noexcept {
    switch (c) {
    case ShareConvention::paper:
        return "paper";
    case ShareConvention::ratio:
        return "ratio";
    case ShareConvention::both:
        return "both";
    }
    return "both";
}

struct RunOptions {
    std::optional<double> alpha;
    std::optional<double> omega;
    ShareConvention share_convention = ShareConvention::both;
    double balance_tolerance = DEFAULT_BALANCE_TOLERANCE;
    std::optional<double> bandwidth;
};

struct RegionReport {
    RegionInputs inputs;
    TimingResolution timing_sources;
    SgiResult result;
};

struct RegionFailure {
    std::string region_id;
    std::string message;
};

struct SurplusTotals {
    std::int64_t male_pop_15_54 = 0;
    std::int64_t surplus_men_paper = 0;
    std::int64_t surplus_men_ratio = 0;
    std::size_t regions_counted = 0;
};

struct NationalAggregate {
    RegionInputs inputs;
    SgiResult result;
    std::string weighting;
};

struct RunReport {
    std::vector<RegionReport> per_region; ///< descending by sgi
    std::optional<NationalAggregate> national;
    std::optional<double> mean_of_regions;
    SurplusTotals totals;
    std::optional<DensityCurve> density;
    nlohmann::json config_echo;
    std::vector<RegionFailure> failures;
    std::vector<Warning> warnings;
    std::map<std::string, std::string> provenance;
    std::map<std::string, std::string> vintage;
};

inline LoadOptions load_options(const RunOptions &options) {
    LoadOptions load;
    if (options.omega) {
        load.smam_upper_limit = *options.omega;
    }
    return load;
}

inline nlohmann::json config_echo(const RunOptions &options) {
    return {
        {"alpha_override", options.alpha ? nlohmann::json(*options.alpha) : nlohmann::json(nullptr)},
        {"alpha_default", DEFAULT_BIRTH_INTERVAL},
        {"smam_upper_limit", options.omega.value_or(DEFAULT_SMAM_UPPER_LIMIT)},
        {"smam_start_age", SMAM_START_AGE},
        {"share_convention", to_string(options.share_convention)},
        {"balance_tolerance", options.balance_tolerance},
        {"bandwidth", options.bandwidth ? nlohmann::json(*options.bandwidth)
                                        : nlohmann::json("silverman")},
        {"density_grid_points", DENSITY_GRID_POINTS},
    };
}

/// Inputs for the whole set of regions as weighted means of the regional inputs.
///
/// Weights are male_pop_15_54 when every region supplies it, equal weights otherwise.
inline std::pair<RegionInputs, std::string>
aggregate_inputs(const std::vector<RegionReport> &regions) {
    if (regions.empty()) {
        throw insufficient_data_error{"no regions to aggregate"};
    }
    bool weighted = true;
    std::int64_t pop = 0;
    for (const auto &r : regions) {
        weighted = weighted && r.inputs.male_pop_15_54.has_value();
        pop += r.inputs.male_pop_15_54.value_or(0);
    }
    weighted = weighted && pop > 0;

    double w_sum = 0.0;
    double s = 0.0, tfr = 0.0, u5mr = 0.0, am = 0.0, af = 0.0, alpha = 0.0;
    bool proxy = false;
    for (const auto &r : regions) {
        const double w = weighted ? static_cast<double>(*r.inputs.male_pop_15_54) : 1.0;
        w_sum += w;
        s += w * r.inputs.sex_ratio.females_per_male();
        tfr += w * r.inputs.fertility.tfr();
        u5mr += w * r.inputs.fertility.u5mr();
        am += w * r.inputs.timing.male_age();
        af += w * r.inputs.timing.female_age();
        alpha += w * r.inputs.timing.birth_interval();
        proxy = proxy || r.inputs.u5mr_is_proxy;
    }
    RegionInputs national{
        .region_id = "NATIONAL",
        .name = "National (aggregated inputs)",
        .sex_ratio = SexRatioAtBirth{s / w_sum},
        .fertility = FertilityInputs{tfr / w_sum, u5mr / w_sum},
        .timing = MarriageTiming{am / w_sum, af / w_sum, alpha / w_sum},
        .male_pop_15_54 = weighted ? std::optional<std::int64_t>{pop} : std::nullopt,
        .u5mr_is_proxy = proxy,
    };
    return {national, weighted ? "male_pop_15_54" : "equal"};
}

/// Index for every region of a loaded bundle, plus national aggregate, totals and density.
inline RunReport run_compute(const DatasetBundle &bundle, const RunOptions &options = {}) {
    RunReport report;
    report.config_echo = config_echo(options);
    report.warnings = bundle.warnings;
    report.provenance = bundle.provenance;
    report.vintage = bundle.vintage;

    for (const auto &record : bundle.regions) {
        try {
            auto sources = resolve_timing_detailed(bundle, record.region_id, options.alpha);
            RegionInputs inputs{
                .region_id = record.region_id,
                .name = record.name,
                .sex_ratio = record.sex_ratio,
                .fertility = record.fertility,
                .timing = sources.timing,
                .male_pop_15_54 = record.male_pop_15_54,
                .u5mr_is_proxy = record.u5mr_is_proxy,
            };
            auto result = compute_sgi(inputs, options.balance_tolerance);
            if (inputs.male_pop_15_54) {
                result.surplus_men = surplus_men(result, *inputs.male_pop_15_54);
            }
            report.per_region.push_back({std::move(inputs), std::move(sources), result});
        } catch (const error &e) {
            report.failures.push_back({record.region_id, e.what()});
        }
    }

    std::stable_sort(report.per_region.begin(), report.per_region.end(),
                     [](const RegionReport &a, const RegionReport &b) {
                         if (a.result.sgi != b.result.sgi) {
                             return a.result.sgi > b.result.sgi;
                         }
                         return a.inputs.region_id < b.inputs.region_id;
                     });

    for (const auto &r : report.per_region) {
        if (r.result.surplus_men) {
            report.totals.male_pop_15_54 += *r.inputs.male_pop_15_54;
            report.totals.surplus_men_paper += r.result.surplus_men->paper_share;
            report.totals.surplus_men_ratio += r.result.surplus_men->ratio_share;
            ++report.totals.regions_counted;
        }
    }

    if (!report.per_region.empty()) {
        auto [inputs, weighting] = aggregate_inputs(report.per_region);
        auto result = compute_sgi(inputs, options.balance_tolerance);
        if (inputs.male_pop_15_54) {
            result.surplus_men = surplus_men(result, *inputs.male_pop_15_54);
        }
        report.national = NationalAggregate{std::move(inputs), result, std::move(weighting)};

        double sum = 0.0;
        for (const auto &r : report.per_region) {
            sum += r.result.sgi;
        }
        report.mean_of_regions = sum / static_cast<double>(report.per_region.size());
    }

    if (report.per_region.size() >= 2) {
        std::vector<double> values;
        for (const auto &r : report.per_region) {
            values.push_back(r.result.sgi);
        }
        report.density = emit_density(values, options.bandwidth);
    }
    return report;
}

inline RunReport run_compute(const BundlePaths &paths, const RunOptions &options = {}) {
    return run_compute(load_bundle(paths, load_options(options)), options);
}

struct SensitivityRow {
    std::string region_id;
    std::string name;
    double sgi_crude;
    double sgi_effective;
    double abs_diff;
    double rel_diff;
};

/// Index with crude fertility against the index with mortality-adjusted fertility.
inline std::vector<SensitivityRow> run_sensitivity(const DatasetBundle &bundle,
                                                   const RunOptions &options,
                                                   std::vector<RegionFailure> *failures = nullptr) {
    std::vector<SensitivityRow> rows;
    for (const auto &record : bundle.regions) {
        try {
            const auto inputs = resolve_region(bundle, record.region_id, options.alpha);
            const double crude =
                compute_sgi(inputs.sex_ratio, inputs.fertility.tfr(), inputs.timing).sgi;
            const double effective = compute_sgi(inputs).sgi;
            rows.push_back({inputs.region_id, inputs.name, crude, effective, effective - crude,
                            (effective - crude) / crude});
        } catch (const error &e) {
            if (!failures) {
                throw;
            }
            failures->push_back({record.region_id, e.what()});
        }
    }
    return rows;
}

inline std::string sensitivity_csv(const std::vector<SensitivityRow> &rows) {
    csv::Writer out{{"region_id", "name", "sgi_crude", "sgi_effective", "abs_diff", "rel_diff"}};
    for (const auto &r : rows) {
        out.row({r.region_id, r.name, csv::format_double(r.sgi_crude),
                 csv::format_double(r.sgi_effective), csv::format_double(r.abs_diff),
                 csv::format_double(r.rel_diff)});
    }
    return out.str();
}

inline std::string report_csv(const RunReport &report) {
    csv::Writer out{{"region_id", "name", "sgi", "effective_fertility", "growth_rate",
                     "surplus_share_paper", "surplus_share_ratio", "surplus_men_paper",
                     "surplus_men_ratio", "u5mr_is_proxy"}};
    auto count = [](const std::optional<SurplusCounts> &c, bool paper) {
        return c ? std::to_string(paper ? c->paper_share : c->ratio_share) : std::string{};
    };
    for (const auto &r : report.per_region) {
        const auto &res = r.result;
        out.row({r.inputs.region_id, r.inputs.name, csv::format_double(res.sgi),
                 csv::format_double(res.effective_fertility),
                 csv::format_double(res.growth_rate.per_year),
                 csv::format_double(res.surplus_share_paper),
                 csv::format_double(res.surplus_share_ratio), count(res.surplus_men, true),
                 count(res.surplus_men, false), r.inputs.u5mr_is_proxy ? "true" : "false"});
    }
    return out.str();
}

/// Join-ready table for choropleth tools, keyed by region_id.
inline std::string map_csv(const RunReport &report) {
    std::vector<const RegionReport *> ordered;
    for (const auto &r : report.per_region) {
        ordered.push_back(&r);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto *a, const auto *b) { return a->inputs.region_id < b->inputs.region_id; });
    csv::Writer out{{"region_id", "name", "sgi", "balanced"}};
    for (const auto *r : ordered) {
        out.row({r->inputs.region_id, r->inputs.name, csv::format_double(r->result.sgi),
                 r->result.balanced ? "true" : "false"});
    }
    return out.str();
}

inline std::string density_csv(const DensityCurve &curve) {
    csv::Writer out{{"x", "y"}};
    for (const auto &p : curve.points) {
        out.row({csv::format_double(p.x), csv::format_double(p.y)});
    }
    return out.str();
}

inline nlohmann::json to_json(const SgiResult &r) {
    nlohmann::json j{
        {"sgi", r.sgi},
        {"effective_fertility", r.effective_fertility},
        {"growth_rate", r.growth_rate.per_year},
        {"balanced", r.balanced},
        {"surplus_share_paper", r.surplus_share_paper},
        {"surplus_share_ratio", r.surplus_share_ratio},
    };
    if (r.surplus_men) {
        j["surplus_men_paper"] = r.surplus_men->paper_share;
        j["surplus_men_ratio"] = r.surplus_men->ratio_share;
    } else {
        j["surplus_men_paper"] = nullptr;
        j["surplus_men_ratio"] = nullptr;
    }
    return j;
}

inline nlohmann::json to_json(const RegionInputs &in) {
    return {
        {"region_id", in.region_id},
        {"name", in.name},
        {"females_per_male", in.sex_ratio.females_per_male()},
        {"tfr", in.fertility.tfr()},
        {"u5mr", in.fertility.u5mr()},
        {"u5mr_is_proxy", in.u5mr_is_proxy},
        {"male_age", in.timing.male_age()},
        {"female_age", in.timing.female_age()},
        {"spousal_gap", in.timing.spousal_gap()},
        {"birth_interval", in.timing.birth_interval()},
        {"male_pop_15_54",
         in.male_pop_15_54 ? nlohmann::json(*in.male_pop_15_54) : nlohmann::json(nullptr)},
    };
}

inline nlohmann::json report_json(const RunReport &report) {
    nlohmann::json regions = nlohmann::json::array();
    for (const auto &r : report.per_region) {
        regions.push_back({
            {"inputs", to_json(r.inputs)},
            {"result", to_json(r.result)},
            {"timing_sources",
             {{"male_age", r.timing_sources.male_age_source},
              {"female_age", r.timing_sources.female_age_source},
              {"birth_interval", r.timing_sources.birth_interval_source}}},
        });
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto &f : report.failures) {
        failures.push_back({{"region_id", f.region_id}, {"message", f.message}});
    }
    nlohmann::json warnings = nlohmann::json::array();
    for (const auto &w : report.warnings) {
        warnings.push_back(w.str());
    }

    nlohmann::json j{
        {"per_region", regions},
        {"failures", failures},
        {"warnings", warnings},
        {"config_echo", report.config_echo},
        {"provenance", report.provenance},
        {"vintage", report.vintage},
        {"totals",
         {{"male_pop_15_54", report.totals.male_pop_15_54},
          {"surplus_men_paper", report.totals.surplus_men_paper},
          {"surplus_men_ratio", report.totals.surplus_men_ratio},
          {"regions_counted", report.totals.regions_counted}}},
    };
    if (report.national) {
        j["national"] = {{"inputs", to_json(report.national->inputs)},
                         {"result", to_json(report.national->result)},
                         {"weighting", report.national->weighting}};
    } else {
        j["national"] = nullptr;
    }
    j["mean_of_regions"] =
        report.mean_of_regions ? nlohmann::json(*report.mean_of_regions) : nlohmann::json(nullptr);
    if (report.density) {
        nlohmann::json points = nlohmann::json::array();
        for (const auto &p : report.density->points) {
            points.push_back({p.x, p.y});
        }
        j["density"] = {{"bandwidth", report.density->bandwidth}, {"points", points}};
    } else {
        j["density"] = nullptr;
    }
    return j;
}

} // namespace sgi
