#pragma once

#include "sgi/csv.hpp"
#include "sgi/index.hpp"
#include "sgi/model.hpp"
#include "sgi/oracle_sim.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

namespace sgi {

struct SimulationParams {
    SexRatioAtBirth sex_ratio;
    double rt_effective;
    MarriageTiming timing;
    std::size_t years = 200;
    std::size_t burn_in = 50;
    double initial_births = 1'000'000.0;
    bool integer_mode = false;
};

struct SimulationSummary {
    SgiResult closed_form;
    double cohort_ratio;          ///< stable_cohort_ratio at the last simulated year
    double cohort_ratio_rel_error;
    double renewal_residual;
    MicrosimResult microsim;
    double expected_male_share;   ///< max(0, 1 - 1/sgi)
    double expected_female_share; ///< max(0, 1 - sgi)
};

/// Generates a stable series, then compares the closed form, the cohort-ratio oracle and the
/// matching microsimulation on it.
inline SimulationSummary run_simulate(const SimulationParams &params) {
    const auto closed = compute_sgi(params.sex_ratio, params.rt_effective, params.timing);
    const auto series = generate_stable_series(params.sex_ratio, params.rt_effective,
                                               params.timing, params.years,
                                               params.initial_births);
    const int last_year = series.start_year() + static_cast<int>(series.years()) - 1;
    const double ratio = stable_cohort_ratio(series, params.timing, last_year);
    auto microsim = run_matching_microsim(series, params.timing,
                                          {.burn_in = params.burn_in,
                                           .integer_mode = params.integer_mode});
    return SimulationSummary{
        .closed_form = closed,
        .cohort_ratio = ratio,
        .cohort_ratio_rel_error = std::abs(ratio - closed.sgi) / closed.sgi,
        .renewal_residual = max_renewal_residual(series, params.rt_effective, params.timing),
        .microsim = std::move(microsim),
        .expected_male_share = std::max(0.0, 1.0 - 1.0 / closed.sgi),
        .expected_female_share = std::max(0.0, 1.0 - closed.sgi),
    };
}

inline std::string trajectory_csv(const MicrosimResult &result) {
    csv::Writer out{{"year", "male_births", "female_births", "men_at_marriage",
                     "women_at_marriage", "matches", "unmatched_men", "unmatched_women"}};
    for (const auto &y : result.trajectory) {
        out.row({std::to_string(y.year), csv::format_double(y.male_births),
                 csv::format_double(y.female_births), csv::format_double(y.men_at_marriage),
                 csv::format_double(y.women_at_marriage), csv::format_double(y.matches),
                 csv::format_double(y.unmatched_men), csv::format_double(y.unmatched_women)});
    }
    return out.str();
}

inline nlohmann::json to_json(const SimulationParams &p, const SimulationSummary &s) {
    return {
        {"parameters",
         {{"females_per_male", p.sex_ratio.females_per_male()},
          {"rt_effective", p.rt_effective},
          {"male_age", p.timing.male_age()},
          {"female_age", p.timing.female_age()},
          {"birth_interval", p.timing.birth_interval()},
          {"years", p.years},
          {"burn_in", p.burn_in},
          {"initial_births", p.initial_births},
          {"integer_mode", p.integer_mode}}},
        {"sgi", s.closed_form.sgi},
        {"growth_rate", s.closed_form.growth_rate.per_year},
        {"stable_cohort_ratio", s.cohort_ratio},
        {"cohort_ratio_rel_error", s.cohort_ratio_rel_error},
        {"renewal_residual", s.renewal_residual},
        {"microsim",
         {{"male_marriage_age", s.microsim.male_marriage_age},
          {"female_marriage_age", s.microsim.female_marriage_age},
          {"unmatched_male_share", s.microsim.unmatched_male_share},
          {"unmatched_female_share", s.microsim.unmatched_female_share},
          {"expected_male_share", s.expected_male_share},
          {"expected_female_share", s.expected_female_share}}},
    };
}

} // namespace sgi
