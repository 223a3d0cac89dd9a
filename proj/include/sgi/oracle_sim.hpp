#pragma once

// Reference models for the closed-form index. Nothing here calls into index.hpp: the growth
// rate is found by root-finding on the renewal equation and cohort ratios are read off the
// generated birth series, so agreement with compute_sgi is a genuine cross-check.

#include "sgi/errors.hpp"
#include "sgi/model.hpp"
#include "sgi/smam.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sgi {

/// Annual male and female birth cohorts, indexed from start_year.
class CohortSeries {
  public:
    CohortSeries(int start_year, std::vector<double> male_births, std::vector<double> female_births)
        : start_year_{start_year}, male_{std::move(male_births)}, female_{std::move(female_births)} {
        if (male_.size() != female_.size()) {
            throw configuration_error{"male and female birth series differ in length"};
        }
        if (male_.empty()) {
            throw configuration_error{"birth series is empty"};
        }
        for (std::size_t i = 0; i < male_.size(); ++i) {
            if (!(male_[i] > 0.0) || !(female_[i] > 0.0) || !std::isfinite(male_[i]) ||
                !std::isfinite(female_[i])) {
                throw configuration_error{"births must be positive and finite (index " +
                                          std::to_string(i) + ")"};
            }
        }
    }

    int start_year() const noexcept { return start_year_; }
    std::size_t years() const noexcept { return male_.size(); }
    const std::vector<double> &male_births() const noexcept { return male_; }
    const std::vector<double> &female_births() const noexcept { return female_; }

    const std::vector<double> &births(Sex sex) const noexcept {
        return sex == Sex::male ? male_ : female_;
    }

    /// Births at a fractional offset from start_year, interpolated log-linearly between the
    /// neighbouring annual values (exact for geometric series).
    double births_at(Sex sex, double offset) const {
        const auto &series = births(sex);
        const double last = static_cast<double>(series.size() - 1);
        if (!(offset >= 0.0) || offset > last) {
            throw range_error{"offset " + std::to_string(offset) + " outside series span [0, " +
                              std::to_string(last) + "]"};
        }
        const auto lo = static_cast<std::size_t>(std::floor(offset));
        const double frac = offset - static_cast<double>(lo);
        if (frac == 0.0 || lo + 1 >= series.size()) {
            return series[lo];
        }
        return series[lo] * std::pow(series[lo + 1] / series[lo], frac);
    }

  private:
    int start_year_;
    std::vector<double> male_;
    std::vector<double> female_;
};

/// Per-year growth rate at which the renewal identity
///   F_t = rt * S/(1+S) * F_{t - (A_f + alpha)}
/// holds for an exponential series, found by bisection.
inline double solve_renewal_growth_rate(SexRatioAtBirth s, double rt, double generation_length) {
    if (!(rt > 0.0) || !(generation_length > 0.0)) {
        throw configuration_error{"renewal needs positive fertility and generation length"};
    }
    const double net_daughters = rt * s.female_share();
    // Decreasing in n; root where a cohort of mothers exactly reproduces itself.
    auto excess = [&](double n) { return net_daughters * std::exp(-n * generation_length) - 1.0; };

    double lo = -1.0;
    double hi = 1.0;
    while (excess(lo) < 0.0) {
        lo *= 2.0;
    }
    while (excess(hi) > 0.0) {
        hi *= 2.0;
    }
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double value = excess(mid);
        if (value == 0.0) {
            return mid;
        }
        (value > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Minimum number of annual cohorts a stable series needs so every lookback exists.
inline std::size_t minimum_stable_horizon(const MarriageTiming &timing) {
    return static_cast<std::size_t>(
        std::ceil(timing.male_age() + timing.female_age() + timing.birth_interval()));
}

/// Exponentially growing birth series consistent with constant fertility and sex ratio.
inline CohortSeries generate_stable_series(SexRatioAtBirth s, double rt_effective,
                                           const MarriageTiming &timing, std::size_t years,
                                           double b0, int start_year = 0) {
    if (years < minimum_stable_horizon(timing)) {
        throw configuration_error{"horizon of " + std::to_string(years) +
                                  " years is shorter than A_m + A_f + alpha = " +
                                  std::to_string(minimum_stable_horizon(timing))};
    }
    if (!(b0 > 0.0) || !std::isfinite(b0)) {
        throw configuration_error{"initial births must be positive"};
    }
    const double n = solve_renewal_growth_rate(s, rt_effective, timing.generation_length());

    std::vector<double> male(years);
    std::vector<double> female(years);
    for (std::size_t t = 0; t < years; ++t) {
        const double total = b0 * std::exp(n * static_cast<double>(t));
        male[t] = total / (1.0 + s.females_per_male());
        female[t] = total * s.female_share();
    }
    return CohortSeries{start_year, std::move(male), std::move(female)};
}

/// Largest relative residual of the female renewal identity over every year whose lookback
/// lies inside the series.
inline double max_renewal_residual(const CohortSeries &series, double rt_effective,
                                   const MarriageTiming &timing) {
    const double lag = timing.generation_length();
    double worst = 0.0;
    for (std::size_t t = 0; t < series.years(); ++t) {
        const double back = static_cast<double>(t) - lag;
        if (back < 0.0) {
            continue;
        }
        const double ratio = series.female_births()[t] / series.male_births()[t];
        const double predicted =
            ratio / (1.0 + ratio) * rt_effective * series.births_at(Sex::female, back);
        const double actual = series.female_births()[t];
        worst = std::max(worst, std::abs(actual - predicted) / actual);
    }
    return worst;
}

/// Men reaching marriage age in `at_year` divided by women reaching marriage age that year,
/// M(at_year - A_m) / F(at_year - A_f), using exact (fractional) ages.
inline double stable_cohort_ratio(const CohortSeries &series, const MarriageTiming &timing,
                                  int at_year) {
    const double offset = static_cast<double>(at_year - series.start_year());
    const double men = series.births_at(Sex::male, offset - timing.male_age());
    const double women = series.births_at(Sex::female, offset - timing.female_age());
    return men / women;
}

struct MicrosimOptions {
    std::size_t burn_in = 50;
    /// Round cohort sizes to whole persons each year. Demonstration only.
    bool integer_mode = false;
};

struct MarketYear {
    int year;
    double male_births;
    double female_births;
    double men_at_marriage;
    double women_at_marriage;
    double matches;
    double unmatched_men;
    double unmatched_women;
};

struct MicrosimResult {
    double unmatched_male_share;
    double unmatched_female_share;
    int male_marriage_age;
    int female_marriage_age;
    std::vector<MarketYear> trajectory;
};

inline int round_half_up(double value) { return static_cast<int>(std::floor(value + 0.5)); }

/// One-to-one matching of the cohorts reaching marriage age each year.
///
/// Ages are rounded half-up to whole years. Each year the scarcer side marries in full and the
/// remainder of the larger side stays unmatched for good. Shares are cumulative over the years
/// after burn-in; the trajectory holds exactly those years.
inline MicrosimResult run_matching_microsim(const CohortSeries &series, const MarriageTiming &timing,
                                            const MicrosimOptions &options = {}) {
    const int male_age = round_half_up(timing.male_age());
    const int female_age = round_half_up(timing.female_age());
    const auto first = static_cast<std::size_t>(std::max(male_age, female_age)) + options.burn_in;
    if (first >= series.years()) {
        throw configuration_error{"horizon of " + std::to_string(series.years()) +
                                  " years does not exceed burn-in plus the oldest marriage age (" +
                                  std::to_string(first) + ")"};
    }

    auto headcount = [&](double v) { return options.integer_mode ? std::floor(v + 0.5) : v; };

    MicrosimResult result{0.0, 0.0, male_age, female_age, {}};
    result.trajectory.reserve(series.years() - first);
    double men_total = 0.0;
    double women_total = 0.0;
    double men_left = 0.0;
    double women_left = 0.0;
    for (std::size_t t = first; t < series.years(); ++t) {
        const double men = headcount(series.male_births()[t - static_cast<std::size_t>(male_age)]);
        const double women =
            headcount(series.female_births()[t - static_cast<std::size_t>(female_age)]);
        const double matches = std::min(men, women);
        men_total += men;
        women_total += women;
        men_left += men - matches;
        women_left += women - matches;
        result.trajectory.push_back(MarketYear{
            .year = series.start_year() + static_cast<int>(t),
            .male_births = series.male_births()[t],
            .female_births = series.female_births()[t],
            .men_at_marriage = men,
            .women_at_marriage = women,
            .matches = matches,
            .unmatched_men = men - matches,
            .unmatched_women = women - matches,
        });
    }
    result.unmatched_male_share = men_total > 0.0 ? men_left / men_total : 0.0;
    result.unmatched_female_share = women_total > 0.0 ? women_left / women_total : 0.0;
    return result;
}

} // namespace sgi
