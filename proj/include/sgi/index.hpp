#pragma once

#include "sgi/errors.hpp"
#include "sgi/model.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace sgi {

/// Births per woman that survive to age five: tfr * (1 - u5mr).
inline double effective_fertility(const FertilityInputs &f) noexcept {
    return f.tfr() * (1.0 - f.u5mr());
}

/// Growth rate of a stable population in which each woman bears `rt` surviving children at
/// age A_f + alpha, a fraction S/(1+S) of them daughters.
inline GrowthRate growth_rate(double rt, SexRatioAtBirth s, const MarriageTiming &timing) {
    if (!(rt > 0.0) || !std::isfinite(rt)) {
        throw domain_error{"fertility must be positive to take its logarithm, got " +
                           std::to_string(rt)};
    }
    const double lag = timing.generation_length();
    if (!(lag > 0.0)) {
        throw domain_error{"female age at marriage plus birth interval must be positive"};
    }
    return GrowthRate{(std::log(rt) + std::log(s.female_share())) / lag};
}

/// n * gap + ln S. Non-positive means men at marriage age outnumber women (groom surplus).
inline double imbalance_condition(GrowthRate n, SexRatioAtBirth s,
                                  const MarriageTiming &timing) noexcept {
    return n.per_year * timing.spousal_gap() + std::log(s.females_per_male());
}

/// Ratio of men to women entering the marriage market in the stable state.
inline SgiResult compute_sgi(SexRatioAtBirth s, double rt_effective, const MarriageTiming &timing,
                             double balance_tolerance = DEFAULT_BALANCE_TOLERANCE) {
    const GrowthRate n = growth_rate(rt_effective, s, timing);

    const double ratio = s.females_per_male();
    const double exponent = timing.spousal_gap() / timing.generation_length();
    const double base = (1.0 + ratio) / (rt_effective * ratio);
    const double index = std::pow(base, exponent) / ratio;
    if (!(index > 0.0) || !std::isfinite(index)) {
        throw domain_error{"index is not a positive finite number"};
    }

    return SgiResult{
        .effective_fertility = rt_effective,
        .growth_rate = n,
        .sgi = index,
        .balanced = std::abs(index - 1.0) <= balance_tolerance,
        .surplus_share_paper = index - 1.0,
        .surplus_share_ratio = 1.0 - 1.0 / index,
        .surplus_men = std::nullopt,
    };
}

inline SgiResult compute_sgi(const RegionInputs &region,
                             double balance_tolerance = DEFAULT_BALANCE_TOLERANCE) {
    return compute_sgi(region.sex_ratio, effective_fertility(region.fertility), region.timing,
                       balance_tolerance);
}

/// The index written as a single quotient,
/// (1+S)^k / (S^(1+k) * rt^k) with k = gap / (A_f + alpha).
inline double sgi_quotient_form(SexRatioAtBirth s, double rt_effective,
                                const MarriageTiming &timing) {
    if (!(rt_effective > 0.0)) {
        throw domain_error{"fertility must be positive"};
    }
    const double k = timing.spousal_gap() / timing.generation_length();
    const double ratio = s.females_per_male();
    return std::pow(1.0 + ratio, k) / (std::pow(ratio, 1.0 + k) * std::pow(rt_effective, k));
}

/// Surplus men on a population base under both share conventions.
inline SurplusCounts surplus_men(const SgiResult &result, std::int64_t male_pop_15_54) {
    if (male_pop_15_54 < 0) {
        throw invalid_input_error{"male_pop_15_54", "must be non-negative"};
    }
    const auto base = static_cast<double>(male_pop_15_54);
    return SurplusCounts{
        .paper_share = std::llround(base * result.surplus_share_paper),
        .ratio_share = std::llround(base * result.surplus_share_ratio),
    };
}

} // namespace sgi
