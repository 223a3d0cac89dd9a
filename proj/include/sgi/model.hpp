#pragma once

#include "sgi/errors.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sgi {

/// Default half-width around 1 within which an index counts as balanced.
inline constexpr double DEFAULT_BALANCE_TOLERANCE = 0.005;

/// Default marriage-to-first-birth interval in years.
inline constexpr double DEFAULT_BIRTH_INTERVAL = 2.0;

enum class SexRatioConvention { females_per_male, females_per_1000_males, males_per_100_females };

inline std::string_view to_string(SexRatioConvention convention) noexcept {
    switch (convention) {
    case SexRatioConvention::females_per_male:
        return "females_per_male";
    case SexRatioConvention::females_per_1000_males:
        return "females_per_1000_males";
    case SexRatioConvention::males_per_100_females:
        return "males_per_100_females";
    }
    return "unknown";
}

inline std::optional<SexRatioConvention> parse_sex_ratio_convention(std::string_view text) {
    for (auto c : {SexRatioConvention::females_per_male, SexRatioConvention::females_per_1000_males,
                   SexRatioConvention::males_per_100_females}) {
        if (text == to_string(c)) {
            return c;
        }
    }
    return std::nullopt;
}

/// Sex ratio at birth, always held as females per male.
class SexRatioAtBirth {
  public:
    explicit SexRatioAtBirth(double females_per_male) : value_{females_per_male} {
        if (!std::isfinite(females_per_male) || females_per_male <= 0.0) {
            throw invalid_input_error{"sex_ratio", "must be a positive finite number of females "
                                                   "per male, got " +
                                                       std::to_string(females_per_male)};
        }
    }

    double females_per_male() const noexcept { return value_; }

    /// Share of births that are female, S / (1 + S).
    double female_share() const noexcept { return value_ / (1.0 + value_); }

    friend bool operator==(const SexRatioAtBirth &, const SexRatioAtBirth &) = default;

  private:
    double value_;
};

/// Converts a census-style sex ratio to the canonical females-per-male form.
inline SexRatioAtBirth canonicalize_sex_ratio(double value, SexRatioConvention convention) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw invalid_input_error{"sex_ratio", "must be positive and finite in convention " +
                                                   std::string{to_string(convention)}};
    }
    switch (convention) {
    case SexRatioConvention::females_per_male:
        return SexRatioAtBirth{value};
    case SexRatioConvention::females_per_1000_males:
        return SexRatioAtBirth{value / 1000.0};
    case SexRatioConvention::males_per_100_females:
        return SexRatioAtBirth{100.0 / value};
    }
    throw invalid_input_error{"sex_ratio", "unknown convention"};
}

/// Inverse of canonicalize_sex_ratio.
inline double express_sex_ratio(SexRatioAtBirth ratio, SexRatioConvention convention) noexcept {
    switch (convention) {
    case SexRatioConvention::females_per_male:
        return ratio.females_per_male();
    case SexRatioConvention::females_per_1000_males:
        return ratio.females_per_male() * 1000.0;
    case SexRatioConvention::males_per_100_females:
        return 100.0 / ratio.females_per_male();
    }
    return ratio.females_per_male();
}

enum class MortalityUnits { proportion, per_1000 };

/// Total fertility and under-five mortality (stored as a proportion of births).
class FertilityInputs {
  public:
    FertilityInputs(double tfr, double u5mr, MortalityUnits units = MortalityUnits::proportion)
        : tfr_{tfr}, u5mr_{units == MortalityUnits::per_1000 ? u5mr / 1000.0 : u5mr} {
        if (!std::isfinite(tfr_) || tfr_ <= 0.0) {
            throw invalid_input_error{"tfr", "total fertility must be positive and finite"};
        }
        if (!std::isfinite(u5mr_) || u5mr_ < 0.0 || u5mr_ >= 1.0) {
            throw invalid_input_error{"u5mr", "under-five mortality must lie in [0, 1) as a "
                                              "proportion (or [0, 1000) per 1000)"};
        }
    }

    double tfr() const noexcept { return tfr_; }
    double u5mr() const noexcept { return u5mr_; }

    friend bool operator==(const FertilityInputs &, const FertilityInputs &) = default;

  private:
    double tfr_;
    double u5mr_;
};

/// Mean ages at first marriage and the marriage-to-first-birth interval, in years.
class MarriageTiming {
  public:
    MarriageTiming(double male_age, double female_age,
                   double birth_interval = DEFAULT_BIRTH_INTERVAL)
        : male_age_{male_age}, female_age_{female_age}, birth_interval_{birth_interval} {
        if (!std::isfinite(male_age) || male_age <= 0.0) {
            throw invalid_input_error{"male_age", "must be positive"};
        }
        if (!std::isfinite(female_age) || female_age <= 0.0) {
            throw invalid_input_error{"female_age", "must be positive"};
        }
        if (!std::isfinite(birth_interval) || birth_interval < 0.0) {
            throw invalid_input_error{"birth_interval", "must be non-negative"};
        }
    }

    double male_age() const noexcept { return male_age_; }
    double female_age() const noexcept { return female_age_; }
    double birth_interval() const noexcept { return birth_interval_; }

    /// Male minus female age at marriage. May be negative.
    double spousal_gap() const noexcept { return male_age_ - female_age_; }

    /// Mean age of mothers at birth, female age at marriage plus the birth interval.
    double generation_length() const noexcept { return female_age_ + birth_interval_; }

    MarriageTiming with_birth_interval(double alpha) const {
        return MarriageTiming{male_age_, female_age_, alpha};
    }

    friend bool operator==(const MarriageTiming &, const MarriageTiming &) = default;

  private:
    double male_age_;
    double female_age_;
    double birth_interval_;
};

struct RegionInputs {
    std::string region_id;
    std::string name;
    SexRatioAtBirth sex_ratio;
    FertilityInputs fertility;
    MarriageTiming timing;
    std::optional<std::int64_t> male_pop_15_54;
    bool u5mr_is_proxy = false;
};

/// Absolute surplus under both readings of the index.
struct SurplusCounts {
    std::int64_t paper_share; ///< base x (sgi - 1)
    std::int64_t ratio_share; ///< base x (1 - 1/sgi)

    friend bool operator==(const SurplusCounts &, const SurplusCounts &) = default;
};

/// Stable-population growth rate per year.
struct GrowthRate {
    double per_year;

    explicit GrowthRate(double n) : per_year{n} {
        if (!std::isfinite(n)) {
            throw domain_error{"growth rate is not finite"};
        }
    }
};

struct SgiResult {
    double effective_fertility;
    GrowthRate growth_rate;
    double sgi;
    bool balanced;
    double surplus_share_paper; ///< sgi - 1
    double surplus_share_ratio; ///< 1 - 1/sgi
    std::optional<SurplusCounts> surplus_men;
};

} // namespace sgi
