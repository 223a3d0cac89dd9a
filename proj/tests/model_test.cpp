#include "sgi/model.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace sgi;

TEST(SexRatio, CanonicalConventionIsIdentity) {
    EXPECT_EQ(canonicalize_sex_ratio(1.0, SexRatioConvention::females_per_male).females_per_male(),
              1.0);
}

TEST(SexRatio, PerThousandMales) {
    EXPECT_DOUBLE_EQ(
        canonicalize_sex_ratio(943, SexRatioConvention::females_per_1000_males).females_per_male(),
        0.943);
}

TEST(SexRatio, MalesPerHundredFemalesIsInverted) {
    const auto s = canonicalize_sex_ratio(118, SexRatioConvention::males_per_100_females);
    EXPECT_NEAR(s.females_per_male(), 0.847457627118644, 1e-15);
    EXPECT_NEAR(express_sex_ratio(s, SexRatioConvention::males_per_100_females), 118.0, 1e-12);
}

TEST(SexRatio, RejectsNonPositiveAndNonFinite) {
    for (double bad : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::infinity()}) {
        for (auto c : {SexRatioConvention::females_per_male,
                       SexRatioConvention::females_per_1000_males,
                       SexRatioConvention::males_per_100_females}) {
            try {
                canonicalize_sex_ratio(bad, c);
                ADD_FAILURE() << "accepted " << bad;
            } catch (const invalid_input_error &e) {
                EXPECT_EQ(e.field(), "sex_ratio");
            }
        }
    }
    EXPECT_THROW(SexRatioAtBirth{0.0}, invalid_input_error);
}

TEST(SexRatio, RoundTripThroughEveryConvention) {
    support::ParameterGrid grid{7};
    for (int i = 0; i < 5000; ++i) {
        const SexRatioAtBirth s{grid.uniform(0.3, 3.0)};
        for (auto c : {SexRatioConvention::females_per_male,
                       SexRatioConvention::females_per_1000_males,
                       SexRatioConvention::males_per_100_females}) {
            const double back = canonicalize_sex_ratio(express_sex_ratio(s, c), c).females_per_male();
            EXPECT_NEAR(back, s.females_per_male(), 1e-12 * s.females_per_male());
        }
    }
}

TEST(SexRatio, ConventionNamesParse) {
    EXPECT_EQ(parse_sex_ratio_convention("males_per_100_females"),
              SexRatioConvention::males_per_100_females);
    EXPECT_FALSE(parse_sex_ratio_convention("males_per_female").has_value());
}

TEST(Fertility, MortalityPerThousandStoredAsProportion) {
    const FertilityInputs f{2.4, 52.0, MortalityUnits::per_1000};
    EXPECT_DOUBLE_EQ(f.u5mr(), 0.052);
    EXPECT_EQ(f.tfr(), 2.4);
}

TEST(Fertility, Invariants) {
    EXPECT_THROW((FertilityInputs{0.0, 0.1}), invalid_input_error);
    EXPECT_THROW((FertilityInputs{2.0, 1.0}), invalid_input_error);
    EXPECT_THROW((FertilityInputs{2.0, -0.01}), invalid_input_error);
    EXPECT_THROW((FertilityInputs{2.0, 1000.0, MortalityUnits::per_1000}), invalid_input_error);
    EXPECT_NO_THROW((FertilityInputs{2.0, 0.0}));
}

TEST(Timing, DerivedQuantities) {
    const MarriageTiming t{26.0, 21.0, 2.0};
    EXPECT_EQ(t.spousal_gap(), 5.0);
    EXPECT_EQ(t.generation_length(), 23.0);
    EXPECT_EQ(t.with_birth_interval(3.0).birth_interval(), 3.0);
    EXPECT_EQ(MarriageTiming(20.0, 22.0).spousal_gap(), -2.0);
    EXPECT_EQ(MarriageTiming(20.0, 22.0).birth_interval(), DEFAULT_BIRTH_INTERVAL);
}

TEST(Timing, Invariants) {
    EXPECT_THROW((MarriageTiming{0.0, 21.0}), invalid_input_error);
    EXPECT_THROW((MarriageTiming{26.0, 0.0}), invalid_input_error);
    EXPECT_THROW((MarriageTiming{26.0, 21.0, -0.5}), invalid_input_error);
    EXPECT_NO_THROW((MarriageTiming{26.0, 21.0, 0.0}));
}
