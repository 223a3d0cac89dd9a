#include "sgi/index.hpp"
#include "sgi/oracle_sim.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sgi;

namespace {

SgiResult result_with_index(double index) {
    return SgiResult{
        .effective_fertility = 2.0,
        .growth_rate = GrowthRate{0.0},
        .sgi = index,
        .balanced = std::abs(index - 1.0) <= DEFAULT_BALANCE_TOLERANCE,
        .surplus_share_paper = index - 1.0,
        .surplus_share_ratio = 1.0 - 1.0 / index,
        .surplus_men = std::nullopt,
    };
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

TEST(EffectiveFertility, Examples) {
    EXPECT_EQ(effective_fertility({2.4, 0.052}), 2.2752);
    EXPECT_EQ(effective_fertility({2.0, 0.0}), 2.0);
    EXPECT_EQ(effective_fertility({3.0, 0.10}), 2.7);
}

TEST(EffectiveFertility, StrictlyBelowCrudeWhenMortalityPositive) {
    support::ParameterGrid grid{11};
    for (int i = 0; i < 1000; ++i) {
        const FertilityInputs f{grid.uniform(0.5, 7.0), grid.uniform(1e-6, 0.3)};
        EXPECT_LT(effective_fertility(f), f.tfr());
    }
}

TEST(GrowthRate, ReplacementIsExactlyZero) {
    for (double lag : {16.0, 23.0, 31.5}) {
        EXPECT_EQ(growth_rate(2.0, SexRatioAtBirth{1.0}, MarriageTiming{lag + 3, lag, 0.0}).per_year,
                  0.0);
    }
}

TEST(GrowthRate, HalvingPerGeneration) {
    const MarriageTiming timing{27.0, 23.0, 2.0};
    const double n = growth_rate(1.0, SexRatioAtBirth{1.0}, timing).per_year;
    EXPECT_NEAR(n, std::log(0.5) / 25.0, 1e-15);
    EXPECT_NEAR(n, -0.0277258872223978, 1e-15);
    // Back-substitution: a female cohort must reproduce itself under the implied decay.
    EXPECT_NEAR(0.5 * 1.0 * std::exp(-n * 25.0), 1.0, 1e-14);
}

TEST(GrowthRate, AgreesWithRegeneratedStableSeries) {
    const SexRatioAtBirth s{0.91};
    const MarriageTiming timing{25.0, 21.0, 2.0};
    const double n = growth_rate(2.2752, s, timing).per_year;
    const auto series = generate_stable_series(s, 2.2752, timing, 120, 1000.0);
    for (std::size_t t = 1; t < series.years(); ++t) {
        const double total_now = series.male_births()[t] + series.female_births()[t];
        const double total_prev = series.male_births()[t - 1] + series.female_births()[t - 1];
        EXPECT_NEAR(std::log(total_now / total_prev), n, 1e-12);
    }
    EXPECT_LT(max_renewal_residual(series, 2.2752, timing), 1e-9);
}

TEST(GrowthRate, RejectsNonPositiveFertility) {
    const MarriageTiming timing{26.0, 21.0};
    EXPECT_THROW(growth_rate(0.0, SexRatioAtBirth{1.0}, timing), domain_error);
    EXPECT_THROW(growth_rate(-1.0, SexRatioAtBirth{1.0}, timing), domain_error);
}

TEST(ImbalanceCondition, Examples) {
    EXPECT_EQ(imbalance_condition(GrowthRate{0.0}, SexRatioAtBirth{1.0}, {30.0, 20.0}), 0.0);
    EXPECT_NEAR(imbalance_condition(GrowthRate{0.0}, SexRatioAtBirth{0.9}, {26.0, 21.0}),
                -0.105360515657826, 1e-15);
    EXPECT_NEAR(imbalance_condition(GrowthRate{0.02}, SexRatioAtBirth{0.95}, {26.0, 21.0}),
                0.0487067056124494, 1e-15);
}

TEST(ImbalanceCondition, DeficitExampleAgreesWithIndexSign) {
    // Fertility chosen so that the implied growth rate is 0.02 per year.
    const SexRatioAtBirth s{0.95};
    const MarriageTiming timing{26.0, 21.0, 2.0};
    const double rt = (1.0 + 0.95) / 0.95 * std::exp(0.02 * timing.generation_length());
    const auto n = growth_rate(rt, s, timing);
    EXPECT_NEAR(n.per_year, 0.02, 1e-15);
    EXPECT_GT(imbalance_condition(n, s, timing), 0.0);
    EXPECT_LT(compute_sgi(s, rt, timing).sgi, 1.0);
}

TEST(ComputeSgi, BalancedAtReplacementWithEvenSexRatio) {
    for (const MarriageTiming timing : {MarriageTiming{26, 21, 2}, MarriageTiming{21, 26, 0},
                                        MarriageTiming{40, 16, 4}}) {
        const auto r = compute_sgi(SexRatioAtBirth{1.0}, 2.0, timing);
        EXPECT_EQ(r.sgi, 1.0);
        EXPECT_TRUE(r.balanced);
        EXPECT_EQ(r.surplus_share_paper, 0.0);
        EXPECT_EQ(r.surplus_share_ratio, 0.0);
        EXPECT_EQ(r.growth_rate.per_year, 0.0);
    }
}

TEST(ComputeSgi, ZeroGapCollapsesToInverseSexRatio) {
    for (double rt : {1.3, 2.2752, 4.8}) {
        EXPECT_EQ(compute_sgi(SexRatioAtBirth{0.95}, rt, {22.0, 22.0, 2.0}).sgi, 1.0 / 0.95);
    }
    EXPECT_NEAR(1.0 / 0.95, 1.05263157894737, 1e-14);
}

TEST(ComputeSgi, MatchesCohortRatioOracle) {
    const SexRatioAtBirth s{0.90};
    const MarriageTiming timing{26.0, 21.0, 2.0};
    const auto r = compute_sgi(s, 2.2752, timing);
    const auto series = generate_stable_series(s, 2.2752, timing, 100, 1e6);
    const double oracle = stable_cohort_ratio(series, timing, 99);
    EXPECT_NEAR(r.sgi / oracle, 1.0, 1e-9);
    EXPECT_GT(r.sgi, 1.0);
    EXPECT_FALSE(r.balanced);
}

TEST(ComputeSgi, ResultFieldsFollowExactIdentities) {
    support::ParameterGrid grid{3};
    for (int i = 0; i < 2000; ++i) {
        const auto p = grid.next();
        const auto r = compute_sgi(p.sex_ratio, p.rt_effective, p.timing, 0.01);
        EXPECT_GT(r.sgi, 0.0);
        EXPECT_EQ(r.surplus_share_paper, r.sgi - 1.0);
        EXPECT_EQ(r.surplus_share_ratio, 1.0 - 1.0 / r.sgi);
        EXPECT_EQ(r.balanced, std::abs(r.sgi - 1.0) <= 0.01);
        EXPECT_EQ(r.growth_rate.per_year,
                  growth_rate(p.rt_effective, p.sex_ratio, p.timing).per_year);
        EXPECT_EQ(r.effective_fertility, p.rt_effective);
    }
}

TEST(ComputeSgi, BalanceToleranceBoundary) {
    // sgi = 1/S with zero gap.
    EXPECT_TRUE(compute_sgi(SexRatioAtBirth{1.0 / 1.004}, 2.0, {22, 22}).balanced);
    EXPECT_FALSE(compute_sgi(SexRatioAtBirth{1.0 / 1.006}, 2.0, {22, 22}).balanced);
    EXPECT_TRUE(compute_sgi(SexRatioAtBirth{1.0 / 1.006}, 2.0, {22, 22}, 0.01).balanced);
}

TEST(ComputeSgi, RejectsNonPositiveFertility) {
    EXPECT_THROW(compute_sgi(SexRatioAtBirth{1.0}, 0.0, {26, 21}), domain_error);
    EXPECT_THROW(compute_sgi(SexRatioAtBirth{1.0}, -2.0, {26, 21}), domain_error);
}

TEST(ComputeSgi, NegativeGapEvaluatedAsWritten) {
    // Women older than men in a growing population: the men come from younger, larger cohorts.
    const auto r = compute_sgi(SexRatioAtBirth{1.0}, 3.0, {20.0, 24.0, 2.0});
    EXPECT_GT(r.sgi, 1.0);
    EXPECT_NEAR(r.sgi, std::pow(2.0 / 3.0, -4.0 / 26.0), 1e-15);
}

TEST(ComputeSgi, ConditionAndIndexAgreeInSign) {
    support::ParameterGrid grid{2024};
    for (int i = 0; i < 10000; ++i) {
        const auto p = grid.next();
        const auto r = compute_sgi(p.sex_ratio, p.rt_effective, p.timing);
        const double condition = imbalance_condition(r.growth_rate, p.sex_ratio, p.timing);
        ASSERT_EQ(sign(condition), sign(1.0 - r.sgi)) << "draw " << i;
    }
    // Simultaneous zeros.
    for (const MarriageTiming t : {MarriageTiming{26, 21, 2}, MarriageTiming{21, 21, 0}}) {
        const auto r = compute_sgi(SexRatioAtBirth{1.0}, 2.0, t);
        EXPECT_EQ(imbalance_condition(r.growth_rate, SexRatioAtBirth{1.0}, t), 0.0);
        EXPECT_EQ(r.sgi, 1.0);
    }
    const auto r = compute_sgi(SexRatioAtBirth{1.0}, 3.7, {21, 21, 1});
    EXPECT_EQ(imbalance_condition(r.growth_rate, SexRatioAtBirth{1.0}, {21, 21, 1}), 0.0);
    EXPECT_EQ(r.sgi, 1.0);
}

TEST(ComputeSgi, QuotientFormAgrees) {
    support::ParameterGrid grid{99};
    for (int i = 0; i < 10000; ++i) {
        const auto p = grid.next();
        const double a = compute_sgi(p.sex_ratio, p.rt_effective, p.timing).sgi;
        const double b = sgi_quotient_form(p.sex_ratio, p.rt_effective, p.timing);
        ASSERT_NEAR(a / b, 1.0, 1e-12);
    }
}

TEST(ComputeSgi, MonotoneInFertilityAndSexRatio) {
    support::ParameterGrid grid{5};
    for (int i = 0; i < 3000; ++i) {
        auto p = grid.next();
        const double gap = grid.uniform(0.5, 10.0);
        const MarriageTiming timing{p.timing.female_age() + gap, p.timing.female_age(),
                                    p.timing.birth_interval()};
        const double base = compute_sgi(p.sex_ratio, p.rt_effective, timing).sgi;
        const double more_births = compute_sgi(p.sex_ratio, p.rt_effective * 1.05, timing).sgi;
        const double more_girls =
            compute_sgi(SexRatioAtBirth{p.sex_ratio.females_per_male() * 1.05}, p.rt_effective,
                        timing)
                .sgi;
        ASSERT_LT(more_births, base);
        ASSERT_LT(more_girls, base);
    }
    // Zero gap: fertility is irrelevant.
    const MarriageTiming flat{24.0, 24.0, 2.0};
    EXPECT_EQ(compute_sgi(SexRatioAtBirth{0.9}, 1.5, flat).sgi,
              compute_sgi(SexRatioAtBirth{0.9}, 4.5, flat).sgi);
}

TEST(ComputeSgi, EffectiveFertilityRaisesIndex) {
    support::ParameterGrid grid{17};
    for (int i = 0; i < 3000; ++i) {
        const auto p = grid.next();
        const double gap = grid.uniform(0.1, 10.0);
        const MarriageTiming timing{p.timing.female_age() + gap, p.timing.female_age(),
                                    p.timing.birth_interval()};
        const FertilityInputs f{grid.uniform(1.2, 6.0), grid.uniform(0.001, 0.25)};
        const double crude = compute_sgi(p.sex_ratio, f.tfr(), timing).sgi;
        const double effective = compute_sgi(p.sex_ratio, effective_fertility(f), timing).sgi;
        ASSERT_GT(effective, crude);
    }
}

TEST(SurplusMen, BalancedIsZero) {
    const auto c = surplus_men(result_with_index(1.0), 123'456'789);
    EXPECT_EQ(c.paper_share, 0);
    EXPECT_EQ(c.ratio_share, 0);
}

TEST(SurplusMen, NationalHeadline) {
    const auto c = surplus_men(result_with_index(1.11), 354'000'000);
    EXPECT_EQ(c.paper_share, 38'940'000);
    EXPECT_EQ(c.ratio_share, 35'081'081);
}

TEST(SurplusMen, BothConventionsReported) {
    const auto c = surplus_men(result_with_index(1.33), 1'000'000);
    EXPECT_EQ(c.paper_share, 330'000);
    EXPECT_EQ(c.ratio_share, 248'120);
}

TEST(SurplusMen, RejectsNegativeBase) {
    EXPECT_THROW(surplus_men(result_with_index(1.1), -1), invalid_input_error);
}
