#include "sgi/report.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace sgi;

namespace {

const std::string data_dir = SGI_DATA_DIR;

const std::string header =
    "region_id,name,srb_value,srb_convention,tfr,u5mr,u5mr_units,u5mr_is_proxy,male_pop_15_54,"
    "a_m,a_f,alpha\n";

DatasetBundle bundle_from(const std::string &name, const std::string &rows) {
    const auto dir = support::scratch_dir(name);
    support::write_text(dir / "regions.csv", header + rows);
    return load_bundle({(dir / "regions.csv").string()});
}

std::vector<std::string> order(const RunReport &report) {
    std::vector<std::string> ids;
    for (const auto &r : report.per_region) {
        ids.push_back(r.inputs.region_id);
    }
    return ids;
}

} // namespace

TEST(RunCompute, TrivialTwoRegions) {
    const auto report = run_compute(BundlePaths{data_dir + "/trivial/regions.csv"});
    ASSERT_EQ(report.per_region.size(), 2u);
    EXPECT_TRUE(report.failures.empty());

    // Sorted descending: the zero-gap region first.
    EXPECT_EQ(report.per_region[0].inputs.region_id, "FLAT");
    EXPECT_EQ(report.per_region[0].result.sgi, 1.0 / 0.95);
    EXPECT_NEAR(report.per_region[0].result.sgi, 1.0526315789473684, 1e-15);
    EXPECT_EQ(report.per_region[1].inputs.region_id, "BAL");
    EXPECT_EQ(report.per_region[1].result.sgi, 1.0);
    EXPECT_TRUE(report.per_region[1].result.balanced);
    EXPECT_EQ(report.per_region[1].result.surplus_men->paper_share, 0);
}

TEST(RunCompute, NationalUsesPopulationWeightedInputs) {
    const auto report = run_compute(BundlePaths{data_dir + "/trivial/regions.csv"});
    ASSERT_TRUE(report.national);
    EXPECT_EQ(report.national->weighting, "male_pop_15_54");
    const auto &in = report.national->inputs;
    EXPECT_NEAR(in.sex_ratio.females_per_male(), (1.0 + 2.0 * 0.95) / 3.0, 1e-15);
    EXPECT_NEAR(in.fertility.tfr(), (2.0 + 2.0 * 2.5) / 3.0, 1e-15);
    EXPECT_NEAR(in.timing.male_age(), (26.0 + 2.0 * 22.0) / 3.0, 1e-13);
    EXPECT_EQ(in.male_pop_15_54, 3'000'000);
    EXPECT_DOUBLE_EQ(report.national->result.sgi, compute_sgi(in).sgi);
    EXPECT_NEAR(*report.mean_of_regions, (1.0 + 1.0 / 0.95) / 2.0, 1e-15);
}

TEST(RunCompute, NationalFallsBackToEqualWeights) {
    const auto bundle =
        bundle_from("equal_weights", "A,Alpha,0.9,females_per_male,2.5,0.05,proportion,false,,26,21,\n"
                                     "B,Beta,1.0,females_per_male,3.5,0.05,proportion,false,500,24,20,\n");
    const auto report = run_compute(bundle);
    EXPECT_EQ(report.national->weighting, "equal");
    EXPECT_DOUBLE_EQ(report.national->inputs.sex_ratio.females_per_male(), 0.95);
    EXPECT_FALSE(report.national->result.surplus_men);
    EXPECT_EQ(report.totals.regions_counted, 1u);
}

TEST(RunCompute, TotalsSumRegionalCounts) {
    const std::string dir = data_dir + "/synthetic/";
    const auto report = run_compute(BundlePaths{dir + "regions.csv", dir + "marital.csv"});
    std::int64_t paper = 0, ratio = 0, pop = 0;
    for (const auto &r : report.per_region) {
        paper += r.result.surplus_men->paper_share;
        ratio += r.result.surplus_men->ratio_share;
        pop += *r.inputs.male_pop_15_54;
    }
    EXPECT_EQ(report.totals.surplus_men_paper, paper);
    EXPECT_EQ(report.totals.surplus_men_ratio, ratio);
    EXPECT_EQ(report.totals.male_pop_15_54, pop);
    EXPECT_EQ(report.totals.regions_counted, 3u);
}

TEST(RunCompute, SortedDescendingOnSyntheticData) {
    const std::string dir = data_dir + "/synthetic/";
    const auto report = run_compute(BundlePaths{dir + "regions.csv", dir + "marital.csv"});
    ASSERT_EQ(report.per_region.size(), 3u);
    for (std::size_t i = 1; i < report.per_region.size(); ++i) {
        EXPECT_GE(report.per_region[i - 1].result.sgi, report.per_region[i].result.sgi);
    }
}

TEST(RunCompute, RankingUnchangedByPopulationScaling) {
    const std::string rows = "A,Alpha,0.9,females_per_male,2.5,0.05,proportion,false,%1,26,21,\n"
                             "B,Beta,0.85,females_per_male,2.1,0.03,proportion,false,%2,27,22,\n"
                             "C,Gamma,0.97,females_per_male,3.1,0.07,proportion,false,%3,25,19,\n";
    auto with_pops = [&](std::int64_t scale) {
        std::string text = rows;
        const std::int64_t pops[] = {1'000'000, 2'500'000, 400'000};
        for (int i = 0; i < 3; ++i) {
            const std::string key = "%" + std::to_string(i + 1);
            text.replace(text.find(key), key.size(), std::to_string(pops[i] * scale));
        }
        return run_compute(bundle_from("scaling_" + std::to_string(scale), text));
    };
    const auto base = with_pops(1);
    const auto scaled = with_pops(7);
    EXPECT_EQ(order(base), order(scaled));
    EXPECT_NE(base.totals.surplus_men_paper, scaled.totals.surplus_men_paper);
    EXPECT_EQ(scaled.totals.male_pop_15_54, 7 * base.totals.male_pop_15_54);
}

TEST(RunCompute, DensityIntegratesToOne) {
    const std::string dir = data_dir + "/synthetic/";
    const auto report = run_compute(BundlePaths{dir + "regions.csv", dir + "marital.csv"});
    ASSERT_TRUE(report.density);
    EXPECT_EQ(report.density->points.size(), DENSITY_GRID_POINTS);
    EXPECT_NEAR(trapezoid_integral(*report.density), 1.0, 0.01);
}

TEST(RunCompute, SingleRegionHasNoDensity) {
    const auto bundle = bundle_from(
        "single", "A,Alpha,0.9,females_per_male,2.5,0.05,proportion,false,100,26,21,\n");
    EXPECT_FALSE(run_compute(bundle).density);
}

TEST(RunCompute, CollectsPerRegionFailures) {
    const auto dir = support::scratch_dir("failures");
    support::write_text(dir / "regions.csv",
                        header + "A,Alpha,0.9,females_per_male,2.5,0.05,proportion,false,,26,21,\n"
                                 "B,Beta,0.9,females_per_male,2.5,0.05,proportion,false,,,21,\n"
                                 "C,Gamma,0.9,females_per_male,2.5,0.05,proportion,false,,,20,\n");
    // Nobody in either table marries before 50, so SMAM is undefined for B and C.
    std::string marital = "region_id,sex,age_lower,age_upper,total,never_married\n";
    for (const char *id : {"B", "C"}) {
        marital += std::string{id} + ",male,15,45,100,100\n";
        marital += std::string{id} + ",male,45,50,100,100\n";
        marital += std::string{id} + ",male,50,55,100,100\n";
    }
    support::write_text(dir / "marital.csv", marital);
    const auto report =
        run_compute(BundlePaths{(dir / "regions.csv").string(), (dir / "marital.csv").string()});
    ASSERT_EQ(report.failures.size(), 2u);
    EXPECT_EQ(report.failures[0].region_id, "B");
    EXPECT_EQ(report.failures[1].region_id, "C");
    ASSERT_EQ(report.per_region.size(), 1u);
    EXPECT_EQ(report.per_region[0].inputs.region_id, "A");
}

TEST(RunCompute, AlphaOverrideIsEchoedAndApplied) {
    RunOptions options;
    options.alpha = 3.0;
    const auto report = run_compute(BundlePaths{data_dir + "/trivial/regions.csv"}, options);
    EXPECT_EQ(report.config_echo.at("alpha_override"), 3.0);
    for (const auto &r : report.per_region) {
        EXPECT_EQ(r.inputs.timing.birth_interval(), 3.0);
        EXPECT_EQ(r.timing_sources.birth_interval_source, "override");
    }
}

TEST(Serialization, JsonRoundTripsAndIsDeterministic) {
    const std::string dir = data_dir + "/synthetic/";
    const BundlePaths paths{dir + "regions.csv", dir + "marital.csv", dir + "sources.csv"};
    const auto text = report_json(run_compute(paths)).dump(2);
    EXPECT_EQ(nlohmann::json::parse(text).dump(2), text);
    EXPECT_EQ(report_json(run_compute(paths)).dump(2), text);
    EXPECT_EQ(report_csv(run_compute(paths)), report_csv(run_compute(paths)));
}

TEST(Serialization, ReportCsvColumns) {
    const auto report = run_compute(BundlePaths{data_dir + "/trivial/regions.csv"});
    const auto text = report_csv(report);
    const auto table = csv::parse(text, "report");
    const std::vector<std::string> expected{
        "region_id",           "name",              "sgi",
        "effective_fertility", "growth_rate",       "surplus_share_paper",
        "surplus_share_ratio", "surplus_men_paper", "surplus_men_ratio",
        "u5mr_is_proxy"};
    EXPECT_EQ(table.header(), expected);
    ASSERT_EQ(table.records().size(), 2u);
    EXPECT_EQ(csv::to_double(table.records()[1].fields[2]), 1.0);
}

TEST(Serialization, MapCsvSortedById) {
    const auto report = run_compute(BundlePaths{data_dir + "/trivial/regions.csv"});
    EXPECT_EQ(map_csv(report), "region_id,name,sgi,balanced\n"
                               "BAL,Balanced,1,true\n"
                               "FLAT,Zero gap,1.0526315789473684,false\n");
}

TEST(Sensitivity, ZeroMortalityGivesIdenticalValues) {
    const auto bundle = bundle_from(
        "sens_u0", "A,Alpha,0.9,females_per_male,2.5,0,proportion,false,,26,21,\n");
    const auto rows = run_sensitivity(bundle, {});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].sgi_crude, rows[0].sgi_effective);
    EXPECT_EQ(rows[0].abs_diff, 0.0);
}

TEST(Sensitivity, ZeroGapGivesIdenticalValuesRegardlessOfMortality) {
    const auto bundle = bundle_from(
        "sens_gap0", "A,Alpha,0.9,females_per_male,2.5,0.2,proportion,false,,22,22,\n");
    const auto rows = run_sensitivity(bundle, {});
    EXPECT_EQ(rows[0].sgi_crude, rows[0].sgi_effective);
}

TEST(Sensitivity, EffectiveExceedsCrudeWithPositiveGapAndMortality) {
    // Female age plus interval is 23 and the gap is 5.
    const auto bundle = bundle_from(
        "sens_pos", "A,Alpha,0.9,females_per_male,2.4,0.052,proportion,false,,26,21,2\n");
    const auto rows = run_sensitivity(bundle, {});
    EXPECT_GT(rows[0].sgi_effective, rows[0].sgi_crude);
    EXPECT_GT(rows[0].rel_diff, 0.0);
}

TEST(Sensitivity, HoldsAcrossSyntheticRegions) {
    const std::string dir = data_dir + "/synthetic/";
    const auto bundle = load_bundle({dir + "regions.csv", dir + "marital.csv"});
    for (const auto &row : run_sensitivity(bundle, {})) {
        const auto timing = resolve_timing(bundle, row.region_id);
        if (bundle.region(row.region_id).fertility.u5mr() > 0 && timing.spousal_gap() > 0) {
            EXPECT_GT(row.sgi_effective, row.sgi_crude) << row.region_id;
        }
    }
}
