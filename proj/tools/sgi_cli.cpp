// Command-line front end for the Surplus Groom Index toolkit.

#include "sgi/density.hpp"
#include "sgi/errors.hpp"
#include "sgi/ingest.hpp"
#include "sgi/report.hpp"
#include "sgi/simulate.hpp"
#include "sgi/smam.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int EXIT_VALIDATION = 1;
constexpr int EXIT_COMPUTATION = 2;
constexpr const char *VERSION = "0.1.0";

int exit_code_for(const sgi::error &e) {
    if (dynamic_cast<const sgi::validation_error *>(&e) ||
        dynamic_cast<const sgi::invalid_input_error *>(&e) ||
        dynamic_cast<const sgi::schema_error *>(&e) ||
        dynamic_cast<const sgi::missing_data_error *>(&e)) {
        return EXIT_VALIDATION;
    }
    return EXIT_COMPUTATION;
}

struct DataArgs {
    std::string data_dir;
    std::string regions;
    std::string marital;
    std::string sources;

    sgi::BundlePaths paths() const {
        sgi::BundlePaths p;
        const fs::path dir{data_dir};
        auto pick = [&](const std::string &explicit_path, const char *name,
                        bool required) -> std::optional<std::string> {
            if (!explicit_path.empty()) {
                return explicit_path;
            }
            if (!data_dir.empty() && (required || fs::exists(dir / name))) {
                return (dir / name).string();
            }
            return std::nullopt;
        };
        auto regions_path = pick(regions, "regions.csv", true);
        if (!regions_path) {
            throw sgi::validation_error{"", 0, "", "no regions file: pass --regions or --data-dir"};
        }
        p.regions = *regions_path;
        p.marital = pick(marital, "marital.csv", false);
        p.sources = pick(sources, "sources.csv", false);
        return p;
    }
};

struct OutputArgs {
    std::string out_dir = "out";
    std::string format = "both";

    bool csv() const { return format == "csv" || format == "both"; }
    bool json() const { return format == "json" || format == "both"; }
};

void write_file(const fs::path &path, const std::string &content) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw sgi::error{"cannot write " + path.string()};
    }
    out << content;
}

/// Run metadata kept apart from the data files so those stay byte-reproducible.
void write_sidecar(const fs::path &dir, const std::string &command, int argc, char **argv) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    std::vector<std::string> args(argv, argv + argc);
    const nlohmann::json meta{
        {"command", command}, {"argv", args}, {"generated_at", stamp}, {"version", VERSION}};
    write_file(dir / "run_meta.json", meta.dump(2) + "\n");
}

sgi::ShareConvention parse_share(const std::string &s) {
    if (s == "paper") {
        return sgi::ShareConvention::paper;
    }
    if (s == "ratio") {
        return sgi::ShareConvention::ratio;
    }
    return sgi::ShareConvention::both;
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

void print_region_table(const sgi::RunReport &report, sgi::ShareConvention share) {
    std::cout << std::left << std::setw(10) << "region" << std::setw(26) << "name" << std::right
              << std::setw(8) << "sgi";
    if (share != sgi::ShareConvention::ratio) {
        std::cout << std::setw(16) << "surplus(sgi-1)";
    }
    if (share != sgi::ShareConvention::paper) {
        std::cout << std::setw(16) << "surplus(1-1/s)";
    }
    std::cout << '\n';
    auto line = [&](const std::string &id, const std::string &name, const sgi::SgiResult &r) {
        std::cout << std::left << std::setw(10) << id << std::setw(26) << name.substr(0, 25)
                  << std::right << std::setw(8) << fixed(r.sgi, 3);
        auto count = [](const std::optional<sgi::SurplusCounts> &c, bool paper) {
            return c ? std::to_string(paper ? c->paper_share : c->ratio_share) : std::string{"-"};
        };
        if (share != sgi::ShareConvention::ratio) {
            std::cout << std::setw(16) << count(r.surplus_men, true);
        }
        if (share != sgi::ShareConvention::paper) {
            std::cout << std::setw(16) << count(r.surplus_men, false);
        }
        std::cout << '\n';
    };
    for (const auto &r : report.per_region) {
        line(r.inputs.region_id, r.inputs.name, r.result);
    }
    if (report.national) {
        line("NATIONAL",
             report.national->weighting == "equal" ? "aggregated, equal weights"
                                                   : "aggregated, pop-weighted",
             report.national->result);
    }
    if (report.mean_of_regions) {
        std::cout << "mean of regional indices: " << fixed(*report.mean_of_regions, 4) << '\n';
    }
    std::cout << "regional totals over " << report.totals.regions_counted
              << " regions: surplus men " << report.totals.surplus_men_paper << " (sgi-1), "
              << report.totals.surplus_men_ratio << " (1-1/sgi) on base "
              << report.totals.male_pop_15_54 << '\n';
}

void report_warnings(const std::vector<sgi::Warning> &warnings) {
    for (const auto &w : warnings) {
        std::cerr << "warning: " << w.str() << '\n';
    }
}

std::vector<sgi::ReferenceLine> reference_lines(std::optional<double> national) {
    std::vector<sgi::ReferenceLine> refs{{1.0, "green", "balance (1.0)"}};
    if (national) {
        refs.push_back({*national, "black", "national (" + fixed(*national, 3) + ")"});
    }
    return refs;
}

int cmd_compute(const DataArgs &data, const OutputArgs &output, const sgi::RunOptions &options,
                int argc, char **argv) {
    const auto bundle = sgi::load_bundle(data.paths(), sgi::load_options(options));
    report_warnings(bundle.warnings);
    const auto report = sgi::run_compute(bundle, options);

    const fs::path dir{output.out_dir};
    fs::create_directories(dir);
    if (output.csv()) {
        write_file(dir / "report.csv", sgi::report_csv(report));
    }
    if (output.json()) {
        write_file(dir / "report.json", sgi::report_json(report).dump(2) + "\n");
    }
    write_file(dir / "map.csv", sgi::map_csv(report));
    if (report.density) {
        write_file(dir / "density.csv", sgi::density_csv(*report.density));
        std::optional<double> national;
        if (report.national) {
            national = report.national->result.sgi;
        }
        write_file(dir / "density.svg",
                   sgi::render_density_svg(*report.density, reference_lines(national),
                                           "Surplus Groom Index: kernel density across regions",
                                           "Surplus Groom Index"));
    }
    write_sidecar(dir, "compute", argc, argv);

    print_region_table(report, options.share_convention);
    std::cout << "birth interval (alpha): "
              << (options.alpha ? fixed(*options.alpha, 2) + " (override)"
                                : std::string{"per region, default 2.00"})
              << '\n';
    for (const auto &f : report.failures) {
        std::cerr << "error: region " << f.region_id << ": " << f.message << '\n';
    }
    return report.failures.empty() ? 0 : EXIT_COMPUTATION;
}

int cmd_sensitivity(const DataArgs &data, const OutputArgs &output,
                    const sgi::RunOptions &options, int argc, char **argv) {
    const auto bundle = sgi::load_bundle(data.paths(), sgi::load_options(options));
    report_warnings(bundle.warnings);
    std::vector<sgi::RegionFailure> failures;
    const auto rows = sgi::run_sensitivity(bundle, options, &failures);

    const fs::path dir{output.out_dir};
    fs::create_directories(dir);
    write_file(dir / "sensitivity.csv", sgi::sensitivity_csv(rows));
    write_sidecar(dir, "sensitivity", argc, argv);

    std::cout << std::left << std::setw(10) << "region" << std::right << std::setw(12) << "crude"
              << std::setw(12) << "effective" << std::setw(12) << "abs diff" << std::setw(12)
              << "rel diff" << '\n';
    for (const auto &r : rows) {
        std::cout << std::left << std::setw(10) << r.region_id << std::right << std::setw(12)
                  << fixed(r.sgi_crude, 5) << std::setw(12) << fixed(r.sgi_effective, 5)
                  << std::setw(12) << fixed(r.abs_diff, 5) << std::setw(12)
                  << fixed(r.rel_diff, 5) << '\n';
    }
    for (const auto &f : failures) {
        std::cerr << "error: region " << f.region_id << ": " << f.message << '\n';
    }
    return failures.empty() ? 0 : EXIT_COMPUTATION;
}

struct SimulateArgs {
    double srb = 1.0;
    std::string srb_convention = "females_per_male";
    double tfr = 2.0;
    double u5mr = 0.0;
    std::string u5mr_units = "proportion";
    double male_age = 26.0;
    double female_age = 21.0;
    std::size_t years = 200;
    std::size_t burn_in = 50;
    double b0 = 1'000'000.0;
    bool integer_mode = false;
};

int cmd_simulate(const SimulateArgs &args, const OutputArgs &output,
                 const sgi::RunOptions &options, int argc, char **argv) {
    const auto convention = sgi::parse_sex_ratio_convention(args.srb_convention);
    if (!convention) {
        throw sgi::invalid_input_error{"srb-convention", "unknown convention"};
    }
    const sgi::FertilityInputs fertility{args.tfr, args.u5mr,
                                         args.u5mr_units == "per_1000"
                                             ? sgi::MortalityUnits::per_1000
                                             : sgi::MortalityUnits::proportion};
    const sgi::SimulationParams params{
        .sex_ratio = sgi::canonicalize_sex_ratio(args.srb, *convention),
        .rt_effective = sgi::effective_fertility(fertility),
        .timing = sgi::MarriageTiming{args.male_age, args.female_age,
                                      options.alpha.value_or(sgi::DEFAULT_BIRTH_INTERVAL)},
        .years = args.years,
        .burn_in = args.burn_in,
        .initial_births = args.b0,
        .integer_mode = args.integer_mode,
    };
    const auto summary = sgi::run_simulate(params);

    const fs::path dir{output.out_dir};
    fs::create_directories(dir);
    write_file(dir / "trajectory.csv", sgi::trajectory_csv(summary.microsim));
    write_file(dir / "simulate_summary.json", sgi::to_json(params, summary).dump(2) + "\n");
    write_sidecar(dir, "simulate", argc, argv);

    std::cout << std::setprecision(12);
    std::cout << "closed-form sgi:        " << summary.closed_form.sgi << '\n'
              << "growth rate n:          " << summary.closed_form.growth_rate.per_year << '\n'
              << "stable cohort ratio:    " << summary.cohort_ratio << '\n'
              << "relative difference:    " << std::scientific << summary.cohort_ratio_rel_error
              << std::defaultfloat << (summary.cohort_ratio_rel_error < 1e-9 ? " (< 1e-9)" : "")
              << '\n'
              << "renewal residual:       " << std::scientific << summary.renewal_residual
              << std::defaultfloat << '\n'
              << "microsim ages (m/f):    " << summary.microsim.male_marriage_age << '/'
              << summary.microsim.female_marriage_age << '\n'
              << "unmatched male share:   " << summary.microsim.unmatched_male_share
              << "  (expected " << summary.expected_male_share << ")\n"
              << "unmatched female share: " << summary.microsim.unmatched_female_share
              << "  (expected " << summary.expected_female_share << ")\n"
              << "birth interval (alpha): " << params.timing.birth_interval() << '\n';
    return 0;
}

struct DensityArgs {
    std::string input;
    std::string column = "sgi";
    std::optional<double> national;
};

int cmd_density(const DensityArgs &args, const OutputArgs &output, const sgi::RunOptions &options,
                int argc, char **argv) {
    const auto table = sgi::csv::read_file(args.input);
    const auto c = table.require_column(args.column);
    std::vector<double> values;
    for (const auto &record : table.records()) {
        const auto v = sgi::csv::to_double(record.fields[c]);
        if (!v) {
            throw sgi::validation_error{args.input, record.line, args.column, "not a number"};
        }
        values.push_back(*v);
    }
    const auto curve = sgi::emit_density(values, options.bandwidth);

    const fs::path dir{output.out_dir};
    fs::create_directories(dir);
    write_file(dir / "density.csv", sgi::density_csv(curve));
    write_file(dir / "density.svg",
               sgi::render_density_svg(curve, reference_lines(args.national),
                                       "Kernel density of " + args.column, args.column));
    write_sidecar(dir, "density", argc, argv);

    std::cout << std::setprecision(6) << "values:    " << values.size() << '\n'
              << "bandwidth: " << curve.bandwidth << '\n'
              << "mode:      " << sgi::density_mode(curve) << '\n'
              << "integral:  " << sgi::trapezoid_integral(curve) << '\n';
    return 0;
}

int cmd_smam(const DataArgs &data, const std::string &region, const OutputArgs &output,
             const sgi::RunOptions &options, int argc, char **argv) {
    if (data.marital.empty()) {
        throw sgi::validation_error{"", 0, "", "smam needs --marital"};
    }
    const auto tables_by_region = sgi::load_marital_tables(data.marital, sgi::load_options(options));

    sgi::csv::Writer out{{"region_id", "sex", "smam"}};
    int status = 0;
    std::cout << std::left << std::setw(12) << "region" << std::setw(8) << "sex" << "smam\n";
    for (const auto &[id, tables] : tables_by_region) {
        if (!region.empty() && id != region) {
            continue;
        }
        for (const auto *t : {&tables.male, &tables.female}) {
            if (!*t) {
                continue;
            }
            const std::string sex{sgi::to_string((*t)->sex())};
            try {
                const double value = sgi::compute_smam(**t);
                out.row({id, sex, sgi::csv::format_double(value)});
                std::cout << std::left << std::setw(12) << id << std::setw(8) << sex
                          << fixed(value, 3) << '\n';
            } catch (const sgi::error &e) {
                std::cerr << "error: " << id << ' ' << sex << ": " << e.what() << '\n';
                status = EXIT_COMPUTATION;
            }
        }
    }
    const fs::path dir{output.out_dir};
    fs::create_directories(dir);
    write_file(dir / "smam.csv", out.str());
    write_sidecar(dir, "smam", argc, argv);
    return status;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Surplus Groom Index: marriage-market imbalance from census and vital statistics"};
    app.set_version_flag("--version", VERSION);
    app.require_subcommand(1);

    DataArgs data;
    OutputArgs output;
    sgi::RunOptions options;
    std::string share = "both";
    std::optional<double> alpha;
    std::optional<double> omega;
    std::optional<double> bandwidth;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--out-dir", output.out_dir, "Directory for output files")
            ->capture_default_str();
        cmd->add_option("--alpha", alpha, "Marriage-to-first-birth interval in years")
            ->check(CLI::NonNegativeNumber);
    };
    auto add_data = [&](CLI::App *cmd) {
        cmd->add_option("--data-dir", data.data_dir,
                        "Directory holding regions.csv and optionally marital.csv, sources.csv");
        cmd->add_option("--regions", data.regions, "regions.csv path");
        cmd->add_option("--marital", data.marital, "marital.csv path");
        cmd->add_option("--sources", data.sources, "sources.csv path (field,source,vintage)");
        cmd->add_option("--omega", omega, "Upper age limit for first marriage in SMAM");
    };

    auto *compute = app.add_subcommand("compute", "Index per region, national aggregate, density");
    add_data(compute);
    add_common(compute);
    compute->add_option("--share-convention", share, "Surplus share shown: paper, ratio or both")
        ->check(CLI::IsMember({"paper", "ratio", "both"}))
        ->capture_default_str();
    compute->add_option("--format", output.format, "Report format: csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    compute->add_option("--balance-tolerance", options.balance_tolerance,
                        "Half-width around 1 treated as balanced")
        ->capture_default_str();
    compute->add_option("--bandwidth", bandwidth, "Kernel bandwidth (default Silverman)");

    auto *sensitivity =
        app.add_subcommand("sensitivity", "Index with crude versus effective fertility");
    add_data(sensitivity);
    add_common(sensitivity);

    SimulateArgs sim;
    auto *simulate =
        app.add_subcommand("simulate", "Stable-population oracle and matching microsimulation");
    add_common(simulate);
    simulate->add_option("--srb", sim.srb, "Sex ratio at birth")->capture_default_str();
    simulate->add_option("--srb-convention", sim.srb_convention)
        ->check(CLI::IsMember({"females_per_male", "females_per_1000_males",
                               "males_per_100_females"}))
        ->capture_default_str();
    simulate->add_option("--tfr", sim.tfr, "Total fertility rate")->capture_default_str();
    simulate->add_option("--u5mr", sim.u5mr, "Under-five mortality")->capture_default_str();
    simulate->add_option("--u5mr-units", sim.u5mr_units)
        ->check(CLI::IsMember({"proportion", "per_1000"}))
        ->capture_default_str();
    simulate->add_option("--male-age", sim.male_age, "Male mean age at marriage")
        ->capture_default_str();
    simulate->add_option("--female-age", sim.female_age, "Female mean age at marriage")
        ->capture_default_str();
    simulate->add_option("--years", sim.years, "Horizon in years")->capture_default_str();
    simulate->add_option("--burn-in", sim.burn_in, "Matching years excluded from the shares")
        ->capture_default_str();
    simulate->add_option("--b0", sim.b0, "Births in the first year")->capture_default_str();
    simulate->add_flag("--integer", sim.integer_mode, "Round cohorts to whole persons");

    DensityArgs dens;
    auto *density = app.add_subcommand("density", "Kernel density of a column of values");
    density->add_option("--input", dens.input, "CSV file with a header row")->required();
    density->add_option("--column", dens.column, "Column holding the values")
        ->capture_default_str();
    density->add_option("--national", dens.national, "Draw a reference line at this value");
    density->add_option("--bandwidth", bandwidth, "Kernel bandwidth (default Silverman)");
    density->add_option("--out-dir", output.out_dir)->capture_default_str();

    std::string smam_region;
    auto *smam = app.add_subcommand("smam", "Singulate mean age at marriage from a marital CSV");
    smam->add_option("--marital", data.marital, "marital.csv path")->required();
    smam->add_option("--omega", omega, "Upper age limit for first marriage");
    smam->add_option("--region", smam_region, "Only this region");
    smam->add_option("--out-dir", output.out_dir)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return EXIT_VALIDATION;
    }

    options.alpha = alpha;
    options.omega = omega;
    options.bandwidth = bandwidth;
    options.share_convention = parse_share(share);

    try {
        if (compute->parsed()) {
            return cmd_compute(data, output, options, argc, argv);
        }
        if (sensitivity->parsed()) {
            return cmd_sensitivity(data, output, options, argc, argv);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim, output, options, argc, argv);
        }
        if (density->parsed()) {
            return cmd_density(dens, output, options, argc, argv);
        }
        if (smam->parsed()) {
            return cmd_smam(data, smam_region, output, options, argc, argv);
        }
    } catch (const sgi::error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_COMPUTATION;
    }
    return 0;
}
