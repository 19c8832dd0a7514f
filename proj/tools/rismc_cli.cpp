#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rismc/cli/experiment.hpp"
#include "rismc/cli/scenario.hpp"
#include "rismc/cli/verify.hpp"
#include "rismc/em_model/bundle.hpp"

namespace {

using namespace rismc;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations;
    std::optional<std::string> solver;
    std::optional<std::string> coupling;
};

void apply(const Overrides& o, cli::Scenario& s)
{
    if (o.seed) {
        s.run.seed = *o.seed;
    }
    if (o.realizations) {
        if (*o.realizations == 0) {
            throw cli::ConfigError("--realizations must be at least 1");
        }
        s.run.realizations = *o.realizations;
    }
    if (o.solver) {
        s.run.solver = *o.solver == "grid_baseline" ? cli::Solver::grid_baseline : cli::Solver::closed_form;
    }
    if (o.coupling) {
        s.run.coupling = *o.coupling == "MCU" ? cli::CouplingMode::mcu : cli::CouplingMode::mca;
    }
}

// Accepts decimals ("0.125") and fractions ("1/8").
double parse_spacing(const std::string& text)
{
    auto number = [&](std::string_view t) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
            throw cli::ConfigError("bad spacing value '" + text + "'");
        }
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        return number(text);
    }
    return number(std::string_view(text).substr(0, slash)) / number(std::string_view(text).substr(slash + 1));
}

void print_warnings(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << "\n";
    }
}

int cmd_run(const std::filesystem::path& scenario_path, const Overrides& o, const std::filesystem::path& out_dir)
{
    cli::Scenario s = cli::load_scenario(scenario_path);
    apply(o, s);
    print_warnings(s.warnings);
    const cli::RunSummary r = cli::run_experiment(s);
    cli::write_artifacts(s, r, out_dir);
    for (const auto& x : r.realizations) {
        if (!x.ok) {
            std::cerr << "realization " << x.index << " failed: " << x.error << "\n";
        }
    }
    std::printf("realizations %zu completed %zu converged %zu mean rate %.6f bit/s/Hz\n",
                r.realizations.size(), r.completed(), r.converged(), r.mean_rate());
    std::printf("artifacts in %s\n", out_dir.string().c_str());
    return r.exit_code();
}

int cmd_sweep(const std::filesystem::path& scenario_path, const Overrides& o,
              const std::filesystem::path& out_dir, const std::vector<std::string>& d_list,
              const std::string& mode_name)
{
    cli::Scenario s = cli::load_scenario(scenario_path);
    apply(o, s);
    const auto mode = mode_name == "fixed_aperture" ? cli::SpacingMode::fixed_aperture : cli::SpacingMode::fixed_count;
    std::vector<double> d_values;
    for (const auto& d : d_list) {
        d_values.push_back(parse_spacing(d));
    }
    std::vector<std::string> warnings = s.warnings;
    const auto rows = cli::sweep_spacing(s, d_values, mode, &warnings);
    print_warnings(warnings);
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / ("sweep_" + std::string(cli::spacing_mode_name(mode)) + ".csv");
    const std::string csv = cli::spacing_csv(rows);
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) {
        throw cli::ConfigError("cannot write " + path.string());
    }
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
    std::cout << csv;
    bool any_failed = false;
    for (const auto& row : rows) {
        any_failed = any_failed || row.failed > 0;
    }
    return any_failed ? kExitFailure : kExitOk;
}

int cmd_verify(const std::string& level, std::uint64_t seed, const std::string& fault)
{
    cli::VerifyOptions options;
    options.level = level == "full" ? cli::VerifyLevel::full : cli::VerifyLevel::quick;
    options.seed = seed;
    options.fault = fault == "flip-zsot" ? cli::Fault::flip_z_sot_sign : cli::Fault::none;
    const auto reports = cli::verify(options);
    std::cout << cli::format_reports(reports);
    return cli::all_passed(reports) ? kExitOk : kExitFailure;
}

int cmd_export(const std::filesystem::path& scenario_path, const Overrides& o,
               const std::filesystem::path& out, std::size_t realization)
{
    cli::Scenario s = cli::load_scenario(scenario_path);
    apply(o, s);
    print_warnings(s.warnings);
    const auto z = cli::build_impedance_set(s, realization);
    em::save_impedance_set(z, out);
    std::printf("wrote %s (M=%ld L=%ld N_RIS=%ld N_e=%ld)\n", out.string().c_str(), static_cast<long>(z.m()),
                static_cast<long>(z.l()), static_cast<long>(z.n_ris()), static_cast<long>(z.n_e()));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RIS-aided MIMO optimization with mutual coupling and scattering objects"};
    app.require_subcommand(1);

    Overrides overrides;
    std::string out_dir = "out";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", overrides.seed, "Master seed");
        sub->add_option("--out-dir", out_dir, "Output directory");
        sub->add_option("--realizations", overrides.realizations, "Number of realizations");
        sub->add_option("--solver", overrides.solver, "closed_form or grid_baseline")
            ->check(CLI::IsMember({"closed_form", "grid_baseline"}));
        sub->add_option("--coupling", overrides.coupling, "MCA or MCU")->check(CLI::IsMember({"MCA", "MCU"}));
    };

    std::string scenario;
    auto* run = app.add_subcommand("run", "Run the optimizer over seeded realizations");
    run->add_option("scenario", scenario, "Scenario file")->required();
    add_common(run);

    std::vector<std::string> d_list;
    std::string mode = "fixed_count";
    auto* sweep = app.add_subcommand("sweep-d", "Rate at convergence versus RIS spacing");
    sweep->add_option("scenario", scenario, "Scenario file")->required();
    sweep->add_option("--d-list", d_list, "Spacings in wavelengths, e.g. 1/2,1/4,1/8")->delimiter(',')->required();
    sweep->add_option("--mode", mode, "fixed_aperture or fixed_count")
        ->check(CLI::IsMember({"fixed_aperture", "fixed_count"}));
    add_common(sweep);

    std::string level = "quick";
    std::uint64_t verify_seed = 1;
    std::string fault = "none";
    auto* ver = app.add_subcommand("verify", "Cross-check against the dense reference implementations");
    ver->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    ver->add_option("--seed", verify_seed, "Instance seed");
    ver->add_option("--inject-fault", fault, "Corrupt the main path (flip-zsot) to exercise the checks")
        ->check(CLI::IsMember({"none", "flip-zsot"}));

    std::string bundle_out;
    std::size_t realization = 0;
    auto* exp = app.add_subcommand("export-impedances", "Write the impedance bundle of one realization");
    exp->add_option("scenario", scenario, "Scenario file")->required();
    exp->add_option("--out", bundle_out, "Bundle path")->required();
    exp->add_option("--realization", realization, "Realization index");
    exp->add_option("--seed", overrides.seed, "Master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(scenario, overrides, out_dir);
        }
        if (*sweep) {
            return cmd_sweep(scenario, overrides, out_dir, d_list, mode);
        }
        if (*ver) {
            return cmd_verify(level, verify_seed, fault);
        }
        return cmd_export(scenario, overrides, bundle_out, realization);
    } catch (const ParseError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cli::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
