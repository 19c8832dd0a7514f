#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rismc/cli/scenario.hpp"
#include "rismc/linalg.hpp"

namespace rismc::cli {

struct IterationTiming
{
    double waterfill_s = 0.0;
    double sweep_s = 0.0;
    double elapsed_s = 0.0;
    double mean_update_s = 0.0;  // per element: decoupling plus selection
    double mean_select_s = 0.0;  // per element: selection only
};

struct RealizationResult
{
    std::size_t index = 0;
    bool ok = false;
    std::string error;
    // Coupled-channel rate per trace entry (initial loads first).
    std::vector<double> rates;
    bool converged = false;
    std::size_t iterations = 0;
    RVector reactances;
    // Coupled-channel rate of the coupling-unaware design that seeded an
    // MCA run (run.init = mcu).
    std::optional<double> mcu_rate;
    std::vector<IterationTiming> timing;
    std::vector<std::string> warnings;

    double final_rate() const { return rates.empty() ? 0.0 : rates.back(); }
};

struct RunSummary
{
    std::vector<RealizationResult> realizations;

    std::size_t completed() const;
    std::size_t failed() const;
    std::size_t converged() const;
    // Statistics over completed realizations, in index order.
    double mean_rate() const;
    double median_rate() const;
    double std_rate() const;

    // 0 all completed, 1 otherwise.
    int exit_code() const;
};

// One realization; numerical failures are captured in the result.
RealizationResult run_realization(const Scenario& s, std::size_t index, unsigned assembly_threads = 0);

// All realizations, possibly concurrently; results are ordered by index.
// Throws ConfigError for scenarios that cannot run.
RunSummary run_experiment(const Scenario& s);

// Deterministic artifacts (pure functions of scenario and seed) and the
// wall-clock table.
std::string trace_csv(const RunSummary& r);
std::string rate_vs_iter_csv(const RunSummary& r);
std::string summary_json(const Scenario& s, const RunSummary& r);
std::string timing_csv(const RunSummary& r);

// Writes trace.csv, rate_vs_iter.csv, summary.json and timing.csv.
void write_artifacts(const Scenario& s, const RunSummary& r, const std::filesystem::path& out_dir);

enum class SpacingMode { fixed_aperture, fixed_count };

std::string_view spacing_mode_name(SpacingMode m);

struct SpacingRow
{
    SpacingMode mode = SpacingMode::fixed_count;
    double d = 0.0;  // wavelengths
    std::size_t n_ris = 0;
    CouplingMode coupling = CouplingMode::mca;
    double mean_rate = 0.0;
    double std_rate = 0.0;
    double mean_iterations = 0.0;
    std::size_t completed = 0;
    std::size_t failed = 0;
};

// RIS count used at spacing d: constant for fixed_count, the scenario's
// aperture ris_count * ris_spacing divided by d for fixed_aperture.
std::size_t ris_count_for(const Scenario& s, double d, SpacingMode mode);

// Rate at convergence per spacing, for MCA and MCU. Throws ConfigError
// before running anything if some d needs more than run.max_ris elements.
std::vector<SpacingRow> sweep_spacing(const Scenario& s, const std::vector<double>& d_values,
                                      SpacingMode mode, std::vector<std::string>* warnings = nullptr);

std::string spacing_csv(const std::vector<SpacingRow>& rows);

}  // namespace rismc::cli
