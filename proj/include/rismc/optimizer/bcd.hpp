#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rismc/channel/network.hpp"
#include "rismc/optimizer/reactance.hpp"

namespace rismc::opt {

enum class UpdateRule { closed_form, grid };

struct SweepOptions
{
    UpdateRule rule = UpdateRule::closed_form;
    std::size_t grid_points = 10001;
    // Evaluate the full channel rate after every element update.
    bool record_rates = false;
};

struct ElementUpdate
{
    Eigen::Index k = 0;
    std::optional<ReactanceBranch> branch;  // closed-form rule only
    bool skipped = false;                   // degenerate element
    bool inert = false;                     // load cannot affect the rate
    double x_before = 0.0;
    double x_after = 0.0;
    double rate_after = 0.0;  // set when SweepOptions::record_rates
    double decouple_s = 0.0;  // decoupling and coefficient time
    double select_s = 0.0;    // single-variable maximization time
};

struct SweepResult
{
    channel::RisLoadState loads;
    std::vector<ElementUpdate> updates;
    std::vector<std::string> warnings;
    double rate_before = 0.0;  // set when SweepOptions::record_rates
};

// One pass k = 0..N-1 of single-element updates with Q fixed. Degenerate
// elements are skipped with a warning; other numerical failures throw
// SweepError carrying the element index.
SweepResult run_sweep(const channel::ReducedNetwork& net, const channel::RisLoadState& loads,
                      const CMatrix& q, double sigma2, const SweepOptions& options = {});

channel::RisLoadState bcd_sweep(const channel::ReducedNetwork& net,
                                const channel::RisLoadState& loads, const CMatrix& q,
                                double sigma2);

// Same sweep with each element maximized over a uniform grid of
// `grid_points` reactances (both bounds included).
channel::RisLoadState grid_baseline_sweep(const channel::ReducedNetwork& net,
                                          const channel::RisLoadState& loads, const CMatrix& q,
                                          double sigma2, std::size_t grid_points);

struct IterationRecord
{
    double rate = 0.0;
    double waterfill_s = 0.0;
    double sweep_s = 0.0;
    double elapsed_s = 0.0;  // since solver start
    std::vector<ElementUpdate> updates;
};

struct OptimizerTrace
{
    // rates[0] is the rate at the initial loads with water-filled Q; rates[q]
    // follows outer iteration q.
    std::vector<double> rates;
    // Reactances behind each entry of `rates`.
    std::vector<RVector> reactances;
    std::vector<IterationRecord> iterations;
    std::vector<std::string> warnings;
    double epsilon = 0.0;
    bool converged = false;
    double total_s = 0.0;

    std::size_t outer_iterations() const { return iterations.size(); }
};

struct P0Solution
{
    CMatrix q;
    channel::RisLoadState loads;
    OptimizerTrace trace;
};

// Alternates water-filling with a sweep until |R^(q) - R^(q-1)| <= epsilon
// (at least one outer iteration) or max_outer iterations; running out of
// iterations returns converged = false.
P0Solution solve_p0(const channel::ReducedNetwork& net, const channel::RisLoadState& init_loads,
                    double p_t, double sigma2, double epsilon, std::size_t max_outer,
                    const SweepOptions& options = {});

// Reactances drawn uniformly from the bounds with a fixed seed.
channel::RisLoadState random_loads(std::size_t n, double r0, const channel::ReactanceBounds& bounds,
                                   std::uint64_t seed);

}  // namespace rismc::opt
