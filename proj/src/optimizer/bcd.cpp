#include "rismc/optimizer/bcd.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "rismc/channel/rate.hpp"
#include "rismc/errors.hpp"
#include "rismc/optimizer/waterfill.hpp"
#include "rismc/oracle/dense.hpp"

namespace rismc::opt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double current_rate(const channel::ReducedNetwork& net, const channel::RisLoadState& loads,
                    const CMatrix& q, double sigma2)
{
    return channel::achievable_rate(channel::end_to_end_channel(net, loads.impedances()), q, sigma2);
}

}  // namespace

SweepResult run_sweep(const channel::ReducedNetwork& net, const channel::RisLoadState& loads,
                      const CMatrix& q, double sigma2, const SweepOptions& options)
{
    if (options.rule == UpdateRule::grid && options.grid_points < 2) {
        throw ContractViolation("grid baseline needs at least 2 grid points");
    }
    channel::require_psd(q);
    SweepResult result{loads, {}, {}, 0.0};
    if (options.record_rates) {
        result.rate_before = current_rate(net, loads, q, sigma2);
    }
    const SweepContext ctx(net);
    const auto& bounds = loads.bounds();

    for (Eigen::Index k = 0; k < net.n_ris(); ++k) {
        ElementUpdate update;
        update.k = k;
        update.x_before = result.loads.x()[k];
        update.x_after = update.x_before;

        const auto t0 = Clock::now();
        std::optional<DetCoefficients> coeffs;
        try {
            const DecoupledElement d = decouple_element(net, ctx, result.loads, k);
            coeffs = det_coefficients(d, q, sigma2);
        } catch (const DegenerateElementError& e) {
            update.skipped = true;
            result.warnings.push_back(e.what());
        } catch (const Error& e) {
            throw SweepError(static_cast<std::size_t>(k), e.what());
        }
        update.decouple_s = seconds_since(t0);

        if (!update.skipped) {
            if (!coeffs) {
                update.inert = true;
            } else {
                const auto t1 = Clock::now();
                if (options.rule == UpdateRule::closed_form) {
                    const ReactanceChoice choice = optimal_reactance(*coeffs, bounds);
                    update.x_after = choice.x;
                    update.branch = choice.branch;
                } else {
                    update.x_after =
                        oracle::grid_max_f(*coeffs, bounds, options.grid_points).x;
                }
                update.select_s = seconds_since(t1);
                result.loads.set_reactance(k, update.x_after);
            }
        }
        if (options.record_rates) {
            update.rate_after = current_rate(net, result.loads, q, sigma2);
        }
        result.updates.push_back(std::move(update));
    }
    return result;
}

channel::RisLoadState bcd_sweep(const channel::ReducedNetwork& net,
                                const channel::RisLoadState& loads, const CMatrix& q,
                                double sigma2)
{
    return run_sweep(net, loads, q, sigma2).loads;
}

channel::RisLoadState grid_baseline_sweep(const channel::ReducedNetwork& net,
                                          const channel::RisLoadState& loads, const CMatrix& q,
                                          double sigma2, std::size_t grid_points)
{
    SweepOptions options;
    options.rule = UpdateRule::grid;
    options.grid_points = grid_points;
    return run_sweep(net, loads, q, sigma2, options).loads;
}

P0Solution solve_p0(const channel::ReducedNetwork& net, const channel::RisLoadState& init_loads,
                    double p_t, double sigma2, double epsilon, std::size_t max_outer,
                    const SweepOptions& options)
{
    if (!(epsilon >= 0.0)) {
        throw ContractViolation("epsilon must be >= 0");
    }
    if (max_outer < 1) {
        throw ContractViolation("max_outer must be >= 1");
    }
    const auto start = Clock::now();

    P0Solution sol{CMatrix(), init_loads, {}};
    sol.trace.epsilon = epsilon;

    CMatrix h = channel::end_to_end_channel(net, sol.loads.impedances());
    sol.q = waterfill(h, p_t, sigma2);
    double previous = channel::achievable_rate(h, sol.q, sigma2);
    sol.trace.rates.push_back(previous);
    sol.trace.reactances.push_back(sol.loads.x());

    for (std::size_t iter = 0; iter < max_outer; ++iter) {
        IterationRecord record;
        const auto t_wf = Clock::now();
        h = channel::end_to_end_channel(net, sol.loads.impedances());
        sol.q = waterfill(h, p_t, sigma2);
        record.waterfill_s = seconds_since(t_wf);

        const auto t_sweep = Clock::now();
        SweepResult sweep = run_sweep(net, sol.loads, sol.q, sigma2, options);
        record.sweep_s = seconds_since(t_sweep);
        sol.loads = std::move(sweep.loads);
        record.updates = std::move(sweep.updates);
        for (auto& w : sweep.warnings) {
            sol.trace.warnings.push_back(std::move(w));
        }

        record.rate = current_rate(net, sol.loads, sol.q, sigma2);
        record.elapsed_s = seconds_since(start);
        sol.trace.rates.push_back(record.rate);
        sol.trace.reactances.push_back(sol.loads.x());
        sol.trace.iterations.push_back(std::move(record));

        const double current = sol.trace.rates.back();
        if (std::abs(current - previous) <= epsilon) {
            sol.trace.converged = true;
            break;
        }
        previous = current;
    }
    sol.trace.total_s = seconds_since(start);
    return sol;
}

channel::RisLoadState random_loads(std::size_t n, double r0, const channel::ReactanceBounds& bounds,
                                   std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(bounds.lower, bounds.upper);
    RVector x(static_cast<Eigen::Index>(n));
    for (auto& v : x) {
        v = dist(rng);
    }
    return channel::RisLoadState(RVector::Constant(static_cast<Eigen::Index>(n), r0), std::move(x),
                                 bounds);
}

}  // namespace rismc::opt
