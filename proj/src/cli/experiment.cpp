#include "rismc/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

#include "rismc/channel/network.hpp"
#include "rismc/channel/rate.hpp"
#include "rismc/optimizer/bcd.hpp"
#include "rismc/optimizer/waterfill.hpp"

namespace rismc::cli {

namespace {

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double coupled_rate(const channel::ReducedNetwork& net, const channel::RisLoadState& loads,
                    double p_t, double sigma2)
{
    const CMatrix h = channel::end_to_end_channel(net, loads.impedances());
    return channel::achievable_rate(h, opt::waterfill(h, p_t, sigma2), sigma2);
}

std::vector<IterationTiming> timing_of(const opt::OptimizerTrace& trace)
{
    std::vector<IterationTiming> out;
    for (const auto& it : trace.iterations) {
        IterationTiming t{it.waterfill_s, it.sweep_s, it.elapsed_s, 0.0, 0.0};
        if (!it.updates.empty()) {
            for (const auto& u : it.updates) {
                t.mean_update_s += u.decouple_s + u.select_s;
                t.mean_select_s += u.select_s;
            }
            t.mean_update_s /= static_cast<double>(it.updates.size());
            t.mean_select_s /= static_cast<double>(it.updates.size());
        }
        out.push_back(t);
    }
    return out;
}

std::vector<double> completed_rates(const RunSummary& r)
{
    std::vector<double> v;
    for (const auto& x : r.realizations) {
        if (x.ok) {
            v.push_back(x.final_rate());
        }
    }
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << content;
}

}  // namespace

std::size_t RunSummary::completed() const
{
    return static_cast<std::size_t>(std::count_if(realizations.begin(), realizations.end(),
                                                  [](const auto& x) { return x.ok; }));
}

std::size_t RunSummary::failed() const { return realizations.size() - completed(); }

std::size_t RunSummary::converged() const
{
    return static_cast<std::size_t>(std::count_if(realizations.begin(), realizations.end(),
                                                  [](const auto& x) { return x.ok && x.converged; }));
}

double RunSummary::mean_rate() const
{
    const auto v = completed_rates(*this);
    if (v.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    return sum / static_cast<double>(v.size());
}

double RunSummary::median_rate() const
{
    auto v = completed_rates(*this);
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double RunSummary::std_rate() const
{
    const auto v = completed_rates(*this);
    if (v.size() < 2) {
        return 0.0;
    }
    const double mean = mean_rate();
    double acc = 0.0;
    for (double x : v) {
        acc += (x - mean) * (x - mean);
    }
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

int RunSummary::exit_code() const { return failed() == 0 ? 0 : 1; }

RealizationResult run_realization(const Scenario& s, std::size_t index, unsigned assembly_threads)
{
    RealizationResult result;
    result.index = index;
    try {
        const em::ImpedanceSet z = build_impedance_set(s, index, assembly_threads);
        const channel::ReducedNetwork net = channel::reduce_network(z);
        const double p_t = s.signal.pt_watts();
        const double sigma2 = s.signal.sigma2_watts();

        opt::SweepOptions options;
        options.rule = s.run.solver == Solver::closed_form ? opt::UpdateRule::closed_form
                                                           : opt::UpdateRule::grid;
        options.grid_points = s.run.grid_points;

        channel::RisLoadState loads = opt::random_loads(
            static_cast<std::size_t>(net.n_ris()), s.loads.r0_ohm, s.loads.bounds(),
            derive_seed(s.run.seed, index, 1));

        const bool unaware_first = s.run.coupling == CouplingMode::mcu || s.run.init == Initialization::mcu;
        std::optional<opt::P0Solution> unaware;
        if (unaware_first) {
            unaware = opt::solve_p0(net.without_ris_coupling(), loads, p_t, sigma2, s.run.epsilon,
                                    s.run.max_outer, options);
        }

        if (s.run.coupling == CouplingMode::mcu) {
            const auto& trace = unaware->trace;
            for (const RVector& x : trace.reactances) {
                const channel::RisLoadState state(loads.r0(), x, loads.bounds());
                result.rates.push_back(coupled_rate(net, state, p_t, sigma2));
            }
            result.converged = trace.converged;
            result.iterations = trace.outer_iterations();
            result.reactances = unaware->loads.x();
            result.timing = timing_of(trace);
            result.warnings = trace.warnings;
        } else {
            if (unaware) {
                loads = unaware->loads;
                result.mcu_rate = coupled_rate(net, loads, p_t, sigma2);
            }
            const auto sol = opt::solve_p0(net, loads, p_t, sigma2, s.run.epsilon, s.run.max_outer, options);
            result.rates = sol.trace.rates;
            result.converged = sol.trace.converged;
            result.iterations = sol.trace.outer_iterations();
            result.reactances = sol.loads.x();
            result.timing = timing_of(sol.trace);
            result.warnings = sol.trace.warnings;
        }
        result.ok = true;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        result.ok = false;
        result.error = e.what();
        result.rates.clear();
    }
    return result;
}

RunSummary run_experiment(const Scenario& s)
{
    validate_for_run(s);
    const std::size_t n = s.run.realizations;
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(n, s.run.threads == 0 ? hw : s.run.threads);
    const unsigned assembly_threads = workers > 1 ? 1u : 0u;

    RunSummary summary;
    summary.realizations.resize(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr config_failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                summary.realizations[i] = run_realization(s, i, assembly_threads);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!config_failure) {
                    config_failure = std::current_exception();
                }
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }
    if (config_failure) {
        std::rethrow_exception(config_failure);
    }
    return summary;
}

std::string trace_csv(const RunSummary& r)
{
    std::string out = "realization,iter,rate_bps_hz\n";
    for (const auto& x : r.realizations) {
        for (std::size_t i = 0; i < x.rates.size(); ++i) {
            out += std::to_string(x.index) + "," + std::to_string(i) + "," + format_real(x.rates[i]) + "\n";
        }
    }
    return out;
}

std::string rate_vs_iter_csv(const RunSummary& r)
{
    std::size_t longest = 0;
    for (const auto& x : r.realizations) {
        longest = std::max(longest, x.rates.size());
    }
    std::string out = "iter,mean_rate_bps_hz,std_rate_bps_hz,realizations\n";
    for (std::size_t i = 0; i < longest; ++i) {
        // Realizations that stopped earlier hold their final rate.
        std::vector<double> v;
        for (const auto& x : r.realizations) {
            if (x.ok && !x.rates.empty()) {
                v.push_back(x.rates[std::min(i, x.rates.size() - 1)]);
            }
        }
        double mean = 0.0;
        for (double a : v) {
            mean += a;
        }
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double a : v) {
            var += (a - mean) * (a - mean);
        }
        const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
        out += std::to_string(i) + "," + format_real(mean) + "," + format_real(sd) + "," +
               std::to_string(v.size()) + "\n";
    }
    return out;
}

std::string summary_json(const Scenario& s, const RunSummary& r)
{
    nlohmann::ordered_json j;
    j["format"] = "rismc-summary";
    j["version"] = 1;
    j["seed"] = s.run.seed;
    j["solver"] = std::string(solver_name(s.run.solver));
    j["coupling_mode"] = std::string(coupling_name(s.run.coupling));
    j["n_ris"] = s.geometry.ris_count;
    j["ris_spacing_lambda"] = s.geometry.ris_spacing;
    j["epsilon"] = s.run.epsilon;
    j["realizations"] = r.realizations.size();
    j["completed"] = r.completed();
    j["failed"] = r.failed();
    j["converged"] = r.converged();
    j["mean_rate_bps_hz"] = r.mean_rate();
    j["median_rate_bps_hz"] = r.median_rate();
    j["std_rate_bps_hz"] = r.std_rate();
    auto& per = j["per_realization"] = nlohmann::ordered_json::array();
    for (const auto& x : r.realizations) {
        nlohmann::ordered_json e;
        e["index"] = x.index;
        e["ok"] = x.ok;
        if (x.ok) {
            e["final_rate_bps_hz"] = x.final_rate();
            e["iterations"] = x.iterations;
            e["converged"] = x.converged;
            if (x.mcu_rate) {
                e["mcu_rate_bps_hz"] = *x.mcu_rate;
            }
        } else {
            e["error"] = x.error;
        }
        if (!x.warnings.empty()) {
            e["warnings"] = x.warnings;
        }
        per.push_back(std::move(e));
    }
    if (!s.warnings.empty()) {
        j["warnings"] = s.warnings;
    }
    return j.dump(2) + "\n";
}

std::string timing_csv(const RunSummary& r)
{
    std::string out = "realization,iter,waterfill_s,sweep_s,elapsed_s,mean_update_s,mean_select_s\n";
    for (const auto& x : r.realizations) {
        for (std::size_t i = 0; i < x.timing.size(); ++i) {
            const auto& t = x.timing[i];
            out += std::to_string(x.index) + "," + std::to_string(i + 1) + "," +
                   format_real(t.waterfill_s) + "," + format_real(t.sweep_s) + "," +
                   format_real(t.elapsed_s) + "," + format_real(t.mean_update_s) + "," +
                   format_real(t.mean_select_s) + "\n";
        }
    }
    return out;
}

void write_artifacts(const Scenario& s, const RunSummary& r, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "trace.csv", trace_csv(r));
    write_file(out_dir / "rate_vs_iter.csv", rate_vs_iter_csv(r));
    write_file(out_dir / "summary.json", summary_json(s, r));
    write_file(out_dir / "timing.csv", timing_csv(r));
}

std::string_view spacing_mode_name(SpacingMode m)
{
    return m == SpacingMode::fixed_aperture ? "fixed_aperture" : "fixed_count";
}

std::size_t ris_count_for(const Scenario& s, double d, SpacingMode mode)
{
    if (mode == SpacingMode::fixed_count) {
        return s.geometry.ris_count;
    }
    const double aperture = static_cast<double>(s.geometry.ris_count) * s.geometry.ris_spacing;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(aperture / d)));
}

std::vector<SpacingRow> sweep_spacing(const Scenario& s, const std::vector<double>& d_values,
                                      SpacingMode mode, std::vector<std::string>* warnings)
{
    if (d_values.empty()) {
        throw ConfigError("no spacing values given");
    }
    for (double d : d_values) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw ConfigError("spacing values must be positive");
        }
        const std::size_t n = ris_count_for(s, d, mode);
        if (n > s.run.max_ris) {
            throw ConfigError("spacing " + format_real(d) + " needs " + std::to_string(n) +
                              " RIS elements, above run.max_ris = " + std::to_string(s.run.max_ris) +
                              "; raise run.max_ris or shrink geometry.ris_count");
        }
        if (d > 0.5 && warnings) {
            warnings->push_back("spacing " + format_real(d) + " exceeds half a wavelength");
        }
    }

    std::vector<SpacingRow> rows;
    for (double d : d_values) {
        for (CouplingMode c : {CouplingMode::mca, CouplingMode::mcu}) {
            Scenario point = s;
            point.geometry.ris_spacing = d;
            point.geometry.ris_count = ris_count_for(s, d, mode);
            point.run.coupling = c;
            point.run.init = Initialization::random;
            point.bundle.reset();
            const RunSummary r = run_experiment(point);

            SpacingRow row{mode, d, point.geometry.ris_count, c, r.mean_rate(), r.std_rate(), 0.0,
                           r.completed(), r.failed()};
            for (const auto& x : r.realizations) {
                if (x.ok) {
                    row.mean_iterations += static_cast<double>(x.iterations);
                }
            }
            if (row.completed > 0) {
                row.mean_iterations /= static_cast<double>(row.completed);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string spacing_csv(const std::vector<SpacingRow>& rows)
{
    std::string out = "mode,d_lambda,n_ris,coupling,mean_rate_bps_hz,std_rate_bps_hz,mean_iterations,completed,failed\n";
    for (const auto& r : rows) {
        out += std::string(spacing_mode_name(r.mode)) + "," + format_real(r.d) + "," +
               std::to_string(r.n_ris) + "," + std::string(coupling_name(r.coupling)) + "," +
               format_real(r.mean_rate) + "," + format_real(r.std_rate) + "," +
               format_real(r.mean_iterations) + "," + std::to_string(r.completed) + "," +
               std::to_string(r.failed) + "\n";
    }
    return out;
}

}  // namespace rismc::cli
