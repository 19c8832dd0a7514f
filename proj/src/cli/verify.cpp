#include "rismc/cli/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "rismc/channel/network.hpp"
#include "rismc/channel/rate.hpp"
#include "rismc/cli/scenario.hpp"
#include "rismc/optimizer/bcd.hpp"
#include "rismc/optimizer/decouple.hpp"
#include "rismc/optimizer/reactance.hpp"
#include "rismc/optimizer/waterfill.hpp"
#include "rismc/oracle/instances.hpp"

namespace rismc::cli {

namespace {

constexpr channel::ReactanceBounds kBounds{-302.5, -19.66};

struct Budget
{
    std::size_t instances;
    Eigen::Index max_ris;
    std::size_t per_branch;
    std::size_t grid_points;
    std::size_t samples_per_instance;
};

Budget budget_for(VerifyLevel level)
{
    return level == VerifyLevel::quick ? Budget{40, 16, 100, 10001, 10}
                                       : Budget{300, 64, 1000, 100001, 50};
}

class Tracker
{
public:
    Tracker(std::string check, double tolerance, std::uint64_t seed)
        : seed_(seed)
    {
        report_.check = std::move(check);
        report_.tolerance = tolerance;
    }

    void add(double error, std::size_t instance, const std::string& detail = {})
    {
        const double e = std::isnan(error) ? INFINITY : error;
        if (report_.samples++ == 0 || e > report_.max_relative_error) {
            report_.max_relative_error = e;
            report_.worst_case_id = "seed=" + std::to_string(seed_) + " instance=" + std::to_string(instance);
            report_.detail = detail;
        }
    }

    oracle::OracleReport finish(std::string extra = {})
    {
        report_.passed = report_.samples > 0 && report_.max_relative_error <= report_.tolerance;
        if (!extra.empty()) {
            report_.detail = report_.detail.empty() ? extra : report_.detail + "; " + extra;
        }
        return report_;
    }

private:
    std::uint64_t seed_;
    oracle::OracleReport report_;
};

oracle::Rng instance_rng(std::uint64_t seed, std::size_t instance, std::uint64_t check)
{
    return oracle::Rng(derive_seed(seed, instance, 100 + check));
}

oracle::InstanceShape random_shape(oracle::Rng& rng, Eigen::Index max_ris)
{
    auto pick = [&](Eigen::Index lo, Eigen::Index hi) {
        return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
    };
    return {pick(1, 4), pick(1, 4), pick(1, max_ris), pick(0, 8)};
}

channel::ReducedNetwork main_path(const em::ImpedanceSet& z, Fault fault)
{
    channel::ReducedNetwork net = channel::reduce_network(z);
    if (fault == Fault::flip_z_sot_sign) {
        net.z_sot = -net.z_sot;
    }
    return net;
}

struct BlockDiff
{
    std::string name;
    double error;
};

BlockDiff worst_block(const channel::ReducedNetwork& net, const oracle::DenseReduction& ref)
{
    const std::array<BlockDiff, 4> diffs{{{"Z_ROT", relative_error(net.z_rot, ref.z_rot)},
                                          {"Z_ROS", relative_error(net.z_ros, ref.z_ros)},
                                          {"Z_SOS", relative_error(net.z_sos, ref.z_sos)},
                                          {"Z_SOT", relative_error(net.z_sot, ref.z_sot)}}};
    BlockDiff worst = diffs[0];
    for (const auto& d : diffs) {
        if (d.error > worst.error) {
            worst = d;
        }
    }
    return worst;
}

oracle::OracleReport check_reduction(const VerifyOptions& o, const Budget& b)
{
    Tracker t("reduction", 1e-9, o.seed);
    for (std::size_t i = 0; i < b.instances; ++i) {
        auto rng = instance_rng(o.seed, i, 1);
        const auto z = oracle::random_impedance_set(rng, random_shape(rng, std::min<Eigen::Index>(b.max_ris, 16)));
        const auto worst = worst_block(main_path(z, o.fault), oracle::dense_block_elimination(z));
        t.add(worst.error, i, "worst block " + worst.name);
    }
    return t.finish();
}

oracle::OracleReport check_decoupled_channel(const VerifyOptions& o, const Budget& b)
{
    Tracker t("decoupled_channel", 1e-9, o.seed);
    for (std::size_t i = 0; i < b.instances; ++i) {
        auto rng = instance_rng(o.seed, i, 2);
        const auto shape = random_shape(rng, b.max_ris);
        const auto z = oracle::random_impedance_set(rng, shape);
        const auto net = main_path(z, o.fault);
        const auto loads = oracle::random_state(rng, shape.n_ris, kBounds);
        const auto k = std::uniform_int_distribution<Eigen::Index>(0, shape.n_ris - 1)(rng);
        const double x = std::uniform_real_distribution<double>(kBounds.lower, kBounds.upper)(rng);
        const auto d = opt::decouple_element(net, loads, k);
        channel::RisLoadState moved = loads;
        moved.set_reactance(k, x);
        const double err = relative_error(d.channel(cplx(loads.r0()(k), x)),
                                          oracle::dense_channel(z, moved.impedances()));
        std::string detail;
        if (err > 1e-9) {
            const auto worst = worst_block(net, oracle::dense_block_elimination(z));
            detail = worst.error > 1e-9 ? "mismatch traced to block " + worst.name
                                        : "mismatch in the B_k + C_k / chi_k assembly";
        }
        t.add(err, i, detail);
    }
    return t.finish();
}

oracle::OracleReport check_sherman_morrison(const VerifyOptions& o, const Budget& b)
{
    Tracker t("sherman_morrison", 1e-10, o.seed);
    for (std::size_t i = 0; i < b.instances; ++i) {
        auto rng = instance_rng(o.seed, i, 3);
        const auto shape = random_shape(rng, b.max_ris);
        const auto z = oracle::random_impedance_set(rng, shape);
        const auto net = channel::reduce_network(z);
        const auto loads = oracle::random_state(rng, shape.n_ris, kBounds);
        const auto k = std::uniform_int_distribution<Eigen::Index>(0, shape.n_ris - 1)(rng);
        const double x = std::uniform_real_distribution<double>(kBounds.lower, kBounds.upper)(rng);
        const auto d = opt::decouple_element(net, loads, k);
        channel::RisLoadState moved = loads;
        moved.set_reactance(k, x);
        const CMatrix full = net.z_ss + net.z_sos + CMatrix(moved.impedances().asDiagonal());
        t.add(relative_error(d.scattering_inverse(cplx(loads.r0()(k), x)), oracle::naive_inverse(full)), i);
    }
    return t.finish();
}

oracle::OracleReport check_determinant_identity(const VerifyOptions& o, const Budget& b)
{
    Tracker t("determinant_identity", 1e-9, o.seed);
    for (std::size_t i = 0; i < b.instances; ++i) {
        auto rng = instance_rng(o.seed, i, 4);
        const auto shape = random_shape(rng, b.max_ris);
        const auto z = oracle::random_impedance_set(rng, shape);
        const auto net = channel::reduce_network(z);
        const auto loads = oracle::random_state(rng, shape.n_ris, kBounds);
        const auto k = std::uniform_int_distribution<Eigen::Index>(0, shape.n_ris - 1)(rng);
        const CMatrix q = oracle::random_psd(rng, shape.m, 1.0);
        const double sigma2 = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 1.0)(rng));
        const auto d = opt::decouple_element(net, loads, k);
        const auto c = opt::det_coefficients(d, q, sigma2);
        if (!c) {
            continue;
        }
        const auto l = shape.l;
        const CMatrix eye = CMatrix::Identity(l, l);
        const cplx base = oracle::naive_determinant(eye + d.b * q * d.b.adjoint() / sigma2);
        double worst = 0.0;
        for (std::size_t s = 0; s < b.samples_per_instance; ++s) {
            const double x = std::uniform_real_distribution<double>(kBounds.lower, kBounds.upper)(rng);
            const CMatrix h = d.channel(cplx(d.r0k, x));
            const double ref = (oracle::naive_determinant(eye + h * q * h.adjoint() / sigma2) / base).real();
            worst = std::max(worst, std::abs(opt::det_s(*c, x) - ref) / std::abs(ref));
        }
        t.add(worst, i);
    }
    return t.finish();
}

oracle::OracleReport check_rate(const VerifyOptions& o, const Budget& b)
{
    Tracker t("rate", 1e-9, o.seed);
    for (std::size_t i = 0; i < b.instances; ++i) {
        auto rng = instance_rng(o.seed, i, 5);
        const auto l = std::uniform_int_distribution<Eigen::Index>(1, 6)(rng);
        const auto m = std::uniform_int_distribution<Eigen::Index>(1, 6)(rng);
        const CMatrix h = oracle::random_matrix(rng, l, m);
        const CMatrix q = oracle::random_psd(rng, m, 2.0);
        const double sigma2 = std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 1.0)(rng));
        const double main = channel::achievable_rate(h, q, sigma2);
        const double ref = oracle::dense_logdet_rate(h, q, sigma2);
        t.add(std::abs(main - ref) / std::max(1.0, std::abs(ref)), i);
    }
    return t.finish();
}

// Water level found by bisection, independent of the sorted active-set rule.
double bisection_level(const RVector& gains, double p_t)
{
    double lo = 0.0;
    double hi = p_t + 1.0 / gains.minCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double used = 0.0;
        for (double g : gains) {
            used += std::max(mid - 1.0 / g, 0.0);
        }
        (used > p_t ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

oracle::OracleReport check_waterfill(const VerifyOptions& o, const Budget& b)
{
    Tracker t("waterfill", 1e-8, o.seed);
    for (std::size_t i = 0; i < b.instances; ++i) {
        auto rng = instance_rng(o.seed, i, 6);
        const auto l = std::uniform_int_distribution<Eigen::Index>(1, 6)(rng);
        const auto m = std::uniform_int_distribution<Eigen::Index>(1, 6)(rng);
        const CMatrix h = oracle::random_matrix(rng, l, m);
        const double p_t = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 1.0)(rng));
        const double sigma2 = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 1.0)(rng));
        const auto wf = opt::waterfill_allocation(h, p_t, sigma2);
        double err = std::abs(wf.q.trace().real() - p_t) / p_t;
        err = std::max(err, std::abs(wf.level - bisection_level(wf.gains, p_t)) / wf.level);
        const CMatrix uniform = CMatrix::Identity(m, m) * (p_t / static_cast<double>(m));
        const double gap = channel::achievable_rate(h, uniform, sigma2) -
                           channel::achievable_rate(h, wf.q, sigma2);
        t.add(std::max(err, gap), i, gap > 0.0 ? "uniform allocation beat water-filling" : "");
    }
    return t.finish();
}

oracle::OracleReport check_reactance_optimality(const VerifyOptions& o, const Budget& b)
{
    Tracker t("reactance_optimality", 1e-9, o.seed);
    std::array<std::size_t, opt::kBranchCount> fired{};
    std::size_t instance = 0;
    for (int target = 0; target < opt::kBranchCount; ++target) {
        for (std::size_t i = 0; i < b.per_branch; ++i, ++instance) {
            auto rng = instance_rng(o.seed, instance, 7);
            const auto inst = oracle::random_branch_instance(rng, static_cast<opt::ReactanceBranch>(target));
            const auto choice = opt::optimal_reactance(inst.coeffs, inst.bounds);
            ++fired[static_cast<std::size_t>(choice.branch)];
            const auto grid = oracle::grid_max_f(inst.coeffs, inst.bounds, b.grid_points);
            const double shortfall = grid.f - oracle::f_reference(inst.coeffs, choice.x);
            t.add(std::max(0.0, shortfall), instance,
                  "branch " + std::string(opt::branch_name(choice.branch)));
        }
    }
    std::string coverage = "branches fired:";
    bool all_fired = true;
    for (int k = 0; k < opt::kBranchCount; ++k) {
        coverage += " " + std::string(opt::branch_name(static_cast<opt::ReactanceBranch>(k))) + "=" +
                    std::to_string(fired[static_cast<std::size_t>(k)]);
        all_fired = all_fired && fired[static_cast<std::size_t>(k)] > 0;
    }
    auto report = t.finish(coverage);
    report.passed = report.passed && all_fired;
    return report;
}

oracle::OracleReport check_monotone_sweep(const VerifyOptions& o, const Budget& b)
{
    Tracker t("monotone_sweep", 1e-10, o.seed);
    const std::size_t n = std::max<std::size_t>(b.instances / 4, 5);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = instance_rng(o.seed, i, 8);
        const auto shape = random_shape(rng, std::min<Eigen::Index>(b.max_ris, 24));
        const auto z = oracle::random_impedance_set(rng, shape);
        const auto net = main_path(z, o.fault);
        const auto loads = oracle::random_state(rng, shape.n_ris, kBounds);
        const double sigma2 = 1e-2;
        const CMatrix q = opt::waterfill(channel::end_to_end_channel(net, loads.impedances()), 1.0, sigma2);
        opt::SweepOptions options;
        options.record_rates = true;
        const auto sweep = opt::run_sweep(net, loads, q, sigma2, options);
        double previous = sweep.rate_before;
        double drop = 0.0;
        for (const auto& u : sweep.updates) {
            drop = std::max(drop, previous - u.rate_after);
            previous = u.rate_after;
        }
        t.add(drop, i);
    }
    return t.finish();
}

}  // namespace

std::vector<oracle::OracleReport> verify(const VerifyOptions& options)
{
    const Budget b = budget_for(options.level);
    using Check = oracle::OracleReport (*)(const VerifyOptions&, const Budget&);
    const std::array<std::pair<const char*, Check>, 8> checks{{
        {"reduction", check_reduction},
        {"decoupled_channel", check_decoupled_channel},
        {"sherman_morrison", check_sherman_morrison},
        {"determinant_identity", check_determinant_identity},
        {"rate", check_rate},
        {"waterfill", check_waterfill},
        {"reactance_optimality", check_reactance_optimality},
        {"monotone_sweep", check_monotone_sweep},
    }};
    std::vector<oracle::OracleReport> reports;
    for (const auto& [name, check] : checks) {
        try {
            reports.push_back(check(options, b));
        } catch (const std::exception& e) {
            oracle::OracleReport r;
            r.check = name;
            r.passed = false;
            r.detail = std::string("threw: ") + e.what();
            reports.push_back(r);
        }
    }
    return reports;
}

bool all_passed(const std::vector<oracle::OracleReport>& reports)
{
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
}

std::string format_reports(const std::vector<oracle::OracleReport>& reports)
{
    std::string out;
    for (const auto& r : reports) {
        char line[256];
        std::snprintf(line, sizeof line, "%s %-22s max_err=%.3e tol=%.1e samples=%zu", r.passed ? "PASS" : "FAIL",
                      r.check.c_str(), r.max_relative_error, r.tolerance, r.samples);
        out += line;
        if (!r.worst_case_id.empty()) {
            out += " worst=[" + r.worst_case_id + "]";
        }
        if (!r.detail.empty()) {
            out += " " + r.detail;
        }
        out += "\n";
    }
    return out;
}

}  // namespace rismc::cli
