#include "rismc/cli/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "rismc/channel/rate.hpp"
#include "rismc/em_model/bundle.hpp"
#include "rismc/em_model/clusters.hpp"

namespace rismc::cli {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class ValueReader
{
public:
    ValueReader(std::string_view key, std::string_view text, std::size_t line)
        : key_(key), text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& why) const
    {
        throw ParseError(line_, std::string(key_) + ": " + why, true);
    }

    double real() const { return parse_real(text_); }

    double positive() const
    {
        const double v = real();
        if (!(v > 0.0)) {
            fail("must be positive");
        }
        return v;
    }

    double non_negative() const
    {
        const double v = real();
        if (!(v >= 0.0)) {
            fail("must be non-negative");
        }
        return v;
    }

    std::uint64_t unsigned_int() const
    {
        std::uint64_t v = 0;
        const auto* end = text_.data() + text_.size();
        const auto [ptr, ec] = std::from_chars(text_.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            fail("expected a non-negative integer, got '" + std::string(text_) + "'");
        }
        return v;
    }

    std::size_t count(std::size_t min = 1) const
    {
        const auto v = static_cast<std::size_t>(unsigned_int());
        if (v < min) {
            fail("must be at least " + std::to_string(min));
        }
        return v;
    }

    bool boolean() const
    {
        if (text_ == "true") {
            return true;
        }
        if (text_ == "false") {
            return false;
        }
        fail("expected true or false");
    }

    Point2 point() const
    {
        const auto comma = text_.find(',');
        if (comma == std::string_view::npos) {
            fail("expected 'x, y'");
        }
        return {parse_real(trim(text_.substr(0, comma))), parse_real(trim(text_.substr(comma + 1)))};
    }

    std::string_view word() const { return text_; }

private:
    double parse_real(std::string_view t) const
    {
        double v = 0.0;
        const auto* end = t.data() + t.size();
        const auto [ptr, ec] = std::from_chars(t.data(), end, v);
        if (ec != std::errc{} || ptr != end || t.empty() || !std::isfinite(v)) {
            fail("expected a finite number, got '" + std::string(t) + "'");
        }
        return v;
    }

    std::string_view key_;
    std::string_view text_;
    std::size_t line_;
};

using Setter = std::function<void(Scenario&, const ValueReader&)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table{
        {"geometry.wavelength_m", [](Scenario& s, const ValueReader& v) { s.geometry.wavelength_m = v.positive(); }},
        {"geometry.tx_count", [](Scenario& s, const ValueReader& v) { s.geometry.tx_count = v.count(); }},
        {"geometry.tx_center", [](Scenario& s, const ValueReader& v) { s.geometry.tx_center = v.point(); }},
        {"geometry.tx_spacing", [](Scenario& s, const ValueReader& v) { s.geometry.tx_spacing = v.positive(); }},
        {"geometry.rx_count", [](Scenario& s, const ValueReader& v) { s.geometry.rx_count = v.count(); }},
        {"geometry.rx_center", [](Scenario& s, const ValueReader& v) { s.geometry.rx_center = v.point(); }},
        {"geometry.rx_spacing", [](Scenario& s, const ValueReader& v) { s.geometry.rx_spacing = v.positive(); }},
        {"geometry.ris_count", [](Scenario& s, const ValueReader& v) { s.geometry.ris_count = v.count(); }},
        {"geometry.ris_center", [](Scenario& s, const ValueReader& v) { s.geometry.ris_center = v.point(); }},
        {"geometry.ris_spacing", [](Scenario& s, const ValueReader& v) { s.geometry.ris_spacing = v.positive(); }},
        {"geometry.wire_length", [](Scenario& s, const ValueReader& v) { s.geometry.wire_length = v.positive(); }},
        {"geometry.wire_radius", [](Scenario& s, const ValueReader& v) { s.geometry.wire_radius = v.positive(); }},
        {"geometry.direct_link", [](Scenario& s, const ValueReader& v) { s.geometry.direct_link = v.boolean(); }},
        {"loads.r0_ohm", [](Scenario& s, const ValueReader& v) { s.loads.r0_ohm = v.non_negative(); }},
        {"loads.x_lb_ohm", [](Scenario& s, const ValueReader& v) { s.loads.x_lb_ohm = v.real(); }},
        {"loads.x_ub_ohm", [](Scenario& s, const ValueReader& v) { s.loads.x_ub_ohm = v.real(); }},
        {"loads.zg_ohm", [](Scenario& s, const ValueReader& v) { s.loads.zg_ohm = v.positive(); }},
        {"loads.zl_ohm", [](Scenario& s, const ValueReader& v) { s.loads.zl_ohm = v.positive(); }},
        {"loads.zus_ohm", [](Scenario& s, const ValueReader& v) { s.loads.zus_ohm = v.non_negative(); }},
        {"signal.pt_dbm", [](Scenario& s, const ValueReader& v) { s.signal.pt_dbm = v.real(); }},
        {"signal.sigma2_dbm", [](Scenario& s, const ValueReader& v) { s.signal.sigma2_dbm = v.real(); }},
        {"scatterers.clusters", [](Scenario& s, const ValueReader& v) { s.scatterers.clusters = v.count(0); }},
        {"scatterers.per_cluster", [](Scenario& s, const ValueReader& v) { s.scatterers.per_cluster = v.count(0); }},
        {"scatterers.region_min", [](Scenario& s, const ValueReader& v) { s.scatterers.region_min = v.point(); }},
        {"scatterers.region_max", [](Scenario& s, const ValueReader& v) { s.scatterers.region_max = v.point(); }},
        {"scatterers.cluster_spread", [](Scenario& s, const ValueReader& v) { s.scatterers.cluster_spread = v.non_negative(); }},
        {"scatterers.min_separation", [](Scenario& s, const ValueReader& v) { s.scatterers.min_separation = v.non_negative(); }},
        {"scatterers.seed", [](Scenario& s, const ValueReader& v) { s.scatterers.seed = v.unsigned_int(); }},
        {"run.epsilon", [](Scenario& s, const ValueReader& v) { s.run.epsilon = v.non_negative(); }},
        {"run.max_outer", [](Scenario& s, const ValueReader& v) { s.run.max_outer = v.count(); }},
        {"run.realizations", [](Scenario& s, const ValueReader& v) { s.run.realizations = v.count(); }},
        {"run.grid_points", [](Scenario& s, const ValueReader& v) { s.run.grid_points = v.count(2); }},
        {"run.seed", [](Scenario& s, const ValueReader& v) { s.run.seed = v.unsigned_int(); }},
        {"run.max_ris", [](Scenario& s, const ValueReader& v) { s.run.max_ris = v.count(); }},
        {"run.threads", [](Scenario& s, const ValueReader& v) { s.run.threads = v.count(0); }},
        {"run.solver",
         [](Scenario& s, const ValueReader& v) {
             if (v.word() == "closed_form") {
                 s.run.solver = Solver::closed_form;
             } else if (v.word() == "grid_baseline") {
                 s.run.solver = Solver::grid_baseline;
             } else {
                 v.fail("expected closed_form or grid_baseline");
             }
         }},
        {"run.coupling_mode",
         [](Scenario& s, const ValueReader& v) {
             if (v.word() == "MCA") {
                 s.run.coupling = CouplingMode::mca;
             } else if (v.word() == "MCU") {
                 s.run.coupling = CouplingMode::mcu;
             } else {
                 v.fail("expected MCA or MCU");
             }
         }},
        {"run.init",
         [](Scenario& s, const ValueReader& v) {
             if (v.word() == "random") {
                 s.run.init = Initialization::random;
             } else if (v.word() == "mcu") {
                 s.run.init = Initialization::mcu;
             } else {
                 v.fail("expected random or mcu");
             }
         }},
        {"impedance.bundle", [](Scenario& s, const ValueReader& v) { s.bundle = std::filesystem::path(std::string(v.word())); }},
    };
    return table;
}

std::vector<em::Dipole> array_along_x(Point2 center, std::size_t count, double spacing,
                                      const GeometryConfig& g)
{
    const double lambda = g.wavelength_m;
    return em::linear_array(Vec3(center.x * lambda, center.y * lambda, 0.0), count, spacing * lambda,
                            Vec3::UnitX(), Vec3::UnitZ(), g.wire_length * lambda,
                            g.wire_radius * lambda);
}

}  // namespace

std::string_view solver_name(Solver s)
{
    return s == Solver::closed_form ? "closed_form" : "grid_baseline";
}

std::string_view coupling_name(CouplingMode c)
{
    return c == CouplingMode::mca ? "MCA" : "MCU";
}

double SignalConfig::pt_watts() const { return channel::dbm_to_watts(pt_dbm); }
double SignalConfig::sigma2_watts() const { return channel::dbm_to_watts(sigma2_dbm); }

Scenario parse_scenario(std::string_view text)
{
    Scenario s;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected 'section.key = value'", true);
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ParseError(line_no, "unknown key '" + std::string(key) + "'", true);
        }
        if (value.empty()) {
            throw ParseError(line_no, std::string(key) + ": missing value", true);
        }
        if (const auto prev = seen.find(key); prev != seen.end()) {
            throw ParseError(line_no, std::string(key) + ": already set on line " +
                                          std::to_string(prev->second), true);
        }
        seen.emplace(std::string(key), line_no);
        it->second(s, ValueReader(key, value, line_no));
    }

    for (const char* required : {"geometry.ris_count", "geometry.ris_spacing"}) {
        if (!seen.contains(required)) {
            throw ParseError(line_no, std::string("missing required key ") + required, true);
        }
    }
    auto line_of = [&](std::string_view key) {
        const auto it = seen.find(key);
        return it == seen.end() ? line_no : it->second;
    };
    if (!(s.loads.x_lb_ohm < s.loads.x_ub_ohm)) {
        throw ParseError(line_of("loads.x_ub_ohm"), "loads.x_lb_ohm must be below loads.x_ub_ohm", true);
    }
    if (s.geometry.wire_radius >= 0.1 * s.geometry.wire_length) {
        throw ParseError(line_of("geometry.wire_radius"), "wire radius must be below a tenth of the length", true);
    }
    if (s.scatterers.region_min.x > s.scatterers.region_max.x ||
        s.scatterers.region_min.y > s.scatterers.region_max.y) {
        throw ParseError(line_of("scatterers.region_max"), "scatterer region is empty", true);
    }
    if (s.geometry.ris_spacing > 0.5) {
        s.warnings.push_back("geometry.ris_spacing " + std::to_string(s.geometry.ris_spacing) +
                             " exceeds half a wavelength");
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read scenario " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    Scenario s = parse_scenario(buffer.str());
    if (s.bundle && s.bundle->is_relative()) {
        s.bundle = path.parent_path() / *s.bundle;
    }
    return s;
}

void validate_for_run(const Scenario& s)
{
    if (s.geometry.ris_count > s.run.max_ris) {
        throw ConfigError("RIS element count " + std::to_string(s.geometry.ris_count) +
                          " exceeds run.max_ris = " + std::to_string(s.run.max_ris) +
                          "; raise run.max_ris or use a larger spacing");
    }
    if (s.run.init == Initialization::mcu && s.run.coupling != CouplingMode::mca) {
        throw ConfigError("run.init = mcu requires run.coupling_mode = MCA");
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

em::Scene build_scene(const Scenario& s, std::size_t index)
{
    const GeometryConfig& g = s.geometry;
    const double lambda = g.wavelength_m;
    auto tx = array_along_x(g.tx_center, g.tx_count, g.tx_spacing, g);
    auto rx = array_along_x(g.rx_center, g.rx_count, g.rx_spacing, g);
    auto ris = array_along_x(g.ris_center, g.ris_count, g.ris_spacing, g);

    em::ClusterRequest req;
    req.seed = derive_seed(s.scatterers.seed.value_or(s.run.seed), index, 0);
    req.n_clusters = s.scatterers.clusters;
    req.per_cluster = s.scatterers.per_cluster;
    req.region = {Vec3(s.scatterers.region_min.x, s.scatterers.region_min.y, 0.0) * lambda,
                  Vec3(s.scatterers.region_max.x, s.scatterers.region_max.y, 0.0) * lambda};
    req.spread = s.scatterers.cluster_spread * lambda;
    req.min_separation = s.scatterers.min_separation * lambda;
    req.length = g.wire_length * lambda;
    req.radius = g.wire_radius * lambda;
    for (const auto* group : {&tx, &rx, &ris}) {
        for (const auto& d : *group) {
            req.keep_out.push_back(d.center());
        }
    }
    auto placed = em::place_clusters(req);
    return em::Scene(lambda, std::move(tx), std::move(rx), std::move(ris), std::move(placed.dipoles),
                     std::move(placed.cluster_ids), g.ris_spacing * lambda);
}

em::Terminations build_terminations(const Scenario& s, const em::Scene& scene)
{
    return {std::vector<cplx>(scene.tx().size(), s.loads.zg_ohm),
            std::vector<cplx>(scene.rx().size(), s.loads.zl_ohm),
            std::vector<cplx>(scene.scatterers().size(), s.loads.zus_ohm)};
}

em::ImpedanceSet build_impedance_set(const Scenario& s, std::size_t index, unsigned threads)
{
    if (s.bundle) {
        em::ImpedanceSet z = em::load_impedance_set(*s.bundle);
        const auto& g = s.geometry;
        if (static_cast<std::size_t>(z.m()) != g.tx_count ||
            static_cast<std::size_t>(z.l()) != g.rx_count ||
            static_cast<std::size_t>(z.n_ris()) != g.ris_count) {
            throw ConfigError("bundle " + s.bundle->string() + " has M, L, N_RIS = " +
                              std::to_string(z.m()) + ", " + std::to_string(z.l()) + ", " +
                              std::to_string(z.n_ris()) + " but the geometry asks for " +
                              std::to_string(g.tx_count) + ", " + std::to_string(g.rx_count) +
                              ", " + std::to_string(g.ris_count));
        }
        return z;
    }
    const em::Scene scene = build_scene(s, index);
    em::ImpedanceSet z = em::assemble_impedance_set(scene, build_terminations(s, scene), threads);
    if (!s.geometry.direct_link) {
        z = z.with_block(em::Group::R, em::Group::T, CMatrix::Zero(z.l(), z.m()));
    }
    return z;
}

}  // namespace rismc::cli
