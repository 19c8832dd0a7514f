#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rismc/channel/network.hpp"
#include "rismc/em_model/dipole.hpp"
#include "rismc/em_model/impedance.hpp"
#include "rismc/errors.hpp"

namespace rismc::cli {

// Scenario content that parses but cannot be run (e.g. a bundle whose shape
// disagrees with the geometry, or an RIS above the element cap).
class ConfigError : public Error
{
public:
    using Error::Error;
};

enum class Solver { closed_form, grid_baseline };
enum class CouplingMode { mca, mcu };
// Starting loads: uniform random, or the converged coupling-unaware design
// (MCA only).
enum class Initialization { random, mcu };

std::string_view solver_name(Solver s);
std::string_view coupling_name(CouplingMode c);

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

// Positions and spacings in wavelengths; every dipole lies in the z = 0
// plane and is oriented along z.
struct GeometryConfig
{
    double wavelength_m = 0.1;
    std::size_t tx_count = 4;
    Point2 tx_center{0.0, 0.0};
    double tx_spacing = 0.5;
    std::size_t rx_count = 1;
    Point2 rx_center{9.6, 14.4};
    double rx_spacing = 0.5;
    std::size_t ris_count = 0;  // required
    Point2 ris_center{0.0, 24.0};
    double ris_spacing = 0.0;   // required
    double wire_length = 0.5;
    double wire_radius = 0.002;
    bool direct_link = false;
};

struct LoadConfig
{
    double r0_ohm = 0.2;
    double x_lb_ohm = -302.5;
    double x_ub_ohm = -19.66;
    double zg_ohm = 50.0;
    double zl_ohm = 50.0;
    double zus_ohm = 0.0;

    channel::ReactanceBounds bounds() const { return {x_lb_ohm, x_ub_ohm}; }
};

struct SignalConfig
{
    double pt_dbm = 21.0;
    double sigma2_dbm = -80.0;

    double pt_watts() const;
    double sigma2_watts() const;
};

// Cluster centers are uniform in the region; members are uniform in a
// square of side `cluster_spread` around their center. Lengths in
// wavelengths.
struct ScattererConfig
{
    std::size_t clusters = 4;
    std::size_t per_cluster = 50;
    Point2 region_min{-5.0, 2.0};
    Point2 region_max{15.0, 22.0};
    double cluster_spread = 2.0;
    double min_separation = 0.02;
    std::optional<std::uint64_t> seed;  // defaults to run.seed
};

struct RunConfig
{
    double epsilon = 1e-4;
    std::size_t max_outer = 100;
    std::size_t realizations = 100;
    Solver solver = Solver::closed_form;
    CouplingMode coupling = CouplingMode::mca;
    Initialization init = Initialization::random;
    std::size_t grid_points = 10001;
    std::uint64_t seed = 1;
    std::size_t max_ris = 512;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct Scenario
{
    GeometryConfig geometry;
    LoadConfig loads;
    SignalConfig signal;
    ScattererConfig scatterers;
    RunConfig run;
    std::optional<std::filesystem::path> bundle;
    std::vector<std::string> warnings;
};

// Line-oriented `section.key = value` text with `#` comments. Throws
// ParseError citing the line for malformed lines, unknown or repeated keys,
// out-of-range values and missing required keys.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

// Rejects settings that cannot run; throws ConfigError.
void validate_for_run(const Scenario& s);

// Independent 64-bit seed for (master, realization, stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream);

// Scene of realization `index`: fixed link geometry plus freshly placed
// scatterer clusters.
em::Scene build_scene(const Scenario& s, std::size_t index);

em::Terminations build_terminations(const Scenario& s, const em::Scene& scene);

// Impedance set of realization `index`: the configured bundle if any,
// otherwise assembled from build_scene. Without a direct link Z_RT is
// zeroed.
em::ImpedanceSet build_impedance_set(const Scenario& s, std::size_t index, unsigned threads = 0);

}  // namespace rismc::cli
