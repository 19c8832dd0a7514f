#include <gtest/gtest.h>

#include "rismc/cli/scenario.hpp"

using namespace rismc;
using namespace rismc::cli;

namespace {

const char* kMinimal = R"(# reduced link
geometry.ris_count = 8
geometry.ris_spacing = 0.25
)";

std::size_t error_line(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ParseError& e) {
        return e.position();
    }
    return 0;
}

}  // namespace

TEST(ParseScenario, DefaultsFollowReferenceSetup)
{
    const Scenario s = parse_scenario(kMinimal);
    EXPECT_EQ(s.geometry.ris_count, 8u);
    EXPECT_EQ(s.geometry.ris_spacing, 0.25);
    EXPECT_EQ(s.run.epsilon, 1e-4);
    EXPECT_EQ(s.run.solver, Solver::closed_form);
    EXPECT_EQ(s.run.coupling, CouplingMode::mca);
    EXPECT_EQ(s.run.realizations, 100u);
    EXPECT_EQ(s.geometry.tx_count, 4u);
    EXPECT_EQ(s.geometry.rx_count, 1u);
    EXPECT_EQ(s.geometry.rx_center.x, 9.6);
    EXPECT_EQ(s.geometry.ris_center.y, 24.0);
    EXPECT_EQ(s.loads.r0_ohm, 0.2);
    EXPECT_EQ(s.loads.x_lb_ohm, -302.5);
    EXPECT_EQ(s.loads.x_ub_ohm, -19.66);
    EXPECT_EQ(s.scatterers.clusters, 4u);
    EXPECT_EQ(s.scatterers.per_cluster, 50u);
    EXPECT_FALSE(s.geometry.direct_link);
    EXPECT_TRUE(s.warnings.empty());
}

TEST(ParseScenario, SignalLevelsInWatts)
{
    const Scenario s = parse_scenario(std::string(kMinimal) + "signal.pt_dbm = 21\nsignal.sigma2_dbm = -80\n");
    EXPECT_NEAR(s.signal.pt_watts(), 0.1259, 1e-4);
    EXPECT_NEAR(s.signal.sigma2_watts(), 1e-11, 1e-24);
}

TEST(ParseScenario, AllSectionsAndComments)
{
    const Scenario s = parse_scenario(R"(
geometry.ris_count = 16   # elements
geometry.ris_spacing = 0.125
geometry.tx_center = -1.5, 2
geometry.direct_link = true
loads.zus_ohm = 3.5
scatterers.region_min = 0, 0
scatterers.region_max = 4, 4
scatterers.seed = 77
run.solver = grid_baseline
run.coupling_mode = MCU
run.grid_points = 501
run.seed = 12345678901234
impedance.bundle = z.bin
)");
    EXPECT_EQ(s.geometry.tx_center.x, -1.5);
    EXPECT_EQ(s.geometry.tx_center.y, 2.0);
    EXPECT_TRUE(s.geometry.direct_link);
    EXPECT_EQ(s.loads.zus_ohm, 3.5);
    EXPECT_EQ(s.scatterers.seed.value(), 77u);
    EXPECT_EQ(s.run.solver, Solver::grid_baseline);
    EXPECT_EQ(s.run.coupling, CouplingMode::mcu);
    EXPECT_EQ(s.run.grid_points, 501u);
    EXPECT_EQ(s.run.seed, 12345678901234u);
    ASSERT_TRUE(s.bundle.has_value());
    EXPECT_EQ(s.bundle->string(), "z.bin");
}

TEST(ParseScenario, ErrorsCiteTheLine)
{
    const std::string malformed = std::string(kMinimal) + "\n\n# note\nrun.epsilon 1e-3\n";
    EXPECT_EQ(error_line(malformed), 7u);
    EXPECT_EQ(error_line("geometry.ris_count = 8\ngeometry.colour = red\n"), 2u);
    EXPECT_EQ(error_line("geometry.ris_count = 8\ngeometry.ris_count = 9\n"), 2u);
    EXPECT_EQ(error_line("geometry.ris_count = eight\n"), 1u);
    EXPECT_EQ(error_line("geometry.ris_count = 0\n"), 1u);
    EXPECT_EQ(error_line(std::string(kMinimal) + "geometry.wavelength_m = -0.1\n"), 4u);
    EXPECT_EQ(error_line(std::string(kMinimal) + "run.solver = newton\n"), 4u);
    EXPECT_EQ(error_line(std::string(kMinimal) + "signal.pt_dbm = inf\n"), 4u);
    EXPECT_EQ(error_line(std::string(kMinimal) + "loads.x_lb_ohm = -10\nloads.x_ub_ohm = -20\n"), 5u);
    EXPECT_EQ(error_line(std::string(kMinimal) + "run.epsilon =\n"), 4u);
}

TEST(ParseScenario, MissingRequiredKey)
{
    EXPECT_THROW(parse_scenario("geometry.ris_count = 8\n"), ParseError);
    EXPECT_THROW(parse_scenario(""), ParseError);
}

TEST(ParseScenario, WideSpacingWarns)
{
    const Scenario s = parse_scenario("geometry.ris_count = 4\ngeometry.ris_spacing = 0.75\n");
    ASSERT_EQ(s.warnings.size(), 1u);
}

TEST(BuildScene, LayoutFollowsGeometry)
{
    Scenario s = parse_scenario(std::string(kMinimal) + "scatterers.clusters = 2\nscatterers.per_cluster = 3\n");
    const em::Scene scene = build_scene(s, 0);
    ASSERT_EQ(scene.tx().size(), 4u);
    ASSERT_EQ(scene.ris().size(), 8u);
    ASSERT_EQ(scene.scatterers().size(), 6u);
    const double lambda = 0.1;
    EXPECT_NEAR((scene.tx()[1].center() - scene.tx()[0].center()).norm(), 0.5 * lambda, 1e-15);
    EXPECT_NEAR((scene.ris()[1].center() - scene.ris()[0].center()).norm(), 0.25 * lambda, 1e-15);
    EXPECT_NEAR(scene.rx()[0].center().x(), 9.6 * lambda, 1e-15);
    EXPECT_NEAR(scene.rx()[0].center().y(), 14.4 * lambda, 1e-15);
    EXPECT_NEAR(scene.ris()[0].length(), 0.05, 1e-15);
    EXPECT_NEAR(scene.ris()[0].radius(), lambda / 500, 1e-15);

    // Realizations differ only in the scatterers.
    const em::Scene other = build_scene(s, 1);
    EXPECT_EQ(other.ris(), scene.ris());
    EXPECT_NE(other.scatterers(), scene.scatterers());
    EXPECT_EQ(build_scene(s, 1).scatterers(), other.scatterers());
}

TEST(BuildImpedanceSet, DirectLinkSwitch)
{
    Scenario s = parse_scenario("geometry.ris_count = 2\ngeometry.ris_spacing = 0.25\n"
                                "geometry.tx_count = 2\nscatterers.clusters = 0\n");
    const em::ImpedanceSet blocked = build_impedance_set(s, 0);
    EXPECT_TRUE(blocked.block(em::Group::R, em::Group::T).isZero(0.0));
    EXPECT_TRUE(blocked.block(em::Group::T, em::Group::R).isZero(0.0));
    s.geometry.direct_link = true;
    EXPECT_FALSE(build_impedance_set(s, 0).block(em::Group::R, em::Group::T).isZero(0.0));
}

TEST(DeriveSeed, DeterministicAndDistinct)
{
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
    EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
}

TEST(ValidateForRun, RisCapAndInitRequirement)
{
    Scenario s = parse_scenario("geometry.ris_count = 40\ngeometry.ris_spacing = 0.25\nrun.max_ris = 32\n");
    EXPECT_THROW(validate_for_run(s), ConfigError);
    s.run.max_ris = 64;
    EXPECT_NO_THROW(validate_for_run(s));
    s.run.init = Initialization::mcu;
    s.run.coupling = CouplingMode::mcu;
    EXPECT_THROW(validate_for_run(s), ConfigError);
}
