#pragma once

#include <cstdint>
#include <random>

#include "rismc/channel/network.hpp"
#include "rismc/em_model/impedance.hpp"
#include "rismc/optimizer/decouple.hpp"
#include "rismc/optimizer/reactance.hpp"

// Seeded random problem instances for tests, `verify` and the acceptance
// suite.
namespace rismc::oracle {

using Rng = std::mt19937_64;

struct InstanceShape
{
    Eigen::Index m = 2;
    Eigen::Index l = 2;
    Eigen::Index n_ris = 4;
    Eigen::Index n_e = 3;
};

// Reciprocal impedance set with dipole-like diagonals (about 73 + j42 ohm)
// and weaker random mutual terms; terminations are 50 ohm with small random
// scatterer loads.
em::ImpedanceSet random_impedance_set(Rng& rng, const InstanceShape& shape);

CMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0);

// Random Hermitian PSD matrix with the given trace.
CMatrix random_psd(Rng& rng, Eigen::Index n, double trace);

channel::RisLoadState random_state(Rng& rng, Eigen::Index n, const channel::ReactanceBounds& bounds,
                                   double r0 = 0.2);

// Coefficients steered into the requested branch, with bounds arranged so
// that the stationary point falls below, inside or above the interval at
// random.
struct BranchInstance
{
    opt::DetCoefficients coeffs;
    channel::ReactanceBounds bounds;
};

BranchInstance random_branch_instance(Rng& rng, opt::ReactanceBranch target);

}  // namespace rismc::oracle
