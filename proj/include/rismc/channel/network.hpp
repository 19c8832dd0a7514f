#pragma once

#include <cstddef>
#include <vector>

#include "rismc/em_model/impedance.hpp"
#include "rismc/linalg.hpp"

namespace rismc::channel {

// Scatterer-eliminated network seen by the RIS optimizer.
//
// With Zoo = Z_OO + Z_US:
//   Z_ROT = Z_RT - Z_RO Zoo^-1 Z_OT      Z_ROS = Z_RO Zoo^-1 Z_OS - Z_RS
//   Z_SOS = -Z_SO Zoo^-1 Z_OS            Z_SOT = Z_SO Zoo^-1 Z_OT - Z_ST
//   Z_RL  = (I + Z_RR Z_L^-1)^-1         Z_TG  = (Z_TT + Z_G)^-1
struct ReducedNetwork
{
    CMatrix z_rot;  // L x M
    CMatrix z_ros;  // L x N
    CMatrix z_sos;  // N x N
    CMatrix z_sot;  // N x M
    CMatrix z_rl;   // L x L
    CMatrix z_tg;   // M x M
    CMatrix z_ss;   // N x N

    Eigen::Index m() const { return z_tg.rows(); }
    Eigen::Index l() const { return z_rl.rows(); }
    Eigen::Index n_ris() const { return z_ss.rows(); }

    // Throws DimensionError on inconsistent shapes.
    void validate() const;

    // Same network with the off-diagonal RIS self/mutual impedances dropped:
    // the model a coupling-unaware optimizer works with.
    ReducedNetwork without_ris_coupling() const;
};

// Throws SingularMatrixError naming Zoo, Z_TT+Z_G or I+Z_RR Z_L^-1 when a
// condition estimate exceeds 1e12.
ReducedNetwork reduce_network(const em::ImpedanceSet& z);

struct ReactanceBounds
{
    double lower;
    double upper;
};

// Per-element RIS loads R_0k + jX_k with X_k constrained to [lower, upper].
class RisLoadState
{
public:
    RisLoadState(RVector r0, RVector x, ReactanceBounds bounds);
    RisLoadState(std::size_t n, double r0, double x, ReactanceBounds bounds);

    Eigen::Index size() const { return r0_.size(); }
    const RVector& r0() const noexcept { return r0_; }
    const RVector& x() const noexcept { return x_; }
    const ReactanceBounds& bounds() const noexcept { return bounds_; }

    // Throws ContractViolation if x is outside the bounds.
    void set_reactance(Eigen::Index k, double x);

    // Diagonal of Z_RIS.
    CVector impedances() const;

private:
    RVector r0_;
    RVector x_;
    ReactanceBounds bounds_;
};

// diag(R_0k + jX_k) as a dense N x N matrix.
CMatrix ris_impedance_matrix(const RisLoadState& s);

// H = Z_RL [Z_ROT - Z_ROS (Z_SS + Z_SOS + Z_RIS)^-1 Z_SOT] Z_TG, evaluated with
// a guarded solve. `z_ris` is the diagonal of Z_RIS.
CMatrix end_to_end_channel(const ReducedNetwork& net, const CVector& z_ris);

}  // namespace rismc::channel
