#pragma once

#include <optional>

#include "rismc/channel/network.hpp"
#include "rismc/linalg.hpp"

namespace rismc::opt {

// Channel seen from a single RIS element k. With A_k = Z_SS + Z_SOS + Z_RIS
// (entry k zeroed), a_k = e_k^T A_k^-1 e_k and chi_k(z) = 1 + a_k z, the
// Sherman-Morrison formula gives
//
//   H(z) = B_k + u_k v_k^H / chi_k(z)
//
// for every load z on element k.
struct DecoupledElement
{
    Eigen::Index k = 0;
    GuardedLu a_solve;  // factorization of A_k
    cplx a_k;
    double r0k = 0.0;
    CMatrix b;          // L x M
    CVector u;          // L
    CVector v;          // M; C_k = u v^H

    // Channel with load z on element k (all other loads as captured).
    CMatrix channel(cplx z) const;
    // Full L x M rank-one term C_k.
    CMatrix c_matrix() const { return u * v.adjoint(); }
    cplx chi(cplx z) const { return 1.0 + a_k * z; }
    // Z_sca(z) = A_k^-1 - A_k^-1 e_k e_k^T A_k^-1 z / chi_k(z).
    CMatrix scattering_inverse(cplx z) const;
};

// Per-sweep products shared by every element: Z_SS + Z_SOS, P = Z_RL Z_ROS,
// W = Z_SOT Z_TG and H0 = Z_RL Z_ROT Z_TG.
struct SweepContext
{
    CMatrix coupling;
    CMatrix p;
    CMatrix w;
    CMatrix h0;

    explicit SweepContext(const channel::ReducedNetwork& net);
};

// Throws DegenerateElementError when a_k vanishes and SingularMatrixError
// when A_k fails the condition guard.
DecoupledElement decouple_element(const channel::ReducedNetwork& net,
                                  const channel::RisLoadState& loads, Eigen::Index k);
DecoupledElement decouple_element(const channel::ReducedNetwork& net, const SweepContext& ctx,
                                  const channel::RisLoadState& loads, Eigen::Index k);

// det S_k(z) = 1 + c1/chi + conj(c1)/conj(chi) + c2/|chi|^2.
struct DetCoefficients
{
    cplx c1;
    double c2 = 0.0;
    cplx a_k;
    double r0k = 0.0;
    // log2 det(I + B_k Q B_k^H / sigma2): the rate without element k's
    // dependent part, so rate(X) = base_rate + log2 f(X).
    double base_rate = 0.0;
};

// Closed-form coefficients via the eigendecomposition of I + B_k Q B_k^H /
// sigma2 and a Gram-Schmidt basis of (u~, v~). Returns nullopt when the
// element is inert (||u~|| < 1e-14): its load cannot change the rate.
std::optional<DetCoefficients> det_coefficients(const DecoupledElement& d, const CMatrix& q,
                                                double sigma2);

// det S_k at reactance x, equal to rate gain 2^(R(x) - base_rate).
double det_s(const DetCoefficients& c, double x);

}  // namespace rismc::opt
