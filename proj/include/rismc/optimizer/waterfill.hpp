#pragma once

#include "rismc/linalg.hpp"

namespace rismc::opt {

// Eigenmode power allocation behind a water-filling covariance.
struct WaterfillAllocation
{
    CMatrix q;            // M x M covariance V diag(p) V^H
    CMatrix modes;        // M x D right singular vectors used
    RVector gains;        // Sigma_i^2 / sigma2 per mode, descending
    RVector powers;       // p_i, sums to P_t
    double level = 0.0;   // water level 1/alpha (0 for a zero channel)
};

// Capacity-achieving covariance for a fixed channel: p_i = max(level -
// sigma2 / Sigma_i^2, 0) with sum p_i = P_t. The level is found exactly by
// the sorted active-set rule. A zero channel gives Q = 0.
WaterfillAllocation waterfill_allocation(const CMatrix& h, double p_t, double sigma2);

CMatrix waterfill(const CMatrix& h, double p_t, double sigma2);

}  // namespace rismc::opt
