#pragma once

#include "rismc/linalg.hpp"

namespace rismc::channel {

inline constexpr double kPsdTolerance = 1e-10;

// log2 det(I_L + H Q H^H / sigma2) through a Cholesky factor of the
// Hermitian argument. Throws ContractViolation when Q is not Hermitian PSD
// within 1e-10 (relative to its norm) or sigma2 <= 0.
double achievable_rate(const CMatrix& h, const CMatrix& q, double sigma2);

// Throws ContractViolation unless q is square, Hermitian and PSD within tol.
void require_psd(const CMatrix& q, double tol = kPsdTolerance);

double dbm_to_watts(double dbm);

}  // namespace rismc::channel
