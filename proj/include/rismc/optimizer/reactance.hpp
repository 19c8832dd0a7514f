#pragma once

#include <string_view>

#include "rismc/channel/network.hpp"
#include "rismc/optimizer/decouple.hpp"

namespace rismc::opt {

// The five cases of the closed-form single-element maximizer, keyed on the
// product c1 conj(a_k):
//   real_positive / real_negative / real_zero: c1 conj(a_k) real, with the sign
//     of 2(Re c1 + R_0k Re(c1 conj(a_k))) + c2;
//   imag_negative: Re c1 Im a_k > Re a_k Im c1;
//   imag_positive: Re c1 Im a_k < Re a_k Im c1.
enum class ReactanceBranch { real_positive, real_negative, real_zero, imag_negative, imag_positive };

inline constexpr int kBranchCount = 5;

std::string_view branch_name(ReactanceBranch b);

struct ReactanceChoice
{
    double x = 0.0;
    ReactanceBranch branch = ReactanceBranch::real_zero;
};

// Stationary point used by the real_* branches (vertex of |chi|^2).
double stationary_point_real(const DetCoefficients& c);
// Interior maximizer used by the imag_* branches.
double stationary_point_imag(const DetCoefficients& c);

// Global maximizer of det_s(c, .) over [lower, upper]. Ties between
// candidates within 1e-12 prefer the interior stationary point, then the
// lower bound.
ReactanceChoice optimal_reactance(const DetCoefficients& c, const channel::ReactanceBounds& bounds);

}  // namespace rismc::opt
