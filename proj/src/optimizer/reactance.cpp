#include "rismc/optimizer/reactance.hpp"

#include <cmath>

#include "rismc/errors.hpp"

namespace rismc::opt {

namespace {

constexpr double kRealProductTol = 1e-12;
constexpr double kDenominatorTol = 1e-14;
constexpr double kTieTol = 1e-12;

// a >= b, with ties (relative 1e-12) counted as >=.
bool at_least(double a, double b)
{
    return a >= b - kTieTol * std::max(1.0, std::abs(b));
}

}  // namespace

std::string_view branch_name(ReactanceBranch b)
{
    switch (b) {
    case ReactanceBranch::real_positive: return "real_positive";
    case ReactanceBranch::real_negative: return "real_negative";
    case ReactanceBranch::real_zero: return "real_zero";
    case ReactanceBranch::imag_negative: return "imag_negative";
    case ReactanceBranch::imag_positive: return "imag_positive";
    }
    return "unknown";
}

double stationary_point_real(const DetCoefficients& c)
{
    const cplx c1a = c.c1 * std::conj(c.a_k);
    const cplx inv_conj_a = 1.0 / std::conj(c.a_k);
    const double num = (c.c1 * inv_conj_a).imag() + 2.0 * c.r0k * c.c1.imag() + c.c2 * inv_conj_a.imag();
    const double den = 2.0 * (c.c1.real() + c.r0k * c1a.real()) + c.c2;
    return num / den;
}

double stationary_point_imag(const DetCoefficients& c)
{
    const cplx a = c.a_k;
    const cplx c1a = c.c1 * std::conj(a);
    const double den = c.c1.real() * a.imag() - a.real() * c.c1.imag();
    const double lead = c.c1.real() + c.r0k * c1a.real() + 0.5 * c.c2;
    const double mag = std::abs(c1a * (a.real() / std::norm(a) + c.r0k) + 0.5 * c.c2);
    return (lead - mag) / den;
}

ReactanceChoice optimal_reactance(const DetCoefficients& c, const channel::ReactanceBounds& bounds)
{
    const double lb = bounds.lower;
    const double ub = bounds.upper;
    if (!(lb < ub)) {
        throw ContractViolation("reactance bounds need X_lb < X_ub");
    }
    if (!std::isfinite(c.c1.real()) || !std::isfinite(c.c1.imag()) || !std::isfinite(c.c2) ||
        !std::isfinite(c.a_k.real()) || !std::isfinite(c.a_k.imag()) || c.a_k == cplx(0.0, 0.0)) {
        throw ContractViolation("determinant coefficients must be finite with a_k != 0");
    }

    auto f = [&](double x) { return det_s(c, x); };
    auto better_endpoint = [&] { return at_least(f(lb), f(ub)) ? lb : ub; };
    auto interior = [&](double x) { return x > lb && x < ub; };

    const cplx c1a = c.c1 * std::conj(c.a_k);
    const bool real_product = std::abs(c1a.imag()) <= kRealProductTol * std::abs(c1a);

    if (real_product) {
        const double curvature = 2.0 * (c.c1.real() + c.r0k * c1a.real()) + c.c2;
        const double scale =
            2.0 * (std::abs(c.c1) + c.r0k * std::abs(c1a)) + std::abs(c.c2);
        if (std::abs(curvature) <= kDenominatorTol * scale) {
            return {better_endpoint(), ReactanceBranch::real_zero};
        }
        const double x1 = stationary_point_real(c);
        if (curvature > 0.0) {
            const double x = interior(x1) ? x1 : (x1 <= lb ? lb : ub);
            return {x, ReactanceBranch::real_positive};
        }
        const double x = interior(x1) ? better_endpoint() : (x1 <= lb ? ub : lb);
        return {x, ReactanceBranch::real_negative};
    }

    const double den = c.c1.real() * c.a_k.imag() - c.a_k.real() * c.c1.imag();
    const ReactanceBranch branch =
        den > 0.0 ? ReactanceBranch::imag_negative : ReactanceBranch::imag_positive;
    const double x2 = stationary_point_imag(c);
    if (std::abs(den) <= kDenominatorTol * std::abs(c1a) || !std::isfinite(x2)) {
        return {better_endpoint(), branch};
    }
    if (branch == ReactanceBranch::imag_negative) {
        if (interior(x2)) {
            return {at_least(f(x2), f(ub)) ? x2 : ub, branch};
        }
        return {x2 <= lb ? better_endpoint() : ub, branch};
    }
    if (interior(x2)) {
        return {at_least(f(x2), f(lb)) ? x2 : lb, branch};
    }
    if (x2 >= ub) {
        return {at_least(f(ub), f(lb)) ? ub : lb, branch};
    }
    return {lb, branch};
}

}  // namespace rismc::opt
