#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "rismc/channel/rate.hpp"
#include "rismc/optimizer/waterfill.hpp"
#include "rismc/oracle/instances.hpp"

using namespace rismc;

namespace {

// Water level by bisection on sum_i max(mu - 1/g_i, 0) = P.
double bisection_level(const RVector& gains, double p_t)
{
    double lo = 0.0;
    double hi = p_t + 1.0 / gains.minCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double used = 0.0;
        for (double g : gains) {
            used += std::max(mid - 1.0 / g, 0.0);
        }
        (used > p_t ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Waterfill, BudgetLevelAndKkt)
{
    oracle::Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index l = 1 + trial % 4;
        const Eigen::Index m = 1 + (trial / 4) % 4;
        const CMatrix h = oracle::random_matrix(rng, l, m, 1e-3);
        const double p_t = 0.12589254117941673;
        const double sigma2 = trial % 2 == 0 ? 1e-11 : 1e-7;
        const auto wf = opt::waterfill_allocation(h, p_t, sigma2);

        EXPECT_LT(std::abs(wf.q.trace().real() - p_t), 1e-9 * p_t);
        EXPECT_NO_THROW(channel::require_psd(wf.q));
        EXPECT_LT(std::abs(wf.level - bisection_level(wf.gains, p_t)), 1e-8 * wf.level);
        for (Eigen::Index i = 0; i < wf.gains.size(); ++i) {
            const double headroom = wf.level - 1.0 / wf.gains(i);
            if (wf.powers(i) > 0.0) {
                EXPECT_LT(std::abs(wf.powers(i) + 1.0 / wf.gains(i) - wf.level), 1e-8 * wf.level);
            } else {
                EXPECT_LE(headroom, 1e-8 * wf.level);
            }
        }
        const CMatrix uniform = CMatrix::Identity(m, m) * (p_t / static_cast<double>(m));
        EXPECT_GE(channel::achievable_rate(h, wf.q, sigma2),
                  channel::achievable_rate(h, uniform, sigma2) - 1e-12);
    }
}

TEST(Waterfill, LowSnrPutsAllPowerOnStrongestMode)
{
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 0.1;
    const auto wf = opt::waterfill_allocation(h, 1e-3, 1.0);
    ASSERT_EQ(wf.powers.size(), 2);
    EXPECT_NEAR(wf.powers(0), 1e-3, 1e-15);
    EXPECT_EQ(wf.powers(1), 0.0);
}

TEST(Waterfill, ZeroChannelGivesZeroCovariance)
{
    const CMatrix q = opt::waterfill(CMatrix::Zero(1, 4), 1.0, 1e-3);
    EXPECT_TRUE(q.isZero(0.0));
    EXPECT_EQ(q.rows(), 4);
}

TEST(Waterfill, RankOneMisoMatchesBeamforming)
{
    oracle::Rng rng(7);
    const CMatrix h = oracle::random_matrix(rng, 1, 4);
    const double p_t = 2.0;
    const CMatrix q = opt::waterfill(h, p_t, 0.5);
    const CVector w = h.adjoint() / h.norm();
    const CMatrix expected = p_t * w * w.adjoint();
    EXPECT_LT((q - expected).norm(), 1e-12 * p_t);
}
