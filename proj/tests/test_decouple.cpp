#include <cmath>

#include <gtest/gtest.h>

#include "rismc/channel/network.hpp"
#include "rismc/channel/rate.hpp"
#include "rismc/errors.hpp"
#include "rismc/optimizer/bcd.hpp"
#include "rismc/optimizer/decouple.hpp"
#include "rismc/oracle/dense.hpp"
#include "rismc/oracle/instances.hpp"

using namespace rismc;
using namespace rismc::channel;

namespace {

constexpr ReactanceBounds kBounds{-302.5, -19.66};

struct Instance
{
    em::ImpedanceSet z;
    ReducedNetwork net;
    RisLoadState loads;
    CMatrix q;
};

Instance make_instance(oracle::Rng& rng, const oracle::InstanceShape& shape)
{
    em::ImpedanceSet z = oracle::random_impedance_set(rng, shape);
    ReducedNetwork net = reduce_network(z);
    RisLoadState loads = oracle::random_state(rng, shape.n_ris, kBounds);
    CMatrix q = oracle::random_psd(rng, shape.m, 0.5);
    return {std::move(z), std::move(net), std::move(loads), std::move(q)};
}

CMatrix full_scattering_matrix(const ReducedNetwork& net, const RisLoadState& loads)
{
    return net.z_ss + net.z_sos + CMatrix(loads.impedances().asDiagonal());
}

double dense_det_gain(const CMatrix& h, const CMatrix& b, const CMatrix& q, double sigma2)
{
    const auto l = h.rows();
    const CMatrix eye = CMatrix::Identity(l, l);
    const cplx num = oracle::naive_determinant(eye + h * q * h.adjoint() / sigma2);
    const cplx den = oracle::naive_determinant(eye + b * q * b.adjoint() / sigma2);
    return (num / den).real();
}

}  // namespace

TEST(DecoupleElement, ShermanMorrisonInverse)
{
    oracle::Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance in = make_instance(rng, {2, 2, 3 + trial % 10, 3});
        const Eigen::Index k = trial % in.net.n_ris();
        const auto d = opt::decouple_element(in.net, in.loads, k);
        for (double x : {kBounds.lower, -150.0, kBounds.upper}) {
            const cplx zk(in.loads.r0()(k), x);
            RisLoadState moved = in.loads;
            moved.set_reactance(k, x);
            const CMatrix direct = oracle::naive_inverse(full_scattering_matrix(in.net, moved));
            EXPECT_LT(relative_error(d.scattering_inverse(zk), direct), 1e-10);
        }
    }
}

TEST(DecoupleElement, ChannelMatchesFullEvaluation)
{
    oracle::Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance in = make_instance(rng, {3, 2, 6, 2});
        const Eigen::Index k = trial % 6;
        const auto d = opt::decouple_element(in.net, in.loads, k);
        RisLoadState moved = in.loads;
        moved.set_reactance(k, -77.0);
        const CMatrix ref = oracle::dense_channel(in.z, moved.impedances());
        EXPECT_LT(relative_error(d.channel(cplx(moved.r0()(k), -77.0)), ref), 1e-9);
        EXPECT_LT(relative_error(d.channel(in.loads.impedances()(k)),
                                 end_to_end_channel(in.net, in.loads.impedances())),
                  1e-10);
    }
}

TEST(DetCoefficients, MatchesDeterminantRatio)
{
    oracle::Rng rng(47);
    const double sigma2 = 0.7;
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index l = 1 + trial % 4;
        const Instance in = make_instance(rng, {3, l, 5, 2});
        const Eigen::Index k = trial % 5;
        const auto d = opt::decouple_element(in.net, in.loads, k);
        const auto c = opt::det_coefficients(d, in.q, sigma2);
        ASSERT_TRUE(c.has_value());
        const double base = oracle::dense_logdet_rate(d.b, in.q, sigma2);
        EXPECT_LT(std::abs(c->base_rate - base), 1e-9 * std::max(1.0, base));
        for (int s = 0; s < 10; ++s) {
            const double x = kBounds.lower + (kBounds.upper - kBounds.lower) * s / 9.0;
            const CMatrix h = d.channel(cplx(d.r0k, x));
            const double ref = dense_det_gain(h, d.b, in.q, sigma2);
            EXPECT_LT(std::abs(opt::det_s(*c, x) - ref), 1e-9 * std::abs(ref)) << "L = " << l;
            EXPECT_LT(std::abs(oracle::f_reference(*c, x) - ref), 1e-9 * std::abs(ref));
        }
    }
}

TEST(DetCoefficients, InertElementWithoutRisPath)
{
    oracle::Rng rng(53);
    Instance in = make_instance(rng, {2, 1, 3, 0});
    in.net.z_ros.setZero();
    const auto d = opt::decouple_element(in.net, in.loads, 1);
    EXPECT_FALSE(opt::det_coefficients(d, in.q, 1.0).has_value());
}

TEST(DecoupleElement, DegenerateElementIsReportedAndSkipped)
{
    oracle::Rng rng(59);
    Instance in = make_instance(rng, {2, 1, 2, 0});
    const RisLoadState loads(2, 0.2, -100.0, kBounds);
    in.net.z_sos.setZero();
    in.net.z_ss = CMatrix::Zero(2, 2);
    in.net.z_ss(0, 1) = in.net.z_ss(1, 0) = 1.0;
    in.net.z_ss(1, 1) = -loads.impedances()(1);
    EXPECT_THROW(opt::decouple_element(in.net, loads, 0), DegenerateElementError);

    const auto sweep = opt::run_sweep(in.net, loads, in.q, 1.0);
    ASSERT_EQ(sweep.updates.size(), 2u);
    EXPECT_TRUE(sweep.updates[0].skipped);
    EXPECT_FALSE(sweep.warnings.empty());
}
