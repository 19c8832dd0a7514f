#include <cmath>

#include <gtest/gtest.h>

#include "rismc/channel/network.hpp"
#include "rismc/errors.hpp"
#include "rismc/oracle/dense.hpp"
#include "rismc/oracle/instances.hpp"

using namespace rismc;

TEST(NaiveInverse, InvertsAndDetectsSingularity)
{
    oracle::Rng rng(1);
    const CMatrix m = oracle::random_matrix(rng, 6, 6) + 4.0 * CMatrix::Identity(6, 6);
    EXPECT_LT((m * oracle::naive_inverse(m) - CMatrix::Identity(6, 6)).norm(), 1e-12);
    EXPECT_THROW(oracle::naive_inverse(CMatrix::Ones(3, 3)), SingularMatrixError);
}

TEST(NaiveDeterminant, KnownValuesAndSizeCap)
{
    CMatrix m(2, 2);
    m << cplx(1, 1), 2.0, 3.0, cplx(0, -1);
    EXPECT_LT(std::abs(oracle::naive_determinant(m) - (cplx(1, 1) * cplx(0, -1) - 6.0)), 1e-15);
    EXPECT_THROW(oracle::naive_determinant(CMatrix::Identity(7, 7)), ContractViolation);
}

TEST(DenseLogdetRate, ZeroChannelAndCap)
{
    EXPECT_EQ(oracle::dense_logdet_rate(CMatrix::Zero(2, 3), CMatrix::Identity(3, 3), 1.0), 0.0);
    EXPECT_THROW(oracle::dense_logdet_rate(CMatrix::Zero(7, 2), CMatrix::Identity(2, 2), 1.0),
                 ContractViolation);
}

TEST(DenseChannel, WithoutScatterers)
{
    oracle::Rng rng(2);
    const em::ImpedanceSet z = oracle::random_impedance_set(rng, {2, 2, 4, 0});
    const CVector zr = CVector::Constant(4, cplx(0.2, -100.0));
    EXPECT_LT(relative_error(oracle::dense_channel(z, zr),
                             channel::end_to_end_channel(channel::reduce_network(z), zr)),
              1e-9);
}

TEST(GridMax, IncludesUpperBoundExactly)
{
    opt::DetCoefficients c;
    c.a_k = cplx(0.0, 1e-3);
    c.r0k = 0.2;
    c.c1 = cplx(0.3, 0.1);
    c.c2 = 0.05;
    const channel::ReactanceBounds bounds{-300.0, -20.0};
    const auto g = oracle::grid_max_f(c, bounds, 7);
    const double step = (bounds.upper - bounds.lower) / 6.0;
    const double k = (g.x - bounds.lower) / step;
    EXPECT_NEAR(k, std::round(k), 1e-9);
    EXPECT_EQ(g.f, oracle::f_reference(c, g.x));
}

TEST(RandomInstances, SeededAndReciprocal)
{
    oracle::Rng a(9);
    oracle::Rng b(9);
    const auto za = oracle::random_impedance_set(a, {});
    const auto zb = oracle::random_impedance_set(b, {});
    EXPECT_TRUE(za == zb);
    oracle::Rng c(3);
    const CMatrix q = oracle::random_psd(c, 4, 2.5);
    EXPECT_NEAR(q.trace().real(), 2.5, 1e-12);
    EXPECT_LT((q - q.adjoint()).norm(), 1e-14);
}
