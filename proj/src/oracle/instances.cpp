#include "rismc/oracle/instances.hpp"

#include <cmath>

#include "rismc/errors.hpp"

namespace rismc::oracle {

namespace {

cplx complex_normal(Rng& rng, double scale)
{
    std::normal_distribution<double> n(0.0, scale);
    return {n(rng), n(rng)};
}

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

CMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale)
{
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = complex_normal(rng, scale);
        }
    }
    return m;
}

em::ImpedanceSet random_impedance_set(Rng& rng, const InstanceShape& shape)
{
    const std::array<Eigen::Index, 4> sizes{shape.m, shape.l, shape.n_ris, shape.n_e};
    Eigen::Index total = 0;
    for (auto s : sizes) {
        total += s;
    }
    CMatrix full(total, total);
    for (Eigen::Index i = 0; i < total; ++i) {
        full(i, i) = cplx(73.1, 42.5) + complex_normal(rng, 2.0);
        for (Eigen::Index j = i + 1; j < total; ++j) {
            full(i, j) = complex_normal(rng, 5.0);
            full(j, i) = full(i, j);
        }
    }
    std::array<std::array<CMatrix, 4>, 4> blocks;
    Eigen::Index row = 0;
    for (std::size_t a = 0; a < 4; ++a) {
        Eigen::Index col = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            blocks[a][b] = full.block(row, col, sizes[a], sizes[b]);
            col += sizes[b];
        }
        row += sizes[a];
    }
    CVector z_g = CVector::Constant(shape.m, cplx(50.0, 0.0));
    CVector z_l = CVector::Constant(shape.l, cplx(50.0, 0.0));
    CVector z_us(shape.n_e);
    for (auto& v : z_us) {
        v = cplx(uniform(rng, 0.0, 10.0), uniform(rng, -10.0, 10.0));
    }
    return em::ImpedanceSet(1.0, std::move(blocks), std::move(z_g), std::move(z_l), std::move(z_us));
}

CMatrix random_psd(Rng& rng, Eigen::Index n, double trace)
{
    const CMatrix g = random_matrix(rng, n, n);
    CMatrix q = g * g.adjoint();
    q *= trace / q.trace().real();
    return (0.5 * (q + q.adjoint())).eval();
}

channel::RisLoadState random_state(Rng& rng, Eigen::Index n, const channel::ReactanceBounds& bounds,
                                   double r0)
{
    RVector x(n);
    for (auto& v : x) {
        v = uniform(rng, bounds.lower, bounds.upper);
    }
    return channel::RisLoadState(RVector::Constant(n, r0), std::move(x), bounds);
}

BranchInstance random_branch_instance(Rng& rng, opt::ReactanceBranch target)
{
    using opt::ReactanceBranch;
    opt::DetCoefficients c;
    const double a_scale = std::pow(10.0, uniform(rng, -2.0, 0.0));
    c.a_k = complex_normal(rng, a_scale);
    c.r0k = uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.0, 2.0);
    const double mag = std::pow(10.0, uniform(rng, -1.0, 1.0));

    double stationary = 0.0;
    switch (target) {
    case ReactanceBranch::real_positive:
    case ReactanceBranch::real_negative:
    case ReactanceBranch::real_zero: {
        const double r = std::normal_distribution<double>(0.0, mag)(rng);
        c.c1 = r / std::conj(c.a_k);
        const double base = -2.0 * (c.c1.real() + c.r0k * r);
        const double offset = std::abs(std::normal_distribution<double>(0.0, mag)(rng)) + 0.01 * mag;
        c.c2 = target == ReactanceBranch::real_zero       ? base
               : target == ReactanceBranch::real_positive ? base + offset
                                                          : base - offset;
        stationary = opt::stationary_point_real(c);
        if (target == ReactanceBranch::real_zero || !std::isfinite(stationary)) {
            // The vertex of |chi|^2 still anchors the interval.
            stationary = -std::imag(1.0 / c.a_k);
        }
        break;
    }
    case ReactanceBranch::imag_negative:
    case ReactanceBranch::imag_positive: {
        c.c1 = complex_normal(rng, mag);
        c.c2 = std::normal_distribution<double>(0.0, mag)(rng);
        const double den = c.c1.real() * c.a_k.imag() - c.a_k.real() * c.c1.imag();
        const bool want_positive = target == ReactanceBranch::imag_negative;
        if ((den > 0.0) != want_positive) {
            c.c1 = -c.c1;
        }
        stationary = opt::stationary_point_imag(c);
        break;
    }
    }

    const double width = std::pow(10.0, uniform(rng, -1.0, 3.0));
    const int placement = std::uniform_int_distribution<int>(0, 2)(rng);
    channel::ReactanceBounds bounds{};
    if (placement == 0) {  // stationary point inside
        bounds.lower = stationary - uniform(rng, 0.05, 0.95) * width;
    } else if (placement == 1) {  // below the interval
        bounds.lower = stationary + uniform(rng, 0.0, 1.0) * width;
    } else {  // above the interval
        bounds.lower = stationary - (1.0 + uniform(rng, 0.0, 1.0)) * width;
    }
    bounds.upper = bounds.lower + width;
    return {c, bounds};
}

}  // namespace rismc::oracle
