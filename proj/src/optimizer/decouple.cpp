#include "rismc/optimizer/decouple.hpp"

#include <cmath>
#include <numbers>

#include "rismc/errors.hpp"

namespace rismc::opt {

namespace {

constexpr double kTiny = 1e-14;

}  // namespace

CMatrix DecoupledElement::channel(cplx z) const
{
    const cplx x = chi(z);
    if (std::abs(x) < kTiny) {
        throw DegenerateElementError(static_cast<std::size_t>(k), "chi_k vanishes");
    }
    return b + c_matrix() / x;
}

CMatrix DecoupledElement::scattering_inverse(cplx z) const
{
    const cplx x = chi(z);
    if (std::abs(x) < kTiny) {
        throw DegenerateElementError(static_cast<std::size_t>(k), "chi_k vanishes");
    }
    const CMatrix inv = a_solve.inverse();
    return inv - inv.col(k) * inv.row(k) * (z / x);
}

SweepContext::SweepContext(const channel::ReducedNetwork& net)
    : coupling(net.z_ss + net.z_sos),
      p(net.z_rl * net.z_ros),
      w(net.z_sot * net.z_tg),
      h0(net.z_rl * net.z_rot * net.z_tg)
{
}

DecoupledElement decouple_element(const channel::ReducedNetwork& net,
                                  const channel::RisLoadState& loads, Eigen::Index k)
{
    return decouple_element(net, SweepContext(net), loads, k);
}

DecoupledElement decouple_element(const channel::ReducedNetwork& net, const SweepContext& ctx,
                                  const channel::RisLoadState& loads, Eigen::Index k)
{
    const auto n = net.n_ris();
    if (k < 0 || k >= n || loads.size() != n) {
        throw DimensionError("element index or load vector does not match N_RIS");
    }
    CMatrix a = ctx.coupling;
    CVector z = loads.impedances();
    z[k] = 0.0;
    a.diagonal() += z;

    DecoupledElement d;
    d.k = k;
    d.r0k = loads.r0()[k];
    d.a_solve = GuardedLu(a, "A_" + std::to_string(k));

    const CVector e = CVector::Unit(n, k);
    const CVector col = d.a_solve.solve(e);             // A_k^-1 e_k
    const CVector row = d.a_solve.solve_transposed(e);  // (e_k^T A_k^-1)^T
    d.a_k = col[k];
    if (!(std::abs(d.a_k) > kTiny * col.norm())) {
        throw DegenerateElementError(static_cast<std::size_t>(k), "a_k = e_k^T A_k^-1 e_k vanishes");
    }

    const CMatrix g = d.a_solve.solve(ctx.w);  // A_k^-1 Z_SOT Z_TG
    d.u = -ctx.p * col;
    const Eigen::RowVectorXcd vh = row.transpose() * ctx.w / d.a_k;
    d.v = vh.adjoint();
    d.b = ctx.h0 - ctx.p * g - d.c_matrix();
    return d;
}

std::optional<DetCoefficients> det_coefficients(const DecoupledElement& d, const CMatrix& q,
                                                double sigma2)
{
    if (!(sigma2 > 0.0)) {
        throw ContractViolation("noise power sigma2 must be positive");
    }
    const auto l = d.b.rows();
    CMatrix base = CMatrix::Identity(l, l) + d.b * q * d.b.adjoint() / sigma2;
    base = (0.5 * (base + base.adjoint())).eval();

    // I + B Q B^H / sigma2 = U diag(lambda) U^H.
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(base);
    const RVector& lambda = eig.eigenvalues();
    const CMatrix& U = eig.eigenvectors();
    const RVector inv_sqrt = lambda.cwiseSqrt().cwiseInverse();

    const CVector u_t = inv_sqrt.cast<cplx>().asDiagonal() * (U.adjoint() * d.u);
    const CVector v_t =
        inv_sqrt.cast<cplx>().asDiagonal() * (U.adjoint() * (d.b * (q * d.v)));

    const double norm_u = u_t.norm();
    if (norm_u < kTiny) {
        return std::nullopt;
    }

    // Gram-Schmidt: t1 along u~, t2 along the part of v~ orthogonal to it.
    // A residual at rounding level means v~ is parallel to u~ and the t2
    // term drops out.
    const CVector t1 = u_t / norm_u;
    const CVector t = v_t - t1.dot(v_t) * t1;
    const double norm_t = t.norm();
    cplx v_t2(0.0, 0.0);
    if (norm_t > kTiny * v_t.norm()) {
        const CVector t2 = t / norm_t;
        v_t2 = v_t.dot(t2);  // v~^H t2
    }

    const cplx vqv = d.v.dot(q * d.v);  // v^H Q v
    DetCoefficients c;
    c.c1 = norm_u * v_t.dot(t1) / sigma2;
    c.c2 = norm_u * norm_u * vqv.real() / sigma2 -
           norm_u * norm_u * std::norm(v_t2) / (sigma2 * sigma2);
    c.a_k = d.a_k;
    c.r0k = d.r0k;
    c.base_rate = lambda.array().log().sum() / std::numbers::ln2;
    return c;
}

double det_s(const DetCoefficients& c, double x)
{
    const cplx chi = 1.0 + c.a_k * cplx(c.r0k, x);
    return 1.0 + 2.0 * (c.c1 / chi).real() + c.c2 / std::norm(chi);
}

}  // namespace rismc::opt
