#include "rismc/optimizer/waterfill.hpp"

#include "rismc/errors.hpp"

namespace rismc::opt {

WaterfillAllocation waterfill_allocation(const CMatrix& h, double p_t, double sigma2)
{
    if (!(p_t > 0.0) || !(sigma2 > 0.0)) {
        throw ContractViolation("waterfill needs P_t > 0 and sigma2 > 0");
    }
    const auto m = h.cols();
    WaterfillAllocation out;
    out.q = CMatrix::Zero(m, m);
    out.modes = CMatrix(m, 0);

    if (h.size() == 0 || h.cwiseAbs().maxCoeff() == 0.0) {
        return out;
    }

    const Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinV);
    const RVector& sv = svd.singularValues();  // descending
    const double cutoff = sv[0] * 1e-12;
    Eigen::Index d = 0;
    while (d < sv.size() && sv[d] > cutoff) {
        ++d;
    }
    const RVector gains = sv.head(d).array().square() / sigma2;

    // The largest active set whose level clears every member's floor.
    Eigen::Index active = d;
    double level = 0.0;
    for (; active >= 1; --active) {
        const double inv_sum = gains.head(active).cwiseInverse().sum();
        level = (p_t + inv_sum) / static_cast<double>(active);
        if (level - 1.0 / gains[active - 1] > 0.0) {
            break;
        }
    }

    RVector powers = RVector::Zero(d);
    for (Eigen::Index i = 0; i < active; ++i) {
        powers[i] = level - 1.0 / gains[i];
    }
    out.modes = svd.matrixV().leftCols(d);
    out.gains = gains;
    out.powers = powers;
    out.level = level;
    out.q = out.modes * powers.cast<cplx>().asDiagonal() * out.modes.adjoint();
    out.q = (0.5 * (out.q + out.q.adjoint())).eval();
    return out;
}

CMatrix waterfill(const CMatrix& h, double p_t, double sigma2)
{
    return waterfill_allocation(h, p_t, sigma2).q;
}

}  // namespace rismc::opt
