#include "rismc/channel/rate.hpp"

#include <cmath>
#include <numbers>

#include "rismc/errors.hpp"

namespace rismc::channel {

void require_psd(const CMatrix& q, double tol)
{
    if (q.rows() != q.cols()) {
        throw ContractViolation("covariance Q must be square");
    }
    if (q.size() == 0) {
        return;
    }
    const double scale = std::max(q.norm(), 1.0);
    if ((q - q.adjoint()).norm() > tol * scale) {
        throw ContractViolation("covariance Q is not Hermitian");
    }
    const CMatrix sym = 0.5 * (q + q.adjoint());
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -tol * scale) {
        throw ContractViolation("covariance Q is not positive semidefinite");
    }
}

double achievable_rate(const CMatrix& h, const CMatrix& q, double sigma2)
{
    if (!(sigma2 > 0.0)) {
        throw ContractViolation("noise power sigma2 must be positive");
    }
    if (h.cols() != q.rows()) {
        throw DimensionError("H columns must match Q dimension");
    }
    require_psd(q);
    const CMatrix qh = 0.5 * (q + q.adjoint());
    CMatrix arg = CMatrix::Identity(h.rows(), h.rows()) + h * qh * h.adjoint() / sigma2;
    arg = 0.5 * (arg + arg.adjoint()).eval();
    const Eigen::LLT<CMatrix> llt(arg);
    if (llt.info() != Eigen::Success) {
        throw ContractViolation("I + H Q H^H / sigma2 is not positive definite");
    }
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < arg.rows(); ++i) {
        log_det += std::log(llt.matrixLLT()(i, i).real());
    }
    return std::max(0.0, 2.0 * log_det / std::numbers::ln2);
}

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

}  // namespace rismc::channel
