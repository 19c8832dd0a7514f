#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace rismc {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

// Condition-number ceiling for every guarded factorization.
inline constexpr double kMaxCondition = 1e12;

// LU factorization that refuses matrices whose reciprocal condition
// estimate is below 1/kMaxCondition. `what` names the matrix in errors.
class GuardedLu
{
public:
    GuardedLu() = default;
    GuardedLu(const CMatrix& m, std::string what);

    CMatrix solve(const CMatrix& rhs) const { return lu_.solve(rhs); }
    CVector solve(const CVector& rhs) const { return lu_.solve(rhs); }
    // Solves x^T A = rhs^T, i.e. A^T x = rhs.
    CVector solve_transposed(const CVector& rhs) const { return lu_.transpose().solve(rhs); }
    CMatrix inverse() const { return lu_.inverse(); }
    double rcond() const { return rcond_; }
    Eigen::Index size() const { return lu_.rows(); }

private:
    Eigen::PartialPivLU<CMatrix> lu_;
    double rcond_ = 0.0;
};

// Frobenius-norm relative error ||a - b|| / max(||b||, tiny).
double relative_error(const CMatrix& a, const CMatrix& b);
double relative_error(cplx a, cplx b);

}  // namespace rismc
