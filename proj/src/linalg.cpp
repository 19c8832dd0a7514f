#include "rismc/linalg.hpp"

#include <limits>

#include "rismc/errors.hpp"

namespace rismc {

GuardedLu::GuardedLu(const CMatrix& m, std::string what)
{
    if (m.rows() != m.cols()) {
        throw DimensionError("matrix " + what + " is not square");
    }
    if (m.rows() == 0) {
        rcond_ = 1.0;
        return;
    }
    if (!m.allFinite()) {
        throw SingularMatrixError(std::move(what), 0.0);
    }
    lu_.compute(m);
    rcond_ = lu_.rcond();
    if (!(rcond_ * kMaxCondition >= 1.0)) {
        throw SingularMatrixError(std::move(what), rcond_);
    }
}

double relative_error(const CMatrix& a, const CMatrix& b)
{
    const double scale = std::max(b.norm(), std::numeric_limits<double>::min());
    return (a - b).norm() / scale;
}

double relative_error(cplx a, cplx b)
{
    const double scale = std::max(std::abs(b), std::numeric_limits<double>::min());
    return std::abs(a - b) / scale;
}

}  // namespace rismc
