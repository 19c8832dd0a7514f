#include "rismc/oracle/dense.hpp"

#include <cmath>
#include <numbers>

#include "rismc/errors.hpp"

namespace rismc::oracle {

using em::Group;

CMatrix naive_inverse(const CMatrix& m, const std::string& what)
{
    const auto n = m.rows();
    if (m.cols() != n) {
        throw DimensionError("cannot invert non-square " + what);
    }
    CMatrix work = m;
    CMatrix inv = CMatrix::Identity(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        Eigen::Index best = p;
        for (Eigen::Index r = p + 1; r < n; ++r) {
            if (std::abs(work(r, p)) > std::abs(work(best, p))) {
                best = r;
            }
        }
        if (work(best, p) == cplx(0.0, 0.0)) {
            throw SingularMatrixError(what, 0.0);
        }
        if (best != p) {
            for (Eigen::Index c = 0; c < n; ++c) {
                std::swap(work(p, c), work(best, c));
                std::swap(inv(p, c), inv(best, c));
            }
        }
        const cplx pivot = work(p, p);
        for (Eigen::Index c = 0; c < n; ++c) {
            work(p, c) /= pivot;
            inv(p, c) /= pivot;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == p) {
                continue;
            }
            const cplx factor = work(r, p);
            if (factor == cplx(0.0, 0.0)) {
                continue;
            }
            for (Eigen::Index c = 0; c < n; ++c) {
                work(r, c) -= factor * work(p, c);
                inv(r, c) -= factor * inv(p, c);
            }
        }
    }
    return inv;
}

cplx naive_determinant(const CMatrix& m)
{
    const auto n = m.rows();
    if (m.cols() != n) {
        throw DimensionError("determinant of non-square matrix");
    }
    if (n > kMaxReceiveAntennas) {
        throw ContractViolation("cofactor determinant limited to n <= 6");
    }
    if (n == 0) {
        return 1.0;
    }
    if (n == 1) {
        return m(0, 0);
    }
    cplx det(0.0, 0.0);
    for (Eigen::Index c = 0; c < n; ++c) {
        CMatrix minor(n - 1, n - 1);
        for (Eigen::Index i = 1; i < n; ++i) {
            for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
                if (j != c) {
                    minor(i - 1, jj++) = m(i, j);
                }
            }
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        det += sign * m(0, c) * naive_determinant(minor);
    }
    return det;
}

DenseReduction dense_block_elimination(const em::ImpedanceSet& z)
{
    // Unknown ordering [O, T, R, S]; O carries its terminations.
    const Eigen::Index ne = z.n_e();
    const std::array<Group, 4> order{Group::O, Group::T, Group::R, Group::S};
    std::array<Eigen::Index, 5> off{};
    for (std::size_t g = 0; g < 4; ++g) {
        off[g + 1] = off[g] + z.size(order[g]);
    }
    const Eigen::Index total = off[4];
    CMatrix k(total, total);
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
            const CMatrix& blk = z.block(order[a], order[b]);
            for (Eigen::Index i = 0; i < blk.rows(); ++i) {
                for (Eigen::Index j = 0; j < blk.cols(); ++j) {
                    k(off[a] + i, off[b] + j) = blk(i, j);
                }
            }
        }
    }
    for (Eigen::Index i = 0; i < ne; ++i) {
        k(i, i) += z.z_us()[i];
    }

    // Forward elimination of the O columns; pivots stay within the O rows.
    for (Eigen::Index p = 0; p < ne; ++p) {
        Eigen::Index best = p;
        for (Eigen::Index r = p + 1; r < ne; ++r) {
            if (std::abs(k(r, p)) > std::abs(k(best, p))) {
                best = r;
            }
        }
        if (k(best, p) == cplx(0.0, 0.0)) {
            throw SingularMatrixError("Z_OO + Z_US", 0.0);
        }
        if (best != p) {
            for (Eigen::Index c = 0; c < total; ++c) {
                std::swap(k(p, c), k(best, c));
            }
        }
        for (Eigen::Index r = p + 1; r < total; ++r) {
            const cplx factor = k(r, p) / k(p, p);
            if (factor == cplx(0.0, 0.0)) {
                continue;
            }
            for (Eigen::Index c = p; c < total; ++c) {
                k(r, c) -= factor * k(p, c);
            }
        }
    }

    auto schur = [&](std::size_t a, std::size_t b) {
        return CMatrix(k.block(off[a], off[b], off[a + 1] - off[a], off[b + 1] - off[b]));
    };
    DenseReduction out;
    out.z_rot = schur(2, 1);
    out.z_ros = -schur(2, 3);
    out.z_sos = schur(3, 3) - z.block(Group::S, Group::S);
    out.z_sot = -schur(3, 1);
    return out;
}

CMatrix dense_channel(const em::ImpedanceSet& z, const CVector& z_ris)
{
    if (z_ris.size() != z.n_ris()) {
        throw DimensionError("Z_RIS diagonal length does not match N_RIS");
    }
    const auto blk = [&](Group a, Group b) -> const CMatrix& { return z.block(a, b); };
    CMatrix z_rot = blk(Group::R, Group::T);
    CMatrix z_ros = -blk(Group::R, Group::S);
    CMatrix z_sos = CMatrix::Zero(z.n_ris(), z.n_ris());
    CMatrix z_sot = -blk(Group::S, Group::T);
    if (z.n_e() > 0) {
        CMatrix z_oo_bar = blk(Group::O, Group::O);
        for (Eigen::Index i = 0; i < z.n_e(); ++i) {
            z_oo_bar(i, i) += z.z_us()[i];
        }
        const CMatrix inv_oo = naive_inverse(z_oo_bar, "Z_OO + Z_US");
        z_rot = blk(Group::R, Group::T) - blk(Group::R, Group::O) * inv_oo * blk(Group::O, Group::T);
        z_ros = blk(Group::R, Group::O) * inv_oo * blk(Group::O, Group::S) - blk(Group::R, Group::S);
        z_sos = -blk(Group::S, Group::O) * inv_oo * blk(Group::O, Group::S);
        z_sot = blk(Group::S, Group::O) * inv_oo * blk(Group::O, Group::T) - blk(Group::S, Group::T);
    }

    CMatrix z_l = CMatrix::Zero(z.l(), z.l());
    z_l.diagonal() = z.z_l();
    CMatrix z_g = CMatrix::Zero(z.m(), z.m());
    z_g.diagonal() = z.z_g();
    CMatrix z_ris_m = CMatrix::Zero(z.n_ris(), z.n_ris());
    z_ris_m.diagonal() = z_ris;

    const CMatrix z_rl = naive_inverse(
        CMatrix::Identity(z.l(), z.l()) + blk(Group::R, Group::R) * naive_inverse(z_l, "Z_L"),
        "I + Z_RR Z_L^-1");
    const CMatrix z_tg = naive_inverse(blk(Group::T, Group::T) + z_g, "Z_TT + Z_G");
    const CMatrix z_sca =
        naive_inverse(blk(Group::S, Group::S) + z_sos + z_ris_m, "Z_SS + Z_SOS + Z_RIS");
    return z_rl * (z_rot - z_ros * z_sca * z_sot) * z_tg;
}

double f_reference(const opt::DetCoefficients& c, double x)
{
    const cplx z(c.r0k, x);
    const cplx chi = 1.0 + c.a_k * z;
    const cplx chi_conj = 1.0 + std::conj(c.a_k) * std::conj(z);
    const cplx value = 1.0 + c.c1 / chi + std::conj(c.c1) / chi_conj +
                       c.c2 / (chi.real() * chi.real() + chi.imag() * chi.imag());
    return value.real();
}

GridMax grid_max_f(const opt::DetCoefficients& c, const channel::ReactanceBounds& bounds,
                   std::size_t n)
{
    if (n < 2) {
        throw ContractViolation("grid needs at least 2 points");
    }
    GridMax best{bounds.lower, f_reference(c, bounds.lower)};
    const double step = (bounds.upper - bounds.lower) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        const double x = (i == n - 1) ? bounds.upper : bounds.lower + step * static_cast<double>(i);
        const double f = f_reference(c, x);
        if (f > best.f) {
            best = {x, f};
        }
    }
    return best;
}

double dense_logdet_rate(const CMatrix& h, const CMatrix& q, double sigma2)
{
    if (h.rows() > kMaxReceiveAntennas) {
        throw ContractViolation("dense rate oracle limited to L <= 6");
    }
    if (!(sigma2 > 0.0)) {
        throw ContractViolation("noise power sigma2 must be positive");
    }
    const CMatrix arg = CMatrix::Identity(h.rows(), h.rows()) + h * q * h.adjoint() / sigma2;
    return std::log(std::abs(naive_determinant(arg))) / std::numbers::ln2;
}

}  // namespace rismc::oracle
