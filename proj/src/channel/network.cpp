#include "rismc/channel/network.hpp"

#include <cmath>
#include <string>

#include "rismc/errors.hpp"

namespace rismc::channel {

using em::Group;

namespace {

void expect_shape(const CMatrix& m, Eigen::Index rows, Eigen::Index cols, const char* name)
{
    if (m.rows() != rows || m.cols() != cols) {
        throw DimensionError(std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                             "x" + std::to_string(cols));
    }
}

}  // namespace

void ReducedNetwork::validate() const
{
    const auto L = l();
    const auto M = m();
    const auto N = n_ris();
    expect_shape(z_rl, L, L, "Z_RL");
    expect_shape(z_tg, M, M, "Z_TG");
    expect_shape(z_ss, N, N, "Z_SS");
    expect_shape(z_rot, L, M, "Z_ROT");
    expect_shape(z_ros, L, N, "Z_ROS");
    expect_shape(z_sos, N, N, "Z_SOS");
    expect_shape(z_sot, N, M, "Z_SOT");
}

ReducedNetwork ReducedNetwork::without_ris_coupling() const
{
    ReducedNetwork out = *this;
    out.z_ss = CMatrix(z_ss.diagonal().asDiagonal());
    return out;
}

ReducedNetwork reduce_network(const em::ImpedanceSet& z)
{
    ReducedNetwork net;
    const auto& z_rt = z.block(Group::R, Group::T);
    const auto& z_rs = z.block(Group::R, Group::S);
    const auto& z_st = z.block(Group::S, Group::T);

    if (z.n_e() == 0) {
        net.z_rot = z_rt;
        net.z_ros = -z_rs;
        net.z_sos = CMatrix::Zero(z.n_ris(), z.n_ris());
        net.z_sot = -z_st;
    } else {
        CMatrix z_oo_bar = z.block(Group::O, Group::O);
        z_oo_bar.diagonal() += z.z_us();
        const GuardedLu oo(z_oo_bar, "Z_OO + Z_US");
        // Solve once against both right-hand sides [Z_OT | Z_OS].
        CMatrix rhs(z.n_e(), z.m() + z.n_ris());
        rhs << z.block(Group::O, Group::T), z.block(Group::O, Group::S);
        const CMatrix y = oo.solve(rhs);
        const auto y_t = y.leftCols(z.m());
        const auto y_s = y.rightCols(z.n_ris());
        const auto& z_ro = z.block(Group::R, Group::O);
        const auto& z_so = z.block(Group::S, Group::O);
        net.z_rot = z_rt - z_ro * y_t;
        net.z_ros = z_ro * y_s - z_rs;
        net.z_sos = -z_so * y_s;
        net.z_sot = z_so * y_t - z_st;
    }

    const CMatrix receiver = CMatrix::Identity(z.l(), z.l()) +
                             z.block(Group::R, Group::R) * z.z_l().cwiseInverse().asDiagonal();
    net.z_rl = GuardedLu(receiver, "I + Z_RR Z_L^-1").inverse();

    CMatrix transmitter = z.block(Group::T, Group::T);
    transmitter.diagonal() += z.z_g();
    net.z_tg = GuardedLu(transmitter, "Z_TT + Z_G").inverse();

    net.z_ss = z.block(Group::S, Group::S);
    net.validate();
    return net;
}

RisLoadState::RisLoadState(RVector r0, RVector x, ReactanceBounds bounds)
    : r0_(std::move(r0)), x_(std::move(x)), bounds_(bounds)
{
    if (!(bounds_.lower < bounds_.upper) || !std::isfinite(bounds_.lower) ||
        !std::isfinite(bounds_.upper)) {
        throw ContractViolation("reactance bounds need finite X_lb < X_ub");
    }
    if (r0_.size() != x_.size()) {
        throw DimensionError("r0 and x must have the same length");
    }
    for (Eigen::Index k = 0; k < r0_.size(); ++k) {
        if (!(r0_[k] >= 0.0) || !std::isfinite(r0_[k])) {
            throw ContractViolation("parasitic resistance R_0," + std::to_string(k) +
                                    " must be finite and >= 0");
        }
        if (!(x_[k] >= bounds_.lower && x_[k] <= bounds_.upper)) {
            throw ContractViolation("reactance X_" + std::to_string(k) + " is outside [X_lb, X_ub]");
        }
    }
}

RisLoadState::RisLoadState(std::size_t n, double r0, double x, ReactanceBounds bounds)
    : RisLoadState(RVector::Constant(static_cast<Eigen::Index>(n), r0),
                   RVector::Constant(static_cast<Eigen::Index>(n), x), bounds)
{
}

void RisLoadState::set_reactance(Eigen::Index k, double x)
{
    if (k < 0 || k >= x_.size()) {
        throw DimensionError("RIS element index out of range");
    }
    if (!(x >= bounds_.lower && x <= bounds_.upper)) {
        throw ContractViolation("reactance X_" + std::to_string(k) + " is outside [X_lb, X_ub]");
    }
    x_[k] = x;
}

CVector RisLoadState::impedances() const
{
    CVector z(size());
    for (Eigen::Index k = 0; k < size(); ++k) {
        z[k] = cplx(r0_[k], x_[k]);
    }
    return z;
}

CMatrix ris_impedance_matrix(const RisLoadState& s)
{
    CMatrix z = CMatrix::Zero(s.size(), s.size());
    z.diagonal() = s.impedances();
    return z;
}

CMatrix end_to_end_channel(const ReducedNetwork& net, const CVector& z_ris)
{
    if (z_ris.size() != net.n_ris()) {
        throw DimensionError("Z_RIS diagonal length does not match N_RIS");
    }
    CMatrix scattering = net.z_ss + net.z_sos;
    scattering.diagonal() += z_ris;
    const GuardedLu lu(scattering, "Z_SS + Z_SOS + Z_RIS");
    const CMatrix y = lu.solve(net.z_sot);
    return net.z_rl * (net.z_rot - net.z_ros * y) * net.z_tg;
}

}  // namespace rismc::channel
