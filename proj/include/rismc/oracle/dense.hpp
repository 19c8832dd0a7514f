#pragma once

#include <cstddef>
#include <string>

#include "rismc/channel/network.hpp"
#include "rismc/em_model/impedance.hpp"
#include "rismc/linalg.hpp"
#include "rismc/optimizer/decouple.hpp"

// Brute-force references for cross-checking the main path. Nothing here
// calls Eigen decompositions or the channel/optimizer solvers: inverses
// are Gauss-Jordan, determinants are cofactor expansions and elimination is
// done row by row.
namespace rismc::oracle {

struct OracleReport
{
    std::string check;
    double max_relative_error = 0.0;
    double tolerance = 0.0;
    std::string worst_case_id;
    std::size_t samples = 0;
    bool passed = true;
    std::string detail;
};

inline constexpr Eigen::Index kMaxRisElements = 64;
inline constexpr Eigen::Index kMaxReceiveAntennas = 6;

// Gauss-Jordan inverse with partial pivoting. Throws SingularMatrixError on
// a zero pivot.
CMatrix naive_inverse(const CMatrix& m, const std::string& what = "matrix");

// Cofactor expansion; refuses n > kMaxReceiveAntennas.
cplx naive_determinant(const CMatrix& m);

// Scatterer-eliminated blocks from row-by-row elimination of the O ports of
// the full T/R/S/O impedance system.
struct DenseReduction
{
    CMatrix z_rot, z_ros, z_sos, z_sot;
};

DenseReduction dense_block_elimination(const em::ImpedanceSet& z);

// End-to-end channel transcribed with explicit inverses.
CMatrix dense_channel(const em::ImpedanceSet& z, const CVector& z_ris);

struct GridMax
{
    double x = 0.0;
    double f = 0.0;
};

// Single-element objective written out term by term.
double f_reference(const opt::DetCoefficients& c, double x);

// Argmax over `n` uniform points including both bounds (first index wins
// ties).
GridMax grid_max_f(const opt::DetCoefficients& c, const channel::ReactanceBounds& bounds,
                   std::size_t n);

// log2 det(I + H Q H^H / sigma2) by cofactor expansion; L <= 6.
double dense_logdet_rate(const CMatrix& h, const CMatrix& q, double sigma2);

}  // namespace rismc::oracle
