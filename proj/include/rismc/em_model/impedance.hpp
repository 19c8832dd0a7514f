#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rismc/em_model/dipole.hpp"
#include "rismc/linalg.hpp"

namespace rismc::em {

// Free-space wave impedance over 4*pi, the prefactor of the sinusoidal
// dipole near field.
inline constexpr double kEta0Over4Pi = 29.9792458;

inline constexpr double kQuadratureRelTol = 1e-9;

// Induced-EMF mutual impedance between two thin dipoles with sinusoidal
// current distributions, referred to the feed-point currents. The field of
// one dipole is integrated against the current of the other with adaptive
// Gauss-Kronrod quadrature; the self term integrates on the wire surface.
// The result does not depend on argument order (bit-identical).
cplx mutual_impedance(const Dipole& d1, const Dipole& d2, double wavelength);

enum class Group : std::size_t { T = 0, R = 1, S = 2, O = 3 };

inline constexpr std::array<Group, 4> kGroups{Group::T, Group::R, Group::S, Group::O};

std::string_view group_name(Group g);

// Full family of self/mutual impedance blocks between the transmitter (T),
// receiver (R), RIS (S) and scatterer (O) ports, plus the diagonal
// terminations Z_G, Z_L and Z_US (stored as their diagonals).
class ImpedanceSet
{
public:
    ImpedanceSet() = default;

    // blocks[a][b] is Z_ab. Validates shapes, finiteness and reciprocity
    // (Z_ab(i,j) == Z_ba(j,i) within 1e-9 relative); throws ReciprocityError
    // or DimensionError.
    ImpedanceSet(double wavelength, std::array<std::array<CMatrix, 4>, 4> blocks, CVector z_g,
                 CVector z_l, CVector z_us);

    double wavelength() const noexcept { return wavelength_; }
    Eigen::Index size(Group g) const { return blocks_[idx(g)][idx(g)].rows(); }
    Eigen::Index m() const { return size(Group::T); }
    Eigen::Index l() const { return size(Group::R); }
    Eigen::Index n_ris() const { return size(Group::S); }
    Eigen::Index n_e() const { return size(Group::O); }

    const CMatrix& block(Group a, Group b) const { return blocks_[idx(a)][idx(b)]; }
    const CVector& z_g() const noexcept { return z_g_; }
    const CVector& z_l() const noexcept { return z_l_; }
    const CVector& z_us() const noexcept { return z_us_; }

    // Copy with Z_ab replaced by `value` and Z_ba by its transpose.
    ImpedanceSet with_block(Group a, Group b, const CMatrix& value) const;
    ImpedanceSet with_terminations(CVector z_g, CVector z_l, CVector z_us) const;

    friend bool operator==(const ImpedanceSet& x, const ImpedanceSet& y);

private:
    static std::size_t idx(Group g) { return static_cast<std::size_t>(g); }

    double wavelength_ = 0.0;
    std::array<std::array<CMatrix, 4>, 4> blocks_;
    CVector z_g_, z_l_, z_us_;
};

struct Terminations
{
    std::vector<cplx> z_g;   // M values
    std::vector<cplx> z_l;   // L values
    std::vector<cplx> z_us;  // N_e values
};

// Every entry from mutual_impedance, evaluated pairwise (concurrently when
// `threads` > 1) into a fixed layout. Throws QuadratureError with the
// global pair indices (ordering T, R, S, O) on failure.
ImpedanceSet assemble_impedance_set(const Scene& scene, const Terminations& terminations,
                                    unsigned threads = 0);

}  // namespace rismc::em
