#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rismc/em_model/impedance.hpp"
#include "rismc/errors.hpp"

namespace rismc::em {

std::string_view group_name(Group g)
{
    switch (g) {
    case Group::T: return "T";
    case Group::R: return "R";
    case Group::S: return "S";
    case Group::O: return "O";
    }
    return "?";
}

namespace {

constexpr double kReciprocityTol = 1e-9;

void check_diagonal_vector(const CVector& v, Eigen::Index n, const char* name)
{
    if (v.size() != n) {
        throw DimensionError(std::string("termination ") + name + " has " +
                             std::to_string(v.size()) + " entries, expected " + std::to_string(n));
    }
    if (!v.allFinite()) {
        throw ContractViolation(std::string("termination ") + name + " is not finite");
    }
}

}  // namespace

ImpedanceSet::ImpedanceSet(double wavelength, std::array<std::array<CMatrix, 4>, 4> blocks,
                           CVector z_g, CVector z_l, CVector z_us)
    : wavelength_(wavelength), blocks_(std::move(blocks)), z_g_(std::move(z_g)),
      z_l_(std::move(z_l)), z_us_(std::move(z_us))
{
    if (!(wavelength_ > 0.0)) {
        throw ContractViolation("wavelength must be positive");
    }
    for (Group a : kGroups) {
        for (Group b : kGroups) {
            const CMatrix& z = block(a, b);
            const std::string name = std::string(group_name(a)) + std::string(group_name(b));
            if (z.rows() != size(a) || z.cols() != size(b)) {
                throw DimensionError("block Z_" + name + " is " + std::to_string(z.rows()) + "x" +
                                     std::to_string(z.cols()) + ", expected " +
                                     std::to_string(size(a)) + "x" + std::to_string(size(b)));
            }
            if (!z.allFinite()) {
                throw ContractViolation("block Z_" + name + " is not finite");
            }
        }
    }
    for (std::size_t ia = 0; ia < 4; ++ia) {
        for (std::size_t ib = ia; ib < 4; ++ib) {
            const CMatrix& ab = blocks_[ia][ib];
            const CMatrix& ba = blocks_[ib][ia];
            for (Eigen::Index i = 0; i < ab.rows(); ++i) {
                for (Eigen::Index j = 0; j < ab.cols(); ++j) {
                    const cplx x = ab(i, j);
                    const cplx y = ba(j, i);
                    const double scale = std::max(std::abs(x), std::abs(y));
                    if (std::abs(x - y) > kReciprocityTol * scale) {
                        throw ReciprocityError(
                            std::string(group_name(kGroups[ia])) + std::string(group_name(kGroups[ib])),
                            std::string(group_name(kGroups[ib])) + std::string(group_name(kGroups[ia])),
                            static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                            std::abs(x - y) / scale);
                    }
                }
            }
        }
    }
    check_diagonal_vector(z_g_, m(), "Z_G");
    check_diagonal_vector(z_l_, l(), "Z_L");
    check_diagonal_vector(z_us_, n_e(), "Z_US");
}

ImpedanceSet ImpedanceSet::with_block(Group a, Group b, const CMatrix& value) const
{
    auto blocks = blocks_;
    blocks[idx(a)][idx(b)] = value;
    blocks[idx(b)][idx(a)] = value.transpose();
    return ImpedanceSet(wavelength_, std::move(blocks), z_g_, z_l_, z_us_);
}

ImpedanceSet ImpedanceSet::with_terminations(CVector z_g, CVector z_l, CVector z_us) const
{
    return ImpedanceSet(wavelength_, blocks_, std::move(z_g), std::move(z_l), std::move(z_us));
}

bool operator==(const ImpedanceSet& x, const ImpedanceSet& y)
{
    if (x.wavelength_ != y.wavelength_) {
        return false;
    }
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
            const auto& p = x.blocks_[a][b];
            const auto& q = y.blocks_[a][b];
            if (p.rows() != q.rows() || p.cols() != q.cols() || p != q) {
                return false;
            }
        }
    }
    return x.z_g_ == y.z_g_ && x.z_l_ == y.z_l_ && x.z_us_ == y.z_us_;
}

ImpedanceSet assemble_impedance_set(const Scene& scene, const Terminations& terminations,
                                    unsigned threads)
{
    const std::array<const std::vector<Dipole>*, 4> groups{&scene.tx(), &scene.rx(), &scene.ris(),
                                                           &scene.scatterers()};
    if (terminations.z_g.size() != scene.tx().size() ||
        terminations.z_l.size() != scene.rx().size() ||
        terminations.z_us.size() != scene.scatterers().size()) {
        throw DimensionError("termination lists must match the tx, rx and scatterer counts");
    }

    std::vector<const Dipole*> all;
    std::array<Eigen::Index, 5> offsets{};
    for (std::size_t g = 0; g < 4; ++g) {
        offsets[g] = static_cast<Eigen::Index>(all.size());
        for (const auto& d : *groups[g]) {
            all.push_back(&d);
        }
    }
    offsets[4] = static_cast<Eigen::Index>(all.size());
    const auto n = static_cast<Eigen::Index>(all.size());

    CMatrix full(n, n);
    const double wavelength = scene.wavelength();

    // Rows are handed out dynamically; each entry lands at a fixed position.
    std::atomic<Eigen::Index> next_row{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (Eigen::Index i = next_row++; i < n; i = next_row++) {
            for (Eigen::Index j = i; j < n; ++j) {
                try {
                    full(i, j) = mutual_impedance(*all[i], *all[j], wavelength);
                } catch (const QuadratureError& e) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::make_exception_ptr(
                            QuadratureError(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                            e.detail()));
                    }
                    return;
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<Eigen::Index>(n, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            full(i, j) = full(j, i);
        }
    }

    std::array<std::array<CMatrix, 4>, 4> blocks;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
            blocks[a][b] = full.block(offsets[a], offsets[b], offsets[a + 1] - offsets[a],
                                      offsets[b + 1] - offsets[b]);
        }
    }
    auto to_vector = [](const std::vector<cplx>& v) {
        return CVector(Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    return ImpedanceSet(wavelength, std::move(blocks), to_vector(terminations.z_g),
                        to_vector(terminations.z_l), to_vector(terminations.z_us));
}

}  // namespace rismc::em
