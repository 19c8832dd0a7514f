#include "rismc/em_model/dipole.hpp"

#include <cmath>

#include "rismc/errors.hpp"

namespace rismc::em {

Dipole::Dipole(Vec3 center, Vec3 axis, double length, double radius)
    : center_(std::move(center)), axis_(std::move(axis)), length_(length), radius_(radius)
{
    if (!center_.allFinite() || !axis_.allFinite()) {
        throw ContractViolation("dipole center and axis must be finite");
    }
    if (!(length_ > 0.0)) {
        throw ContractViolation("dipole length must be positive");
    }
    if (!(radius_ > 0.0) || !(radius_ / length_ < 0.1)) {
        throw ContractViolation("dipole radius must satisfy 0 < radius < 0.1 * length");
    }
    if (std::abs(axis_.norm() - 1.0) > 1e-12) {
        throw ContractViolation("dipole axis must have unit norm");
    }
}

Dipole Dipole::translated(const Vec3& offset) const
{
    return Dipole(center_ + offset, axis_, length_, radius_);
}

namespace {

void check_distinct(const std::vector<const Dipole*>& all)
{
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const bool same_center = (all[i]->center() - all[j]->center()).norm() == 0.0;
            const bool same_axis =
                std::abs(std::abs(all[i]->axis().dot(all[j]->axis())) - 1.0) < 1e-12;
            if (same_center && same_axis) {
                throw ContractViolation("dipoles " + std::to_string(i) + " and " +
                                        std::to_string(j) + " coincide");
            }
        }
    }
}

}  // namespace

Scene::Scene(double wavelength, std::vector<Dipole> tx, std::vector<Dipole> rx,
             std::vector<Dipole> ris, std::vector<Dipole> scatterers,
             std::vector<std::size_t> cluster_ids, double ris_spacing)
    : wavelength_(wavelength), tx_(std::move(tx)), rx_(std::move(rx)), ris_(std::move(ris)),
      scatterers_(std::move(scatterers)), cluster_ids_(std::move(cluster_ids)),
      ris_spacing_(ris_spacing)
{
    if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_)) {
        throw ContractViolation("wavelength must be positive");
    }
    if (tx_.empty() || rx_.empty() || ris_.empty()) {
        throw ContractViolation("scene needs at least one tx, one rx and one RIS dipole");
    }
    if (cluster_ids_.empty() && !scatterers_.empty()) {
        cluster_ids_.assign(scatterers_.size(), 0);
    }
    if (cluster_ids_.size() != scatterers_.size()) {
        throw DimensionError("cluster id list must match the scatterer list");
    }
    if (ris_spacing_ > wavelength_ / 2.0 * (1.0 + 1e-12)) {
        warnings_.push_back("RIS spacing " + std::to_string(ris_spacing_ / wavelength_) +
                            " lambda exceeds lambda/2");
    }
    std::vector<const Dipole*> all;
    for (const auto* group : {&tx_, &rx_, &ris_, &scatterers_}) {
        for (const auto& d : *group) {
            all.push_back(&d);
        }
    }
    check_distinct(all);
}

Scene Scene::translated(const Vec3& offset) const
{
    auto shift = [&](const std::vector<Dipole>& in) {
        std::vector<Dipole> out;
        out.reserve(in.size());
        for (const auto& d : in) {
            out.push_back(d.translated(offset));
        }
        return out;
    };
    return Scene(wavelength_, shift(tx_), shift(rx_), shift(ris_), shift(scatterers_),
                 cluster_ids_, ris_spacing_);
}

std::vector<Dipole> linear_array(const Vec3& center, std::size_t count, double spacing,
                                 const Vec3& direction, const Vec3& axis, double length,
                                 double radius)
{
    std::vector<Dipole> out;
    out.reserve(count);
    const Vec3 dir = direction.normalized();
    const double first = -0.5 * spacing * static_cast<double>(count == 0 ? 0 : count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double offset = first + spacing * static_cast<double>(i);
        out.emplace_back(center + offset * dir, axis, length, radius);
    }
    return out;
}

}  // namespace rismc::em
