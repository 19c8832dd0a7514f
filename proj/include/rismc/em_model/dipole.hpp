#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rismc/linalg.hpp"

namespace rismc::em {

// Perfectly conducting thin-wire dipole, center-fed.
class Dipole
{
public:
    // Throws ContractViolation unless radius > 0, radius/length < 0.1 and
    // |axis| == 1 within 1e-12.
    Dipole(Vec3 center, Vec3 axis, double length, double radius);

    const Vec3& center() const noexcept { return center_; }
    const Vec3& axis() const noexcept { return axis_; }
    double length() const noexcept { return length_; }
    double radius() const noexcept { return radius_; }

    Dipole translated(const Vec3& offset) const;

    friend bool operator==(const Dipole&, const Dipole&) = default;

private:
    Vec3 center_;
    Vec3 axis_;
    double length_;
    double radius_;
};

// Every dipole of a simulated link, grouped by role.
class Scene
{
public:
    Scene(double wavelength, std::vector<Dipole> tx, std::vector<Dipole> rx,
          std::vector<Dipole> ris, std::vector<Dipole> scatterers,
          std::vector<std::size_t> cluster_ids, double ris_spacing);

    double wavelength() const noexcept { return wavelength_; }
    const std::vector<Dipole>& tx() const noexcept { return tx_; }
    const std::vector<Dipole>& rx() const noexcept { return rx_; }
    const std::vector<Dipole>& ris() const noexcept { return ris_; }
    const std::vector<Dipole>& scatterers() const noexcept { return scatterers_; }
    const std::vector<std::size_t>& cluster_ids() const noexcept { return cluster_ids_; }
    double ris_spacing() const noexcept { return ris_spacing_; }

    // Non-fatal findings from construction (e.g. RIS spacing above lambda/2).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    Scene translated(const Vec3& offset) const;

private:
    double wavelength_;
    std::vector<Dipole> tx_, rx_, ris_, scatterers_;
    std::vector<std::size_t> cluster_ids_;
    double ris_spacing_;
    std::vector<std::string> warnings_;
};

// `count` parallel dipoles centered on `center`, spaced by `spacing` along
// `direction`.
std::vector<Dipole> linear_array(const Vec3& center, std::size_t count, double spacing,
                                 const Vec3& direction, const Vec3& axis, double length,
                                 double radius);

}  // namespace rismc::em
