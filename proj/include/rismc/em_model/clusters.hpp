#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rismc/em_model/dipole.hpp"

namespace rismc::em {

struct Box
{
    Vec3 min;
    Vec3 max;
};

struct ClusterRequest
{
    std::uint64_t seed = 0;
    std::size_t n_clusters = 0;
    std::size_t per_cluster = 0;
    // Cluster centers are uniform in `region`; members are uniform in a cube
    // of side `spread` around their center, clipped to `region`.
    Box region;
    double spread = 0.0;
    double min_separation = 0.0;
    // Shape shared by every scatterer.
    Vec3 axis = Vec3::UnitZ();
    double length = 0.0;
    double radius = 0.0;
    // Existing dipole centers that must also be kept at min_separation.
    std::vector<Vec3> keep_out;
    std::size_t max_attempts = 10000;
};

struct ClusterPlacement
{
    std::vector<Dipole> dipoles;
    std::vector<std::size_t> cluster_ids;
};

// Seeded rejection sampling. Throws PlacementError when an object cannot be
// placed within max_attempts draws.
ClusterPlacement place_clusters(const ClusterRequest& request);

}  // namespace rismc::em
