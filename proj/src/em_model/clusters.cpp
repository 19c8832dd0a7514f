#include "rismc/em_model/clusters.hpp"

#include <random>
#include <string>

#include "rismc/errors.hpp"

namespace rismc::em {

ClusterPlacement place_clusters(const ClusterRequest& request)
{
    ClusterPlacement out;
    if (request.n_clusters == 0 || request.per_cluster == 0) {
        return out;
    }
    const Box& box = request.region;
    if (!((box.max - box.min).minCoeff() >= 0.0)) {
        throw PlacementError("cluster region has max < min");
    }
    if (!(request.min_separation >= 0.0) || !(request.spread >= 0.0)) {
        throw PlacementError("min_separation and spread must be non-negative");
    }

    std::mt19937_64 rng(request.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform_in = [&](const Vec3& lo, const Vec3& hi) {
        Vec3 p;
        for (int i = 0; i < 3; ++i) {
            p[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
        }
        return p;
    };
    const double min_sep2 = request.min_separation * request.min_separation;
    auto clear_of = [&](const Vec3& p) {
        for (const auto& q : request.keep_out) {
            if ((p - q).squaredNorm() < min_sep2) {
                return false;
            }
        }
        for (const auto& d : out.dipoles) {
            if ((p - d.center()).squaredNorm() < min_sep2) {
                return false;
            }
        }
        return true;
    };

    out.dipoles.reserve(request.n_clusters * request.per_cluster);
    for (std::size_t c = 0; c < request.n_clusters; ++c) {
        const Vec3 center = uniform_in(box.min, box.max);
        const Vec3 half = Vec3::Constant(0.5 * request.spread);
        const Vec3 lo = (center - half).cwiseMax(box.min);
        const Vec3 hi = (center + half).cwiseMin(box.max);
        for (std::size_t i = 0; i < request.per_cluster; ++i) {
            bool placed = false;
            for (std::size_t attempt = 0; attempt < request.max_attempts; ++attempt) {
                const Vec3 p = uniform_in(lo, hi);
                if (clear_of(p)) {
                    out.dipoles.emplace_back(p, request.axis, request.length, request.radius);
                    out.cluster_ids.push_back(c);
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                throw PlacementError("cannot place scatterer " + std::to_string(i) + " of cluster " +
                                     std::to_string(c) + " within " +
                                     std::to_string(request.max_attempts) +
                                     " attempts: min_separation " +
                                     std::to_string(request.min_separation) +
                                     " m is too large for the cluster volume");
            }
        }
    }
    return out;
}

}  // namespace rismc::em
