#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rismc/em_model/impedance.hpp"
#include "rismc/errors.hpp"

namespace rismc::em {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr std::size_t kMaxSplits = 4000;
constexpr double kTargetTol = 1e-12;

// Orders a pair so that the computation never depends on argument order.
// The key uses wire parameters and the sign pattern of the center
// displacement, which keeps it translation invariant.
bool is_canonical_source(const Dipole& a, const Dipole& b)
{
    if (a.length() != b.length()) {
        return a.length() < b.length();
    }
    if (a.radius() != b.radius()) {
        return a.radius() < b.radius();
    }
    for (int i = 0; i < 3; ++i) {
        if (a.axis()[i] != b.axis()[i]) {
            return a.axis()[i] < b.axis()[i];
        }
    }
    const Vec3 delta = b.center() - a.center();
    const double tol = 1e-9 * a.length();
    for (int i = 0; i < 3; ++i) {
        if (std::abs(delta[i]) > tol) {
            return delta[i] > 0.0;
        }
    }
    return true;
}

Vec3 any_perpendicular(const Vec3& axis)
{
    const Vec3 trial = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return axis.cross(trial).normalized();
}

// Near field of a center-fed dipole with unit maximum current.
struct SinusoidalSource
{
    Vec3 center;
    Vec3 axis;
    double half_length;
    double k;

    cplx tangential_field(const Vec3& point, const Vec3& direction) const
    {
        const Vec3 w = point - center;
        const double z = w.dot(axis);
        const Vec3 rho_vec = w - z * axis;
        const double rho2 = rho_vec.squaredNorm();
        const double h = half_length;
        const double r1 = std::sqrt(rho2 + (z - h) * (z - h));
        const double r2 = std::sqrt(rho2 + (z + h) * (z + h));
        const double r0 = std::sqrt(rho2 + z * z);
        const cplx g1 = std::polar(1.0, -k * r1) / r1;
        const cplx g2 = std::polar(1.0, -k * r2) / r2;
        const cplx g0 = std::polar(1.0, -k * r0) / r0;
        const double ckh = std::cos(k * h);
        const cplx j(0.0, 1.0);

        cplx field = -j * kEta0Over4Pi * (g1 + g2 - 2.0 * ckh * g0) * axis.dot(direction);
        const double radial = rho_vec.dot(direction);
        if (radial != 0.0 && rho2 > 0.0) {
            field += j * kEta0Over4Pi / rho2 *
                     ((z - h) * g1 + (z + h) * g2 - 2.0 * z * ckh * g0) * radial;
        }
        return field;
    }
};

struct Panel
{
    double lo;
    double hi;
    cplx value;
    double error;
    double l1;
};

template <class F>
Panel evaluate_panel(const F& f, double lo, double hi)
{
    double error = 0.0;
    double l1 = 0.0;
    const cplx value = gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &error, &l1);
    // The non-adaptive error estimate is reported on the reference interval.
    return {lo, hi, value, 0.5 * (hi - lo) * error, l1};
}

// Fixed 31-point Kronrod panels refined by repeatedly halving the panel with
// the largest Kronrod-Gauss difference until the total meets the target.
template <class F>
cplx integrate_panels(const F& f, const std::vector<double>& edges)
{
    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        panels.push_back(evaluate_panel(f, edges[i], edges[i + 1]));
    }
    auto totals = [&] {
        cplx sum(0.0, 0.0);
        double err = 0.0;
        double l1 = 0.0;
        for (const Panel& p : panels) {
            sum += p.value;
            err += p.error;
            l1 += p.l1;
        }
        return std::tuple{sum, err, l1};
    };
    for (std::size_t split = 0;; ++split) {
        const auto [sum, err, l1] = totals();
        if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) {
            throw QuadratureError(0, 1, "non-finite integrand");
        }
        if (err <= kTargetTol * std::max(l1, std::abs(sum))) {
            return sum;
        }
        if (split == kMaxSplits) {
            if (err <= kQuadratureRelTol * std::max(l1, std::abs(sum))) {
                return sum;
            }
            throw QuadratureError(0, 1, "error estimate " + std::to_string(err / l1) +
                                            " (relative) after " + std::to_string(split) +
                                            " refinements");
        }
        const auto worst = std::max_element(panels.begin(), panels.end(),
                                            [](const Panel& a, const Panel& b) { return a.error < b.error; });
        const double lo = worst->lo;
        const double hi = worst->hi;
        const double mid = 0.5 * (lo + hi);
        *worst = evaluate_panel(f, lo, mid);
        panels.push_back(evaluate_panel(f, mid, hi));
    }
}

// Panel edges for one observation wire. The source field peaks where the
// observation line passes its ends and feed, on a scale set by the distance
// to those points, so panels are graded geometrically around each.
std::vector<double> panel_edges(const Vec3& origin, const Vec3& direction, double h2,
                                const Vec3& src_axis, double h1, double radius)
{
    std::vector<double> edges{-h2, 0.0, h2};
    for (double t : {-h1, 0.0, h1}) {
        const Vec3 p = t * src_axis - origin;
        const double along = std::clamp(p.dot(direction), -h2, h2);
        const double offset = std::max((p - p.dot(direction) * direction).norm(), radius);
        for (double step = offset; step < 2.0 * h2; step *= 4.0) {
            for (double e : {along - step, along + step}) {
                if (e > -h2 && e < h2) {
                    edges.push_back(e);
                }
            }
        }
        edges.push_back(along);
    }
    std::sort(edges.begin(), edges.end());
    const double merge = 1e-9 * h2;
    std::vector<double> out;
    for (double e : edges) {
        if (out.empty() || e - out.back() > merge) {
            out.push_back(e);
        }
    }
    out.back() = h2;
    return out;
}

}  // namespace

cplx mutual_impedance(const Dipole& d1, const Dipole& d2, double wavelength)
{
    const bool keep = is_canonical_source(d1, d2);
    const Dipole& src = keep ? d1 : d2;
    const Dipole& obs = keep ? d2 : d1;

    const double k = 2.0 * std::numbers::pi / wavelength;
    const double h1 = 0.5 * src.length();
    const double h2 = 0.5 * obs.length();
    const SinusoidalSource source{Vec3::Zero(), src.axis(), h1, k};

    // Work relative to the source center so absolute position never enters.
    Vec3 origin = obs.center() - src.center();
    const bool self_term = origin.norm() <= 1e-9 * src.length() &&
                           std::abs(std::abs(src.axis().dot(obs.axis())) - 1.0) < 1e-12;
    if (self_term) {
        origin = obs.radius() * any_perpendicular(obs.axis());
    }

    const double sin_in_1 = std::sin(k * h1);
    const double sin_in_2 = std::sin(k * h2);
    if (std::abs(sin_in_1) < 1e-6 || std::abs(sin_in_2) < 1e-6) {
        throw ContractViolation("dipole length is a multiple of the wavelength; feed current vanishes");
    }

    auto integrand = [&](double s) -> cplx {
        const Vec3 point = origin + s * obs.axis();
        const double current = std::sin(k * (h2 - std::abs(s)));
        return source.tangential_field(point, obs.axis()) * current;
    };

    const auto edges = panel_edges(origin, obs.axis(), h2, src.axis(), h1, obs.radius());
    const cplx total = integrate_panels(integrand, edges);
    return -total / (sin_in_1 * sin_in_2);
}

}  // namespace rismc::em
