#pragma once

// Line integrals over level sets {phi = t}.
//
// On grids the level set is extracted cell by cell with marching squares (linear
// interpolation along edges, saddles resolved by the cell-average sign). On radial
// meshes the level set is a union of circles whose radii are located on the cubic
// interpolant of phi.

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "mfl/mesh.hpp"

namespace mfl {

struct ContourIntegrals {
    double weighted_length = 0.0;   ///< integral of e^{u/2} ds
    double flux = 0.0;              ///< integral of |grad phi| ds
    double inverse_flux = 0.0;      ///< integral of e^u / |grad phi| ds (co-area density of a(t))
    double length = 0.0;            ///< plain length
    std::size_t pieces = 0;         ///< segments (grid) or circles (radial)
};

namespace detail {

// Root of the cubic interpolant of phi = t inside cell i, where the node values bracket t.
inline double radial_crossing(const RadialField& phi, std::size_t i, double t) {
    const double r0 = phi.mesh()[i], r1 = phi.mesh()[i + 1];
    const double p0 = phi[i] - t, p1 = phi[i + 1] - t;
    if (p0 == 0.0) return r0;
    if (p1 == 0.0) return r1;
    auto f = [&](double r) { return phi.at_cubic(r) - t; };
    double f0 = p0, f1 = p1;
    // The cubic agrees with the nodes, so the bracket is valid.
    std::uintmax_t iters = 100;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto [a, b] = boost::math::tools::toms748_solve(f, r0, r1, f0, f1, tol, iters);
    return 0.5 * (a + b);
}

}  // namespace detail

/// Radii where the radial field crosses level t (strict sign changes between nodes).
inline std::vector<double> level_radii(const RadialField& phi, double t) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        const bool a = phi[i] > t, b = phi[i + 1] > t;
        if (a != b) out.push_back(detail::radial_crossing(phi, i, t));
    }
    return out;
}

/// Integrals over the circles {phi = t}; empty when t is outside the range of phi.
inline ContourIntegrals contour_integrals(const RadialField& u, const RadialField& phi, double t) {
    require_same_mesh(u, phi);
    ContourIntegrals out;
    for (double rc : level_radii(phi, t)) {
        const double circ = 2.0 * pi * rc;
        const double uc = u.at_cubic(rc);
        const double grad = std::abs(phi.slope_cubic(rc));
        out.weighted_length += circ * std::exp(0.5 * uc);
        out.flux += circ * grad;
        out.inverse_flux += grad > 0.0 ? circ * std::exp(uc) / grad : INFINITY;
        out.length += circ;
        ++out.pieces;
    }
    return out;
}

/// One straight piece of a marching-squares contour.
struct ContourSegment {
    double x0, y0, x1, y1;
};

namespace detail {

struct EdgePoint {
    double x, y, u, gx, gy;
};

struct NodalGradient {
    std::vector<double> gx, gy;
};

inline NodalGradient nodal_gradient(const ScalarField2D& phi) {
    const Grid2D& g = phi.grid();
    const int n = g.n();
    const double h = g.h();
    NodalGradient out{std::vector<double>(g.size()), std::vector<double>(g.size())};
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = g.index(i, j);
            const int il = std::max(i - 1, 0), ir = std::min(i + 1, n - 1);
            const int jl = std::max(j - 1, 0), jr = std::min(j + 1, n - 1);
            out.gx[k] = (phi[g.index(ir, j)] - phi[g.index(il, j)]) / (h * (ir - il));
            out.gy[k] = (phi[g.index(i, jr)] - phi[g.index(i, jl)]) / (h * (jr - jl));
        }
    }
    return out;
}

// Calls emit(p, q) for every marching-squares segment of {phi = t} in cells whose corners are all active.
template <class Emit>
void march(const ScalarField2D& u, const ScalarField2D& phi, double t, const NodalGradient& grad, Emit&& emit) {
    const Grid2D& g = phi.grid();
    const int n = g.n();
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            const std::array<std::size_t, 4> c = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1),
                                                  g.index(i, j + 1)};
            if (!(g.active(c[0]) && g.active(c[1]) && g.active(c[2]) && g.active(c[3]))) continue;
            unsigned mask = 0;
            for (unsigned q = 0; q < 4; ++q) {
                if (phi[c[q]] > t) mask |= 1u << q;
            }
            if (mask == 0 || mask == 15) continue;

            const std::array<std::pair<double, double>, 4> xy = {
                std::pair{g.x(i), g.y(j)}, std::pair{g.x(i + 1), g.y(j)}, std::pair{g.x(i + 1), g.y(j + 1)},
                std::pair{g.x(i), g.y(j + 1)}};
            // Edge e joins corners e and (e+1)%4.
            std::array<EdgePoint, 4> pts{};
            std::array<bool, 4> cut{};
            for (unsigned e = 0; e < 4; ++e) {
                const std::size_t a = c[e], b = c[(e + 1) % 4];
                const bool ia = phi[a] > t, ib = phi[b] > t;
                if (ia == ib) continue;
                const double s = (t - phi[a]) / (phi[b] - phi[a]);
                const auto [xa, ya] = xy[e];
                const auto [xb, yb] = xy[(e + 1) % 4];
                pts[e] = {xa + s * (xb - xa), ya + s * (yb - ya), u[a] + s * (u[b] - u[a]),
                          grad.gx[a] + s * (grad.gx[b] - grad.gx[a]), grad.gy[a] + s * (grad.gy[b] - grad.gy[a])};
                cut[e] = true;
            }
            if (mask == 5 || mask == 10) {
                const double centre = 0.25 * (phi[c[0]] + phi[c[1]] + phi[c[2]] + phi[c[3]]);
                const bool centre_high = centre > t;
                // mask 5: corners 0,2 high. Joined through the centre when centre_high.
                const bool pair_01_12 = (mask == 5) == centre_high;
                if (pair_01_12) {
                    emit(pts[0], pts[1]);
                    emit(pts[2], pts[3]);
                } else {
                    emit(pts[3], pts[0]);
                    emit(pts[1], pts[2]);
                }
                continue;
            }
            int first = -1;
            for (int e = 0; e < 4; ++e) {
                if (!cut[e]) continue;
                if (first < 0) {
                    first = e;
                } else {
                    emit(pts[first], pts[e]);
                }
            }
        }
    }
}

}  // namespace detail

/// Integrals over the marching-squares polyline {phi = t}.
inline ContourIntegrals contour_integrals(const ScalarField2D& u, const ScalarField2D& phi, double t) {
    require_same_grid(u, phi);
    ContourIntegrals out;
    const auto grad = detail::nodal_gradient(phi);
    detail::march(u, phi, t, grad, [&](const detail::EdgePoint& p, const detail::EdgePoint& q) {
        const double len = std::hypot(q.x - p.x, q.y - p.y);
        const double gp = std::hypot(p.gx, p.gy), gq = std::hypot(q.gx, q.gy);
        out.weighted_length += 0.5 * len * (std::exp(0.5 * p.u) + std::exp(0.5 * q.u));
        out.flux += 0.5 * len * (gp + gq);
        out.inverse_flux += 0.5 * len * (std::exp(p.u) / gp + std::exp(q.u) / gq);
        out.length += len;
        ++out.pieces;
    });
    return out;
}

/// The marching-squares segments themselves (for export and plotting).
inline std::vector<ContourSegment> contour_segments(const ScalarField2D& phi, double t) {
    std::vector<ContourSegment> out;
    const auto grad = detail::nodal_gradient(phi);
    detail::march(phi, phi, t, grad, [&](const detail::EdgePoint& p, const detail::EdgePoint& q) {
        out.push_back({p.x, p.y, q.x, q.y});
    });
    return out;
}

}  // namespace mfl
