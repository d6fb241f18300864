#pragma once

// Mass functionals: integral of e^u over a domain, over a masked region, and over
// superlevel sets {phi > t}.

#include <cmath>
#include <span>
#include <vector>

#include "mfl/mesh.hpp"

namespace mfl {

/// Integral of e^u over the whole field domain (trapezoid in r on radial meshes).
inline double weighted_mass(const RadialField& u) {
    const auto w = u.mesh().area_weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * std::exp(u[i]);
    return sum;
}

/// Integral of e^u over the grid domain, optionally restricted to nodes where mask is true.
inline double weighted_mass(const ScalarField2D& u, std::span<const bool> mask = {}) {
    if (!mask.empty() && mask.size() != u.size()) throw GridMismatch("mask length does not match grid");
    const auto w = u.grid().weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (w[k] == 0.0) continue;
        if (!mask.empty() && !mask[k]) continue;
        sum += w[k] * std::exp(u[k]);
    }
    return sum;
}

/// Plain area of the domain.
inline double domain_area(const RadialMesh& mesh) {
    return pi * (mesh.outer_radius() * mesh.outer_radius() - mesh.inner_radius() * mesh.inner_radius());
}

namespace detail {

// Trapezoid integral of 2 pi r e^{u(r)} over [a, b] within one mesh cell, u linear in the cell.
inline double cell_piece_mass(const RadialField& u, std::size_t i, double a, double b) {
    if (b <= a) return 0.0;
    const double r0 = u.mesh()[i], r1 = u.mesh()[i + 1];
    auto integrand = [&](double r) {
        const double s = (r - r0) / (r1 - r0);
        return 2.0 * pi * r * std::exp(u[i] + s * (u[i + 1] - u[i]));
    };
    return 0.5 * (b - a) * (integrand(a) + integrand(b));
}

// Sub-interval of cell i on which the linear interpolant of phi exceeds t, or empty.
inline std::pair<double, double> cell_superlevel(const RadialField& phi, std::size_t i, double t) {
    const double r0 = phi.mesh()[i], r1 = phi.mesh()[i + 1];
    const double p0 = phi[i], p1 = phi[i + 1];
    const bool in0 = p0 > t, in1 = p1 > t;
    if (in0 && in1) return {r0, r1};
    if (!in0 && !in1) return {r0, r0};
    const double rc = r0 + (t - p0) / (p1 - p0) * (r1 - r0);
    return in0 ? std::pair{r0, rc} : std::pair{rc, r1};
}

}  // namespace detail

/// a(t) = integral of e^u over {phi > t}; phi is taken piecewise linear between nodes.
inline double superlevel_mass(const RadialField& u, const RadialField& phi, double t) {
    require_same_mesh(u, phi);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const auto [a, b] = detail::cell_superlevel(phi, i, t);
        sum += detail::cell_piece_mass(u, i, a, b);
    }
    return sum;
}

/// a(t) = sum of node masses w_k e^{u_k} over nodes with phi_k > t.
inline double superlevel_mass(const ScalarField2D& u, const ScalarField2D& phi, double t) {
    require_same_grid(u, phi);
    const auto w = u.grid().weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (w[k] > 0.0 && phi[k] > t) sum += w[k] * std::exp(u[k]);
    }
    return sum;
}

/// Cumulative mass of e^u over B_{r_i} (or the annulus up to r_i) at every node.
inline std::vector<double> cumulative_mass(const RadialField& u) {
    std::vector<double> m(u.size(), 0.0);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        m[i + 1] = m[i] + detail::cell_piece_mass(u, i, u.mesh()[i], u.mesh()[i + 1]);
    }
    return m;
}

/// Cumulative e^u-mass at the nodes using three-point Gauss rules on the cubic interpolant.
inline std::vector<double> cumulative_mass_gauss(const RadialField& u) {
    static constexpr double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    std::vector<double> m(u.size(), 0.0);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double a = u.mesh()[i], b = u.mesh()[i + 1];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double r = c + h * gx[q];
            s += gw[q] * 2.0 * pi * r * std::exp(u.at_cubic(r));
        }
        m[i + 1] = m[i] + h * s;
    }
    return m;
}

}  // namespace mfl
