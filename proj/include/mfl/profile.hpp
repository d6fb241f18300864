#pragma once

// Per-threshold level-set data a(t), J(t), j(t), contour integrals and topology.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfl/contour.hpp"
#include "mfl/quadrature.hpp"
#include "mfl/topology.hpp"

namespace mfl {

struct LevelRecord {
    double t = 0.0;
    double mass = 0.0;             ///< a(t)
    double gradient_l1 = 0.0;      ///< J(t) = integral of |grad phi| over {phi > t}
    double gradient_l2 = 0.0;      ///< j(t) = integral of |grad phi|^2 over {phi > t}
    ContourIntegrals contour;
    LevelTopology topology;
};

struct LevelProfile {
    std::vector<LevelRecord> levels;   ///< thresholds strictly decreasing
    bool degenerate = false;           ///< phi is constant: a single level, nothing to profile
};

/// Sorted distinct values of a field (active nodes only on grids).
inline std::vector<double> distinct_values(const RadialField& phi) {
    std::vector<double> v(phi.values().begin(), phi.values().end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline std::vector<double> distinct_values(const ScalarField2D& phi) {
    std::vector<double> v;
    v.reserve(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        if (phi.grid().active(k)) v.push_back(phi[k]);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// n thresholds at quantiles of the sampled values, each moved to the midpoint of the
/// gap to the next sampled value so that no threshold sits on a node value (a plateau).
/// Returned in decreasing order; empty when fewer than two distinct values exist.
inline std::vector<double> plateau_free_thresholds(std::vector<double> sorted_distinct, std::size_t n) {
    std::vector<double> out;
    const std::size_t m = sorted_distinct.size();
    if (m < 2 || n == 0) return out;
    for (std::size_t k = 1; k <= n; ++k) {
        const double q = static_cast<double>(k) / static_cast<double>(n + 1);
        auto idx = static_cast<std::size_t>(q * static_cast<double>(m - 1));
        idx = std::min(idx, m - 2);
        out.push_back(0.5 * (sorted_distinct[idx] + sorted_distinct[idx + 1]));
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace detail {

inline double superlevel_integral(const RadialField& phi, const std::vector<double>& g, double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        const auto [a, b] = cell_superlevel(phi, i, t);
        if (b <= a) continue;
        const double r0 = phi.mesh()[i], r1 = phi.mesh()[i + 1];
        auto f = [&](double r) {
            const double s = (r - r0) / (r1 - r0);
            return 2.0 * pi * r * (g[i] + s * (g[i + 1] - g[i]));
        };
        sum += 0.5 * (b - a) * (f(a) + f(b));
    }
    return sum;
}

inline LevelRecord level_record(const RadialField& u, const RadialField& phi, const std::vector<double>& grad,
                                const std::vector<double>& grad_sq, double t) {
    LevelRecord rec;
    rec.t = t;
    rec.mass = superlevel_mass(u, phi, t);
    rec.gradient_l1 = superlevel_integral(phi, grad, t);
    rec.gradient_l2 = superlevel_integral(phi, grad_sq, t);
    rec.contour = contour_integrals(u, phi, t);
    rec.topology = level_topology(phi, t);
    return rec;
}

inline LevelRecord level_record(const ScalarField2D& u, const ScalarField2D& phi, const std::vector<double>& grad,
                                const std::vector<double>&, double t) {
    LevelRecord rec;
    rec.t = t;
    rec.mass = superlevel_mass(u, phi, t);
    const auto w = phi.grid().weights();
    for (std::size_t k = 0; k < phi.size(); ++k) {
        if (w[k] > 0.0 && phi[k] > t) {
            rec.gradient_l1 += w[k] * grad[k];
            rec.gradient_l2 += w[k] * grad[k] * grad[k];
        }
    }
    rec.contour = contour_integrals(u, phi, t);
    rec.topology = level_topology(phi, t);
    return rec;
}

inline std::vector<double> gradient_norms(const RadialField& phi) {
    auto d = phi.derivative();
    for (double& x : d) x = std::abs(x);
    return d;
}

inline std::vector<double> gradient_norms(const ScalarField2D& phi) { return phi.gradient_norm(); }

}  // namespace detail

/// Profile of u's mass and phi's gradients over n_levels plateau-free thresholds of phi.
template <class Field>
LevelProfile build_profile(const Field& u, const Field& phi, std::size_t n_levels) {
    if (n_levels < 2) throw InvalidArgument("a level profile needs at least two levels");
    LevelProfile out;
    auto values = distinct_values(phi);
    const double spread = values.back() - values.front();
    if (values.size() < 2 || spread <= 1e-14 * std::max(1.0, std::abs(values.back()))) {
        out.degenerate = true;
        LevelRecord rec;
        rec.t = values.front();
        rec.mass = 0.0;
        out.levels.push_back(rec);
        return out;
    }
    const auto grad = detail::gradient_norms(phi);
    std::vector<double> grad_sq(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) grad_sq[i] = grad[i] * grad[i];
    for (double t : plateau_free_thresholds(std::move(values), n_levels)) {
        out.levels.push_back(detail::level_record(u, phi, grad, grad_sq, t));
    }
    return out;
}

}  // namespace mfl
