#pragma once

// Rearrangement of phi, measured with e^u dy on the source domain, into a radially
// non-increasing phi* on B_R measured with e^{U_lambda} dy:  phi*(r) = sup{ t : r < r(t) }
// where the bubble mass of B_{r(t)} equals the e^u-mass of {phi > t}.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mfl/bubble.hpp"
#include "mfl/contour.hpp"
#include "mfl/profile.hpp"
#include "mfl/quadrature.hpp"

namespace mfl {

struct ThresholdEntry {
    double t = 0.0;   ///< level of phi
    double a = 0.0;   ///< e^u-mass of {phi > t}
    double r = 0.0;   ///< radius of the target ball with the same bubble mass
};

struct RearrangeOptions {
    std::size_t thresholds = 0;          ///< 0: one level in every gap between distinct sampled values
    std::size_t mesh_nodes = 4096;
    double mass_tolerance = 1e-6;        ///< relative, source mass vs ball_mass(lambda, R)
    /// Allowed spread of the boundary trace of phi. Negative selects the sampling bound
    /// 2 h max|grad phi| on grids and 1e-9 on radial meshes.
    double boundary_tolerance = -1.0;
};

struct RearrangementResult {
    RadialField phi_star;
    std::vector<ThresholdEntry> table;   ///< t decreasing, r non-decreasing
    BubbleParam lambda;
    double R = 1.0;
    double defect = 0.0;                 ///< max relative equimeasurability defect over the table
    double source_mass = 0.0;
    double boundary_spread = 0.0;        ///< observed spread of phi on the boundary
    double boundary_tolerance = 0.0;     ///< the spread that was allowed
    bool degenerate = false;             ///< phi constant: phi* is that constant
    double source_spacing = 0.0;         ///< node spacing of the source field

    /// Radius where phi* crosses t (0 above the max, R below the min).
    [[nodiscard]] double crossing_radius(double t) const {
        if (table.empty() || t >= table.front().t) return 0.0;
        if (t < table.back().t) return R;
        const auto it = std::lower_bound(table.begin(), table.end(), t,
                                         [](const ThresholdEntry& e, double v) { return e.t > v; });
        const std::size_t k = static_cast<std::size_t>(it - table.begin());
        if (it->t == t || k == 0) return it->r;
        const auto& lo = table[k - 1];   // lo.t > t >= it->t
        const double s = (lo.t - t) / (lo.t - it->t);
        return lo.r + s * (it->r - lo.r);
    }
};

namespace detail {

inline bool strictly_decreasing(const RadialField& phi) {
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        if (!(phi[i + 1] < phi[i])) return false;
    }
    return true;
}

struct SourceLevels {
    std::vector<ThresholdEntry> entries;   // t and a filled, t decreasing
    double total = 0.0;
    double max = 0.0, min = 0.0;
    double spread = 0.0;
    double sampling_bound = 0.0;
    double spacing = 0.0;
    bool constant = false;
};

inline SourceLevels source_levels(const RadialField& phi, const RadialField& u, std::size_t n) {
    require_same_mesh(phi, u);
    SourceLevels s;
    s.max = phi.max();
    s.min = phi.min();
    s.spread = phi.mesh().is_disc() ? 0.0 : std::abs(phi.back() - phi.front());
    s.sampling_bound = 1e-9;
    s.spacing = phi.mesh().max_spacing();
    if (s.max - s.min <= 1e-14 * std::max(1.0, std::abs(s.max))) {
        s.constant = true;
        s.total = weighted_mass(u);
        return s;
    }
    if (phi.mesh().is_disc() && strictly_decreasing(phi)) {
        // every node value is a level whose set {phi > t} is the ball inside that node
        const auto cum = cumulative_mass_gauss(u);
        s.total = cum.back();
        for (std::size_t i = 0; i < phi.size(); ++i) s.entries.push_back({phi[i], cum[i], 0.0});
        return s;
    }
    s.total = weighted_mass(u);
    const auto values = distinct_values(phi);
    for (double t : plateau_free_thresholds(values, n > 0 ? n : values.size() - 1)) {
        s.entries.push_back({t, superlevel_mass(u, phi, t), 0.0});
    }
    return s;
}

inline SourceLevels source_levels(const ScalarField2D& phi, const ScalarField2D& u, std::size_t n) {
    require_same_grid(phi, u);
    SourceLevels s;
    s.total = weighted_mass(u);
    s.max = phi.max();
    s.min = phi.min();
    const Grid2D& g = phi.grid();
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k : g.rim_nodes()) {
        lo = std::min(lo, phi[k]);
        hi = std::max(hi, phi[k]);
    }
    s.spread = hi >= lo ? hi - lo : 0.0;
    double gmax = 0.0;
    const auto gn = phi.gradient_norm();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.active(k)) gmax = std::max(gmax, gn[k]);
    }
    s.sampling_bound = 2.0 * g.h() * gmax + 1e-9;
    s.spacing = g.h();
    if (s.max - s.min <= 1e-14 * std::max(1.0, std::abs(s.max))) {
        s.constant = true;
        return s;
    }
    if (n > 0) {
        for (double t : plateau_free_thresholds(distinct_values(phi), n)) {
            s.entries.push_back({t, superlevel_mass(u, phi, t), 0.0});
        }
        return s;
    }
    // one entry in every gap between consecutive distinct values, from a single sorted sweep
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.active(k)) order.push_back(k);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return phi[a] > phi[b]; });
    const auto w = g.weights();
    double acc = 0.0;
    for (std::size_t q = 0; q < order.size(); ++q) {
        acc += w[order[q]] * std::exp(u[order[q]]);
        if (q + 1 < order.size() && phi[order[q + 1]] < phi[order[q]]) {
            s.entries.push_back({0.5 * (phi[order[q]] + phi[order[q + 1]]), acc, 0.0});
        }
    }
    return s;
}

inline RadialField interpolate_table(const RadialMesh& mesh, const std::vector<ThresholdEntry>& pts) {
    std::vector<double> v(mesh.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double r = mesh[i];
        while (k + 1 < pts.size() && pts[k + 1].r < r) ++k;
        if (k + 1 >= pts.size()) {
            v[i] = pts.back().t;
            continue;
        }
        const auto& a = pts[k];
        const auto& b = pts[k + 1];
        if (r <= a.r) {
            v[i] = a.t;
        } else if (b.r <= a.r) {
            v[i] = b.t;
        } else {
            v[i] = a.t + (r - a.r) / (b.r - a.r) * (b.t - a.t);
        }
    }
    // the interpolant is non-increasing by construction; clear rounding wiggles
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = std::min(v[i], v[i - 1]);
    return RadialField(mesh, std::move(v));
}

}  // namespace detail

/// Target bubble mass of {phi* > t}.
inline double target_superlevel_mass(const RearrangementResult& res, double t) {
    return ball_mass(res.lambda, res.crossing_radius(t));
}

template <class Field>
RearrangementResult rearrange(const Field& phi, const Field& u, BubbleParam lam, double R,
                              RearrangeOptions opts = {}) {
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("target radius must be positive");
    if (opts.thresholds == 1) throw InvalidArgument("rearrangement needs at least two thresholds");
    auto src = detail::source_levels(phi, u, opts.thresholds);
    const double target_total = ball_mass(lam, R);
    if (std::abs(src.total - target_total) > opts.mass_tolerance * target_total) {
        throw PreconditionFailed("source mass " + std::to_string(src.total) + " does not match the bubble mass " +
                                 std::to_string(target_total) + " of B_R");
    }
    const double btol = opts.boundary_tolerance >= 0.0 ? opts.boundary_tolerance : src.sampling_bound;
    if (src.spread > btol) {
        throw PreconditionFailed("phi is not constant on the boundary: spread " + std::to_string(src.spread) +
                                 " exceeds " + std::to_string(btol));
    }
    const RadialMesh mesh = RadialMesh::uniform(0.0, R, opts.mesh_nodes);
    if (src.constant) {
        RearrangementResult res{RadialField::sample(mesh, [&](double) { return src.max; }), {}, lam, R};
        res.source_mass = src.total;
        res.boundary_spread = src.spread;
        res.boundary_tolerance = btol;
        res.degenerate = true;
        res.source_spacing = src.spacing;
        return res;
    }
    std::vector<ThresholdEntry> table = std::move(src.entries);
    const double cap = std::min(target_total, critical_mass * (1.0 - 1e-15));
    for (auto& e : table) e.r = std::min(R, ball_radius(lam, std::clamp(e.a * target_total / src.total, 0.0, cap)));
    // r must not decrease along decreasing t
    for (std::size_t k = 1; k < table.size(); ++k) table[k].r = std::max(table[k].r, table[k - 1].r);

    std::vector<ThresholdEntry> pts;
    if (table.front().r > 0.0) pts.push_back({src.max, 0.0, 0.0});
    pts.insert(pts.end(), table.begin(), table.end());
    if (pts.back().r < R) pts.push_back({src.min, src.total, R});

    RearrangementResult res{detail::interpolate_table(mesh, pts), std::move(table), lam, R};
    res.source_mass = src.total;
    res.boundary_spread = src.spread;
    res.boundary_tolerance = btol;
    res.source_spacing = src.spacing;
    double defect = 0.0;
    for (const auto& e : res.table) {
        defect = std::max(defect, std::abs(ball_mass(lam, res.crossing_radius(e.t)) * src.total / target_total - e.a));
    }
    res.defect = defect / src.total;
    return res;
}

/// The source mass rearrange() measures for (phi, u); a bubble matched to it passes the mass check.
inline double rearrangement_mass(const RadialField& phi, const RadialField& u) {
    const bool constant = phi.max() - phi.min() <= 1e-14 * std::max(1.0, std::abs(phi.max()));
    if (!constant && phi.mesh().is_disc() && detail::strictly_decreasing(phi)) return cumulative_mass_gauss(u).back();
    return weighted_mass(u);
}

inline double rearrangement_mass(const ScalarField2D&, const ScalarField2D& u) { return weighted_mass(u); }

/// Largest relative gap between source and target superlevel masses at the given thresholds.
template <class Field>
double equimeasurability_defect(const RearrangementResult& res, const Field& phi, const Field& u,
                                const std::vector<double>& thresholds) {
    double worst = 0.0;
    const double scale = res.source_mass / ball_mass(res.lambda, res.R);
    for (double t : thresholds) {
        const double source = superlevel_mass(u, phi, t);
        worst = std::max(worst, std::abs(target_superlevel_mass(res, t) * scale - source));
    }
    return worst / res.source_mass;
}

/// Max difference quotient of phi* over mesh cells inside (epsilon, R - epsilon).
inline double lipschitz_diagnostic(const RearrangementResult& res, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 0.5 * res.R)) throw InvalidArgument("epsilon must lie in (0, R/2)");
    const auto& f = res.phi_star;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double a = f.mesh()[i], b = f.mesh()[i + 1];
        if (a < epsilon || b > res.R - epsilon) continue;
        worst = std::max(worst, std::abs(f[i + 1] - f[i]) / (b - a));
    }
    return worst;
}

struct FluxComparison {
    double source_flux = 0.0;   ///< integral of |grad phi| over {phi = t}
    double target_flux = 0.0;   ///< integral of |grad phi*| over {phi* = t}
};

namespace detail {

inline bool is_plateau(const RadialField& phi, double t) {
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        if (phi[i] == t && phi[i + 1] == t) return true;
    }
    return false;
}

inline bool is_plateau(const ScalarField2D& phi, double t) {
    const Grid2D& g = phi.grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.active(k) || phi[k] != t) continue;
        const int i = g.col(k), j = g.row(k);
        for (auto [di, dj] : Grid2D::neighbours4) {
            const int a = i + di, b = j + dj;
            if (a < 0 || b < 0 || a >= g.n() || b >= g.n()) continue;
            const std::size_t m = g.index(a, b);
            if (g.active(m) && phi[m] == t) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Both sides of  integral_{phi = t} |grad phi|  >=  integral_{phi* = t} |grad phi*|.
template <class Field>
FluxComparison gradient_comparison(const Field& phi, const Field& u, const RearrangementResult& res, double t) {
    if (detail::is_plateau(phi, t)) throw InvalidArgument("threshold sits on a plateau of phi");
    FluxComparison out;
    // Equimeasurability gives -a'(t) = integral of e^u / |grad phi| over {phi = t} on both sides,
    // and on the bubble side 2 pi r |phi*'| = (2 pi r)^2 e^{U_lambda(r)} / (-a'(t)).
    const auto c = contour_integrals(u, phi, t);
    out.source_flux = c.flux;
    const double r = res.crossing_radius(t);
    const double bw = r > 0.0 ? boundary_weight(res.lambda, r) : 0.0;
    out.target_flux = c.inverse_flux > 0.0 ? bw * bw * (res.source_mass / ball_mass(res.lambda, res.R)) / c.inverse_flux
                                            : 0.0;
    return out;
}

/// n plateau-free thresholds whose superlevel sets stay at least band_cells grid spacings
/// inside the domain: only values above everything phi takes in the boundary band are used.
inline std::vector<double> interior_thresholds(const ScalarField2D& phi, std::size_t n, double band_cells = 3.0) {
    const Grid2D& g = phi.grid();
    const double band = band_cells * g.h();
    double floor_value = -INFINITY;
    std::vector<double> values;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.active(k)) continue;
        const double r = g.radius_at(k);
        const double dist = std::min(g.outer_radius() - r,
                                     g.shape() == DomainShape::annulus ? r - g.inner_radius() : INFINITY);
        if (dist < band) floor_value = std::max(floor_value, phi[k]);
        values.push_back(phi[k]);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::erase_if(values, [&](double v) { return v < floor_value; });
    return plateau_free_thresholds(std::move(values), n);
}

inline std::vector<double> interior_thresholds(const RadialField& phi, std::size_t n, double band_cells = 3.0) {
    const auto& mesh = phi.mesh();
    const double band = band_cells * mesh.max_spacing();
    double floor_value = -INFINITY;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r = mesh[i];
        const bool near = mesh.outer_radius() - r < band || (!mesh.is_disc() && r - mesh.inner_radius() < band);
        if (near) floor_value = std::max(floor_value, phi[i]);
    }
    auto values = distinct_values(phi);
    std::erase_if(values, [&](double v) { return v < floor_value; });
    return plateau_free_thresholds(std::move(values), n);
}

/// psi = U_lambda + phi* on the mesh of phi*.
inline RadialField supersolution_assemble(const RearrangementResult& res) {
    const auto& f = res.phi_star;
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) v[i] = bubble_value(res.lambda, f.mesh()[i]) + f[i];
    return RadialField(f.mesh(), std::move(v));
}

}  // namespace mfl
