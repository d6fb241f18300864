#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "mfl/bol.hpp"
#include "mfl/rearrange.hpp"
#include "mfl/topology.hpp"

namespace mfl {

struct GradientRow {
    double t = 0.0;
    double source_flux = 0.0;
    double target_flux = 0.0;
};

struct PipelineOptions {
    double R = 1.0;                     ///< target ball radius; lambda is matched to the mass
    double mass_tolerance = 1e-4;       ///< relative, between the two inputs
    std::size_t thresholds = 32;        ///< rows of the gradient-comparison table
    std::size_t mesh_nodes = 4096;      ///< mesh of phi*
    bool normalize_sign = true;         ///< swap inputs so that w2 - w1 >= 0 on the boundary
};

struct PipelineReport {
    bool applicable = false;
    std::string failed_hypothesis;      ///< empty when applicable

    double mass1 = 0.0;
    double mass2 = 0.0;
    double boundary_constant = 0.0;     ///< c = w2 - w1 on the boundary (after any swap)
    bool swapped = false;
    double phi_min = 0.0;
    double phi_max = 0.0;

    double lambda = 0.0;
    double R = 1.0;
    double rearrangement_defect = 0.0;
    double boundary_spread = 0.0;

    DifferentialCheck differential;     ///< flux bound for psi = U_lambda + phi* at every radius
    double forder_worst = 0.0;          ///< min of Delta_h phi + e^{w2} - e^{w1}
    double forder_tolerance = 0.0;
    bool forder_holds = false;

    double boundary_defect = 0.0;       ///< psi(R) - U_lambda(R)
    double tolerance = 0.0;
    bool contradiction = false;

    std::optional<std::size_t> holes;   ///< holes of {phi > t} at t = inf(phi) / 2 when inf(phi) < 0 <= c
    std::vector<GradientRow> gradient_table;
    std::optional<RadialField> psi;
};

namespace detail {

inline RadialField difference(const RadialField& a, const RadialField& b) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return RadialField(a.mesh(), std::move(v));
}

inline ScalarField2D difference(const ScalarField2D& a, const ScalarField2D& b) {
    std::vector<double> v(a.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] - b[k];
    return ScalarField2D(a.grid_ptr(), std::move(v));
}

inline double field_mass(const RadialField& u) { return cumulative_mass_gauss(u).back(); }
inline double field_mass(const ScalarField2D& u) { return weighted_mass(u); }

inline void require_compatible(const RadialField& a, const RadialField& b) { require_same_mesh(a, b); }
inline void require_compatible(const ScalarField2D& a, const ScalarField2D& b) { require_same_grid(a, b); }

inline double boundary_mean(const RadialField& phi) {
    return phi.mesh().is_disc() ? phi.back() : 0.5 * (phi.front() + phi.back());
}

inline double boundary_mean(const ScalarField2D& phi) {
    const auto rim = phi.grid().rim_nodes();
    double s = 0.0;
    for (std::size_t k : rim) s += phi[k];
    return rim.empty() ? 0.0 : s / static_cast<double>(rim.size());
}

// Levels outside the range phi takes within `band_cells` spacings of the boundary, so that
// {phi = t} stays away from the boundary cells.
inline std::vector<double> off_boundary_thresholds(const ScalarField2D& phi, std::size_t n, double band_cells = 3.0) {
    const Grid2D& g = phi.grid();
    const double band = band_cells * g.h();
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.active(k)) continue;
        const double r = g.radius_at(k);
        const double dist = std::min(g.outer_radius() - r,
                                     g.shape() == DomainShape::annulus ? r - g.inner_radius() : INFINITY);
        if (dist < band) {
            lo = std::min(lo, phi[k]);
            hi = std::max(hi, phi[k]);
        }
    }
    auto values = distinct_values(phi);
    auto in_band = [&](double v) { return v >= lo && v <= hi; };
    std::erase_if(values, in_band);
    auto out = plateau_free_thresholds(std::move(values), n);
    std::erase_if(out, in_band);
    return out;
}

inline std::vector<double> off_boundary_thresholds(const RadialField& phi, std::size_t n, double band_cells = 3.0) {
    const auto& mesh = phi.mesh();
    const double band = band_cells * mesh.max_spacing();
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r = mesh[i];
        if (mesh.outer_radius() - r < band || (!mesh.is_disc() && r - mesh.inner_radius() < band)) {
            lo = std::min(lo, phi[i]);
            hi = std::max(hi, phi[i]);
        }
    }
    auto values = distinct_values(phi);
    auto in_band = [&](double v) { return v >= lo && v <= hi; };
    std::erase_if(values, in_band);
    auto out = plateau_free_thresholds(std::move(values), n);
    std::erase_if(out, in_band);
    return out;
}

inline PipelineReport refuse(PipelineReport rep, std::string why) {
    rep.applicable = false;
    rep.failed_hypothesis = std::move(why);
    return rep;
}

}  // namespace detail

/// Runs the uniqueness argument on two fields w1, w2 with equal e^w-mass and w2 - w1 constant on
/// the boundary: phi = w2 - w1 is rearranged against (e^{w1}, e^{U_lambda}) on B_R, psi = U_lambda + phi*
/// is assembled, and psi(R) is compared with U_lambda(R).  A negative comparison beyond tolerance is
/// the contradiction: a genuine pair of solutions would give psi(R) >= U_lambda(R).
template <class Field>
PipelineReport theorem_pipeline(const Field& w1_in, const Field& w2_in, const PipelineOptions& opts = {}) {
    PipelineReport rep;
    rep.R = opts.R;
    try {
        detail::require_compatible(w1_in, w2_in);
    } catch (const Error&) {
        return detail::refuse(rep, "same grid: the two fields live on different discretizations");
    }
    rep.mass1 = detail::field_mass(w1_in);
    rep.mass2 = detail::field_mass(w2_in);
    if (std::abs(rep.mass1 - rep.mass2) > opts.mass_tolerance * std::max(rep.mass1, rep.mass2)) {
        return detail::refuse(rep, "equal masses: relative mismatch " +
                                       std::to_string(std::abs(rep.mass1 - rep.mass2) / std::max(rep.mass1, rep.mass2)));
    }
    if (!(rep.mass1 < critical_mass)) return detail::refuse(rep, "subcritical mass: rho must be below 8 pi");

    const Field* w1 = &w1_in;
    const Field* w2 = &w2_in;
    Field phi = detail::difference(*w2, *w1);
    rep.boundary_constant = detail::boundary_mean(phi);
    if (opts.normalize_sign && rep.boundary_constant < 0.0) {
        std::swap(w1, w2);
        std::swap(rep.mass1, rep.mass2);
        phi = detail::difference(*w2, *w1);
        rep.boundary_constant = -rep.boundary_constant;
        rep.swapped = true;
    }
    rep.phi_min = phi.min();
    rep.phi_max = phi.max();

    // f2 >= f1 in the form Delta phi + e^{w2} - e^{w1} >= 0
    {
        const double h = detail::spacing(phi);
        rep.forder_tolerance = 10.0 * h * h * std::max({1.0, detail::max_density(*w1), detail::max_density(*w2)});
        double worst = INFINITY;
        detail::visit_laplacian(phi, [&](std::size_t k, double lap) {
            worst = std::min(worst, lap + std::exp((*w2)[k]) - std::exp((*w1)[k]));
        });
        rep.forder_worst = worst;
        rep.forder_holds = !(worst < -rep.forder_tolerance);
    }

    rep.lambda = lambda_from_ball_mass(rearrangement_mass(phi, *w1), opts.R).lambda();
    std::optional<RearrangementResult> opt_res;
    try {
        opt_res = rearrange(phi, *w1, BubbleParam(rep.lambda), opts.R, {.mesh_nodes = opts.mesh_nodes});
    } catch (const PreconditionFailed& e) {
        return detail::refuse(rep, std::string("boundary constancy: ") + e.what());
    }
    const RearrangementResult& res = *opt_res;
    rep.rearrangement_defect = res.defect;
    rep.boundary_spread = res.boundary_spread;

    RadialField psi = supersolution_assemble(res);
    rep.differential = differential_condition_interior(psi);
    const BolReport bc = boundary_comparison(psi, ball_mass(BubbleParam(rep.lambda), opts.R));
    rep.boundary_defect = bc.defect;
    rep.tolerance = std::max(bc.tolerance, res.boundary_spread);
    rep.applicable = true;
    rep.contradiction = rep.boundary_defect < -rep.tolerance;

    if (rep.phi_min < 0.0 && rep.boundary_constant >= 0.0) {
        rep.holes = level_topology(phi, 0.5 * rep.phi_min).holes;
    }
    if (!res.degenerate) {
        for (double t : detail::off_boundary_thresholds(phi, opts.thresholds)) {
            try {
                const auto fc = gradient_comparison(phi, *w1, res, t);
                rep.gradient_table.push_back({t, fc.source_flux, fc.target_flux});
            } catch (const InvalidArgument&) {
                // plateau level
            }
        }
    }
    rep.psi = std::move(psi);
    return rep;
}

// ---------------------------------------------------------------------------
// Critical mass: psi on the whole plane with total mass 8 pi

struct CriticalPairReport {
    bool applicable = false;
    std::string failed_hypothesis;
    double total_mass = 0.0;
    DifferentialCheck differential;
    bool degenerate = false;            ///< psi agrees with U_lambda1 everywhere
    std::optional<double> r0;           ///< first crossing of psi and U_lambda1
    double lambda1 = 0.0;
    double lambda2 = 0.0;               ///< conjugate of lambda1 at r0
    std::optional<MassBracketReport> interior;
    std::optional<MassBracketReport> exterior;
    double interior_gap = 0.0;          ///< mass of psi on B_r0 minus that of U_lambda2
    double exterior_gap = 0.0;          ///< same outside B_r0
    double tolerance = 0.0;
    bool equality_forced = false;       ///< both gaps vanish: psi must be that bubble
    bool strict_gap = false;            ///< the brackets force total mass > 8 pi
    std::string message;
};

struct CriticalPairOptions {
    double mass_tolerance = 1e-3;       ///< absolute, on the total mass against 8 pi
    std::size_t interior_nodes = 4096;
    std::size_t exterior_nodes = 16384;
    double degenerate_tolerance = 1e-9;
};

/// Locates r0 with psi(r0) = U_lambda1(r0), takes lambda2 conjugate to lambda1 at r0, and brackets
/// the masses of psi inside and outside B_r0 against the two bubbles.
inline CriticalPairReport critical_pair_analysis(const RadialField& psi, BubbleParam lam1,
                                                 const CriticalPairOptions& opts = {}) {
    CriticalPairReport rep;
    rep.lambda1 = lam1.lambda();
    if (!psi.mesh().is_disc()) throw InvalidArgument("critical analysis needs a mesh starting at the origin");
    if (!detail::strictly_decreasing_field(psi)) {
        rep.failed_hypothesis = "psi is not strictly decreasing";
        return rep;
    }
    try {
        rep.total_mass = cumulative_mass_gauss(psi).back() + exterior_tail_mass(psi);
    } catch (const PreconditionFailed& e) {
        rep.failed_hypothesis = e.what();
        return rep;
    }
    if (std::abs(rep.total_mass - critical_mass) > opts.mass_tolerance) {
        rep.failed_hypothesis = "total mass " + std::to_string(rep.total_mass) + " is not 8 pi";
        return rep;
    }
    rep.differential = differential_condition_interior(psi);
    if (!rep.differential.holds()) {
        rep.failed_hypothesis = "differential condition fails";
        return rep;
    }
    rep.applicable = true;

    auto diff = [&](double r) { return psi.at_cubic(r) - bubble_value(lam1, r); };
    double dev = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) dev = std::max(dev, std::abs(psi[i] - bubble_value(lam1, psi.mesh()[i])));
    if (dev <= opts.degenerate_tolerance * std::max(1.0, std::abs(psi.front()))) {
        rep.degenerate = true;
        rep.r0 = std::sqrt(8.0) / lam1.lambda();
        rep.lambda2 = rep.lambda1;
        rep.equality_forced = true;
        rep.message = "psi is U_lambda1: every radius is a crossing; self-conjugate radius reported";
        return rep;
    }
    std::optional<std::size_t> cell;
    for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
        const double a = psi[i] - bubble_value(lam1, psi.mesh()[i]);
        const double b = psi[i + 1] - bubble_value(lam1, psi.mesh()[i + 1]);
        if (a == 0.0 && i > 0) {
            cell = i;
            break;
        }
        if ((a > 0.0) != (b > 0.0) && b != 0.0) {
            cell = i;
            break;
        }
    }
    if (!cell) {
        rep.message = "no crossing of psi and U_lambda1 on the mesh";
        return rep;
    }
    const double lo = psi.mesh()[*cell], hi = psi.mesh()[*cell + 1];
    double r0 = lo;
    if (diff(lo) != 0.0) {
        std::uintmax_t iters = 200;
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
        const auto [a, b] = boost::math::tools::toms748_solve(diff, lo, hi, diff(lo), diff(hi), tol, iters);
        r0 = 0.5 * (a + b);
    }
    rep.r0 = r0;
    const BubbleParam lam2 = conjugate_lambda(lam1, r0).param;
    rep.lambda2 = lam2.lambda();
    if (conjugate_lambda(lam1, r0).self_conjugate) {
        rep.message = "crossing at the self-conjugate radius: no second bubble";
        return rep;
    }
    const BubbleParam small(std::min(rep.lambda1, rep.lambda2)), big(std::max(rep.lambda1, rep.lambda2));
    const auto inner = RadialField::sample(RadialMesh::uniform(0.0, r0, opts.interior_nodes),
                                           [&](double r) { return psi.at_cubic(r); });
    const auto outer = RadialField::sample(RadialMesh::geometric(r0, psi.mesh().outer_radius(), opts.exterior_nodes),
                                           [&](double r) { return psi.at_cubic(r); });
    rep.interior = mass_bracket_interior(inner, small, big);
    rep.exterior = mass_bracket_exterior(outer, small, big);
    rep.interior_gap = rep.interior->mass - ball_mass(lam2, r0);
    rep.exterior_gap = rep.exterior->mass - exterior_mass(lam2, r0);
    rep.tolerance = rep.interior->tolerance + rep.exterior->tolerance;
    rep.equality_forced = std::abs(rep.interior_gap) <= rep.tolerance && std::abs(rep.exterior_gap) <= rep.tolerance;
    rep.strict_gap = rep.interior_gap + rep.exterior_gap > 10.0 * rep.tolerance;
    if (rep.strict_gap) {
        rep.message = "bracket masses sum beyond 8 pi: the total mass cannot be 8 pi";
    } else if (rep.equality_forced) {
        rep.message = "brackets are tight: psi coincides with U_lambda2";
    }
    return rep;
}

}  // namespace mfl
