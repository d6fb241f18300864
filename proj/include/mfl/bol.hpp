#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mfl/bubble.hpp"
#include "mfl/contour.hpp"
#include "mfl/error.hpp"
#include "mfl/mesh.hpp"
#include "mfl/quadrature.hpp"

namespace mfl {

enum class BolVerdict { holds, holds_strictly, violated_within_tolerance, violated, not_applicable };
enum class BolContext { interior, exterior, differential, boundary };

inline const char* to_string(BolVerdict v) {
    switch (v) {
        case BolVerdict::holds: return "holds";
        case BolVerdict::holds_strictly: return "holds-strictly";
        case BolVerdict::violated_within_tolerance: return "violated-within-tolerance";
        case BolVerdict::violated: return "violated";
        case BolVerdict::not_applicable: return "not-applicable";
    }
    return "?";
}

inline const char* to_string(BolContext c) {
    switch (c) {
        case BolContext::interior: return "interior";
        case BolContext::exterior: return "exterior";
        case BolContext::differential: return "differential";
        case BolContext::boundary: return "boundary";
    }
    return "?";
}

/// Outcome of the discrete "for a.e. r" condition.
struct DifferentialCheck {
    double worst = std::numeric_limits<double>::infinity();   ///< smallest slack over the mesh radii
    double tolerance = 0.0;
    std::size_t tolerated = 0;    ///< radii with slack in [-tolerance, 0)
    std::size_t violations = 0;   ///< radii with slack < -tolerance
    bool strict = false;          ///< slack > 10 tolerance on at least two consecutive radii

    [[nodiscard]] bool holds() const noexcept { return violations == 0; }
};

/// Two sides of an inequality.  The defect is oriented so that a positive value means the
/// inequality holds: lhs - rhs for interior and boundary checks, rhs - lhs for the reversed
/// exterior inequality.  lhs is always the boundary term.
struct BolReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double defect = 0.0;
    double tolerance = 0.0;
    double mass = 0.0;
    BolVerdict verdict = BolVerdict::not_applicable;
    BolContext context = BolContext::interior;
    DifferentialCheck differential;
    std::string note;

    [[nodiscard]] bool ok() const noexcept {
        return verdict == BolVerdict::holds || verdict == BolVerdict::holds_strictly ||
               verdict == BolVerdict::violated_within_tolerance;
    }
};

inline BolVerdict classify_defect(double defect, double tolerance) {
    if (!std::isfinite(defect)) return BolVerdict::not_applicable;
    if (defect > 10.0 * tolerance) return BolVerdict::holds_strictly;
    if (defect >= 0.0) return BolVerdict::holds;
    if (defect >= -tolerance) return BolVerdict::violated_within_tolerance;
    return BolVerdict::violated;
}

namespace detail {

inline BolReport finish(BolReport rep) {
    rep.verdict = classify_defect(rep.defect, rep.tolerance);
    return rep;
}

inline BolReport not_applicable(BolContext ctx, std::string why) {
    BolReport rep;
    rep.context = ctx;
    rep.verdict = BolVerdict::not_applicable;
    rep.defect = std::numeric_limits<double>::quiet_NaN();
    rep.note = std::move(why);
    return rep;
}

// Relative mesh step: h / R on discs, max (r_{i+1} - r_i) / r_{i+1} on exterior meshes.
inline double relative_step(const RadialMesh& mesh) {
    if (mesh.is_disc()) return mesh.max_spacing() / mesh.outer_radius();
    double s = 0.0;
    for (std::size_t i = 1; i < mesh.size(); ++i) s = std::max(s, (mesh[i] - mesh[i - 1]) / mesh[i]);
    return s;
}

inline double radial_tolerance(const RadialMesh& mesh, double scale) {
    const double h = relative_step(mesh);
    return std::max(1e-12, h * h) * std::max(1.0, std::abs(scale));
}

inline bool strictly_decreasing_field(const RadialField& psi) {
    for (std::size_t i = 1; i < psi.size(); ++i) {
        if (!(psi[i] < psi[i - 1])) return false;
    }
    return true;
}

inline DifferentialCheck tally(const std::vector<double>& slack, double tol) {
    DifferentialCheck d;
    d.tolerance = tol;
    std::size_t run = 0;
    for (double s : slack) {
        d.worst = std::min(d.worst, s);
        if (s < -tol) {
            ++d.violations;
        } else if (s < 0.0) {
            ++d.tolerated;
        }
        run = s > 10.0 * tol ? run + 1 : 0;
        if (run >= 2) d.strict = true;
    }
    return d;
}

inline double circle_term(const RadialField& psi, std::size_t i) {
    const double c = 2.0 * pi * psi.mesh()[i] * std::exp(0.5 * psi[i]);
    return c * c;
}

}  // namespace detail

/// Slack M(r) - 2 pi r |psi'(r)| of the interior condition at every mesh radius r > 0.
inline DifferentialCheck differential_condition_interior(const RadialField& psi) {
    if (!psi.mesh().is_disc()) throw InvalidArgument("interior condition needs a disc mesh");
    const auto cum = cumulative_mass_gauss(psi);
    std::vector<double> slack;
    for (std::size_t i = 1; i < psi.size(); ++i) {
        const double r = psi.mesh()[i];
        slack.push_back(cum[i] - 2.0 * pi * r * std::abs(psi.slope_cubic(r)));
    }
    return detail::tally(slack, detail::radial_tolerance(psi.mesh(), cum.back()));
}

namespace detail {

// kappa with e^psi ~ r^-kappa, from the last cell in log r (exact on power laws).
inline double tail_exponent(const RadialField& psi) {
    const std::size_t n = psi.size();
    return -(psi[n - 1] - psi[n - 2]) / std::log(psi.mesh()[n - 1] / psi.mesh()[n - 2]);
}

}  // namespace detail

/// Tail of the exterior mass beyond the last node, modelled by e^psi ~ r^-kappa with kappa the
/// logarithmic slope of the last cell.  Throws when kappa <= 2 (the tail integral diverges).
inline double exterior_tail_mass(const RadialField& psi) {
    const double rm = psi.mesh().outer_radius();
    const double kappa = detail::tail_exponent(psi);
    if (!(kappa > 2.0 + 1e-9)) {
        throw PreconditionFailed("exterior mass diverges: e^psi decays like r^-" + std::to_string(kappa));
    }
    return 2.0 * pi * std::exp(psi.back()) * rm * rm / (kappa - 2.0);
}

/// Exterior mass from each mesh radius to infinity.
inline std::vector<double> exterior_mass_profile(const RadialField& psi) {
    const auto cum = cumulative_mass_gauss(psi);
    const double total = cum.back() + exterior_tail_mass(psi);
    std::vector<double> out(cum.size());
    for (std::size_t i = 0; i < cum.size(); ++i) out[i] = total - cum[i];
    return out;
}

/// Slack 8 pi - m_ext(r) - 2 pi r |psi'(r)| of the exterior condition at every mesh radius.
inline DifferentialCheck differential_condition_exterior(const RadialField& psi) {
    if (psi.mesh().is_disc()) throw InvalidArgument("exterior condition needs a mesh with positive inner radius");
    const auto ext = exterior_mass_profile(psi);
    std::vector<double> slack;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double r = psi.mesh()[i];
        slack.push_back(critical_mass - ext[i] - 2.0 * pi * r * std::abs(psi.slope_cubic(r)));
    }
    return detail::tally(slack, detail::radial_tolerance(psi.mesh(), critical_mass));
}

/// (2 pi R e^{psi(R)/2})^2 >= m (8 pi - m) / 2 for a strictly decreasing radial psi on B_R.
inline BolReport check_radial_interior(const RadialField& psi) {
    if (!psi.mesh().is_disc()) throw InvalidArgument("interior check needs a disc mesh");
    if (!detail::strictly_decreasing_field(psi)) {
        return detail::not_applicable(BolContext::interior, "psi is not strictly decreasing");
    }
    const double m = cumulative_mass_gauss(psi).back();
    if (!(m < critical_mass)) return detail::not_applicable(BolContext::interior, "mass is at least 8 pi");
    BolReport rep;
    rep.context = BolContext::interior;
    rep.differential = differential_condition_interior(psi);
    if (!rep.differential.holds()) {
        auto na = detail::not_applicable(BolContext::interior, "differential condition fails");
        na.differential = rep.differential;
        return na;
    }
    rep.mass = m;
    rep.lhs = detail::circle_term(psi, psi.size() - 1);
    rep.rhs = 0.5 * m * (critical_mass - m);
    rep.defect = rep.lhs - rep.rhs;
    rep.tolerance = detail::radial_tolerance(psi.mesh(), rep.rhs);
    return detail::finish(rep);
}

/// Reversed inequality (2 pi R e^{psi(R)/2})^2 <= m (8 pi - m) / 2 with m the mass outside B_R.
/// Throws PreconditionFailed when psi is not strictly decreasing or its tail mass diverges.
inline BolReport check_radial_exterior(const RadialField& psi) {
    if (psi.mesh().is_disc()) throw InvalidArgument("exterior check needs a mesh with positive inner radius");
    if (!detail::strictly_decreasing_field(psi)) throw PreconditionFailed("psi is not strictly decreasing");
    const auto ext = exterior_mass_profile(psi);
    const double m = ext.front();
    if (!(m < critical_mass)) return detail::not_applicable(BolContext::exterior, "exterior mass is at least 8 pi");
    BolReport rep;
    rep.context = BolContext::exterior;
    rep.differential = differential_condition_exterior(psi);
    if (!rep.differential.holds()) {
        auto na = detail::not_applicable(BolContext::exterior, "differential condition fails");
        na.differential = rep.differential;
        return na;
    }
    rep.mass = m;
    rep.lhs = detail::circle_term(psi, 0);
    rep.rhs = 0.5 * m * (critical_mass - m);
    rep.defect = rep.rhs - rep.lhs;
    rep.tolerance = detail::radial_tolerance(psi.mesh(), rep.rhs);
    return detail::finish(rep);
}

/// s, k(s) = 8 pi - mass of {psi < s}, mu(s) = |{psi > s}| + pi R^2 on the exterior of B_R.
struct ExteriorProfile {
    std::vector<double> s;
    std::vector<double> k;
    std::vector<double> mu;
};

namespace detail {

// Radius where psi = s; beyond the last node the power-law tail is used.
inline double exterior_level_radius(const RadialField& psi, double s) {
    if (s >= psi.front()) return psi.mesh().inner_radius();
    if (s >= psi.back()) {
        const auto rs = level_radii(psi, s);
        if (!rs.empty()) return rs.front();
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (psi[i] == s) return psi.mesh()[i];
        }
    }
    const double rm = psi.mesh().outer_radius();
    return rm * std::exp((psi.back() - s) / tail_exponent(psi));
}

// Mass of the exterior beyond radius r (r at or past the inner radius).
inline double exterior_mass_beyond(const RadialField& psi, const std::vector<double>& ext, double r) {
    const double rm = psi.mesh().outer_radius();
    if (r >= rm) {
        const double kappa = tail_exponent(psi);
        return 2.0 * pi * std::exp(psi.back()) * rm * rm / (kappa - 2.0) * std::pow(r / rm, 2.0 - kappa);
    }
    const std::size_t i = psi.mesh().cell_of(r);
    return ext[i + 1] + cell_piece_mass(psi, i, r, psi.mesh()[i + 1]);
}

}  // namespace detail

inline ExteriorProfile exterior_profile(const RadialField& psi, const std::vector<double>& s_values) {
    if (psi.mesh().is_disc()) throw InvalidArgument("exterior profile needs a mesh with positive inner radius");
    if (!detail::strictly_decreasing_field(psi)) throw PreconditionFailed("psi is not strictly decreasing");
    const auto ext = exterior_mass_profile(psi);
    ExteriorProfile out;
    for (double s : s_values) {
        const double r = detail::exterior_level_radius(psi, s);
        out.s.push_back(s);
        out.k.push_back(critical_mass - detail::exterior_mass_beyond(psi, ext, r));
        out.mu.push_back(pi * r * r);
    }
    return out;
}

struct DecayPoint {
    double s;
    double value;   ///< e^s |{psi > s}| with the inner ball included
};

/// e^s mu(s) along the given levels (mu includes pi R^2).  Throws when the tail mass diverges.
inline std::vector<DecayPoint> decay_limit_check(const RadialField& psi, const std::vector<double>& s_values) {
    (void)exterior_tail_mass(psi);
    const auto prof = exterior_profile(psi, s_values);
    std::vector<DecayPoint> out;
    for (std::size_t i = 0; i < prof.s.size(); ++i) out.push_back({prof.s[i], std::exp(prof.s[i]) * prof.mu[i]});
    return out;
}

/// Whether the sequence (ordered by decreasing s) decreases over its last `tail` entries
/// and ends below `fraction` of its largest value.
inline bool decay_trend(const std::vector<DecayPoint>& seq, std::size_t tail, double fraction = 0.5) {
    if (seq.size() < 2) return false;
    const std::size_t start = seq.size() > tail ? seq.size() - tail : 0;
    double peak = 0.0;
    for (const auto& p : seq) peak = std::max(peak, p.value);
    for (std::size_t i = start + 1; i < seq.size(); ++i) {
        if (!(seq[i].value < seq[i - 1].value)) return false;
    }
    return seq.back().value < fraction * peak;
}

enum class BracketOutcome { inside, first_alternative, second_alternative, violated, not_applicable };

inline const char* to_string(BracketOutcome o) {
    switch (o) {
        case BracketOutcome::inside: return "inside";
        case BracketOutcome::first_alternative: return "first-alternative";
        case BracketOutcome::second_alternative: return "second-alternative";
        case BracketOutcome::violated: return "violated";
        case BracketOutcome::not_applicable: return "not-applicable";
    }
    return "?";
}

struct MassBracketReport {
    double mass = 0.0;
    double lower = 0.0;       ///< smaller bubble mass on the same region
    double upper = 0.0;
    MassPair roots{0.0, 0.0}; ///< roots of x^2 - 8 pi x + 2 beta, beta = (2 pi R e^{psi(R)/2})^2
    double tolerance = 0.0;
    BracketOutcome outcome = BracketOutcome::not_applicable;
    bool strict = false;
    DifferentialCheck differential;
    std::string note;
};

namespace detail {

inline void require_boundary_match(double psi_r, BubbleParam lam, double R, double tol) {
    const double diff = psi_r - bubble_value(lam, R);
    if (!(std::abs(diff) <= tol)) {
        throw PreconditionFailed("psi differs from U_lambda on the boundary by " + std::to_string(diff));
    }
}

inline void require_ordered(BubbleParam lam1, BubbleParam lam2) {
    if (!(lam2.lambda() > lam1.lambda())) throw InvalidArgument("bracket needs lambda2 > lambda1");
}

}  // namespace detail

/// Mass of psi outside B_R against the exterior masses of two bubbles agreeing with psi on |y| = R.
inline MassBracketReport mass_bracket_exterior(const RadialField& psi, BubbleParam lam1, BubbleParam lam2,
                                               double boundary_tolerance = 1e-6) {
    detail::require_ordered(lam1, lam2);
    if (psi.mesh().is_disc()) throw InvalidArgument("exterior bracket needs a mesh with positive inner radius");
    const double R = psi.mesh().inner_radius();
    detail::require_boundary_match(psi.front(), lam1, R, boundary_tolerance);
    detail::require_boundary_match(psi.front(), lam2, R, boundary_tolerance);
    if (!detail::strictly_decreasing_field(psi)) throw PreconditionFailed("psi is not strictly decreasing");
    MassBracketReport rep;
    rep.mass = exterior_mass_profile(psi).front();
    rep.lower = exterior_mass(lam2, R);
    rep.upper = exterior_mass(lam1, R);
    rep.roots = mass_roots(detail::circle_term(psi, 0));
    rep.tolerance = detail::radial_tolerance(psi.mesh(), critical_mass);
    rep.differential = differential_condition_exterior(psi);
    if (!rep.differential.holds()) {
        rep.note = "differential condition fails";
        return rep;
    }
    const double tol = rep.tolerance;
    if (rep.mass >= rep.lower - tol && rep.mass <= rep.upper + tol) {
        rep.outcome = BracketOutcome::inside;
        rep.strict = rep.mass > rep.lower + 10.0 * tol && rep.mass < rep.upper - 10.0 * tol;
    } else {
        rep.outcome = BracketOutcome::violated;
    }
    return rep;
}

/// Mass of psi on B_R: either at most the mass of U_lambda1 or at least that of U_lambda2.
inline MassBracketReport mass_bracket_interior(const RadialField& psi, BubbleParam lam1, BubbleParam lam2,
                                               double boundary_tolerance = 1e-6) {
    detail::require_ordered(lam1, lam2);
    if (!psi.mesh().is_disc()) throw InvalidArgument("interior bracket needs a disc mesh");
    const double R = psi.mesh().outer_radius();
    detail::require_boundary_match(psi.back(), lam1, R, boundary_tolerance);
    detail::require_boundary_match(psi.back(), lam2, R, boundary_tolerance);
    MassBracketReport rep;
    rep.lower = ball_mass(lam1, R);
    rep.upper = ball_mass(lam2, R);
    rep.roots = mass_roots(detail::circle_term(psi, psi.size() - 1));
    rep.tolerance = detail::radial_tolerance(psi.mesh(), critical_mass);
    if (!detail::strictly_decreasing_field(psi)) {
        rep.note = "psi is not strictly decreasing";
        return rep;
    }
    rep.mass = cumulative_mass_gauss(psi).back();
    rep.differential = differential_condition_interior(psi);
    if (!rep.differential.holds()) {
        rep.note = "differential condition fails";
        return rep;
    }
    const double tol = rep.tolerance;
    if (rep.mass <= rep.lower + tol) {
        rep.outcome = BracketOutcome::first_alternative;
        rep.strict = rep.mass < rep.lower - 10.0 * tol;
    } else if (rep.mass >= rep.upper - tol) {
        rep.outcome = BracketOutcome::second_alternative;
        rep.strict = rep.mass > rep.upper + 10.0 * tol;
    } else {
        rep.outcome = BracketOutcome::violated;
    }
    return rep;
}

/// psi(R) - U_lambda(R) with ball_mass(lambda, R) = rho.  The defect is computed even when the
/// interior differential condition fails; the verdict is then not-applicable.
inline BolReport boundary_comparison(const RadialField& psi, double rho) {
    if (!psi.mesh().is_disc()) throw InvalidArgument("boundary comparison needs a disc mesh");
    if (!std::isfinite(rho) || rho <= 0.0) throw InvalidArgument("rho must be positive");
    if (!(rho < critical_mass)) return detail::not_applicable(BolContext::boundary, "rho is at least 8 pi");
    const double R = psi.mesh().outer_radius();
    const BubbleParam lam = lambda_from_ball_mass(rho, R);
    BolReport rep;
    rep.context = BolContext::boundary;
    rep.mass = rho;
    rep.lhs = psi.back();
    rep.rhs = bubble_value(lam, R);
    rep.defect = rep.lhs - rep.rhs;
    rep.tolerance = detail::radial_tolerance(psi.mesh(), 1.0);
    if (!detail::strictly_decreasing_field(psi)) {
        rep.verdict = BolVerdict::not_applicable;
        rep.note = "psi is not strictly decreasing";
        return rep;
    }
    rep.differential = differential_condition_interior(psi);
    if (!rep.differential.holds()) {
        rep.verdict = BolVerdict::not_applicable;
        rep.note = "differential condition fails";
        return rep;
    }
    return detail::finish(rep);
}

// ---------------------------------------------------------------------------
// Interior inequality on a level-set region omega = {phi > t}

struct SupersolutionCheck {
    double worst = std::numeric_limits<double>::infinity();   ///< min of Delta_h u + e^u
    double tolerance = 0.0;
    std::size_t checked = 0;
    std::size_t tolerated = 0;
    std::size_t violations = 0;
};

namespace detail {

// Five-point Laplacian at inside nodes whose four neighbours are inside; calls fn(k, lap).
template <class Fn>
void visit_laplacian(const ScalarField2D& u, Fn&& fn) {
    const Grid2D& g = u.grid();
    const double h2 = g.h() * g.h();
    for (int j = 1; j + 1 < g.n(); ++j) {
        for (int i = 1; i + 1 < g.n(); ++i) {
            const std::size_t k = g.index(i, j);
            if (g.kind(k) != NodeKind::inside) continue;
            const std::size_t nb[4] = {g.index(i + 1, j), g.index(i - 1, j), g.index(i, j + 1), g.index(i, j - 1)};
            bool all = true;
            for (auto q : nb) all = all && g.kind(q) == NodeKind::inside;
            if (!all) continue;
            fn(k, (u[nb[0]] + u[nb[1]] + u[nb[2]] + u[nb[3]] - 4.0 * u[k]) / h2);
        }
    }
}

// Conservative three-point radial Laplacian at all nodes but the last; the origin of a disc
// uses 4 (u1 - u0) / r1^2 and the first node of an annulus is skipped.
template <class Fn>
void visit_laplacian(const RadialField& u, Fn&& fn) {
    const auto& r = u.mesh();
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        if (i == 0) {
            if (r.is_disc()) fn(i, 4.0 * (u[1] - u[0]) / (r[1] * r[1]));
            continue;
        }
        const double hl = r[i] - r[i - 1], hr = r[i + 1] - r[i];
        const double fl = 0.5 * (r[i] + r[i - 1]) * (u[i] - u[i - 1]) / hl;
        const double fr = 0.5 * (r[i] + r[i + 1]) * (u[i + 1] - u[i]) / hr;
        fn(i, (fr - fl) / (0.5 * (hl + hr) * r[i]));
    }
}

inline double spacing(const ScalarField2D& u) { return u.grid().h(); }
inline double spacing(const RadialField& u) { return u.mesh().max_spacing(); }

inline double max_density(const ScalarField2D& u) {
    double e = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u.grid().active(k)) e = std::max(e, std::exp(u[k]));
    }
    return e;
}

inline double max_density(const RadialField& u) { return std::exp(u.max()); }

}  // namespace detail

/// Delta_h u + e^u >= -tol at every node where the discrete Laplacian is formed.
/// The tolerance is tol_scale h^2 max(1, max e^u).
template <class Field>
SupersolutionCheck supersolution_check(const Field& u, double tol_scale = 10.0) {
    SupersolutionCheck out;
    const double h = detail::spacing(u);
    out.tolerance = tol_scale * h * h * std::max(1.0, detail::max_density(u));
    detail::visit_laplacian(u, [&](std::size_t k, double lap) {
        const double v = lap + std::exp(u[k]);
        out.worst = std::min(out.worst, v);
        ++out.checked;
        if (v < -out.tolerance) {
            ++out.violations;
        } else if (v < 0.0) {
            ++out.tolerated;
        }
    });
    return out;
}

/// Constant of the C h tolerance for the grid check, relative to max(lhs, rhs).
inline constexpr double interior_bol_constant = 1.0;

struct InteriorBolReport {
    BolReport bol;
    SupersolutionCheck supersolution;
    double total_mass = 0.0;
};

/// (integral of e^{u/2} over {phi = t})^2 >= m (8 pi - m) / 2, m the e^u-mass of {phi > t}.
/// Throws PreconditionFailed when {phi > t} reaches the boundary of the grid domain.
inline InteriorBolReport check_interior_bol(const ScalarField2D& u, const ScalarField2D& phi, double t) {
    require_same_grid(u, phi);
    const Grid2D& g = phi.grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.active(k) && g.kind(k) != NodeKind::inside && phi[k] > t) {
            throw PreconditionFailed("level set reaches the boundary");
        }
    }
    for (std::size_t k : g.rim_nodes()) {
        if (phi[k] > t) throw PreconditionFailed("level set reaches the boundary");
    }
    InteriorBolReport out;
    out.total_mass = weighted_mass(u);
    out.supersolution = supersolution_check(u);
    out.bol.context = BolContext::interior;
    if (!(out.total_mass <= critical_mass)) {
        out.bol = detail::not_applicable(BolContext::interior, "total mass exceeds 8 pi");
        return out;
    }
    if (out.supersolution.violations > 0) {
        out.bol = detail::not_applicable(BolContext::interior, "u is not a supersolution");
        return out;
    }
    const auto ci = contour_integrals(u, phi, t);
    const double m = superlevel_mass(u, phi, t);
    BolReport& rep = out.bol;
    rep.mass = m;
    rep.lhs = ci.weighted_length * ci.weighted_length;
    rep.rhs = 0.5 * m * (critical_mass - m);
    rep.defect = rep.lhs - rep.rhs;
    rep.tolerance = interior_bol_constant * g.h() * std::max(rep.lhs, rep.rhs);
    if (out.supersolution.tolerated > 0) {
        rep.note = std::to_string(out.supersolution.tolerated) + " nodes within tolerance of the supersolution bound";
    }
    rep = detail::finish(rep);
    return out;
}

/// Radial version on a disc mesh; {phi > t} must stay off the last node.
inline InteriorBolReport check_interior_bol(const RadialField& u, const RadialField& phi, double t) {
    require_same_mesh(u, phi);
    if (!phi.mesh().is_disc()) throw InvalidArgument("radial interior check needs a disc mesh");
    if (phi.back() > t) throw PreconditionFailed("level set reaches the boundary");
    InteriorBolReport out;
    out.total_mass = cumulative_mass_gauss(u).back();
    out.supersolution = supersolution_check(u);
    if (!(out.total_mass <= critical_mass)) {
        out.bol = detail::not_applicable(BolContext::interior, "total mass exceeds 8 pi");
        return out;
    }
    if (out.supersolution.violations > 0) {
        out.bol = detail::not_applicable(BolContext::interior, "u is not a supersolution");
        return out;
    }
    const auto ci = contour_integrals(u, phi, t);
    const double m = superlevel_mass(u, phi, t);
    BolReport& rep = out.bol;
    rep.context = BolContext::interior;
    rep.mass = m;
    rep.lhs = ci.weighted_length * ci.weighted_length;
    rep.rhs = 0.5 * m * (critical_mass - m);
    rep.defect = rep.lhs - rep.rhs;
    rep.tolerance = detail::radial_tolerance(phi.mesh(), std::max(rep.lhs, rep.rhs));
    // level radii and masses are second order in h / r, so small circles need more room
    const auto radii = level_radii(phi, t);
    if (!radii.empty() && radii.front() > 0.0) {
        const double q = phi.mesh().max_spacing() / radii.front();
        rep.tolerance = std::max(rep.tolerance, q * q * std::max(rep.lhs, rep.rhs));
    }
    rep = detail::finish(rep);
    return out;
}

}  // namespace mfl
