#pragma once

// The eight acceptance criteria as runnable checks.  Shared by the acceptance binary
// and `mfl oracle`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mfl/bol.hpp"
#include "mfl/experiments.hpp"
#include "mfl/grid_solver.hpp"
#include "mfl/pipeline.hpp"
#include "mfl/radial_solver.hpp"
#include "mfl/rearrange.hpp"
#include "mfl/topology.hpp"

namespace mfl {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

namespace acceptance {

class Ledger {
public:
    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass_ = false;
            failures_ += (failures_.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
    [[nodiscard]] bool pass() const { return pass_; }
    [[nodiscard]] std::string detail() const { return failures_.empty() ? notes_ : failures_ + " | " + notes_; }

private:
    bool pass_ = true;
    std::string failures_;
    std::string notes_;
};

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline RadialField bubble_field(const RadialMesh& mesh, BubbleParam p, double shift = 0.0) {
    return RadialField::sample(mesh, [&](double r) { return bubble_value(p, r) + shift; });
}

// 1. closed forms against quadrature at 100 (lambda, r) samples; Bol equality in closed form
inline void bubble_oracle(Ledger& L) {
    using boost::math::quadrature::gauss_kronrod;
    double worst_mass = 0.0, worst_weight = 0.0, worst_bol = 0.0, worst_ext = 0.0;
    for (int a = 0; a < 10; ++a) {
        const BubbleParam p(std::pow(10.0, -1.0 + 2.0 * a / 9.0));
        for (int b = 0; b < 10; ++b) {
            const double r = std::pow(10.0, -1.3 + 2.0 * b / 9.0);
            const double s = std::sqrt(8.0) / p.lambda();
            // split at the bubble's own scale so the adaptive rule sees the shoulder
            auto dens = [&](double x) { return 2.0 * pi * x * bubble_density(p, x); };
            double q = 0.0;
            const double mid = std::min(r, s);
            q += gauss_kronrod<double, 31>::integrate(dens, 0.0, mid, 15, 1e-14);
            if (r > mid) q += gauss_kronrod<double, 31>::integrate(dens, mid, r, 15, 1e-14);
            const double m = ball_mass(p, r);
            worst_mass = std::max(worst_mass, std::abs(q - m) / m);
            auto circle = [&](double th) { return r * std::exp(0.5 * bubble_value(p, std::hypot(r * std::cos(th), r * std::sin(th)))); };
            const double w = gauss_kronrod<double, 31>::integrate(circle, 0.0, 2.0 * pi, 5, 1e-14);
            worst_weight = std::max(worst_weight, std::abs(w - boundary_weight(p, r)) / boundary_weight(p, r));
            const double bw = boundary_weight(p, r);
            worst_bol = std::max(worst_bol, std::abs(bw * bw - 0.5 * m * (critical_mass - m)) / (bw * bw));
            worst_ext = std::max(worst_ext, std::abs(m + exterior_mass(p, r) - critical_mass) / critical_mass);
        }
    }
    L.check(worst_mass <= 1e-8, "ball_mass vs quadrature " + fmt(worst_mass));
    L.check(worst_weight <= 1e-8, "boundary_weight vs quadrature " + fmt(worst_weight));
    L.check(worst_bol <= 1e-12, "closed-form Bol equality " + fmt(worst_bol));
    L.check(worst_ext <= 1e-12, "interior + exterior mass " + fmt(worst_ext));
    L.note("mass rel " + fmt(worst_mass) + ", weight rel " + fmt(worst_weight) + ", Bol equality " + fmt(worst_bol));
}

// 2. radial solver against the exact disc family
inline void exact_recovery(Ledger& L) {
    double worst = 0.0;
    for (double k : {2.0, 4.0, 6.0, 7.0}) {
        ProblemSpec s;
        s.rho = k * pi;
        s.radial_nodes = 4096;
        const auto rep = solve_radial(s);
        if (!rep.converged()) {
            L.check(false, "radial solve failed at rho = " + fmt(k) + "pi");
            continue;
        }
        const auto& u = rep.field();
        double e = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - exact_disc_solution(s.rho, 1.0, u.mesh()[i])));
        const double l2 = 8.0 * s.rho / (critical_mass - s.rho);
        e = std::max(e, std::abs(u.front() - 2.0 * std::log1p(l2 / 8.0)));
        worst = std::max(worst, e);
        L.check(e <= 1e-6, "rho = " + fmt(k) + "pi sup error " + fmt(e));
    }
    L.note("worst sup error " + fmt(worst));
}

// 3. grid solver against the radial oracle at 129^2 and 257^2
inline void grid_convergence(Ledger& L) {
    ProblemSpec s;
    s.rho = 4.0 * pi;
    double err[2] = {0.0, 0.0};
    const int sizes[2] = {129, 257};
    for (int a = 0; a < 2; ++a) {
        s.grid_nodes = sizes[a];
        const auto rep = solve_2d(s);
        if (!rep.converged()) {
            L.check(false, "grid solve failed at n = " + std::to_string(sizes[a]));
            return;
        }
        const auto& u = rep.field();
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (u.grid().kind(k) != NodeKind::inside) continue;
            err[a] = std::max(err[a], std::abs(u[k] - exact_disc_solution(s.rho, 1.0, u.grid().radius_at(k))));
        }
    }
    L.check(err[0] <= 5e-3, "129^2 sup error " + fmt(err[0]));
    L.check(err[0] / err[1] >= 3.5, "refinement ratio " + fmt(err[0] / err[1]));
    L.note("129^2 error " + fmt(err[0]) + ", 257^2 error " + fmt(err[1]) + ", ratio " + fmt(err[0] / err[1]));
}

inline constexpr int uniqueness_grid_nodes = 129;

// 4. seeded random starts cluster to one solution
inline void uniqueness(Ledger& L) {
    std::size_t runs = 0;
    double worst = 0.0;
    for (int ann = 0; ann < 2; ++ann) {
        for (double k : {2.0, 4.0, 7.0}) {
            ProblemSpec s;
            s.rho = k * pi;
            s.grid_nodes = uniqueness_grid_nodes;
            if (ann) {
                s.shape = DomainShape::annulus;
                s.inner_radius = 0.3;
            }
            const auto rep = uniqueness_experiment(s, 10, 20240 + static_cast<std::uint64_t>(k) + 100 * ann, 1e-5);
            const std::string where = std::string(ann ? "annulus" : "disc") + " rho = " + fmt(k) + "pi";
            L.check(rep.converged == 10, where + ": " + std::to_string(rep.converged) + "/10 converged");
            L.check(rep.distinct == 1, where + ": " + std::to_string(rep.distinct) + " clusters");
            worst = std::max(worst, rep.max_pairwise_distance);
            ++runs;
        }
    }
    L.note(std::to_string(runs) + " configurations x 10 starts on " + std::to_string(uniqueness_grid_nodes) +
           "^2, max pairwise distance " + fmt(worst));
}

struct FluxStudy {
    double hold_fraction = 0.0;
    double worst_shortfall = 0.0;   ///< max of (target - source) / target over the thresholds
};

template <class Fn>
FluxStudy flux_study(int n, const Fn& profile) {
    const auto g = Grid2D::disc(1.0, n);
    const double edge = profile(1.0);
    const auto u = ScalarField2D::sample_radial(g, [&](double r) { return profile(std::min(r, 1.0)); });
    const auto phi = ScalarField2D::sample_radial(g, [&](double r) { return profile(std::min(r, 1.0)) - edge; });
    const auto res = rearrange(phi, u, lambda_from_ball_mass(weighted_mass(u), 1.0), 1.0);
    const auto th = interior_thresholds(phi, 200);
    FluxStudy out;
    std::size_t hold = 0;
    for (double t : th) {
        const auto fc = gradient_comparison(phi, u, res, t);
        if (fc.source_flux >= fc.target_flux * (1.0 - g->h())) ++hold;
        out.worst_shortfall = std::max(out.worst_shortfall, (fc.target_flux - fc.source_flux) / fc.target_flux);
    }
    out.hold_fraction = th.empty() ? 0.0 : static_cast<double>(hold) / static_cast<double>(th.size());
    return out;
}

// 5. equimeasurability, idempotence and the gradient comparison
inline void rearrangement(Ledger& L) {
    {
        const auto g = Grid2D::disc(1.0, 129);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> pos(-0.5, 0.5), amp(0.3, 1.5), width(0.15, 0.4);
        double bx[3], by[3], ba[3], bw[3];
        for (int k = 0; k < 3; ++k) {
            bx[k] = pos(rng);
            by[k] = pos(rng);
            ba[k] = amp(rng);
            bw[k] = width(rng);
        }
        const auto phi = ScalarField2D::sample(g, [&](double x, double y) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += ba[k] * std::exp(-((x - bx[k]) * (x - bx[k]) + (y - by[k]) * (y - by[k])) / (bw[k] * bw[k]));
            return s * std::max(0.0, 1.0 - x * x - y * y);
        });
        const auto u = ScalarField2D::sample(g, [](double x, double) { return 0.3 * x; });
        const auto res = rearrange(phi, u, lambda_from_ball_mass(weighted_mass(u), 1.0), 1.0);
        const double d = equimeasurability_defect(res, phi, u, plateau_free_thresholds(distinct_values(phi), 200));
        L.check(d <= 1e-3, "equimeasurability defect " + fmt(d));
        L.note("equimeasurability " + fmt(d));
    }
    {
        const BubbleParam lam(1.0);
        const auto mesh = RadialMesh::uniform(0.0, 1.0, 4096);
        const auto u = bubble_field(mesh, lam);
        const auto phi = bubble_field(mesh, lam, -bubble_value(lam, 1.0));
        const auto once = rearrange(phi, u, lam, 1.0);
        const auto twice = rearrange(once.phi_star, u, lam, 1.0);
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            d1 = std::max(d1, std::abs(once.phi_star[i] - phi[i]));
            d2 = std::max(d2, std::abs(twice.phi_star[i] - once.phi_star[i]));
        }
        L.check(d1 <= 1e-8 && d2 <= 1e-8, "bubble identity " + fmt(d1) + ", idempotence " + fmt(d2));
        L.note("identity " + fmt(d1) + ", idempotence " + fmt(d2));
    }
    // strict case: Delta u + e^u = f with a positive bump; equality case: the bubble itself
    const auto fine = RadialMesh::uniform(0.0, 1.0, 8192);
    const auto bump = integrate_radial_ivp(fine, Coefficient::constant(1.0),
                                           Coefficient::radial([](double r) { return 0.5 * std::exp(-r * r / 0.1); }, "bump"), 0.0);
    const BubbleParam lam = lambda_from_ball_mass(4.0 * pi, 1.0);
    const std::pair<const char*, std::function<double(double)>> families[2] = {
        {"bump", [&](double r) { return bump.at_cubic(r); }},
        {"bubble", [&](double r) { return bubble_value(lam, r); }}};
    for (const auto& [name, profile] : families) {
        double prev = INFINITY;
        std::string trail;
        for (int n : {65, 129, 257}) {
            const auto st = flux_study(n, profile);
            L.check(st.hold_fraction >= 0.95, std::string(name) + " n = " + std::to_string(n) + " holds at " + fmt(st.hold_fraction));
            if (std::isfinite(prev)) {
                L.check(st.worst_shortfall <= 0.5 * prev, std::string(name) + " shortfall " + fmt(prev) + " -> " + fmt(st.worst_shortfall));
            }
            prev = st.worst_shortfall;
            trail += (trail.empty() ? "" : " -> ") + fmt(st.worst_shortfall) + " (" + fmt(st.hold_fraction) + ")";
        }
        L.note(std::string(name) + " shortfall (hold fraction) " + trail);
    }
}

// 6. Bol checkers: equality on bubbles, strictness on constructed supersolutions and a ring
inline void bol_suite(Ledger& L) {
    const BubbleParam lam(2.0);
    const auto disc = RadialMesh::uniform(0.0, 1.0, 4096);
    const auto ext = RadialMesh::geometric(1.0, 1e4, 4096);
    const auto psi = bubble_field(disc, lam);
    const auto a = check_radial_interior(psi);
    const auto b = check_radial_exterior(bubble_field(ext, lam));
    L.check(std::abs(a.defect) <= 1e-6 && a.ok() && a.verdict != BolVerdict::holds_strictly, "interior bubble " + fmt(a.defect));
    L.check(std::abs(b.defect) <= 1e-6 && b.ok() && b.verdict != BolVerdict::holds_strictly, "exterior bubble " + fmt(b.defect));
    L.note("bubble defects " + fmt(a.defect) + " / " + fmt(b.defect));

    const auto flat = check_radial_interior(RadialField::sample(RadialMesh::uniform(0.0, 1.0, 2048),
                                                                [&](double r) { return bubble_value(lam, r) + 0.2 * r * r; }));
    L.check(flat.verdict == BolVerdict::holds_strictly, std::string("U + 0.2 r^2 interior: ") + to_string(flat.verdict));
    const auto down = check_radial_exterior(bubble_field(ext, lam, -0.3));
    L.check(down.verdict == BolVerdict::holds_strictly, std::string("U - 0.3 exterior: ") + to_string(down.verdict));
    const auto lam2 = conjugate_lambda(lam, 1.0).param;
    const auto mix = check_radial_exterior(RadialField::sample(RadialMesh::geometric(1.0, 1e4, 2048), [&](double r) {
        return std::log(0.5 * bubble_density(lam, r) + 0.5 * bubble_density(lam2, r));
    }));
    L.check(mix.verdict == BolVerdict::holds_strictly, std::string("conjugate mixture exterior: ") + to_string(mix.verdict));

    const auto g = Grid2D::disc(1.0, 257);
    const auto sup = ScalarField2D::sample_radial(g, [&](double r) { return bubble_value(lam, r) + r * r; });
    const auto minus_r = ScalarField2D::sample_radial(g, [](double r) { return -r; });
    const auto s2 = check_interior_bol(sup, minus_r, -0.5);
    L.check(s2.bol.verdict == BolVerdict::holds_strictly, std::string("U + r^2 on B_1/2: ") + to_string(s2.bol.verdict));

    const auto g129 = Grid2D::disc(1.0, 129);
    const auto u = ScalarField2D::sample_radial(g129, [&](double r) { return bubble_value(lam, r); });
    const auto ring = ScalarField2D::sample_radial(g129, [](double r) { return -(r - 0.5) * (r - 0.5); });
    const auto holes = level_topology(ring, -0.04).holes;
    const auto rr = check_interior_bol(u, ring, -0.04);
    L.check(holes >= 1, "ring level set has no hole");
    L.check(rr.bol.verdict == BolVerdict::holds_strictly, std::string("annular level set: ") + to_string(rr.bol.verdict));
    L.note("strict defects: interior " + fmt(flat.defect / flat.tolerance) + " tol, exterior " +
           fmt(down.defect / down.tolerance) + " tol, grid " + fmt(s2.bol.defect / s2.bol.tolerance) + " tol, ring " +
           fmt(rr.bol.defect / rr.bol.tolerance) + " tol");
}

// 7. the uniqueness mechanism: null pairs never fire, distinct equal-mass pairs do
inline void pipeline(Ledger& L) {
    const BubbleParam lam = lambda_from_ball_mass(4.0 * pi, 1.0);
    const auto mesh = RadialMesh::uniform(0.0, 1.0, 4096);
    const auto w1 = bubble_field(mesh, lam);
    const auto null_r = theorem_pipeline(w1, w1);
    L.check(null_r.applicable && !null_r.contradiction, "radial null pair fired or was refused");
    const auto g = Grid2D::disc(1.0, 65);
    const auto u1 = ScalarField2D::sample_radial(g, [&](double r) { return bubble_value(lam, r); });
    const auto null_g = theorem_pipeline(u1, u1);
    L.check(null_g.applicable && !null_g.contradiction, "grid null pair fired or was refused");

    double weakest = INFINITY;
    for (double delta : {0.05, 0.1, 0.2}) {
        std::vector<double> v(mesh.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w1[i] + delta * std::exp(-mesh[i] * mesh[i] / 0.1);
        const double kr = std::log(cumulative_mass_gauss(w1).back() / cumulative_mass_gauss(RadialField(mesh, v)).back());
        for (double& x : v) x += kr;
        const auto rr = theorem_pipeline(w1, RadialField(mesh, v));
        L.check(rr.applicable && rr.contradiction && rr.boundary_defect < -10.0 * rr.tolerance,
                "radial delta = " + fmt(delta) + " defect " + fmt(rr.boundary_defect) + " tol " + fmt(rr.tolerance));
        if (rr.applicable) weakest = std::min(weakest, -rr.boundary_defect / rr.tolerance);

        std::vector<double> w(g->size());
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double x = g->x(g->col(k)), y = g->y(g->row(k));
            w[k] = u1[k] + delta * std::exp(-((x - 0.2) * (x - 0.2) + y * y) / 0.05);
        }
        const double kg = std::log(weighted_mass(u1) / weighted_mass(ScalarField2D(g, w)));
        for (double& x : w) x += kg;
        const auto gr = theorem_pipeline(u1, ScalarField2D(g, w));
        L.check(gr.applicable && gr.contradiction && gr.boundary_defect < -10.0 * gr.tolerance,
                "grid delta = " + fmt(delta) + " defect " + fmt(gr.boundary_defect) + " tol " + fmt(gr.tolerance));
        if (gr.applicable) weakest = std::min(weakest, -gr.boundary_defect / gr.tolerance);
    }
    L.note("null pairs quiet; weakest contradiction at " + fmt(weakest) + " x tolerance");
}

// 8. mass roots, brackets, dichotomy and decay
inline void lemmas(Ledger& L) {
    double worst = 0.0;
    for (int a = 0; a < 10; ++a) {
        const BubbleParam p(std::pow(10.0, -1.0 + 2.0 * a / 9.0));
        for (int b = 0; b < 10; ++b) {
            const double r = std::pow(10.0, -1.3 + 2.0 * b / 9.0);
            const double bw = boundary_weight(p, r);
            const double beta = bw * bw;
            const auto roots = mass_roots(beta);
            const double lo = std::min(ball_mass(p, r), exterior_mass(p, r));
            const double hi = std::max(ball_mass(p, r), exterior_mass(p, r));
            worst = std::max({worst, std::abs(roots.m1 + roots.m2 - critical_mass) / critical_mass,
                              std::abs(roots.m1 * roots.m2 - 2.0 * beta) / (2.0 * beta),
                              std::abs(roots.m1 - lo) / lo, std::abs(roots.m2 - hi) / hi});
        }
    }
    L.check(worst <= 1e-12, "mass_roots identities " + fmt(worst));

    const BubbleParam lam(2.0);
    const auto lam2 = conjugate_lambda(lam, 1.0).param;
    const auto ext = RadialMesh::geometric(1.0, 1e4, 4096);
    const auto at1 = mass_bracket_exterior(bubble_field(ext, lam), lam, lam2);
    const auto at2 = mass_bracket_exterior(bubble_field(ext, lam2), lam, lam2);
    L.check(at1.outcome == BracketOutcome::inside && std::abs(at1.mass - at1.upper) <= 1e-6, "exterior bracket at U_lambda1");
    L.check(at2.outcome == BracketOutcome::inside && std::abs(at2.mass - at2.lower) <= 1e-6, "exterior bracket at U_lambda2");
    const auto mix = mass_bracket_exterior(RadialField::sample(RadialMesh::geometric(1.0, 1e4, 2048), [&](double r) {
        return std::log(0.5 * bubble_density(lam, r) + 0.5 * bubble_density(lam2, r));
    }), lam, lam2);
    L.check(mix.outcome == BracketOutcome::inside && mix.strict, "exterior bracket on the conjugate mixture");

    const auto disc = RadialMesh::uniform(0.0, 1.0, 4096);
    const auto first = mass_bracket_interior(bubble_field(disc, lam), lam, lam2);
    const auto second = mass_bracket_interior(bubble_field(disc, lam2), lam, lam2);
    L.check(first.outcome == BracketOutcome::first_alternative, std::string("dichotomy at U_lambda1: ") + to_string(first.outcome));
    L.check(second.outcome == BracketOutcome::second_alternative, std::string("dichotomy at U_lambda2: ") + to_string(second.outcome));
    const BubbleParam small(1.0);
    const auto big = conjugate_lambda(small, 1.0).param;
    const auto pert = mass_bracket_interior(RadialField::sample(RadialMesh::uniform(0.0, 1.0, 2048), [&](double r) {
        return bubble_value(small, r) + 0.1 * (r * r - 1.0);
    }), small, big);
    L.check(pert.outcome == BracketOutcome::first_alternative && pert.strict,
            std::string("dichotomy on U + 0.1 (r^2 - 1): ") + to_string(pert.outcome));

    bool decay_ok = true;
    double last = 0.0;
    for (double l : {0.5, 2.0, 8.0}) {
        const auto psi = bubble_field(ext, BubbleParam(l));
        std::vector<double> s;
        const double top = psi.front() - 0.01, bottom = psi.back() - 20.0;
        for (int k = 0; k < 60; ++k) s.push_back(top + (bottom - top) * k / 59.0);
        const auto seq = decay_limit_check(psi, s);
        decay_ok = decay_ok && decay_trend(seq, 20);
        last = std::max(last, seq.back().value / seq.front().value);
    }
    L.check(decay_ok, "decay sequence not monotone to zero");
    L.note("mass_roots " + fmt(worst) + ", mixture inside strictly, perturbed first alternative, decay tail ratio " + fmt(last));
}

struct CriterionSpec {
    int id;
    const char* title;
    double budget_seconds;   ///< runtime bound that is part of the criterion; 0 when none
    void (*run)(Ledger&);
};

inline const std::vector<CriterionSpec>& criteria() {
    static const std::vector<CriterionSpec> all = {
        {1, "bubble oracle suite", 1.0, bubble_oracle},
        {2, "exact-solution recovery", 5.0, exact_recovery},
        {3, "2D solver convergence", 60.0, grid_convergence},
        {4, "uniqueness at desk scale", 0.0, uniqueness},
        {5, "rearrangement equimeasurability", 0.0, rearrangement},
        {6, "Bol checker suite", 0.0, bol_suite},
        {7, "pipeline contradiction", 0.0, pipeline},
        {8, "lemma checks", 0.0, lemmas},
    };
    return all;
}

}  // namespace acceptance

/// Runs the listed criteria (all when empty).  Exceptions count as failures.
inline std::vector<CriterionResult> run_acceptance(const std::vector<int>& which = {}) {
    std::vector<CriterionResult> out;
    for (const auto& c : acceptance::criteria()) {
        if (!which.empty() && std::find(which.begin(), which.end(), c.id) == which.end()) continue;
        acceptance::Ledger L;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(L);
        } catch (const std::exception& e) {
            L.check(false, std::string("exception: ") + e.what());
        }
        CriterionResult r;
        r.id = c.id;
        r.title = c.title;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0.0) {
            L.check(r.seconds < c.budget_seconds, "runtime " + acceptance::fmt(r.seconds) + " s over the " +
                                                      acceptance::fmt(c.budget_seconds) + " s budget");
        }
        r.pass = L.pass();
        r.detail = L.detail();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace mfl
