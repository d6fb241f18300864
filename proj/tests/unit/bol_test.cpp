#include <cmath>

#include <gtest/gtest.h>

#include "mfl/bol.hpp"
#include "mfl/topology.hpp"

namespace {

using namespace mfl;

RadialField bubble_on(const RadialMesh& mesh, BubbleParam p, double shift = 0.0) {
    return RadialField::sample(mesh, [&](double r) { return bubble_value(p, r) + shift; });
}

RadialMesh disc_mesh(std::size_t n) { return RadialMesh::uniform(0.0, 1.0, n); }
RadialMesh exterior_mesh(std::size_t n) { return RadialMesh::geometric(1.0, 1e4, n); }

const BubbleParam lam(2.0);

TEST(BolVerdict, ClassifiesAgainstTolerance) {
    EXPECT_EQ(classify_defect(11.0, 1.0), BolVerdict::holds_strictly);
    EXPECT_EQ(classify_defect(10.0, 1.0), BolVerdict::holds);
    EXPECT_EQ(classify_defect(0.0, 1.0), BolVerdict::holds);
    EXPECT_EQ(classify_defect(-0.5, 1.0), BolVerdict::violated_within_tolerance);
    EXPECT_EQ(classify_defect(-1.5, 1.0), BolVerdict::violated);
    EXPECT_EQ(classify_defect(NAN, 1.0), BolVerdict::not_applicable);
}

TEST(BubbleEquality, AllCheckersAtHighResolution) {
    const auto psi = bubble_on(disc_mesh(4096), lam);
    const auto phi = RadialField::sample(disc_mesh(4096), [](double r) { return -r; });
    const auto ext = bubble_on(exterior_mesh(4096), lam);
    const auto a = check_radial_interior(psi);
    const auto b = check_radial_exterior(ext);
    const auto c = check_interior_bol(psi, phi, -0.5).bol;
    const auto d = boundary_comparison(psi, ball_mass(lam, 1.0));
    for (const auto* rep : {&a, &b, &c, &d}) {
        EXPECT_LE(std::abs(rep->defect), 1e-6) << to_string(rep->context);
        EXPECT_TRUE(rep->ok()) << to_string(rep->context);
        EXPECT_NE(rep->verdict, BolVerdict::holds_strictly) << to_string(rep->context);
    }
}

TEST(BubbleEquality, DefectsShrinkUnderRefinement) {
    double prev_int = INFINITY, prev_ext = INFINITY, prev_lvl = INFINITY;
    for (std::size_t n : {65u, 129u, 257u, 513u}) {
        const auto psi = bubble_on(disc_mesh(n), lam);
        const auto phi = RadialField::sample(disc_mesh(n), [](double r) { return -r; });
        const double di = std::abs(check_radial_interior(psi).defect);
        const double de = std::abs(check_radial_exterior(bubble_on(exterior_mesh(n), lam)).defect);
        const double dl = std::abs(check_interior_bol(psi, phi, -0.5).bol.defect);
        EXPECT_LE(3.0 * di, prev_int) << n;
        EXPECT_LE(3.0 * de, prev_ext) << n;
        EXPECT_LE(3.0 * dl, prev_lvl) << n;
        prev_int = di;
        prev_ext = de;
        prev_lvl = dl;
    }
}

TEST(BubbleEquality, InteriorAndExteriorShareTheCircle) {
    for (double l : {0.5, 1.0, 2.0, 7.0}) {
        for (double r : {0.1, 1.0, 3.0}) {
            EXPECT_NEAR(ball_mass(BubbleParam(l), r) + exterior_mass(BubbleParam(l), r), critical_mass, 1e-12);
        }
    }
    const auto a = check_radial_interior(bubble_on(disc_mesh(4096), lam));
    const auto b = check_radial_exterior(bubble_on(exterior_mesh(4096), lam));
    EXPECT_NEAR(a.lhs, b.lhs, 1e-12 * a.lhs);
    EXPECT_NEAR(a.mass + b.mass, critical_mass, 1e-6);
    EXPECT_NEAR(a.lhs, std::pow(boundary_weight(lam, 1.0), 2), 1e-12 * a.lhs);
}

TEST(RadialInterior, FlatterBubbleIsStrict) {
    const auto mesh = disc_mesh(2048);
    const auto psi = RadialField::sample(mesh, [](double r) { return bubble_value(lam, r) + 0.2 * r * r; });
    const auto rep = check_radial_interior(psi);
    EXPECT_EQ(rep.verdict, BolVerdict::holds_strictly);
    EXPECT_TRUE(rep.differential.strict);
    EXPECT_GT(rep.differential.worst, -rep.differential.tolerance);
}

TEST(RadialInterior, SteeperBubbleFailsTheDifferentialCondition) {
    // |psi'| grows while the mass shrinks, so the slope bound breaks near the origin
    const auto psi = RadialField::sample(disc_mesh(2048), [](double r) { return bubble_value(lam, r) - 0.2 * r * r; });
    const auto rep = check_radial_interior(psi);
    EXPECT_EQ(rep.verdict, BolVerdict::not_applicable);
    EXPECT_GT(rep.differential.violations, 0u);
}

TEST(RadialInterior, PreconditionGates) {
    EXPECT_EQ(check_radial_interior(bubble_on(disc_mesh(512), lam, 3.0)).verdict, BolVerdict::not_applicable);
    const auto flat = RadialField::sample(disc_mesh(64), [](double) { return 0.0; });
    EXPECT_EQ(check_radial_interior(flat).verdict, BolVerdict::not_applicable);
    EXPECT_THROW((void)check_radial_interior(bubble_on(exterior_mesh(64), lam)), InvalidArgument);
}

TEST(RadialInterior, StrictnessIsMonotoneInThePerturbation) {
    double prev = -INFINITY;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.3, 0.5}) {
        const auto psi = RadialField::sample(disc_mesh(1024), [&](double r) { return bubble_value(lam, r) + eps * r * r; });
        const auto rep = check_radial_interior(psi);
        ASSERT_TRUE(rep.ok()) << eps;
        EXPECT_GE(rep.defect, prev - rep.tolerance) << eps;
        prev = rep.defect;
    }
}

TEST(RadialExterior, ShiftedDownBubbleIsStrict) {
    // psi = U + c, c < 0: defect = e^c m^2 (1 - e^c) / 2 with m the bubble's exterior mass
    const double m = exterior_mass(lam, 1.0);
    double prev = -INFINITY;
    for (double c : {-0.1, -0.3, -0.6}) {
        const auto rep = check_radial_exterior(bubble_on(exterior_mesh(4096), lam, c));
        EXPECT_EQ(rep.verdict, BolVerdict::holds_strictly) << c;
        EXPECT_NEAR(rep.defect, 0.5 * std::exp(c) * m * m * (1.0 - std::exp(c)), 1e-6) << c;
        EXPECT_GT(rep.defect, prev);
        prev = rep.defect;
    }
}

TEST(RadialExterior, MixtureOfConjugateBubblesIsStrict) {
    const auto lam2 = conjugate_lambda(lam, 1.0).param;
    for (double th : {0.25, 0.5, 0.75}) {
        const auto psi = RadialField::sample(exterior_mesh(2048), [&](double r) {
            return std::log(th * bubble_density(lam, r) + (1.0 - th) * bubble_density(lam2, r));
        });
        const auto rep = check_radial_exterior(psi);
        EXPECT_EQ(rep.verdict, BolVerdict::holds_strictly) << th;
        EXPECT_TRUE(rep.differential.strict);
    }
}

TEST(RadialExterior, LinearExtraDecayBreaksTheDifferentialCondition) {
    // 2 pi r |psi'| >= 2 pi r eps is unbounded while the right side stays below 8 pi
    const auto psi = RadialField::sample(exterior_mesh(1024), [](double r) { return bubble_value(lam, r) - 0.05 * (r - 1.0); });
    const auto rep = check_radial_exterior(psi);
    EXPECT_EQ(rep.verdict, BolVerdict::not_applicable);
    EXPECT_LT(rep.differential.worst, 0.0);
}

TEST(RadialExterior, Rejections) {
    const auto flat = RadialField::sample(exterior_mesh(64), [](double) { return -1.0; });
    EXPECT_THROW((void)check_radial_exterior(flat), PreconditionFailed);
    const auto slow = RadialField::sample(exterior_mesh(256), [](double r) { return -2.0 * std::log(r); });
    EXPECT_THROW((void)check_radial_exterior(slow), PreconditionFailed);
    EXPECT_THROW((void)check_radial_exterior(bubble_on(disc_mesh(64), lam)), InvalidArgument);
}

std::vector<double> decade(double top, double bottom, int n) {
    std::vector<double> s;
    for (int i = 0; i < n; ++i) s.push_back(top + (bottom - top) * i / (n - 1));
    return s;
}

TEST(Decay, BubbleMatchesClosedForm) {
    const auto psi = bubble_on(exterior_mesh(4096), lam);
    const auto seq = decay_limit_check(psi, decade(psi.front() - 0.01, psi.back() - 20.0, 60));
    for (const auto& p : seq) {
        // r^2 e^U at the radius where U = s, including the inner ball in the area
        const double x = 8.0 * (std::exp(0.5 * (2.0 * std::log(lam.lambda()) - p.s)) - 1.0);
        const double r2 = x / lam.lambda_sq();
        EXPECT_NEAR(p.value, pi * r2 * std::exp(p.s), 1e-5 * p.value + 1e-12) << p.s;
    }
    EXPECT_TRUE(decay_trend(seq, 20));
}

TEST(Decay, PowerLaws) {
    const auto cubic = RadialField::sample(exterior_mesh(1024), [](double r) { return -3.0 * std::log(r); });
    const auto seq = decay_limit_check(cubic, decade(-0.1, -60.0, 100));
    for (const auto& p : seq) EXPECT_NEAR(p.value, pi * std::exp(p.s / 3.0), 1e-6 * pi) << p.s;
    EXPECT_TRUE(decay_trend(seq, 10));
    EXPECT_LT(seq.back().value, 1e-8);
    const auto borderline = RadialField::sample(exterior_mesh(1024), [](double r) { return -2.0 * std::log(r); });
    EXPECT_THROW((void)decay_limit_check(borderline, decade(-0.1, -10.0, 10)), PreconditionFailed);
}

TEST(Decay, ExteriorProfileInvariants) {
    const auto psi = bubble_on(exterior_mesh(1024), lam);
    const auto prof = exterior_profile(psi, decade(psi.front() + 0.5, psi.back() - 5.0, 80));
    for (std::size_t i = 0; i < prof.s.size(); ++i) {
        EXPECT_GE(prof.mu[i], pi * (1.0 - 1e-12));
        if (i > 0) {
            EXPECT_GE(prof.k[i], prof.k[i - 1] - 1e-9);
            EXPECT_GE(prof.mu[i], prof.mu[i - 1]);
        }
    }
    // above the boundary value the superlevel set is empty and k(s) = 8 pi - exterior mass
    EXPECT_NEAR(prof.k.front(), critical_mass - exterior_mass(lam, 1.0), 1e-6);
    EXPECT_NEAR(prof.mu.front(), pi, 1e-12);
}

TEST(MassBracket, ExteriorEndpointsAndStrictInterior) {
    const auto lam2 = conjugate_lambda(lam, 1.0).param;
    const auto at1 = mass_bracket_exterior(bubble_on(exterior_mesh(4096), lam), lam, lam2);
    EXPECT_EQ(at1.outcome, BracketOutcome::inside);
    EXPECT_FALSE(at1.strict);
    EXPECT_NEAR(at1.mass, at1.upper, 1e-6);
    const auto at2 = mass_bracket_exterior(bubble_on(exterior_mesh(4096), lam2), lam, lam2);
    EXPECT_EQ(at2.outcome, BracketOutcome::inside);
    EXPECT_NEAR(at2.mass, at2.lower, 1e-6);
    for (const auto* rep : {&at1, &at2}) {
        EXPECT_NEAR(rep->roots.m1, rep->lower, 1e-10);
        EXPECT_NEAR(rep->roots.m2, rep->upper, 1e-10);
    }
    const auto mix = RadialField::sample(exterior_mesh(2048), [&](double r) {
        return std::log(0.5 * bubble_density(lam, r) + 0.5 * bubble_density(lam2, r));
    });
    const auto in = mass_bracket_exterior(mix, lam, lam2);
    EXPECT_EQ(in.outcome, BracketOutcome::inside);
    EXPECT_TRUE(in.strict);
}

TEST(MassBracket, InteriorAlternatives) {
    const auto lam2 = conjugate_lambda(lam, 1.0).param;
    const auto first = mass_bracket_interior(bubble_on(disc_mesh(4096), lam), lam, lam2);
    EXPECT_EQ(first.outcome, BracketOutcome::first_alternative);
    EXPECT_FALSE(first.strict);
    const auto second = mass_bracket_interior(bubble_on(disc_mesh(4096), lam2), lam, lam2);
    EXPECT_EQ(second.outcome, BracketOutcome::second_alternative);
    EXPECT_FALSE(second.strict);
    for (const auto* rep : {&first, &second}) {
        EXPECT_NEAR(rep->roots.m1, rep->lower, 1e-10);
        EXPECT_NEAR(rep->roots.m2, rep->upper, 1e-10);
    }
    // U_lambda1 + eps (r^2 - 1): same boundary value, flatter, less mass
    const BubbleParam small(1.0);
    const auto big = conjugate_lambda(small, 1.0).param;
    const auto psi = RadialField::sample(disc_mesh(2048), [&](double r) { return bubble_value(small, r) + 0.1 * (r * r - 1.0); });
    const auto pert = mass_bracket_interior(psi, small, big);
    EXPECT_EQ(pert.outcome, BracketOutcome::first_alternative);
    EXPECT_TRUE(pert.strict);
    EXPECT_TRUE(pert.differential.strict);
}

TEST(MassBracket, Rejections) {
    const auto lam2 = conjugate_lambda(lam, 1.0).param;
    EXPECT_THROW((void)mass_bracket_interior(bubble_on(disc_mesh(256), lam, 0.1), lam, lam2), PreconditionFailed);
    EXPECT_THROW((void)mass_bracket_exterior(bubble_on(exterior_mesh(256), lam, 0.1), lam, lam2), PreconditionFailed);
    EXPECT_THROW((void)mass_bracket_interior(bubble_on(disc_mesh(256), lam), lam2, lam), InvalidArgument);
}

TEST(BoundaryComparison, BubbleAndShift) {
    const auto psi = bubble_on(disc_mesh(1024), lam);
    const auto eq = boundary_comparison(psi, ball_mass(lam, 1.0));
    EXPECT_NEAR(eq.defect, 0.0, 1e-12);
    EXPECT_TRUE(eq.ok());
    const double c = 0.4;
    const auto up = boundary_comparison(bubble_on(disc_mesh(1024), lam, c), std::exp(c) * ball_mass(lam, 1.0));
    const auto rematched = lambda_from_ball_mass(std::exp(c) * ball_mass(lam, 1.0), 1.0);
    EXPECT_NEAR(up.defect, bubble_value(lam, 1.0) + c - bubble_value(rematched, 1.0), 1e-12);
    EXPECT_EQ(up.verdict, BolVerdict::holds_strictly);
    EXPECT_EQ(boundary_comparison(psi, critical_mass).verdict, BolVerdict::not_applicable);
}

TEST(InteriorBol, BubbleDiscsOnGrid) {
    const auto g = Grid2D::disc(1.0, 129);
    const auto u = ScalarField2D::sample_radial(g, [](double r) { return bubble_value(lam, r); });
    const auto phi = ScalarField2D::sample_radial(g, [](double r) { return -r; });
    for (double r : {0.3, 0.5, 0.8}) {
        const auto rep = check_interior_bol(u, phi, -r);
        EXPECT_TRUE(rep.bol.ok()) << r;
        EXPECT_NE(rep.bol.verdict, BolVerdict::holds_strictly) << r;
        EXPECT_NEAR(rep.bol.rhs, std::pow(boundary_weight(lam, r), 2), 0.02 * rep.bol.rhs) << r;
        EXPECT_EQ(rep.supersolution.violations, 0u);
    }
}

TEST(InteriorBol, StrictSupersolutionOnHalfDisc) {
    // Delta u + e^u = 4 eps + e^U (e^{eps r^2} - 1) > 0
    const auto g = Grid2D::disc(1.0, 257);
    const auto u = ScalarField2D::sample_radial(g, [](double r) { return bubble_value(lam, r) + r * r; });
    const auto phi = ScalarField2D::sample_radial(g, [](double r) { return -r; });
    const auto rep = check_interior_bol(u, phi, -0.5);
    EXPECT_EQ(rep.bol.verdict, BolVerdict::holds_strictly);
    EXPECT_GT(rep.supersolution.worst, 0.0);
}

TEST(InteriorBol, AnnularLevelSetIsStrict) {
    const auto g = Grid2D::disc(1.0, 129);
    const auto u = ScalarField2D::sample_radial(g, [](double r) { return bubble_value(lam, r); });
    const auto ring = ScalarField2D::sample_radial(g, [](double r) { return -(r - 0.5) * (r - 0.5); });
    const double t = -0.04;
    EXPECT_GE(level_topology(ring, t).holes, 1u);
    const auto rep = check_interior_bol(u, ring, t);
    EXPECT_EQ(rep.bol.verdict, BolVerdict::holds_strictly);
}

TEST(InteriorBol, Rejections) {
    const auto g = Grid2D::disc(1.0, 65);
    const auto u = ScalarField2D::sample_radial(g, [](double r) { return bubble_value(lam, r); });
    const auto phi = ScalarField2D::sample_radial(g, [](double r) { return -r; });
    EXPECT_THROW((void)check_interior_bol(u, phi, -1.5), PreconditionFailed);
    const auto heavy = ScalarField2D::sample_radial(g, [](double r) { return bubble_value(lam, r) + 2.0; });
    EXPECT_EQ(check_interior_bol(heavy, phi, -0.5).bol.verdict, BolVerdict::not_applicable);
    // Delta u + e^u = -12 + e^{1 - 3 r^2} < 0
    const auto hat = ScalarField2D::sample_radial(g, [](double r) { return 1.0 - 3.0 * r * r; });
    EXPECT_EQ(check_interior_bol(hat, phi, -0.5).bol.verdict, BolVerdict::not_applicable);
}

}  // namespace
