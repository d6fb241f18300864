#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mfl/radial_solver.hpp"
#include "mfl/rearrange.hpp"

namespace {

using namespace mfl;

RadialField bubble_field(const RadialMesh& mesh, double lambda, double shift = 0.0) {
    const BubbleParam p(lambda);
    return RadialField::sample(mesh, [&](double r) { return bubble_value(p, r) + shift; });
}

// u = U_1 on B_1 and phi = U_1 - U_1(1): rearranging against its own bubble measure is the identity.
struct BubbleIdentity {
    RadialMesh mesh = RadialMesh::uniform(0.0, 1.0, 4096);
    BubbleParam lam{1.0};
    RadialField u = bubble_field(mesh, 1.0);
    RadialField phi = bubble_field(mesh, 1.0, -bubble_value(BubbleParam(1.0), 1.0));
};

double sup_distance(const RadialField& a, const RadialField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

ScalarField2D random_bumps(const GridPtr& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-0.5, 0.5), amp(0.3, 1.5), width(0.15, 0.4);
    struct Bump { double x, y, a, w; };
    std::vector<Bump> bumps;
    for (int k = 0; k < 3; ++k) bumps.push_back({pos(rng), pos(rng), amp(rng), width(rng)});
    return ScalarField2D::sample(g, [&](double x, double y) {
        // vanishes on the unit circle so the trace is constant
        double s = 0.0;
        for (const auto& b : bumps) s += b.a * std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (b.w * b.w));
        return s * std::max(0.0, 1.0 - x * x - y * y);
    });
}

TEST(Rearrange, ConstantFieldGivesConstant) {
    const auto mesh = RadialMesh::uniform(0.0, 1.0, 256);
    const auto phi = RadialField::sample(mesh, [](double) { return 0.7; });
    const auto u = RadialField::sample(mesh, [](double) { return std::log(8.0 / 9.0); });
    const auto res = rearrange(phi, u, BubbleParam(1.0), 1.0, {.mass_tolerance = 1e-4});
    EXPECT_TRUE(res.degenerate);
    EXPECT_EQ(res.phi_star.min(), 0.7);
    EXPECT_EQ(res.phi_star.max(), 0.7);
    EXPECT_EQ(lipschitz_diagnostic(res, 0.1), 0.0);
}

TEST(Rearrange, BubbleIdentityAndIdempotence) {
    const BubbleIdentity b;
    const auto res = rearrange(b.phi, b.u, b.lam, 1.0);
    EXPECT_LE(sup_distance(res.phi_star, b.phi), 1e-8);
    EXPECT_LE(res.defect, 1e-10);
    const auto again = rearrange(res.phi_star, b.u, b.lam, 1.0);
    EXPECT_LE(sup_distance(again.phi_star, res.phi_star), 1e-8);
}

TEST(Rearrange, PhiStarIsNonIncreasing) {
    const auto g = Grid2D::disc(1.0, 65);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const auto phi = random_bumps(g, seed);
        const auto u = ScalarField2D::sample(g, [](double x, double) { return 0.3 * x; });
        const auto lam = lambda_from_ball_mass(weighted_mass(u), 1.0);
        const auto res = rearrange(phi, u, lam, 1.0);
        for (std::size_t i = 1; i < res.phi_star.size(); ++i) ASSERT_LE(res.phi_star[i], res.phi_star[i - 1]);
        EXPECT_NEAR(res.phi_star.front(), phi.max(), 1e-12);
        EXPECT_LE(res.defect, 1e-3);
        const auto thresholds = plateau_free_thresholds(distinct_values(phi), 200);
        EXPECT_LE(equimeasurability_defect(res, phi, u, thresholds), 1e-3) << seed;
    }
}

TEST(Rearrange, ParaboloidAgainstAnalyticLevelMasses) {
    // phi = 1 - |y|^2 on B_1 with u constant: {phi > t} = B_sqrt(1-t), mass e^u pi (1 - t)
    const BubbleParam lam(1.0);
    const double c = std::log(ball_mass(lam, 1.0) / pi);
    const auto g = Grid2D::disc(1.0, 129);
    const auto phi = ScalarField2D::sample(g, [](double x, double y) { return 1.0 - x * x - y * y; });
    const auto u = ScalarField2D::sample(g, [&](double, double) { return c; });
    const auto res = rearrange(phi, u, lam, 1.0, {.mass_tolerance = 1e-3});
    const double total = ball_mass(lam, 1.0);
    for (int k = 1; k <= 50; ++k) {
        const double t = 0.02 * k - 0.01;
        double brute = 0.0;
        const auto w = g->weights();
        for (std::size_t q = 0; q < g->size(); ++q) {
            if (w[q] > 0.0 && phi[q] > t) brute += w[q] * std::exp(u[q]);
        }
        // node sums over a disc carry a lattice-count error of order h against the analytic area
        EXPECT_NEAR(target_superlevel_mass(res, t), std::exp(c) * pi * (1.0 - t), 2.0 * g->h() * total) << t;
        EXPECT_NEAR(target_superlevel_mass(res, t) * res.source_mass / total, brute, 1e-3 * total) << t;
    }
}

TEST(Rearrange, Preconditions) {
    const BubbleIdentity b;
    EXPECT_THROW((void)rearrange(b.phi, b.u, BubbleParam(1.1), 1.0), PreconditionFailed);
    const auto g = Grid2D::disc(1.0, 33);
    const auto tilted = ScalarField2D::sample(g, [](double x, double) { return x; });
    const auto u = ScalarField2D::sample(g, [](double, double) { return 0.0; });
    EXPECT_THROW((void)rearrange(tilted, u, lambda_from_ball_mass(weighted_mass(u), 1.0), 1.0),
                 PreconditionFailed);
    EXPECT_THROW((void)rearrange(b.phi, b.u, b.lam, -1.0), InvalidArgument);
}

TEST(Lipschitz, BubbleIdentityMatchesAnalyticSlope) {
    const BubbleIdentity b;
    const auto res = rearrange(b.phi, b.u, b.lam, 1.0);
    const double eps = 0.05;
    double analytic = 0.0;
    for (double r = eps; r <= 1.0 - eps; r += 1e-4) analytic = std::max(analytic, std::abs(bubble_slope(b.lam, r)));
    EXPECT_NEAR(lipschitz_diagnostic(res, eps), analytic, 0.05 * analytic);
    EXPECT_THROW((void)lipschitz_diagnostic(res, 0.6), InvalidArgument);
}

TEST(Lipschitz, ScalesWithInputGradient) {
    const auto g = Grid2D::disc(1.0, 65);
    const auto phi = random_bumps(g, 11);
    std::vector<double> steep(phi.values().begin(), phi.values().end());
    for (double& v : steep) v *= 4.0;
    const ScalarField2D phi4(g, steep);
    const auto u = ScalarField2D::sample(g, [](double, double) { return 0.0; });
    const auto lam = lambda_from_ball_mass(weighted_mass(u), 1.0);
    const double l1 = lipschitz_diagnostic(rearrange(phi, u, lam, 1.0), 0.1);
    const double l4 = lipschitz_diagnostic(rearrange(phi4, u, lam, 1.0), 0.1);
    EXPECT_TRUE(std::isfinite(l4));
    EXPECT_NEAR(l4 / l1, 4.0, 0.2);
}

TEST(GradientComparison, EqualityForBubbleIdentity) {
    const BubbleIdentity b;
    const auto res = rearrange(b.phi, b.u, b.lam, 1.0);
    for (double r : {0.2, 0.5, 0.8}) {
        const double t = b.phi.at(r) + 1e-9;
        const auto fc = gradient_comparison(b.phi, b.u, res, t);
        EXPECT_NEAR(fc.source_flux, fc.target_flux, 1e-4 * fc.source_flux) << r;
    }
}

TEST(GradientComparison, StrictForStrictSupersolution) {
    // u solves Delta u + e^u = f with a positive bump f, so Delta u + e^u > 0
    const auto mesh = RadialMesh::uniform(0.0, 1.0, 4096);
    const auto f = Coefficient::radial([](double r) { return 0.5 * std::exp(-r * r / 0.1); }, "bump");
    const auto u = integrate_radial_ivp(mesh, Coefficient::constant(1.0), f, 0.0);
    const auto phi = RadialField::sample(mesh, [&](double r) { return u.at(r) - u.back(); });
    ASSERT_TRUE(detail::strictly_decreasing(phi));
    const auto lam = lambda_from_ball_mass(cumulative_mass_gauss(u).back(), 1.0);
    const auto res = rearrange(phi, u, lam, 1.0);
    for (double r : {0.3, 0.5, 0.7}) {
        const double t = phi.at(r) + 1e-9;
        const auto fc = gradient_comparison(phi, u, res, t);
        EXPECT_GT(fc.source_flux - fc.target_flux, 1e-4 * fc.source_flux) << r;
    }
}

TEST(GradientComparison, FluxesVanishNearTheMaximum) {
    const BubbleIdentity b;
    const auto res = rearrange(b.phi, b.u, b.lam, 1.0);
    const double t = b.phi.max() - 1e-8;
    const auto fc = gradient_comparison(b.phi, b.u, res, t);
    EXPECT_LT(fc.source_flux, 1e-6);
    EXPECT_LT(fc.target_flux, 1e-6);
}

TEST(GradientComparison, PlateauRejected) {
    const auto mesh = RadialMesh::uniform(0.0, 1.0, 64);
    const auto phi = RadialField::sample(mesh, [](double r) { return r < 0.5 ? 1.0 : 2.0 * (1.0 - r); });
    const auto u = RadialField::sample(mesh, [](double) { return std::log(8.0 / 9.0); });
    const auto res = rearrange(phi, u, BubbleParam(1.0), 1.0, {.mass_tolerance = 1e-3});
    EXPECT_THROW((void)gradient_comparison(phi, u, res, 1.0), InvalidArgument);
}

TEST(Supersolution, AssemblesBubblePlusPhiStar) {
    const auto mesh = RadialMesh::uniform(0.0, 1.0, 128);
    const auto u = RadialField::sample(mesh, [](double) { return std::log(8.0 / 9.0); });
    for (double c : {0.0, 0.4}) {
        const auto phi = RadialField::sample(mesh, [&](double) { return c; });
        const auto res = rearrange(phi, u, BubbleParam(1.0), 1.0, {.mass_tolerance = 1e-3});
        const auto psi = supersolution_assemble(res);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            EXPECT_NEAR(psi[i], bubble_value(BubbleParam(1.0), psi.mesh()[i]) + c, 1e-14);
        }
    }
    const BubbleIdentity b;
    const auto psi = supersolution_assemble(rearrange(b.phi, b.u, b.lam, 1.0));
    for (std::size_t i = 1; i < psi.size(); ++i) ASSERT_LT(psi[i], psi[i - 1]);
}

}  // namespace

namespace {

TEST(GradientComparison, GridFieldHoldsAtMostInteriorLevels) {
    const auto g = mfl::Grid2D::disc(1.0, 129);
    const auto phi = random_bumps(g, 5);
    const auto u = mfl::ScalarField2D::sample(g, [](double x, double) { return 0.3 * x; });
    const auto lam = mfl::lambda_from_ball_mass(mfl::weighted_mass(u), 1.0);
    const auto res = mfl::rearrange(phi, u, lam, 1.0);
    const auto th = mfl::interior_thresholds(phi, 200);
    ASSERT_GE(th.size(), 150u);
    std::size_t hold = 0;
    for (double t : th) {
        const auto fc = mfl::gradient_comparison(phi, u, res, t);
        if (fc.source_flux >= fc.target_flux * (1.0 - g->h())) ++hold;
    }
    EXPECT_GE(static_cast<double>(hold), 0.95 * static_cast<double>(th.size()));
}

}  // namespace
