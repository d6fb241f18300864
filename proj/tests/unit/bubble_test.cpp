#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "mfl/bubble.hpp"

using namespace mfl;

namespace {

const double sqrt8 = std::sqrt(8.0);

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Independent oracle: adaptive Gauss-Kronrod of 2 pi s lambda^2 / (1 + lambda^2 s^2 / 8)^2.
double quadrature_ball_mass(double lambda, double r) {
    auto f = [lambda](double s) {
        const double q = 1.0 + lambda * lambda * s * s / 8.0;
        return 2.0 * pi * s * lambda * lambda / (q * q);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, r, 15, 1e-14);
}

}  // namespace

TEST(Bubble, ValueExamples) {
    EXPECT_DOUBLE_EQ(bubble_value(BubbleParam(1.0), 0.0), 0.0);
    EXPECT_NEAR(bubble_value(BubbleParam(1.0), 2.0), -2.0 * std::log(1.5), 1e-15);
    EXPECT_NEAR(bubble_value(BubbleParam(1.0), 2.0), -0.8109302162163288, 1e-15);
    EXPECT_NEAR(bubble_value(BubbleParam(2.0), 2.0), -2.0 * std::log(1.5), 1e-15);
}

TEST(Bubble, RejectsBadScale) {
    EXPECT_THROW(BubbleParam(0.0), InvalidArgument);
    EXPECT_THROW(BubbleParam(-1.0), InvalidArgument);
    EXPECT_THROW(BubbleParam{std::nan("")}, InvalidArgument);
    EXPECT_THROW(BubbleParam{std::numeric_limits<double>::infinity()}, InvalidArgument);
    EXPECT_THROW(bubble_value(BubbleParam(1.0), -0.1), InvalidArgument);
}

TEST(Bubble, DensityExamples) {
    EXPECT_DOUBLE_EQ(bubble_density(BubbleParam(1.0), 0.0), 1.0);
    EXPECT_NEAR(bubble_density(BubbleParam(1.0), sqrt8), 0.25, 1e-16);
    EXPECT_DOUBLE_EQ(bubble_density(BubbleParam(3.0), 0.0), 9.0);
}

TEST(Bubble, BallAndExteriorMassExamples) {
    EXPECT_NEAR(ball_mass(BubbleParam(sqrt8), 1.0), 4.0 * pi, 1e-14);
    EXPECT_NEAR(quadrature_ball_mass(sqrt8, 1.0), 4.0 * pi, 1e-12);
    EXPECT_EQ(ball_mass(BubbleParam(1.7), 0.0), 0.0);
    EXPECT_NEAR(ball_mass(BubbleParam(1.0), 1e9), critical_mass, 1e-9);

    EXPECT_NEAR(exterior_mass(BubbleParam(sqrt8), 1.0), 4.0 * pi, 1e-14);
    EXPECT_DOUBLE_EQ(exterior_mass(BubbleParam(0.3), 0.0), critical_mass);
    EXPECT_NEAR(exterior_mass(BubbleParam(1.0), 4.0), critical_mass / 3.0, 1e-14);
}

TEST(Bubble, BoundaryWeightExamples) {
    const double w = boundary_weight(BubbleParam(sqrt8), 1.0);
    EXPECT_NEAR(w, sqrt8 * pi, 1e-14);
    EXPECT_NEAR(w * w, 8.0 * pi * pi, 1e-12);
    EXPECT_NEAR(boundary_weight(BubbleParam(1.0), 1e-9) / (2.0 * pi * 1e-9), 1.0, 1e-12);
    EXPECT_NEAR(boundary_weight(BubbleParam(1.0), sqrt8), sqrt8 * pi, 1e-14);
}

TEST(Bubble, LambdaFromBallMass) {
    EXPECT_NEAR(lambda_from_ball_mass(4.0 * pi, 1.0).lambda(), sqrt8, 1e-14);
    EXPECT_NEAR(lambda_from_ball_mass(4.0 * pi, 2.0).lambda(), std::sqrt(2.0), 1e-14);
    EXPECT_THROW(lambda_from_ball_mass(critical_mass, 1.0), CriticalMassError);
    EXPECT_THROW(lambda_from_ball_mass(critical_mass - 1e-12, 1.0), CriticalMassError);
    EXPECT_THROW(lambda_from_ball_mass(critical_mass + 1.0, 1.0), CriticalMassError);
    EXPECT_THROW(lambda_from_ball_mass(0.0, 1.0), InvalidArgument);
    EXPECT_THROW(lambda_from_ball_mass(1.0, 0.0), InvalidArgument);
    // Large but finite scale just under the margin.
    const auto p = lambda_from_ball_mass(critical_mass - 1e-6, 1.0);
    EXPECT_TRUE(std::isfinite(p.lambda()));
    EXPECT_LT(rel(ball_mass(p, 1.0), critical_mass - 1e-6), 1e-12);
    // Configurable margin.
    EXPECT_NO_THROW(lambda_from_ball_mass(critical_mass - 1e-12, 1.0, 1e-13));
}

TEST(Bubble, MassRootsExamples) {
    const auto a = mass_roots(0.0);
    EXPECT_EQ(a.m1, 0.0);
    EXPECT_NEAR(a.m2, critical_mass, 1e-14);
    const auto b = mass_roots(8.0 * pi * pi);
    EXPECT_NEAR(b.m1, 4.0 * pi, 1e-12);
    EXPECT_NEAR(b.m2, 4.0 * pi, 1e-12);
    const auto c = mass_roots(6.0 * pi * pi);
    EXPECT_NEAR(c.m1, 2.0 * pi, 1e-13);
    EXPECT_NEAR(c.m2, 6.0 * pi, 1e-13);
    EXPECT_THROW(mass_roots(8.0 * pi * pi * (1.0 + 1e-6)), InvalidArgument);
    EXPECT_THROW(mass_roots(-1.0), InvalidArgument);
}

TEST(Bubble, MassRootsStableForTinyBeta) {
    const double beta = 1e-20;
    const auto r = mass_roots(beta);
    // Smaller root ~ 2 beta / (8 pi); naive formula would return 0 here.
    EXPECT_LT(rel(r.m1, 2.0 * beta / critical_mass), 1e-12);
}

TEST(Bubble, ConjugateLambda) {
    const auto a = conjugate_lambda(BubbleParam(1.0), 2.0);
    EXPECT_FALSE(a.self_conjugate);
    EXPECT_NEAR(a.param.lambda(), 2.0, 1e-15);
    EXPECT_NEAR(bubble_value(a.param, 2.0), -2.0 * std::log(1.5), 1e-14);
    EXPECT_NEAR(bubble_value(BubbleParam(1.0), 2.0), -2.0 * std::log(1.5), 1e-14);

    const auto b = conjugate_lambda(BubbleParam(sqrt8), 1.0);
    EXPECT_TRUE(b.self_conjugate);
    EXPECT_NEAR(b.param.lambda(), sqrt8, 1e-15);

    const auto c = conjugate_lambda(BubbleParam(4.0), 1.0);
    EXPECT_NEAR(c.param.lambda(), 2.0, 1e-15);
    EXPECT_NEAR(bubble_value(c.param, 1.0), bubble_value(BubbleParam(4.0), 1.0), 1e-14);
}

// Property checks over random (lambda, r) samples.
class BubbleProperties : public ::testing::Test {
protected:
    std::mt19937_64 rng{20240611};
    std::uniform_real_distribution<double> log_scale{-3.0, 3.0};

    double draw() { return std::exp(log_scale(rng)); }
};

TEST_F(BubbleProperties, FluxEqualsBallMass) {
    for (int k = 0; k < 1000; ++k) {
        const BubbleParam p(draw());
        const double r = draw();
        EXPECT_LE(rel(bubble_flux(p, r), ball_mass(p, r)), 1e-12);
    }
}

TEST_F(BubbleProperties, BolEquality) {
    for (int k = 0; k < 1000; ++k) {
        const BubbleParam p(draw());
        const double r = draw();
        const double w = boundary_weight(p, r);
        const double m = ball_mass(p, r);
        // 8 pi - m via the closed-form exterior mass; the subtraction cancels when m is near 8 pi.
        EXPECT_LE(rel(w * w, 0.5 * m * exterior_mass(p, r)), 1e-12);
        if (m < 0.9 * critical_mass) {
            EXPECT_LE(rel(w * w, 0.5 * m * (critical_mass - m)), 1e-12);
        }
    }
}

TEST_F(BubbleProperties, LiouvilleResidual) {
    for (int k = 0; k < 1000; ++k) {
        const BubbleParam p(draw());
        const double r = draw();
        const double lap = bubble_curvature(p, r) + bubble_slope(p, r) / r;
        EXPECT_LE(std::abs(lap + bubble_density(p, r)), 1e-10 * std::max(1.0, bubble_density(p, r)));
    }
}

TEST_F(BubbleProperties, DerivativesMatchFiniteDifferences) {
    for (int k = 0; k < 200; ++k) {
        const BubbleParam p(std::exp(0.5 * log_scale(rng)));
        const double r = std::exp(0.5 * log_scale(rng));
        const double h = 1e-4 * r;
        const double fd1 = (bubble_value(p, r + h) - bubble_value(p, r - h)) / (2 * h);
        const double fd2 = (bubble_value(p, r + h) - 2 * bubble_value(p, r) + bubble_value(p, r - h)) / (h * h);
        EXPECT_NEAR(bubble_slope(p, r), fd1, 1e-6 * std::max(1.0, std::abs(fd1)));
        EXPECT_NEAR(bubble_curvature(p, r), fd2, 1e-4 * std::max(1.0, std::abs(fd2)));
        EXPECT_NEAR(std::exp(bubble_value(p, r)), bubble_density(p, r), 1e-13 * bubble_density(p, r));
    }
}

TEST_F(BubbleProperties, QuadratureCrossCheck) {
    for (int k = 0; k < 100; ++k) {
        const double lambda = draw();
        const double r = draw();
        EXPECT_LE(rel(quadrature_ball_mass(lambda, r), ball_mass(BubbleParam(lambda), r)), 1e-8);
    }
}

TEST_F(BubbleProperties, MassRootIdentities) {
    for (int k = 0; k < 1000; ++k) {
        const double beta = 8.0 * pi * pi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto r = mass_roots(beta);
        EXPECT_LE(r.m1, r.m2);
        EXPECT_LE(rel(r.m1 + r.m2, critical_mass), 1e-12);
        if (beta > 0) {
            EXPECT_LE(rel(r.m1 * r.m2, 2.0 * beta), 1e-12);
        }
    }
}

TEST_F(BubbleProperties, ConjugateIsInvolution) {
    for (int k = 0; k < 1000; ++k) {
        const BubbleParam p(draw());
        const double r0 = draw();
        const auto once = conjugate_lambda(p, r0);
        const auto twice = conjugate_lambda(once.param, r0);
        EXPECT_LE(rel(twice.param.lambda(), p.lambda()), 1e-14);
        EXPECT_NEAR(bubble_value(once.param, r0), bubble_value(p, r0),
                    1e-13 * std::max(1.0, std::abs(bubble_value(p, r0))));
    }
}

TEST_F(BubbleProperties, BallMassMonotone) {
    for (double lambda : {0.1, 1.0, 3.0, 20.0}) {
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double m = ball_mass(BubbleParam(lambda), 0.05 * i);
            EXPECT_GT(m, prev);
            prev = m;
        }
    }
    for (double r : {0.1, 1.0, 5.0}) {
        double prev = -1.0;
        for (int i = 1; i <= 200; ++i) {
            const double m = ball_mass(BubbleParam(0.05 * i), r);
            EXPECT_GT(m, prev);
            prev = m;
        }
    }
}

TEST_F(BubbleProperties, LambdaInversionRoundTrip) {
    for (int k = 0; k < 1000; ++k) {
        const double m = critical_mass * std::uniform_real_distribution<double>(1e-6, 1.0 - 1e-6)(rng);
        const double R = draw();
        const auto p = lambda_from_ball_mass(m, R);
        EXPECT_LE(rel(ball_mass(p, R), m), 1e-12);
        EXPECT_LE(rel(ball_mass(p, R) + exterior_mass(p, R), critical_mass), 1e-15);
    }
}
