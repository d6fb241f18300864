#pragma once

// Closed-form quantities of the standard bubble family
//
//   U_lambda(r) = -2 ln(1 + lambda^2 r^2 / 8) + 2 ln(lambda),
//
// the radial solutions of  Delta U + e^U = 0  on the plane with total mass 8*pi.
// Nothing in this header integrates numerically; quadrature-based cross checks
// live in the tests.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "mfl/error.hpp"

namespace mfl {

inline constexpr double pi = std::numbers::pi;
inline constexpr double critical_mass = 8.0 * std::numbers::pi;

/// Scale parameter lambda > 0 of one bubble.
class BubbleParam {
public:
    explicit BubbleParam(double lambda) : lambda_(lambda) {
        if (!std::isfinite(lambda) || lambda <= 0.0) {
            throw InvalidArgument("bubble scale must be finite and positive, got " +
                                  std::to_string(lambda));
        }
    }

    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double lambda_sq() const noexcept { return lambda_ * lambda_; }

    friend bool operator==(const BubbleParam&, const BubbleParam&) = default;

private:
    double lambda_;
};

/// Both roots of x^2 - 8 pi x + 2 beta = 0, sorted.
struct MassPair {
    double m1;
    double m2;
};

/// Result of looking up the second bubble that agrees with a given one on a circle.
struct ConjugateScale {
    BubbleParam param;
    bool self_conjugate;
};

namespace detail {

inline void require_radius(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw InvalidArgument("radius must be finite and nonnegative, got " + std::to_string(r));
    }
}

// lambda^2 r^2 / 8
inline double scaled_radius_sq(BubbleParam p, double r) { return p.lambda_sq() * r * r / 8.0; }

}  // namespace detail

/// U_lambda(r).
inline double bubble_value(BubbleParam p, double r) {
    detail::require_radius(r);
    return -2.0 * std::log1p(detail::scaled_radius_sq(p, r)) + 2.0 * std::log(p.lambda());
}

/// e^{U_lambda(r)} = lambda^2 / (1 + lambda^2 r^2 / 8)^2, without the exp/log round trip.
inline double bubble_density(BubbleParam p, double r) {
    detail::require_radius(r);
    const double q = 1.0 + detail::scaled_radius_sq(p, r);
    return p.lambda_sq() / (q * q);
}

/// dU_lambda/dr, always <= 0.
inline double bubble_slope(BubbleParam p, double r) {
    detail::require_radius(r);
    return -(p.lambda_sq() * r / 2.0) / (1.0 + detail::scaled_radius_sq(p, r));
}

/// d^2 U_lambda / dr^2.
inline double bubble_curvature(BubbleParam p, double r) {
    detail::require_radius(r);
    const double l2 = p.lambda_sq();
    const double q = 1.0 + detail::scaled_radius_sq(p, r);
    // d/dr [ -(l2 r / 2) / q ] with dq/dr = l2 r / 4
    return -(l2 / 2.0) / q + (l2 * r / 2.0) * (l2 * r / 4.0) / (q * q);
}

/// Mass of the bubble inside the ball B_r: 8 pi lambda^2 r^2 / (8 + lambda^2 r^2).
inline double ball_mass(BubbleParam p, double r) {
    detail::require_radius(r);
    const double x = p.lambda_sq() * r * r;
    if (std::isinf(x)) return critical_mass;
    return critical_mass * x / (8.0 + x);
}

/// Radius of the ball carrying bubble mass m:  r^2 = 8 m / (lambda^2 (8 pi - m)).
inline double ball_radius(BubbleParam p, double m) {
    if (!(m >= 0.0) || !(m < critical_mass)) throw InvalidArgument("ball mass must lie in [0, 8 pi)");
    return std::sqrt(8.0 * m / (p.lambda_sq() * (critical_mass - m)));
}

/// Mass of the bubble outside B_r: 64 pi / (8 + lambda^2 r^2).
inline double exterior_mass(BubbleParam p, double r) {
    detail::require_radius(r);
    const double x = p.lambda_sq() * r * r;
    return 8.0 * critical_mass / (8.0 + x);
}

/// Integral of e^{U_lambda / 2} over the circle of radius r: 2 pi r lambda / (1 + lambda^2 r^2 / 8).
inline double boundary_weight(BubbleParam p, double r) {
    detail::require_radius(r);
    return 2.0 * pi * r * p.lambda() / (1.0 + detail::scaled_radius_sq(p, r));
}

/// Flux of |grad U_lambda| through the circle of radius r. Equals ball_mass analytically.
inline double bubble_flux(BubbleParam p, double r) {
    return 2.0 * pi * r * std::abs(bubble_slope(p, r));
}

/// Masses above this are treated as critical by lambda_from_ball_mass.
inline constexpr double default_critical_margin = 1e-9;

/// The unique lambda with ball_mass(lambda, R) = m:  lambda^2 = 8 m / ((8 pi - m) R^2).
inline BubbleParam lambda_from_ball_mass(double m, double R,
                                         double critical_margin = default_critical_margin) {
    if (!std::isfinite(R) || R <= 0.0) {
        throw InvalidArgument("ball radius must be finite and positive");
    }
    if (!std::isfinite(m) || m <= 0.0) {
        throw InvalidArgument("ball mass must be positive, got " + std::to_string(m));
    }
    if (m > critical_mass - critical_margin) {
        throw CriticalMassError("ball mass " + std::to_string(m) +
                                " is at or beyond the critical mass 8*pi");
    }
    const double lsq = 8.0 * m / ((critical_mass - m) * R * R);
    if (!std::isfinite(lsq) || lsq <= 0.0) {
        throw CriticalMassError("bubble scale overflow for mass " + std::to_string(m));
    }
    return BubbleParam(std::sqrt(lsq));
}

/// Roots of x^2 - 8 pi x + 2 beta = 0.
///
/// The larger root is formed without cancellation and the smaller one from the
/// product of roots, so tiny beta keeps full relative accuracy in m1.
inline MassPair mass_roots(double beta) {
    if (!std::isfinite(beta) || beta < 0.0) {
        throw InvalidArgument("beta must be finite and nonnegative");
    }
    const double b = -critical_mass;
    const double c = 2.0 * beta;
    double disc = b * b - 4.0 * c;
    if (disc < 0.0) {
        // Allow rounding noise at the double root beta = 8 pi^2.
        if (disc > -1e-12 * b * b) {
            disc = 0.0;
        } else {
            throw InvalidArgument("beta exceeds 8 pi^2: boundary weight inconsistent with any bubble");
        }
    }
    const double q = -0.5 * (b - std::sqrt(disc));  // b < 0, so sign(b) = -1
    const double big = q;
    const double small = c / q;
    return {std::min(small, big), std::max(small, big)};
}

/// The other bubble that takes the same value as U_lambda on the circle |y| = r0: lambda' = 8 / (lambda r0^2).
inline ConjugateScale conjugate_lambda(BubbleParam p, double r0) {
    if (!std::isfinite(r0) || r0 <= 0.0) {
        throw InvalidArgument("conjugate radius must be finite and positive");
    }
    const double other = 8.0 / (p.lambda() * r0 * r0);
    const bool self = std::abs(p.lambda_sq() * r0 * r0 - 8.0) <= 8.0 * 1e-14;
    return {BubbleParam(self ? p.lambda() : other), self};
}

}  // namespace mfl
