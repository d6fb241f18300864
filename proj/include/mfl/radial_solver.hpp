#pragma once

// Radial solutions by shooting.  Everything is integrated in the variable w = u + c,
// where e^c is the mean-field normalization, so that  w'' + w'/r + K e^w = f  and the
// mean-field constraint becomes  integral(K e^w) = rho.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "mfl/bubble.hpp"
#include "mfl/problem.hpp"

namespace mfl {

namespace detail {

/// Shooting state at the last node and its sensitivities to the two launch parameters:
/// a = w(inner) and b = r w'(inner) (b is fixed to 0 on discs).
struct ShotEnd {
    double w = 0.0, m = 0.0, mass = 0.0;
    double w_a = 0.0, m_a = 0.0, mass_a = 0.0;
    double w_b = 0.0, m_b = 0.0, mass_b = 0.0;
    bool finite = true;
};

class Shooter {
public:
    Shooter(RadialMesh mesh, const Coefficient& weight, const Coefficient& source) : mesh_(std::move(mesh)) {
        const std::size_t n = mesh_.size();
        kn_.resize(n);
        fn_.resize(n);
        km_.resize(n - 1);
        fm_.resize(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            kn_[i] = weight.at_radius(mesh_[i]);
            fn_[i] = source.at_radius(mesh_[i]);
            if (!(kn_[i] > 0.0)) throw InvalidArgument("weight K must be positive");
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double r = 0.5 * (mesh_[i] + mesh_[i + 1]);
            km_[i] = weight.at_radius(r);
            fm_[i] = source.at_radius(r);
        }
    }

    [[nodiscard]] const RadialMesh& mesh() const noexcept { return mesh_; }
    [[nodiscard]] double weight_at_origin() const { return kn_.front(); }

    /// Largest launch value a for which the concentration scale near the origin is still resolved.
    [[nodiscard]] double max_center_value() const {
        const double h1 = mesh_[1] - mesh_[0];
        return 2.0 * std::log(std::sqrt(8.0 / kn_.front()) / (8.0 * h1));
    }

    ShotEnd shoot(double a, double b, std::vector<double>* profile = nullptr) const {
        using State = std::array<double, 9>;
        const std::size_t n = mesh_.size();
        State y{};
        std::size_t start = 0;
        if (mesh_.is_disc()) {
            const double r1 = mesh_[1];
            const double ke = kn_[0] * std::exp(a);
            const double g0 = fn_[0] - ke;
            y = {a + 0.25 * g0 * r1 * r1, 0.5 * g0 * r1 * r1, pi * r1 * r1 * ke,
                 1.0 - 0.25 * ke * r1 * r1, -0.5 * ke * r1 * r1, pi * r1 * r1 * ke,
                 0.0, 0.0, 0.0};
            if (profile) {
                profile->assign(n, 0.0);
                (*profile)[0] = a;
                (*profile)[1] = y[0];
            }
            start = 1;
        } else {
            y = {a, b, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
            if (profile) {
                profile->assign(n, 0.0);
                (*profile)[0] = a;
            }
        }
        auto rhs = [](double r, double k, double f, const State& s) {
            const double ke = k * std::exp(s[0]);
            State d{};
            d[0] = s[1] / r;
            d[1] = r * (f - ke);
            d[2] = 2.0 * pi * r * ke;
            d[3] = s[4] / r;
            d[4] = -r * ke * s[3];
            d[5] = 2.0 * pi * r * ke * s[3];
            d[6] = s[7] / r;
            d[7] = -r * ke * s[6];
            d[8] = 2.0 * pi * r * ke * s[6];
            return d;
        };
        auto axpy = [](const State& s, double c, const State& d) {
            State o;
            for (std::size_t q = 0; q < o.size(); ++q) o[q] = s[q] + c * d[q];
            return o;
        };
        ShotEnd end;
        for (std::size_t i = start; i + 1 < n; ++i) {
            const double r0 = mesh_[i], h = mesh_[i + 1] - r0;
            const State k1 = rhs(r0, kn_[i], fn_[i], y);
            const State k2 = rhs(r0 + 0.5 * h, km_[i], fm_[i], axpy(y, 0.5 * h, k1));
            const State k3 = rhs(r0 + 0.5 * h, km_[i], fm_[i], axpy(y, 0.5 * h, k2));
            const State k4 = rhs(r0 + h, kn_[i + 1], fn_[i + 1], axpy(y, h, k3));
            for (std::size_t q = 0; q < y.size(); ++q) y[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
            if (!std::isfinite(y[0]) || !std::isfinite(y[2])) {
                end.finite = false;
                return end;
            }
            if (profile) (*profile)[i + 1] = y[0];
        }
        end = {y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7], y[8], true};
        for (double v : y) end.finite = end.finite && std::isfinite(v);
        return end;
    }

private:
    RadialMesh mesh_;
    std::vector<double> kn_, fn_, km_, fm_;
};

/// Bracket a sign change of fn scanning from x0 in steps that grow geometrically.
/// Scans upward if up is true.  Gives up past limit or once fn turns back (a fold).
template <class Fn>
std::optional<std::pair<double, double>> scan_for_root(Fn&& fn, double x0, bool up, double limit) {
    double step = 0.25;
    double x = x0;
    std::optional<double> fx = fn(x);
    if (!fx) return std::nullopt;
    const double sign = *fx;
    double prev = *fx;
    bool turning = false;
    for (int iter = 0; iter < 200; ++iter) {
        const double xn = up ? x + step : x - step;
        if ((up && xn > limit) || (!up && xn < limit)) return std::nullopt;
        const auto fn_x = fn(xn);
        if (!fn_x) return std::nullopt;
        if ((*fn_x > 0.0) != (sign > 0.0) || *fn_x == 0.0) {
            return up ? std::make_pair(x, xn) : std::make_pair(xn, x);
        }
        // moving away from zero after approaching it: the curve has folded back
        const bool away = std::abs(*fn_x) > std::abs(prev);
        if (away && turning) return std::nullopt;
        turning = std::abs(*fn_x) < std::abs(prev) || turning;
        prev = *fn_x;
        x = xn;
        step = std::min(step * 1.5, 2.0);
    }
    return std::nullopt;
}

inline double trapezoid_mass(const RadialField& u, const Coefficient& weight) {
    const auto w = u.mesh().area_weights();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * weight.at_radius(u.mesh()[i]) * std::exp(u[i]);
    return s;
}

}  // namespace detail

using RadialReport = SolveReport<RadialField>;

/// Solution of the initial value problem  w'' + w'/r + K e^w = f,  w(0) = center, w'(0) = 0.
inline RadialField integrate_radial_ivp(const RadialMesh& mesh, const Coefficient& weight, const Coefficient& source,
                                        double center) {
    if (!mesh.is_disc()) throw InvalidArgument("the initial value problem starts at the origin");
    detail::Shooter shooter(mesh, weight, source);
    std::vector<double> w;
    const auto end = shooter.shoot(center, 0.0, &w);
    if (!end.finite) throw Error("initial value problem blew up before the outer radius");
    return RadialField(mesh, std::move(w));
}

namespace detail {

inline RadialReport finish_radial(const ProblemSpec& spec, const Shooter& shooter, double a, double b,
                                  double mismatch, int iterations) {
    RadialReport rep;
    std::vector<double> w;
    const auto end = shooter.shoot(a, b, &w);
    rep.iterations = iterations;
    rep.residual_norm = mismatch;
    if (!end.finite) {
        rep.status = SolveStatus::diverged;
        rep.message = "shot blew up";
        return rep;
    }
    const double edge = spec.shape == DomainShape::disc ? w.back() : w.front();
    const double c = spec.mode == EquationMode::mean_field ? edge - spec.boundary_value : 0.0;
    for (double& v : w) v -= c;
    rep.normalization = std::exp(c);
    rep.mass = end.mass / rep.normalization;
    rep.solution = RadialField(shooter.mesh(), std::move(w));
    rep.status = mismatch <= spec.options.radial_tolerance ? SolveStatus::converged : SolveStatus::diverged;
    if (rep.status != SolveStatus::converged) rep.message = "shooting mismatch above tolerance";
    return rep;
}

inline std::string radial_branch(const ProblemSpec& spec) {
    if (spec.mode == EquationMode::liouville) return "liouville-minimal";
    return spec.rho >= critical_mass ? "supercritical-attempt" : "mean-field";
}

inline RadialReport disc_shoot(const ProblemSpec& spec, const Shooter& shooter) {
    const bool mf = spec.mode == EquationMode::mean_field;
    const double a_max = shooter.max_center_value();
    int evaluations = 0;
    auto mismatch = [&](double a) -> std::optional<double> {
        ++evaluations;
        const auto end = shooter.shoot(a, 0.0);
        if (!end.finite) return std::nullopt;
        return mf ? (end.mass - spec.rho) / spec.rho : end.w - spec.boundary_value;
    };
    double a0;
    if (mf) {
        double total = 0.0;
        const auto aw = shooter.mesh().area_weights();
        for (std::size_t i = 0; i < aw.size(); ++i) total += aw[i] * spec.weight.at_radius(shooter.mesh()[i]);
        a0 = std::log(spec.rho / total);
    } else {
        a0 = spec.boundary_value - 1.0;
    }
    a0 = std::min(a0, a_max - 1.0);
    auto f0 = mismatch(a0);
    // the mismatch is negative for very negative launch values; move there first
    for (int k = 0; f0 && *f0 > 0.0 && k < 60; ++k) {
        a0 -= std::pow(2.0, k);
        f0 = mismatch(a0);
    }
    RadialReport fail;
    fail.branch = radial_branch(spec);
    if (!f0 || *f0 > 0.0) {
        fail.message = "could not start the shooting scan";
        return fail;
    }
    const auto bracket = scan_for_root([&](double a) { return mismatch(a); }, a0, true, a_max);
    if (!bracket) {
        fail.iterations = evaluations;
        fail.message = mf ? "no launch value reaches the requested mass (unresolved or supercritical)"
                          : "no launch value reaches the boundary value";
        return fail;
    }
    std::uintmax_t max_iter = static_cast<std::uintmax_t>(spec.options.max_iterations) * 4;
    auto root_fn = [&](double a) {
        auto v = mismatch(a);
        return v ? *v : 1.0;
    };
    auto [lo, hi] = boost::math::tools::toms748_solve(root_fn, bracket->first, bracket->second,
                                                      boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double fl = std::abs(root_fn(lo)), fh = std::abs(root_fn(hi));
    const double a = fl <= fh ? lo : hi;
    auto rep = finish_radial(spec, shooter, a, 0.0, std::min(fl, fh), evaluations);
    rep.branch = radial_branch(spec);
    return rep;
}

inline RadialReport annulus_liouville(const ProblemSpec& spec, const Shooter& shooter) {
    int evaluations = 0;
    const double a = spec.boundary_value;
    auto mismatch = [&](double b) -> std::optional<double> {
        ++evaluations;
        const auto end = shooter.shoot(a, b);
        if (!end.finite) return std::nullopt;
        return end.w - spec.boundary_value;
    };
    double b0 = 0.0;
    auto f0 = mismatch(b0);
    for (int k = 0; f0 && *f0 > 0.0 && k < 60; ++k) {
        b0 -= std::pow(2.0, k);
        f0 = mismatch(b0);
    }
    RadialReport fail;
    fail.branch = radial_branch(spec);
    if (!f0 || *f0 > 0.0) {
        fail.message = "could not start the shooting scan";
        return fail;
    }
    const auto bracket = scan_for_root([&](double b) { return mismatch(b); }, b0, true, 1e6);
    if (!bracket) {
        fail.iterations = evaluations;
        fail.message = "no launch slope reaches the boundary value";
        return fail;
    }
    auto root_fn = [&](double b) {
        auto v = mismatch(b);
        return v ? *v : 1.0;
    };
    std::uintmax_t max_iter = static_cast<std::uintmax_t>(spec.options.max_iterations) * 4;
    auto [lo, hi] = boost::math::tools::toms748_solve(root_fn, bracket->first, bracket->second,
                                                      boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double fl = std::abs(root_fn(lo)), fh = std::abs(root_fn(hi));
    auto rep = finish_radial(spec, shooter, a, fl <= fh ? lo : hi, std::min(fl, fh), evaluations);
    rep.branch = radial_branch(spec);
    return rep;
}

/// Two-parameter Newton: w(outer) = w(inner) and integral(K e^w) = rho.
inline std::optional<std::array<double, 2>> annulus_newton(const ProblemSpec& spec, const Shooter& shooter,
                                                           double rho, std::array<double, 2> x, int& iterations,
                                                           double& mismatch) {
    auto eval = [&](const std::array<double, 2>& p, ShotEnd& e) {
        e = shooter.shoot(p[0], p[1]);
        if (!e.finite) return std::numeric_limits<double>::infinity();
        return std::max(std::abs(e.w - p[0]), std::abs(e.mass - rho) / rho);
    };
    ShotEnd e;
    double norm = eval(x, e);
    for (int it = 0; it < spec.options.max_iterations; ++it) {
        if (!std::isfinite(norm)) return std::nullopt;
        if (norm <= 0.1 * spec.options.radial_tolerance) break;
        ++iterations;
        const double f1 = e.w - x[0], f2 = (e.mass - rho) / rho;
        const double j11 = e.w_a - 1.0, j12 = e.w_b;
        const double j21 = e.mass_a / rho, j22 = e.mass_b / rho;
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 1e-300)) return std::nullopt;
        const double da = -(f1 * j22 - j12 * f2) / det;
        const double db = -(j11 * f2 - j21 * f1) / det;
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k <= spec.options.max_halvings; ++k, step *= 0.5) {
            const std::array<double, 2> trial{x[0] + step * da, x[1] + step * db};
            ShotEnd et;
            const double nt = eval(trial, et);
            if (nt < norm) {
                x = trial;
                e = et;
                norm = nt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    mismatch = norm;
    if (!(norm <= spec.options.radial_tolerance)) return std::nullopt;
    return x;
}

inline RadialReport annulus_mean_field(const ProblemSpec& spec, const Shooter& shooter) {
    const double area = pi * (spec.outer_radius * spec.outer_radius - spec.inner_radius * spec.inner_radius);
    int iterations = 0;
    double mismatch = INFINITY;
    std::array<double, 2> x{std::log(spec.rho / area), 0.0};
    auto direct = annulus_newton(spec, shooter, spec.rho, x, iterations, mismatch);
    // continuation in rho from a small mass when the direct attempt fails
    for (int steps : {8, 32, 128}) {
        if (direct) break;
        std::array<double, 2> y{std::log(spec.rho / (steps * area)), 0.0};
        std::optional<std::array<double, 2>> cur = y;
        for (int s = 1; s <= steps && cur; ++s) {
            cur = annulus_newton(spec, shooter, spec.rho * s / steps, *cur, iterations, mismatch);
        }
        direct = cur;
    }
    RadialReport rep;
    if (direct) {
        rep = finish_radial(spec, shooter, (*direct)[0], (*direct)[1], mismatch, iterations);
    } else {
        rep.iterations = iterations;
        rep.residual_norm = mismatch;
        rep.message = "two-parameter shooting did not converge";
    }
    rep.branch = radial_branch(spec);
    return rep;
}

}  // namespace detail

/// Radially symmetric solve on a disc or annulus with radial K and f and constant g.
inline RadialReport solve_radial(const ProblemSpec& spec) {
    spec.validate();
    if (!spec.weight.is_radial() || !spec.source.is_radial()) {
        throw InvalidArgument("radial solve needs radial K and f");
    }
    detail::Shooter shooter(spec.radial_mesh(), spec.weight, spec.source);
    if (spec.shape == DomainShape::disc) return detail::disc_shoot(spec, shooter);
    if (spec.mode == EquationMode::liouville) return detail::annulus_liouville(spec, shooter);
    return detail::annulus_mean_field(spec, shooter);
}

/// Max-norm of the finite-difference residual of a radial field (conservative three-point
/// stencil, 4(u1-u0)/h^2 at the origin, trapezoid normalization), over nodes not on the boundary.
inline double residual(const ProblemSpec& spec, const RadialField& u) {
    const auto& mesh = u.mesh();
    const std::size_t n = mesh.size();
    double scale = 1.0;
    if (spec.mode == EquationMode::mean_field) scale = spec.rho / detail::trapezoid_mass(u, spec.weight);
    double worst = 0.0;
    auto term = [&](std::size_t i, double lap) {
        const double r = mesh[i];
        const double res = lap + scale * spec.weight.at_radius(r) * std::exp(u[i]) - spec.source.at_radius(r);
        worst = std::max(worst, std::abs(res));
    };
    if (mesh.is_disc()) {
        const double h = mesh[1];
        term(0, 4.0 * (u[1] - u[0]) / (h * h));
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = mesh[i] - mesh[i - 1], hp = mesh[i + 1] - mesh[i];
        const double rm = 0.5 * (mesh[i] + mesh[i - 1]), rp = 0.5 * (mesh[i + 1] + mesh[i]);
        const double flux = rp * (u[i + 1] - u[i]) / hp - rm * (u[i] - u[i - 1]) / hm;
        term(i, flux / (mesh[i] * 0.5 * (hp + hm)));
    }
    return worst;
}

/// Mean-field disc solution for K = 1, f = 0, g = 0:  U_lambda(r) - U_lambda(R), lambda^2 = 8 rho / ((8 pi - rho) R^2).
inline double exact_disc_solution(double rho, double R, double r) {
    const BubbleParam p(lambda_from_ball_mass(rho, R));
    return bubble_value(p, r) - bubble_value(p, R);
}

}  // namespace mfl
