#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mfl/contour.hpp"
#include "mfl/grid_solver.hpp"
#include "mfl/radial_solver.hpp"

namespace mfl {

/// Sum of six random products sin(a x + s) sin(b y + t) with a, b in {1, 2, 3} pi / R,
/// scaled so that its largest magnitude on the active nodes is `amplitude`.
inline ScalarField2D smooth_noise(const GridPtr& grid, std::mt19937_64& rng, double amplitude = 1.0) {
    std::uniform_int_distribution<int> freq(1, 3);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi), coef(-1.0, 1.0);
    struct Mode { double a, b, s, t, c; };
    std::vector<Mode> modes;
    const double k = pi / grid->outer_radius();
    for (int m = 0; m < 6; ++m) {
        const double a = k * freq(rng), b = k * freq(rng);
        modes.push_back({a, b, phase(rng), phase(rng), coef(rng)});
    }
    auto f = ScalarField2D::sample(grid, [&](double x, double y) {
        double v = 0.0;
        for (const auto& md : modes) v += md.c * std::sin(md.a * x + md.s) * std::sin(md.b * y + md.t);
        return v;
    });
    double peak = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q) {
        if (grid->active(q)) peak = std::max(peak, std::abs(f[q]));
    }
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) x *= peak > 0.0 ? amplitude / peak : 0.0;
    return ScalarField2D(grid, std::move(v));
}

/// Largest |a - b| over the active nodes.
inline double sup_distance(const ScalarField2D& a, const ScalarField2D& b) {
    require_same_grid(a, b);
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.grid().active(k)) d = std::max(d, std::abs(a[k] - b[k]));
    }
    return d;
}

struct UniquenessReport {
    double rho = 0.0;
    std::size_t starts = 0;
    std::size_t converged = 0;
    std::vector<std::string> statuses;       ///< per start
    std::vector<int> cluster;                ///< per start; -1 when the start did not converge
    std::vector<double> cluster_u_max;       ///< per distinct solution
    double max_pairwise_distance = 0.0;      ///< over converged starts
    std::size_t distinct = 0;
    double cluster_tolerance = 1e-5;
    std::string diagnostics;
};

/// Solves the grid problem from n_starts seeded random initial fields and clusters the converged
/// solutions by sup-distance.
inline UniquenessReport uniqueness_experiment(const ProblemSpec& spec, std::size_t n_starts, std::uint64_t seed,
                                              double cluster_tolerance = 1e-5) {
    spec.validate();
    if (spec.mode == EquationMode::mean_field && !(spec.rho < critical_mass)) {
        throw InvalidArgument("uniqueness experiments need rho < 8 pi");
    }
    if (n_starts < 2) throw InvalidArgument("uniqueness experiments need at least two starts");
    UniquenessReport rep;
    rep.rho = spec.rho;
    rep.starts = n_starts;
    rep.cluster_tolerance = cluster_tolerance;
    std::mt19937_64 rng(seed);
    const GridPtr grid = spec.grid();
    std::vector<ScalarField2D> sols;
    std::vector<ScalarField2D> reps;
    for (std::size_t s = 0; s < n_starts; ++s) {
        const auto guess = smooth_noise(grid, rng);
        const auto out = solve_2d(spec, guess);
        rep.statuses.push_back(to_string(out.status));
        if (!out.converged()) {
            rep.cluster.push_back(-1);
            rep.diagnostics += "start " + std::to_string(s) + ": " + to_string(out.status) + " " + out.message + "\n";
            continue;
        }
        ++rep.converged;
        const auto& u = out.field();
        for (const auto& other : sols) rep.max_pairwise_distance = std::max(rep.max_pairwise_distance, sup_distance(u, other));
        sols.push_back(u);
        int id = -1;
        for (std::size_t c = 0; c < reps.size(); ++c) {
            if (sup_distance(u, reps[c]) <= cluster_tolerance) {
                id = static_cast<int>(c);
                break;
            }
        }
        if (id < 0) {
            id = static_cast<int>(reps.size());
            reps.push_back(u);
            rep.cluster_u_max.push_back(u.max());
        }
        rep.cluster.push_back(id);
    }
    rep.distinct = reps.size();
    if (rep.converged == 0) rep.diagnostics += "no start converged\n";
    return rep;
}

struct CriticalRow {
    double eps = 0.0;
    double rho = 0.0;
    double u_max = 0.0;
    double concentration_radius = 0.0;   ///< where e^u falls to half its maximum
    double exact_u_max = 0.0;            ///< 2 ln(1 + lambda^2 / 8) scaled to the disc radius
    double exact_concentration = 0.0;
    double relative_error = 0.0;
    std::string status;
};

struct CriticalSweep {
    std::vector<CriticalRow> rows;
    bool exact_family = false;           ///< disc, K constant, f = 0, g = 0: the closed form applies
    bool truncated = false;
    std::string message;

    [[nodiscard]] bool monotone() const {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(rows[i].u_max > rows[i - 1].u_max)) return false;
        }
        return true;
    }

    [[nodiscard]] double worst_relative_error() const {
        double w = 0.0;
        for (const auto& r : rows) w = std::max(w, r.relative_error);
        return w;
    }
};

/// Radial solves at rho = 8 pi (1 - eps) for decreasing eps in (0, 1).
inline CriticalSweep critical_sweep(const ProblemSpec& base, const std::vector<double>& eps_values) {
    if (eps_values.empty()) throw InvalidArgument("critical sweep needs at least one eps");
    for (std::size_t i = 0; i < eps_values.size(); ++i) {
        if (!(eps_values[i] > 0.0 && eps_values[i] < 1.0)) throw InvalidArgument("eps values must lie in (0, 1)");
        if (i > 0 && !(eps_values[i] < eps_values[i - 1])) throw InvalidArgument("eps values must decrease");
    }
    if (base.mode != EquationMode::mean_field) throw InvalidArgument("critical sweeps run in mean-field mode");
    CriticalSweep out;
    const auto k = base.weight.constant_value();
    const auto f = base.source.constant_value();
    out.exact_family = base.shape == DomainShape::disc && k && *k > 0.0 && f && *f == 0.0 && base.boundary_value == 0.0;
    const double R = base.outer_radius;
    for (double eps : eps_values) {
        ProblemSpec spec = base;
        spec.rho = critical_mass * (1.0 - eps);
        const auto rep = solve_radial(spec);
        CriticalRow row;
        row.eps = eps;
        row.rho = spec.rho;
        row.status = to_string(rep.status);
        if (!rep.converged()) {
            out.rows.push_back(row);
            out.truncated = true;
            out.message = "radial solve failed at eps = " + std::to_string(eps);
            break;
        }
        const auto& u = rep.field();
        row.u_max = u.max();
        const double half = u.max() - std::log(2.0);
        const auto radii = level_radii(u, half);
        row.concentration_radius = radii.empty() ? R : radii.front();
        if (out.exact_family) {
            const BubbleParam lam = lambda_from_ball_mass(spec.rho, R);
            row.exact_u_max = exact_disc_solution(spec.rho, R, 0.0);
            // (1 + lambda^2 r^2 / 8)^2 = 2
            row.exact_concentration = std::sqrt(8.0 * (std::sqrt(2.0) - 1.0)) / lam.lambda();
            row.relative_error = std::abs(row.u_max - row.exact_u_max) / std::abs(row.exact_u_max);
        }
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace mfl
