#pragma once

// Finite-difference Newton solver on the clipped Cartesian grid.  The Laplacian uses the
// Shortley-Weller stencil next to the curved boundary.  In mean-field mode the unknowns
// are bordered by sigma = ln integral(K e^u) so that the dense rank-one part of the
// Jacobian stays exact while the factorized matrix stays sparse.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "mfl/bubble.hpp"
#include "mfl/problem.hpp"

namespace mfl {

using GridReport = SolveReport<ScalarField2D>;

namespace detail {

class GridSystem {
public:
    GridSystem(const ProblemSpec& spec, GridPtr grid) : spec_(spec), grid_(std::move(grid)) {
        const Grid2D& g = *grid_;
        unknown_.assign(g.size(), -1);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.kind(k) == NodeKind::inside) {
                unknown_[k] = static_cast<long>(nodes_.size());
                nodes_.push_back(k);
            }
        }
        if (nodes_.empty()) throw InvalidArgument("grid has no interior nodes");
        k_.resize(g.size());
        f_.resize(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double x = g.x(g.col(k)), y = g.y(g.row(k));
            k_[k] = g.active(k) ? spec.weight(x, y) : 0.0;
            f_[k] = g.kind(k) == NodeKind::inside ? spec.source(x, y) : 0.0;
            if (g.active(k) && !(k_[k] > 0.0)) throw InvalidArgument("weight K must be positive");
        }
        build_stencil();
    }

    [[nodiscard]] std::size_t unknowns() const noexcept { return nodes_.size(); }
    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }

    /// Full nodal vector: unknowns where inside, g elsewhere.
    [[nodiscard]] std::vector<double> expand(const Eigen::VectorXd& x) const {
        std::vector<double> out(grid_->size(), spec_.boundary_value);
        for (std::size_t q = 0; q < nodes_.size(); ++q) out[nodes_[q]] = x[static_cast<long>(q)];
        return out;
    }

    [[nodiscard]] Eigen::VectorXd restrict_to_unknowns(std::span<const double> full) const {
        Eigen::VectorXd x(static_cast<long>(nodes_.size()));
        for (std::size_t q = 0; q < nodes_.size(); ++q) x[static_cast<long>(q)] = full[nodes_[q]];
        return x;
    }

    /// integral of K e^u with nodal values `full`
    [[nodiscard]] double mass(std::span<const double> full) const {
        const auto w = grid_->weights();
        double s = 0.0;
        for (std::size_t k = 0; k < full.size(); ++k) {
            if (w[k] > 0.0) s += w[k] * k_[k] * std::exp(full[k]);
        }
        return s;
    }

    /// Residual at the unknowns for an arbitrary full nodal vector (boundary values taken from it).
    [[nodiscard]] Eigen::VectorXd residual(std::span<const double> full, double rho) const {
        const bool mf = spec_.mode == EquationMode::mean_field;
        const double scale = mf ? rho / mass(full) : 1.0;
        Eigen::VectorXd r(static_cast<long>(nodes_.size()));
        for (std::size_t q = 0; q < nodes_.size(); ++q) {
            const std::size_t k = nodes_[q];
            double lap = diag_[q] * full[k] + bcoef_[q] * spec_.boundary_value;
            for (const auto& [m, c] : off_[q]) lap += c * full[m];
            r[static_cast<long>(q)] = lap + scale * k_[k] * std::exp(full[k]) - f_[k];
        }
        return r;
    }

    /// Newton step.  Returns nullopt when the factorization fails.
    [[nodiscard]] std::optional<Eigen::VectorXd> newton_step(std::span<const double> full, const Eigen::VectorXd& res,
                                                             double rho) {
        const bool mf = spec_.mode == EquationMode::mean_field;
        const long n = static_cast<long>(nodes_.size());
        const long dim = mf ? n + 1 : n;
        const auto w = grid_->weights();
        const double s = mass(full);
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(6 * n + (mf ? 2 * n : 0)));
        for (long q = 0; q < n; ++q) {
            const std::size_t k = nodes_[static_cast<std::size_t>(q)];
            const double ke = k_[k] * std::exp(full[k]);
            const double p = mf ? rho * ke / s : ke;
            t.emplace_back(q, q, diag_[static_cast<std::size_t>(q)] + p);
            for (const auto& [m, c] : off_[static_cast<std::size_t>(q)]) {
                const long col = unknown_[m];
                if (col >= 0) t.emplace_back(q, col, c);
            }
            if (mf) {
                t.emplace_back(q, n, -p);
                t.emplace_back(n, q, w[k] * ke / s);
            }
        }
        if (mf) t.emplace_back(n, n, -1.0);
        Eigen::SparseMatrix<double> jac(dim, dim);
        jac.setFromTriplets(t.begin(), t.end());
        jac.makeCompressed();
        if (!analyzed_ || analyzed_dim_ != dim) {
            lu_.analyzePattern(jac);
            analyzed_ = true;
            analyzed_dim_ = dim;
        }
        lu_.factorize(jac);
        if (lu_.info() != Eigen::Success) return std::nullopt;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        rhs.head(n) = -res;
        Eigen::VectorXd sol = lu_.solve(rhs);
        if (lu_.info() != Eigen::Success || !sol.allFinite()) return std::nullopt;
        return Eigen::VectorXd(sol.head(n));
    }

private:
    void build_stencil() {
        const Grid2D& g = *grid_;
        const double h = g.h();
        diag_.assign(nodes_.size(), 0.0);
        off_.assign(nodes_.size(), {});
        bcoef_.assign(nodes_.size(), 0.0);
        for (std::size_t q = 0; q < nodes_.size(); ++q) {
            const std::size_t k = nodes_[q];
            const int i = g.col(k), j = g.row(k);
            // axis 0: x, axis 1: y
            for (int axis = 0; axis < 2; ++axis) {
                const int dx = axis == 0 ? 1 : 0, dy = axis == 0 ? 0 : 1;
                const double tp = g.crossing_fraction(i, j, dx, dy);
                const double tm = g.crossing_fraction(i, j, -dx, -dy);
                const double cp = 2.0 / (h * h * tp * (tp + tm));
                const double cm = 2.0 / (h * h * tm * (tp + tm));
                diag_[q] -= 2.0 / (h * h * tp * tm);
                add_neighbour(q, i + dx, j + dy, tp, cp);
                add_neighbour(q, i - dx, j - dy, tm, cm);
            }
        }
    }

    void add_neighbour(std::size_t q, int a, int b, double theta, double c) {
        const std::size_t m = grid_->index(a, b);
        if (theta >= 1.0 && unknown_[m] >= 0) {
            off_[q].emplace_back(m, c);
        } else {
            bcoef_[q] += c;   // the crossing point carries g
        }
    }

    const ProblemSpec& spec_;
    GridPtr grid_;
    std::vector<long> unknown_;
    std::vector<std::size_t> nodes_;
    std::vector<double> k_, f_;
    std::vector<double> diag_;
    std::vector<std::vector<std::pair<std::size_t, double>>> off_;
    std::vector<double> bcoef_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
    bool analyzed_ = false;
    long analyzed_dim_ = 0;
};

struct NewtonOutcome {
    Eigen::VectorXd x;
    double residual = INFINITY;
    int iterations = 0;
    SolveStatus status = SolveStatus::diverged;
};

inline NewtonOutcome damped_newton(GridSystem& sys, const ProblemSpec& spec, double rho, Eigen::VectorXd x) {
    NewtonOutcome out;
    auto full = sys.expand(x);
    Eigen::VectorXd res = sys.residual(full, rho);
    double norm = res.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < spec.options.max_iterations; ++it) {
        if (norm <= spec.options.grid_tolerance) break;
        ++out.iterations;
        const auto dx = sys.newton_step(full, res, rho);
        if (!dx) {
            out.status = SolveStatus::singular_jacobian;
            out.x = x;
            out.residual = norm;
            return out;
        }
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k <= spec.options.max_halvings; ++k, step *= 0.5) {
            Eigen::VectorXd trial = x + step * *dx;
            auto tf = sys.expand(trial);
            Eigen::VectorXd tr = sys.residual(tf, rho);
            const double tn = tr.lpNorm<Eigen::Infinity>();
            if (std::isfinite(tn) && tn < norm) {
                x = std::move(trial);
                full = std::move(tf);
                res = std::move(tr);
                norm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    out.x = std::move(x);
    out.residual = norm;
    out.status = norm <= spec.options.grid_tolerance ? SolveStatus::converged : SolveStatus::diverged;
    return out;
}

inline GridReport grid_report(const ProblemSpec& spec, const GridSystem& sys, const NewtonOutcome& o, double rho,
                              int iterations) {
    GridReport rep;
    auto full = sys.expand(o.x);
    bool finite = true;
    for (double v : full) finite = finite && std::isfinite(v);
    rep.iterations = iterations;
    rep.residual_norm = o.residual;
    rep.status = o.status;
    if (finite) {
        rep.mass = sys.mass(full);
        rep.normalization = spec.mode == EquationMode::mean_field ? rho / rep.mass : 1.0;
        rep.solution = ScalarField2D(sys.grid(), std::move(full));
    } else {
        rep.status = SolveStatus::diverged;
    }
    if (spec.mode == EquationMode::liouville) {
        rep.branch = "liouville";
    } else {
        rep.branch = spec.rho >= critical_mass ? "supercritical-attempt" : "mean-field";
    }
    if (rep.status == SolveStatus::singular_jacobian) rep.message = "Jacobian factorization failed (fold point?)";
    if (rep.status == SolveStatus::diverged) rep.message = "Newton stagnated above tolerance";
    return rep;
}

}  // namespace detail

struct GridSolveOptions {
    bool continuation_fallback = true;   ///< retry by continuation in rho when the direct attempt fails
    int continuation_steps = 8;
};

/// Damped Newton solve on the problem's grid (or on the initial guess's grid when given).
inline GridReport solve_2d(const ProblemSpec& spec, const std::optional<ScalarField2D>& initial_guess = std::nullopt,
                           GridSolveOptions opts = {}) {
    spec.validate();
    GridPtr grid = initial_guess ? initial_guess->grid_ptr() : spec.grid();
    if (initial_guess && (grid->shape() != spec.shape || grid->outer_radius() != spec.outer_radius ||
                          (spec.shape == DomainShape::annulus && grid->inner_radius() != spec.inner_radius))) {
        throw GridMismatch("initial guess lives on a different domain");
    }
    detail::GridSystem sys(spec, grid);
    Eigen::VectorXd x0 = initial_guess ? sys.restrict_to_unknowns(initial_guess->values())
                                       : Eigen::VectorXd::Constant(static_cast<long>(sys.unknowns()), spec.boundary_value);
    auto direct = detail::damped_newton(sys, spec, spec.rho, x0);
    int iterations = direct.iterations;
    if (direct.status == SolveStatus::converged || spec.mode != EquationMode::mean_field ||
        !opts.continuation_fallback) {
        return detail::grid_report(spec, sys, direct, spec.rho, iterations);
    }
    // continuation in rho from the trivial state
    Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<long>(sys.unknowns()), spec.boundary_value);
    detail::NewtonOutcome step;
    for (int s = 1; s <= opts.continuation_steps; ++s) {
        const double rho = spec.rho * s / opts.continuation_steps;
        step = detail::damped_newton(sys, spec, rho, x);
        iterations += step.iterations;
        if (step.status != SolveStatus::converged) break;
        x = step.x;
    }
    if (step.status != SolveStatus::converged) {
        // keep the better of the two failures
        const auto& best = direct.residual <= step.residual ? direct : step;
        return detail::grid_report(spec, sys, best, spec.rho, iterations);
    }
    return detail::grid_report(spec, sys, step, spec.rho, iterations);
}

/// Max-norm of the discrete residual at interior grid nodes; non-interior values are taken from u.
inline double residual(const ProblemSpec& spec, const ScalarField2D& u) {
    detail::GridSystem sys(spec, u.grid_ptr());
    return sys.residual(u.values(), spec.rho).lpNorm<Eigen::Infinity>();
}

}  // namespace mfl
