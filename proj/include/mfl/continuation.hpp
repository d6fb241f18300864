#pragma once

#include <string>
#include <vector>

#include "mfl/grid_solver.hpp"
#include "mfl/radial_solver.hpp"

namespace mfl {

enum class SolverKind { radial, grid };

struct SweepPoint {
    double rho = 0.0;
    double u_max = 0.0;
    double center = 0.0;          ///< u at the origin (disc) or at the inner radius (annulus)
    double residual = 0.0;
    int iterations = 0;
    std::string status;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<RadialReport> radial;   ///< filled for radial sweeps
    std::vector<GridReport> grid;       ///< filled for grid sweeps
    bool truncated = false;
    std::string message;

    /// Whether u_max increases along the sweep.
    [[nodiscard]] bool monotone() const {
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (!(points[i].u_max > points[i - 1].u_max)) return false;
        }
        return true;
    }
};

/// Solves along increasing rho, each grid solve warm-started from the previous solution
/// (radial shooting needs no warm start).  The first failure truncates the sweep.
inline SweepResult continuation_sweep(const ProblemSpec& base, const std::vector<double>& rho_values,
                                      SolverKind kind = SolverKind::radial) {
    if (rho_values.empty()) throw InvalidArgument("sweep needs at least one rho");
    for (std::size_t i = 0; i < rho_values.size(); ++i) {
        if (!(rho_values[i] > 0.0 && rho_values[i] < critical_mass)) {
            throw InvalidArgument("sweep values must lie in (0, 8 pi)");
        }
        if (i > 0 && !(rho_values[i] > rho_values[i - 1])) throw InvalidArgument("sweep values must increase");
    }
    if (base.mode != EquationMode::mean_field) throw InvalidArgument("sweeps run in mean-field mode");
    SweepResult out;
    std::optional<ScalarField2D> warm;
    for (double rho : rho_values) {
        ProblemSpec spec = base;
        spec.rho = rho;
        SweepPoint pt;
        pt.rho = rho;
        if (kind == SolverKind::radial) {
            auto rep = solve_radial(spec);
            pt.status = to_string(rep.status);
            pt.residual = rep.residual_norm;
            pt.iterations = rep.iterations;
            if (rep.solution) {
                pt.u_max = rep.solution->max();
                pt.center = rep.solution->front();
            }
            const bool ok = rep.converged();
            out.radial.push_back(std::move(rep));
            out.points.push_back(pt);
            if (!ok) {
                out.truncated = true;
                out.message = "radial solve failed at rho = " + std::to_string(rho);
                break;
            }
        } else {
            auto rep = solve_2d(spec, warm);
            pt.status = to_string(rep.status);
            pt.residual = rep.residual_norm;
            pt.iterations = rep.iterations;
            if (rep.solution) {
                pt.u_max = rep.solution->max();
                const Grid2D& g = rep.solution->grid();
                const int mid = g.n() / 2;
                pt.center = (*rep.solution)[g.index(mid, mid)];
            }
            const bool ok = rep.converged();
            if (ok) warm = rep.solution;
            out.grid.push_back(std::move(rep));
            out.points.push_back(pt);
            if (!ok) {
                out.truncated = true;
                out.message = "grid solve failed at rho = " + std::to_string(rho);
                break;
            }
        }
    }
    return out;
}

}  // namespace mfl
