#pragma once

// Problem data for  Delta u + rho K e^u / int(K e^u) = f  (mean-field form) or
// Delta u + K e^u = f  (fixed nonlinearity), with u = g on the boundary of a disc or annulus.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "mfl/error.hpp"
#include "mfl/mesh.hpp"

namespace mfl {

/// A closed-form coefficient (weight K or source f) on the plane.
class Coefficient {
public:
    static Coefficient constant(double c) {
        Coefficient k;
        k.radial_ = [c](double) { return c; };
        k.constant_ = c;
        k.description_ = "constant " + std::to_string(c);
        return k;
    }

    static Coefficient radial(std::function<double(double)> fn, std::string description) {
        Coefficient k;
        k.radial_ = std::move(fn);
        k.description_ = std::move(description);
        return k;
    }

    /// base + amplitude * exp(-r^2 / width^2)
    static Coefficient gaussian(double base, double amplitude, double width) {
        if (!(width > 0.0)) throw InvalidArgument("gaussian width must be positive");
        auto k = radial([=](double r) { return base + amplitude * std::exp(-r * r / (width * width)); },
                        "gaussian base=" + std::to_string(base) + " amplitude=" + std::to_string(amplitude) +
                            " width=" + std::to_string(width));
        return k;
    }

    /// Non-radial coefficient; usable on grids only.
    static Coefficient planar(std::function<double(double, double)> fn, std::string description) {
        Coefficient k;
        k.planar_ = std::move(fn);
        k.description_ = std::move(description);
        return k;
    }

    [[nodiscard]] double operator()(double x, double y) const {
        return planar_ ? planar_(x, y) : radial_(std::hypot(x, y));
    }

    [[nodiscard]] double at_radius(double r) const {
        if (!radial_) throw InvalidArgument("coefficient '" + description_ + "' is not radial");
        return radial_(r);
    }

    [[nodiscard]] bool is_radial() const noexcept { return static_cast<bool>(radial_); }
    [[nodiscard]] std::optional<double> constant_value() const noexcept { return constant_; }
    [[nodiscard]] const std::string& description() const noexcept { return description_; }

private:
    Coefficient() = default;

    std::function<double(double)> radial_;
    std::function<double(double, double)> planar_;
    std::optional<double> constant_;
    std::string description_;
};

enum class EquationMode { mean_field, liouville };

inline const char* to_string(EquationMode m) { return m == EquationMode::mean_field ? "mean_field" : "liouville"; }
inline const char* to_string(DomainShape s) { return s == DomainShape::disc ? "disc" : "annulus"; }

struct SolverOptions {
    double radial_tolerance = 1e-10;   ///< shooting mismatch (relative mass or boundary value)
    double grid_tolerance = 1e-8;      ///< max-norm of the discrete residual
    int max_iterations = 60;
    int max_halvings = 30;
};

struct ProblemSpec {
    DomainShape shape = DomainShape::disc;
    double inner_radius = 0.0;
    double outer_radius = 1.0;
    EquationMode mode = EquationMode::mean_field;
    double rho = 4.0 * pi;
    Coefficient weight = Coefficient::constant(1.0);
    Coefficient source = Coefficient::constant(0.0);
    double boundary_value = 0.0;
    std::size_t radial_nodes = 4096;
    int grid_nodes = 129;
    SolverOptions options{};

    void validate() const {
        if (!(outer_radius > 0.0) || !std::isfinite(outer_radius)) throw InvalidArgument("outer radius must be positive");
        if (shape == DomainShape::annulus && !(inner_radius > 0.0 && inner_radius < outer_radius)) {
            throw InvalidArgument("annulus needs 0 < inner radius < outer radius");
        }
        if (shape == DomainShape::disc && inner_radius != 0.0) throw InvalidArgument("disc inner radius must be 0");
        if (mode == EquationMode::mean_field && !(rho > 0.0 && std::isfinite(rho))) {
            throw InvalidArgument("mean-field mass rho must be positive");
        }
        if (!std::isfinite(boundary_value)) throw InvalidArgument("boundary value must be finite");
    }

    [[nodiscard]] RadialMesh radial_mesh() const {
        return RadialMesh::uniform(shape == DomainShape::disc ? 0.0 : inner_radius, outer_radius, radial_nodes);
    }

    [[nodiscard]] GridPtr grid() const {
        return shape == DomainShape::disc ? Grid2D::disc(outer_radius, grid_nodes)
                                          : Grid2D::annulus(inner_radius, outer_radius, grid_nodes);
    }

    /// Whether f >= -Delta ln K holds at the inside nodes of the grid (finite-difference Laplacian of ln K).
    [[nodiscard]] bool source_compatible(int sample_nodes = 65, double slack = 1e-6) const {
        const GridPtr g = shape == DomainShape::disc ? Grid2D::disc(outer_radius, sample_nodes)
                                                     : Grid2D::annulus(inner_radius, outer_radius, sample_nodes);
        const double d = 1e-3 * outer_radius;
        for (std::size_t k = 0; k < g->size(); ++k) {
            if (g->kind(k) != NodeKind::inside) continue;
            const double x = g->x(g->col(k)), y = g->y(g->row(k));
            auto lk = [&](double a, double b) { return std::log(weight(a, b)); };
            const double lap = (lk(x + d, y) + lk(x - d, y) + lk(x, y + d) + lk(x, y - d) - 4.0 * lk(x, y)) / (d * d);
            if (source(x, y) < -lap - slack) return false;
        }
        return true;
    }
};

enum class SolveStatus { converged, diverged, singular_jacobian, out_of_scope };

inline std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::diverged: return "diverged";
        case SolveStatus::singular_jacobian: return "singular-jacobian";
        case SolveStatus::out_of_scope: return "out-of-scope";
    }
    return "unknown";
}

template <class Field>
struct SolveReport {
    std::optional<Field> solution;   ///< last iterate when not converged (may be empty)
    double residual_norm = INFINITY;
    int iterations = 0;
    SolveStatus status = SolveStatus::diverged;
    double mass = 0.0;               ///< integral of K e^u
    double normalization = 1.0;      ///< rho / integral(K e^u) in mean-field mode, 1 otherwise
    std::string branch;
    std::string message;

    [[nodiscard]] bool converged() const noexcept { return status == SolveStatus::converged; }
    [[nodiscard]] const Field& field() const {
        if (!solution) throw Error("solve produced no field: " + message);
        return *solution;
    }
};

}  // namespace mfl
