#pragma once

// Discrete domains and sampled fields: radial meshes for discs, annuli and
// truncated exteriors, and uniform Cartesian grids clipped to a disc or annulus.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mfl/bubble.hpp"
#include "mfl/error.hpp"

namespace mfl {

// ---------------------------------------------------------------------------
// Radial meshes

class RadialMesh {
public:
    static constexpr std::size_t min_nodes = 16;

    explicit RadialMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < min_nodes) {
            throw InvalidArgument("radial mesh needs at least 16 nodes, got " +
                                  std::to_string(nodes_.size()));
        }
        if (!(nodes_.front() >= 0.0)) throw InvalidArgument("radial mesh starts below zero");
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i])) {
                throw InvalidArgument("radial mesh nodes must be finite and strictly increasing");
            }
        }
    }

    /// n equally spaced nodes on [inner, outer].
    static RadialMesh uniform(double inner, double outer, std::size_t n) {
        check_interval(inner, outer);
        if (n < 2) throw InvalidArgument("radial mesh needs at least 2 nodes");
        std::vector<double> r(n);
        const double h = (outer - inner) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) r[i] = inner + h * static_cast<double>(i);
        r.back() = outer;
        return RadialMesh(std::move(r));
    }

    /// n nodes equally spaced in log r on [inner, outer]; inner must be positive.
    static RadialMesh geometric(double inner, double outer, std::size_t n) {
        check_interval(inner, outer);
        if (inner <= 0.0) throw InvalidArgument("geometric radial mesh needs a positive inner radius");
        if (n < 2) throw InvalidArgument("radial mesh needs at least 2 nodes");
        std::vector<double> r(n);
        const double a = std::log(inner);
        const double step = (std::log(outer) - a) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) r[i] = std::exp(a + step * static_cast<double>(i));
        r.front() = inner;
        r.back() = outer;
        return RadialMesh(std::move(r));
    }

    /// Disc of radius core_radius meshed uniformly, continued geometrically out to outer.
    static RadialMesh plane(double core_radius, double outer, std::size_t n_core, std::size_t n_tail) {
        auto core = uniform(0.0, core_radius, n_core).nodes_;
        auto tail = geometric(core_radius, outer, n_tail + 1).nodes_;
        core.insert(core.end(), tail.begin() + 1, tail.end());
        return RadialMesh(std::move(core));
    }

    [[nodiscard]] double inner_radius() const noexcept { return nodes_.front(); }
    [[nodiscard]] double outer_radius() const noexcept { return nodes_.back(); }
    [[nodiscard]] bool is_disc() const noexcept { return nodes_.front() == 0.0; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] double operator[](std::size_t i) const { return nodes_[i]; }

    [[nodiscard]] double max_spacing() const {
        double h = 0.0;
        for (std::size_t i = 1; i < nodes_.size(); ++i) h = std::max(h, nodes_[i] - nodes_[i - 1]);
        return h;
    }

    /// Trapezoid weights for  integral of g over the annulus  = sum w_i g(r_i)  (integrand 2 pi r g).
    [[nodiscard]] std::vector<double> area_weights() const {
        const std::size_t n = nodes_.size();
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? nodes_[i] - nodes_[i - 1] : 0.0;
            const double right = i + 1 < n ? nodes_[i + 1] - nodes_[i] : 0.0;
            w[i] = pi * nodes_[i] * (left + right);
        }
        return w;
    }

    /// Index of the cell [r_i, r_{i+1}] containing r (clamped to the mesh).
    [[nodiscard]] std::size_t cell_of(double r) const {
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
        if (it == nodes_.begin()) return 0;
        const auto i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        return std::min(i, nodes_.size() - 2);
    }

    friend bool operator==(const RadialMesh&, const RadialMesh&) = default;

private:
    static void check_interval(double inner, double outer) {
        if (!(inner >= 0.0) || !(outer > inner) || !std::isfinite(outer)) {
            throw InvalidArgument("radial interval must satisfy 0 <= inner < outer");
        }
    }

    std::vector<double> nodes_;
};

class RadialField {
public:
    RadialField(RadialMesh mesh, std::vector<double> values)
        : mesh_(std::move(mesh)), values_(std::move(values)) {
        if (values_.size() != mesh_.size()) {
            throw InvalidArgument("radial field length does not match its mesh");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw InvalidArgument("radial field values must be finite");
        }
    }

    static RadialField sample(RadialMesh mesh, const std::function<double(double)>& fn) {
        std::vector<double> v(mesh.size());
        for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = fn(mesh[i]);
        return RadialField(std::move(mesh), std::move(v));
    }

    [[nodiscard]] const RadialMesh& mesh() const noexcept { return mesh_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double front() const { return values_.front(); }
    [[nodiscard]] double back() const { return values_.back(); }

    [[nodiscard]] double min() const { return *std::min_element(values_.begin(), values_.end()); }
    [[nodiscard]] double max() const { return *std::max_element(values_.begin(), values_.end()); }

    /// Piecewise-linear value at r (clamped to the mesh).
    [[nodiscard]] double at(double r) const {
        const std::size_t i = mesh_.cell_of(r);
        const double r0 = mesh_[i];
        const double r1 = mesh_[i + 1];
        const double s = std::clamp((r - r0) / (r1 - r0), 0.0, 1.0);
        return values_[i] + s * (values_[i + 1] - values_[i]);
    }

    /// Four-point Lagrange value at r; fourth-order on smooth fields.
    [[nodiscard]] double at_cubic(double r) const {
        const std::size_t n = mesh_.size();
        std::size_t i = mesh_.cell_of(r);
        std::size_t lo = i == 0 ? 0 : i - 1;
        if (lo + 4 > n) lo = n - 4;
        double sum = 0.0;
        for (std::size_t a = lo; a < lo + 4; ++a) {
            double w = 1.0;
            for (std::size_t b = lo; b < lo + 4; ++b) {
                if (a != b) w *= (r - mesh_[b]) / (mesh_[a] - mesh_[b]);
            }
            sum += w * values_[a];
        }
        return sum;
    }

    /// Derivative of the four-point Lagrange interpolant at r.
    [[nodiscard]] double slope_cubic(double r) const {
        const std::size_t n = mesh_.size();
        std::size_t i = mesh_.cell_of(r);
        std::size_t lo = i == 0 ? 0 : i - 1;
        if (lo + 4 > n) lo = n - 4;
        double sum = 0.0;
        for (std::size_t a = lo; a < lo + 4; ++a) {
            double denom = 1.0;
            for (std::size_t b = lo; b < lo + 4; ++b) {
                if (a != b) denom *= mesh_[a] - mesh_[b];
            }
            double numer = 0.0;
            for (std::size_t skip = lo; skip < lo + 4; ++skip) {
                if (skip == a) continue;
                double prod = 1.0;
                for (std::size_t b = lo; b < lo + 4; ++b) {
                    if (b != a && b != skip) prod *= r - mesh_[b];
                }
                numer += prod;
            }
            sum += values_[a] * numer / denom;
        }
        return sum;
    }

    /// First derivative at every node: centered on interior nodes, one-sided second order at the ends.
    /// On a disc the origin slope is zero by symmetry.
    [[nodiscard]] std::vector<double> derivative() const {
        const std::size_t n = values_.size();
        std::vector<double> d(n);
        const auto& r = mesh_.nodes();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = r[i] - r[i - 1];
            const double hr = r[i + 1] - r[i];
            d[i] = (hl * hl * (values_[i + 1] - values_[i]) + hr * hr * (values_[i] - values_[i - 1])) /
                   (hl * hr * (hl + hr));
        }
        d[0] = mesh_.is_disc() ? 0.0 : one_sided(0, 1, 2);
        d[n - 1] = one_sided(n - 1, n - 2, n - 3);
        return d;
    }

private:
    // Derivative at node a of the quadratic through nodes a, b, c.
    [[nodiscard]] double one_sided(std::size_t a, std::size_t b, std::size_t c) const {
        const double x0 = mesh_[a], x1 = mesh_[b], x2 = mesh_[c];
        const double w1 = (x0 - x2) / ((x1 - x0) * (x1 - x2));
        const double w2 = (x0 - x1) / ((x2 - x0) * (x2 - x1));
        const double w0 = -(w1 + w2);
        return w0 * values_[a] + w1 * values_[b] + w2 * values_[c];
    }

    RadialMesh mesh_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Cartesian grids clipped to a disc or annulus

enum class DomainShape { disc, annulus };

enum class NodeKind : std::uint8_t { inside, boundary, outside };

namespace detail {

// Signed area of the part of the disc |p| <= R lying in the rectangle spanned by (0,0) and (x,y).
inline double quadrant_disc_area(double x, double y, double R) {
    const double sx = x < 0.0 ? -1.0 : 1.0;
    const double sy = y < 0.0 ? -1.0 : 1.0;
    const double ax = std::min(std::abs(x), R);
    const double ay = std::min(std::abs(y), R);
    double area = 0.0;
    if (ax * ax + ay * ay <= R * R) {
        area = ax * ay;
    } else {
        auto F = [R](double s) {
            const double c = std::sqrt(std::max(0.0, R * R - s * s));
            return 0.5 * (s * c + R * R * std::asin(std::clamp(s / R, -1.0, 1.0)));
        };
        const double s_star = std::sqrt(std::max(0.0, R * R - ay * ay));
        area = ay * s_star + F(ax) - F(s_star);
    }
    return sx * sy * area;
}

}  // namespace detail

/// Exact area of the axis-aligned rectangle [x0,x1] x [y0,y1] intersected with the disc of radius R.
inline double rectangle_disc_area(double x0, double x1, double y0, double y1, double R) {
    using detail::quadrant_disc_area;
    return quadrant_disc_area(x1, y1, R) - quadrant_disc_area(x0, y1, R) -
           quadrant_disc_area(x1, y0, R) + quadrant_disc_area(x0, y0, R);
}

/// Uniform n x n node grid on [-R, R]^2 restricted to a disc or annulus centred at the origin.
///
/// Each node owns the dual square of side h around it; its quadrature weight is the
/// exact area of that square inside the domain, so weights sum to the domain area.
class Grid2D {
public:
    static constexpr double boundary_snap = 1e-12;

    static std::shared_ptr<const Grid2D> disc(double radius, int n) {
        return std::shared_ptr<const Grid2D>(new Grid2D(DomainShape::disc, 0.0, radius, n));
    }
    static std::shared_ptr<const Grid2D> annulus(double inner, double outer, int n) {
        if (!(inner > 0.0)) throw InvalidArgument("annulus inner radius must be positive");
        return std::shared_ptr<const Grid2D>(new Grid2D(DomainShape::annulus, inner, outer, n));
    }

    [[nodiscard]] DomainShape shape() const noexcept { return shape_; }
    [[nodiscard]] double inner_radius() const noexcept { return inner_; }
    [[nodiscard]] double outer_radius() const noexcept { return outer_; }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] std::size_t size() const noexcept { return kinds_.size(); }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double x(int i) const noexcept { return -outer_ + h_ * i; }
    [[nodiscard]] double y(int j) const noexcept { return -outer_ + h_ * j; }
    [[nodiscard]] std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    [[nodiscard]] int col(std::size_t k) const noexcept { return static_cast<int>(k % static_cast<std::size_t>(n_)); }
    [[nodiscard]] int row(std::size_t k) const noexcept { return static_cast<int>(k / static_cast<std::size_t>(n_)); }
    [[nodiscard]] double radius_at(std::size_t k) const noexcept { return std::hypot(x(col(k)), y(row(k))); }

    [[nodiscard]] NodeKind kind(std::size_t k) const { return kinds_[k]; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] bool active(std::size_t k) const { return weights_[k] > 0.0; }

    [[nodiscard]] double area() const {
        return pi * (outer_ * outer_ - inner_ * inner_);
    }

    /// Strict interior membership of a point.
    [[nodiscard]] bool contains(double px, double py) const {
        const double r = std::hypot(px, py);
        if (!(r < outer_ * (1.0 - boundary_snap))) return false;
        return shape_ == DomainShape::disc || r > inner_ * (1.0 + boundary_snap);
    }

    /// Nodes that are not inside but touch an inside node along a grid line; they carry the boundary trace.
    [[nodiscard]] std::vector<std::size_t> rim_nodes() const {
        std::vector<std::size_t> out;
        for (int j = 0; j < n_; ++j) {
            for (int i = 0; i < n_; ++i) {
                const std::size_t k = index(i, j);
                if (kinds_[k] == NodeKind::inside) continue;
                bool touches = false;
                for (auto [di, dj] : neighbours4) {
                    const int a = i + di, b = j + dj;
                    if (a >= 0 && b >= 0 && a < n_ && b < n_ && kinds_[index(a, b)] == NodeKind::inside) {
                        touches = true;
                    }
                }
                if (touches) out.push_back(k);
            }
        }
        return out;
    }

    /// Fraction theta in (0,1] of a grid step from inside node (i,j) in direction (di,dj)
    /// at which the segment leaves the domain. Returns 1 if the neighbour is inside.
    [[nodiscard]] double crossing_fraction(int i, int j, int di, int dj) const {
        const double px = x(i), py = y(j);
        const double ex = di * h_, ey = dj * h_;
        if (contains(px + ex, py + ey)) return 1.0;
        double best = 1.0;
        auto consider = [&](double R) {
            // |p + s e|^2 = R^2, s in (0, 1]
            const double a = ex * ex + ey * ey;
            const double b = 2.0 * (px * ex + py * ey);
            const double c = px * px + py * py - R * R;
            const double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) return;
            const double sq = std::sqrt(disc);
            for (double s : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
                if (s > 0.0 && s <= 1.0 + 1e-14) best = std::min(best, std::min(s, 1.0));
            }
        };
        consider(outer_);
        if (shape_ == DomainShape::annulus) consider(inner_);
        return best;
    }

    /// Radius of the boundary circle closest to a point.
    [[nodiscard]] double nearest_boundary_radius(double r) const {
        if (shape_ == DomainShape::disc) return outer_;
        return std::abs(r - inner_) < std::abs(r - outer_) ? inner_ : outer_;
    }

    friend bool same_grid(const Grid2D& a, const Grid2D& b) {
        return &a == &b || (a.shape_ == b.shape_ && a.inner_ == b.inner_ && a.outer_ == b.outer_ && a.n_ == b.n_);
    }

    static constexpr std::pair<int, int> neighbours4[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

private:
    Grid2D(DomainShape shape, double inner, double outer, int n)
        : shape_(shape), inner_(inner), outer_(outer), n_(n) {
        if (!(outer > inner) || !(inner >= 0.0) || !std::isfinite(outer)) {
            throw InvalidArgument("grid radii must satisfy 0 <= inner < outer");
        }
        if (n < 5) throw InvalidArgument("grid needs at least 5 nodes per side");
        h_ = 2.0 * outer / (n - 1);
        const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        kinds_.resize(total);
        weights_.resize(total);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = index(i, j);
                const double px = x(i), py = y(j);
                const double r = std::hypot(px, py);
                if (contains(px, py)) {
                    kinds_[k] = NodeKind::inside;
                } else if (std::abs(r - outer) <= boundary_snap * outer ||
                           (shape == DomainShape::annulus && std::abs(r - inner) <= boundary_snap * inner)) {
                    kinds_[k] = NodeKind::boundary;
                } else {
                    kinds_[k] = NodeKind::outside;
                }
                const double x0 = px - 0.5 * h_, x1 = px + 0.5 * h_;
                const double y0 = py - 0.5 * h_, y1 = py + 0.5 * h_;
                double w = rectangle_disc_area(x0, x1, y0, y1, outer);
                if (shape == DomainShape::annulus) w -= rectangle_disc_area(x0, x1, y0, y1, inner);
                weights_[k] = w > 1e-300 ? w : 0.0;
            }
        }
    }

    DomainShape shape_;
    double inner_;
    double outer_;
    int n_;
    double h_ = 0.0;
    std::vector<NodeKind> kinds_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

class ScalarField2D {
public:
    ScalarField2D(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (!grid_) throw InvalidArgument("field needs a grid");
        if (values_.size() != grid_->size()) throw InvalidArgument("field length does not match its grid");
        for (double v : values_) {
            if (!std::isfinite(v)) throw InvalidArgument("field values must be finite");
        }
    }

    static ScalarField2D sample(GridPtr grid, const std::function<double(double, double)>& fn) {
        std::vector<double> v(grid->size());
        for (int j = 0; j < grid->n(); ++j) {
            for (int i = 0; i < grid->n(); ++i) v[grid->index(i, j)] = fn(grid->x(i), grid->y(j));
        }
        return ScalarField2D(std::move(grid), std::move(v));
    }

    static ScalarField2D sample_radial(GridPtr grid, const std::function<double(double)>& fn) {
        return sample(std::move(grid), [&fn](double px, double py) { return fn(std::hypot(px, py)); });
    }

    [[nodiscard]] const Grid2D& grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    /// Extremes over active nodes only.
    [[nodiscard]] double min() const { return reduce([](double a, double b) { return std::min(a, b); }, INFINITY); }
    [[nodiscard]] double max() const { return reduce([](double a, double b) { return std::max(a, b); }, -INFINITY); }

    /// Central-difference gradient magnitude at every node (one-sided at the grid edge).
    [[nodiscard]] std::vector<double> gradient_norm() const {
        const Grid2D& g = *grid_;
        const int n = g.n();
        const double h = g.h();
        std::vector<double> out(size());
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                auto diff = [&](int a0, int b0, int a1, int b1, double span) {
                    return (values_[g.index(a1, b1)] - values_[g.index(a0, b0)]) / span;
                };
                const double gx = i == 0       ? diff(0, j, 1, j, h)
                                  : i == n - 1 ? diff(n - 2, j, n - 1, j, h)
                                               : diff(i - 1, j, i + 1, j, 2.0 * h);
                const double gy = j == 0       ? diff(i, 0, i, 1, h)
                                  : j == n - 1 ? diff(i, n - 2, i, n - 1, h)
                                               : diff(i, j - 1, i, j + 1, 2.0 * h);
                out[g.index(i, j)] = std::hypot(gx, gy);
            }
        }
        return out;
    }

private:
    template <class Op>
    double reduce(Op op, double init) const {
        double acc = init;
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (grid_->active(k)) acc = op(acc, values_[k]);
        }
        return acc;
    }

    GridPtr grid_;
    std::vector<double> values_;
};

inline void require_same_grid(const ScalarField2D& a, const ScalarField2D& b) {
    if (!same_grid(a.grid(), b.grid())) throw GridMismatch("fields live on different grids");
}

inline void require_same_mesh(const RadialField& a, const RadialField& b) {
    if (!(a.mesh() == b.mesh())) throw GridMismatch("radial fields live on different meshes");
}

}  // namespace mfl
