#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "mfl/mesh.hpp"

namespace mfl {

struct LevelTopology {
    std::size_t components = 0;
    std::size_t holes = 0;

    [[nodiscard]] bool simply_connected() const noexcept { return components == 1 && holes == 0; }
    friend bool operator==(const LevelTopology&, const LevelTopology&) = default;
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned char> rank_;
};

/// Components and holes of {phi > t} on the grid.
///
/// The superlevel set uses 4-connectivity over active nodes; its complement (all other
/// nodes of the square, including those outside the domain) uses 8-connectivity so the
/// two notions are dual. A complement component that does not reach the edge of the
/// square is a hole.
inline LevelTopology level_topology(const ScalarField2D& phi, double t) {
    const Grid2D& g = phi.grid();
    const int n = g.n();
    std::vector<char> fg(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) fg[k] = g.active(k) && phi[k] > t;

    UnionFind uf(g.size());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = g.index(i, j);
            for (int dj = 0; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (dj == 0 && di <= 0) continue;
                    const int a = i + di, b = j + dj;
                    if (a < 0 || a >= n || b >= n) continue;
                    const std::size_t m = g.index(a, b);
                    if (fg[k] != fg[m]) continue;
                    const bool diagonal = di != 0 && dj != 0;
                    if (fg[k] && diagonal) continue;
                    uf.unite(k, m);
                }
            }
        }
    }

    std::vector<char> seen(g.size(), 0), touches_edge(g.size(), 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
                const std::size_t k = g.index(i, j);
                if (!fg[k]) touches_edge[uf.find(k)] = 1;
            }
        }
    }
    LevelTopology out;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const std::size_t root = uf.find(k);
        if (seen[root]) continue;
        seen[root] = 1;
        if (fg[k]) {
            ++out.components;
        } else if (!touches_edge[root]) {
            ++out.holes;
        }
    }
    return out;
}

/// Components and holes of {phi > t} for a radial field: each maximal radial interval is
/// a disc (if it contains the origin) or an annulus (one hole).
inline LevelTopology level_topology(const RadialField& phi, double t) {
    LevelTopology out;
    bool inside = false;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const bool now = phi[i] > t;
        if (now && !inside) {
            ++out.components;
            if (!(i == 0 && phi.mesh().is_disc())) ++out.holes;
        }
        inside = now;
    }
    return out;
}

}  // namespace mfl
