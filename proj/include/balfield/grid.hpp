#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace balfield {

/// Boundary closure used by every stencil pass.
/// MirrorNeumann: the ghost node takes the nearest interior value, so odd
/// differences vanish at faces. Periodic: indices wrap.
enum class Boundary { MirrorNeumann, Periodic };

/// Uniform node-centered grid, 2 or 3 dimensions, x fastest in memory.
/// 2-D grids keep nz == 1 and skip the z terms in every operator.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    int nz = 1;
    double h = 1.0;
    Boundary boundary = Boundary::MirrorNeumann;
    int dim = 3;

    static GridSpec make2d(int nx, int ny, double h,
                           Boundary b = Boundary::MirrorNeumann);
    static GridSpec make3d(int nx, int ny, int nz, double h,
                           Boundary b = Boundary::MirrorNeumann);

    std::size_t node_count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    /// Physical coordinate of node (i,j,k).
    std::array<double, 3> position(int i, int j, int k) const {
        return {i * h, j * h, k * h};
    }
    /// Center of the node-span box [0,(n-1)h]^dim.
    std::array<double, 3> center() const {
        return {(nx - 1) * h / 2.0, (ny - 1) * h / 2.0,
                dim == 3 ? (nz - 1) * h / 2.0 : 0.0};
    }

    /// Throws std::invalid_argument unless every extent is >= 8 (z exempt in
    /// 2-D), spacing > 0, and dim is 2 or 3.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

/// Scalar field sampled on a GridSpec, one double per node.
struct Field {
    GridSpec grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0)
        : grid(g), v(g.node_count(), fill) {}

    double& at(int i, int j, int k) { return v[grid.index(i, j, k)]; }
    double at(int i, int j, int k) const { return v[grid.index(i, j, k)]; }
    std::size_t size() const { return v.size(); }
};

}  // namespace balfield
