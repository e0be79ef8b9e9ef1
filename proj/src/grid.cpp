#include "balfield/grid.hpp"

#include <stdexcept>
#include <string>

namespace balfield {

GridSpec GridSpec::make2d(int nx, int ny, double h, Boundary b) {
    GridSpec g;
    g.nx = nx;
    g.ny = ny;
    g.nz = 1;
    g.h = h;
    g.boundary = b;
    g.dim = 2;
    g.validate();
    return g;
}

GridSpec GridSpec::make3d(int nx, int ny, int nz, double h, Boundary b) {
    GridSpec g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.h = h;
    g.boundary = b;
    g.dim = 3;
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("GridSpec: dim must be 2 or 3, got " +
                                    std::to_string(dim));
    if (!(h > 0.0))
        throw std::invalid_argument("GridSpec: spacing must be > 0, got " +
                                    std::to_string(h));
    if (nx < 8 || ny < 8 || (dim == 3 && nz < 8))
        throw std::invalid_argument("GridSpec: every extent must be >= 8, got " +
                                    std::to_string(nx) + "x" + std::to_string(ny) +
                                    "x" + std::to_string(nz));
    if (dim == 2 && nz != 1)
        throw std::invalid_argument("GridSpec: 2-D grids must have nz == 1");
}

}  // namespace balfield
