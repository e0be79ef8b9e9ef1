#include "balfield/field_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "balfield/parallel.hpp"

namespace balfield {

namespace {

// Neighbor index along one axis under the grid's boundary rule.
inline int step_idx(int i, int n, int d, Boundary b) {
    int j = i + d;
    if (j < 0) return b == Boundary::Periodic ? j + n : 0;
    if (j >= n) return b == Boundary::Periodic ? j - n : n - 1;
    return j;
}

// Number of independent planes for the parallel decomposition.
inline int plane_count(const GridSpec& g) { return g.dim == 3 ? g.nz : g.ny; }

}  // namespace

void require_valid_input(const Field& f, const char* op) {
    f.grid.validate();
    if (f.v.size() != f.grid.node_count())
        throw std::invalid_argument(std::string(op) + ": field size does not match grid");
    if (!all_finite(f))
        throw std::invalid_argument(std::string(op) + ": field has non-finite entries");
}

Field laplacian(const Field& f) {
    const GridSpec& g = f.grid;
    Field out(g);
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double* src = f.v.data();
    double* dst = out.v.data();
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const Boundary b = g.boundary;
    const double c = g.dim == 3 ? 6.0 : 4.0;

    auto do_plane = [&](int k) {
        const std::size_t zoff = static_cast<std::size_t>(k) * ny * nx;
        const std::size_t zm =
            g.dim == 3 ? static_cast<std::size_t>(step_idx(k, nz, -1, b)) * ny * nx : 0;
        const std::size_t zp =
            g.dim == 3 ? static_cast<std::size_t>(step_idx(k, nz, +1, b)) * ny * nx : 0;
        for (int j = 0; j < ny; ++j) {
            const double* r0 = src + zoff + static_cast<std::size_t>(j) * nx;
            const double* rm = src + zoff + static_cast<std::size_t>(step_idx(j, ny, -1, b)) * nx;
            const double* rp = src + zoff + static_cast<std::size_t>(step_idx(j, ny, +1, b)) * nx;
            const double* zrm = g.dim == 3 ? src + zm + static_cast<std::size_t>(j) * nx : nullptr;
            const double* zrp = g.dim == 3 ? src + zp + static_cast<std::size_t>(j) * nx : nullptr;
            double* o = dst + zoff + static_cast<std::size_t>(j) * nx;
            for (int i = 0; i < nx; ++i) {
                const double xl = r0[step_idx(i, nx, -1, b)];
                const double xr = r0[step_idx(i, nx, +1, b)];
                double s = xl + xr + rm[i] + rp[i] - c * r0[i];
                if (g.dim == 3) s += zrm[i] + zrp[i];
                o[i] = s * inv_h2;
            }
        }
    };
    int planes = plane_count(g);
    if (g.dim == 3) {
        parallel_for(planes, do_plane);
    } else {
        // 2-D fields have a single z-plane; the row loop above is the work.
        do_plane(0);
    }
    return out;
}

Field bilaplacian(const Field& f) { return laplacian(laplacian(f)); }

Field gradient_magnitude_sq(const Field& f) {
    const GridSpec& g = f.grid;
    Field out(g);
    const double inv_2h = 1.0 / (2.0 * g.h);
    const double* src = f.v.data();
    double* dst = out.v.data();
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const Boundary b = g.boundary;

    auto do_plane = [&](int k) {
        const std::size_t zoff = static_cast<std::size_t>(k) * ny * nx;
        const std::size_t zm =
            g.dim == 3 ? static_cast<std::size_t>(step_idx(k, nz, -1, b)) * ny * nx : 0;
        const std::size_t zp =
            g.dim == 3 ? static_cast<std::size_t>(step_idx(k, nz, +1, b)) * ny * nx : 0;
        for (int j = 0; j < ny; ++j) {
            const double* r0 = src + zoff + static_cast<std::size_t>(j) * nx;
            const double* rm = src + zoff + static_cast<std::size_t>(step_idx(j, ny, -1, b)) * nx;
            const double* rp = src + zoff + static_cast<std::size_t>(step_idx(j, ny, +1, b)) * nx;
            const double* zrm = g.dim == 3 ? src + zm + static_cast<std::size_t>(j) * nx : nullptr;
            const double* zrp = g.dim == 3 ? src + zp + static_cast<std::size_t>(j) * nx : nullptr;
            double* o = dst + zoff + static_cast<std::size_t>(j) * nx;
            for (int i = 0; i < nx; ++i) {
                const double gx = (r0[step_idx(i, nx, +1, b)] - r0[step_idx(i, nx, -1, b)]) * inv_2h;
                const double gy = (rp[i] - rm[i]) * inv_2h;
                double s = gx * gx + gy * gy;
                if (g.dim == 3) {
                    const double gz = (zrp[i] - zrm[i]) * inv_2h;
                    s += gz * gz;
                }
                o[i] = s;
            }
        }
    };
    if (g.dim == 3)
        parallel_for(plane_count(g), do_plane);
    else
        do_plane(0);
    return out;
}

namespace {

// Compensated per-plane partials combined in plane order: the result is
// independent of the worker count and reproducible run to run.
double reduce_planes(const Field& f, double (*plane_fn)(const double*, std::size_t)) {
    const GridSpec& g = f.grid;
    const int planes = plane_count(g);
    const std::size_t stride = g.dim == 3
                                   ? static_cast<std::size_t>(g.ny) * g.nx
                                   : static_cast<std::size_t>(g.nx);
    std::vector<double> partial(planes);
    parallel_for(planes, [&](int p) {
        partial[p] = plane_fn(f.v.data() + static_cast<std::size_t>(p) * stride, stride);
    });
    double s = 0.0, c = 0.0;
    for (double x : partial) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double plane_sum(const double* p, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = p[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace

double field_sum(const Field& f) { return reduce_planes(f, plane_sum); }

double inner_product(const Field& a, const Field& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("inner_product: grids differ");
    const GridSpec& g = a.grid;
    const int planes = plane_count(g);
    const std::size_t stride = g.dim == 3
                                   ? static_cast<std::size_t>(g.ny) * g.nx
                                   : static_cast<std::size_t>(g.nx);
    std::vector<double> partial(planes);
    parallel_for(planes, [&](int p) {
        const double* pa = a.v.data() + static_cast<std::size_t>(p) * stride;
        const double* pb = b.v.data() + static_cast<std::size_t>(p) * stride;
        double s = 0.0, c = 0.0;
        for (std::size_t i = 0; i < stride; ++i) {
            double y = pa[i] * pb[i] - c;
            double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        partial[p] = s;
    });
    double s = 0.0, c = 0.0;
    for (double x : partial) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double x : f.v) {
        double a = std::fabs(x);
        if (a > m) m = a;
    }
    return m;
}

bool all_finite(const Field& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace balfield
