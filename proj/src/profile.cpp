#include "balfield/profile.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "balfield/parallel.hpp"

namespace balfield {

namespace {

void require_width(const ProfileSpec& spec) {
    if (!(spec.width > 0.0))
        throw std::invalid_argument("profile width must be positive");
}

}  // namespace

double ansatz_value(double w, const ProfileSpec& spec) {
    require_width(spec);
    const double W = spec.width;
    if (w >= 0.5 * W) return 1.0;
    if (w <= -0.5 * W) return -1.0;
    return (-4.0 / (W * W * W)) * w * w * w + (3.0 / W) * w;
}

double ansatz_derivative(double w, const ProfileSpec& spec, int order) {
    require_width(spec);
    const double W = spec.width;
    if (order != 1 && order != 2)
        throw std::invalid_argument("ansatz_derivative supports orders 1 and 2");
    if (w >= 0.5 * W || w <= -0.5 * W) return 0.0;
    if (order == 1) return (-12.0 / (W * W * W)) * w * w + 3.0 / W;
    return (-24.0 / (W * W * W)) * w;
}

double signed_distance(const Shape& shape, double x, double y, double z) {
    if (const auto* p = std::get_if<PlaneShape>(&shape)) {
        const double c[3] = {x, y, z};
        return c[p->axis] - p->offset;
    }
    if (const auto* s = std::get_if<SphereShape>(&shape)) {
        const double dx = x - s->center[0];
        const double dy = y - s->center[1];
        const double dz = z - s->center[2];
        return s->radius - std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    const auto& t = std::get<TorusShape>(shape);
    const double dx = x - t.center[0];
    const double dy = y - t.center[1];
    const double dz = z - t.center[2];
    const double rho = std::sqrt(dx * dx + dy * dy);
    const double q = rho - t.major_radius;
    return t.minor_radius - std::sqrt(q * q + dz * dz);
}

namespace {

// Closest approach of the zero set to the domain boundary along the
// direction the band actually extends. Planes only crowd the boundary along
// their own axis; spheres and tori along every axis they live in.
double boundary_clearance(const GridSpec& g, const Shape& shape) {
    const double lo[3] = {0.0, 0.0, 0.0};
    const double hi[3] = {(g.nx - 1) * g.h, (g.ny - 1) * g.h, (g.nz - 1) * g.h};

    if (const auto* p = std::get_if<PlaneShape>(&shape)) {
        if (p->axis < 0 || p->axis >= g.dim)
            throw std::invalid_argument("plane axis outside the grid dimension");
        return std::min(p->offset - lo[p->axis], hi[p->axis] - p->offset);
    }
    if (const auto* s = std::get_if<SphereShape>(&shape)) {
        double clear = hi[0];
        for (int a = 0; a < g.dim; ++a) {
            const double c = s->center[a];
            clear = std::min(clear, std::min(c - lo[a], hi[a] - c) - s->radius);
        }
        return clear;
    }
    const auto& t = std::get<TorusShape>(shape);
    if (g.dim != 3)
        throw std::invalid_argument("a torus needs a 3-d grid");
    const double reach_xy = t.major_radius + t.minor_radius;
    double clear = hi[0];
    for (int a = 0; a < 2; ++a) {
        const double c = t.center[a];
        clear = std::min(clear, std::min(c - lo[a], hi[a] - c) - reach_xy);
    }
    clear = std::min(clear, std::min(t.center[2] - lo[2], hi[2] - t.center[2]) -
                                t.minor_radius);
    return clear;
}

}  // namespace

Field init_field(const GridSpec& grid, const SignedDistanceInit& init,
                 const ProfileSpec& spec) {
    grid.validate();
    require_width(spec);
    if (spec.width < 4.0 * grid.h) {
        std::ostringstream msg;
        msg << "width " << spec.width << " is under the resolution floor 4h = "
            << 4.0 * grid.h;
        throw std::invalid_argument(msg.str());
    }
    const double clearance = boundary_clearance(grid, init.shape);
    const double needed = 0.5 * spec.width + 2.0 * grid.h;
    if (clearance < needed) {
        std::ostringstream msg;
        msg << "zero set needs " << needed << " of boundary clearance but has "
            << clearance;
        throw std::invalid_argument(msg.str());
    }

    Field f(grid);
    const double sign = init.flip_sign ? -1.0 : 1.0;
    const int planes = (grid.dim == 3) ? grid.nz : grid.ny;
    parallel_for(planes, [&](int p) {
        if (grid.dim == 3) {
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    const auto pos = grid.position(i, j, p);
                    const double w =
                        sign * signed_distance(init.shape, pos[0], pos[1], pos[2]);
                    f.at(i, j, p) = ansatz_value(w, spec);
                }
        } else {
            for (int i = 0; i < grid.nx; ++i) {
                const auto pos = grid.position(i, p, 0);
                const double w =
                    sign * signed_distance(init.shape, pos[0], pos[1], 0.0);
                f.at(i, p, 0) = ansatz_value(w, spec);
            }
        }
    });
    return f;
}

RelaxResult relax_profile_1d(const ProfileSpec& spec, const ModelWeights& weights,
                             int n_nodes, double h, double dt, int max_steps,
                             double tol) {
    require_width(spec);
    if (n_nodes < 16) throw std::invalid_argument("relax_profile_1d needs >= 16 nodes");
    if (!(h > 0.0) || !(dt > 0.0) || max_steps < 1)
        throw std::invalid_argument("relax_profile_1d: h, dt, max_steps must be positive");
    if ((n_nodes - 1) * h < 4.0 * spec.width)
        throw std::invalid_argument("1-d domain must span at least four widths");

    std::vector<double> f(static_cast<size_t>(n_nodes));
    const double mid = 0.5 * (n_nodes - 1) * h;
    for (int i = 0; i < n_nodes; ++i)
        f[static_cast<size_t>(i)] = ansatz_value(i * h - mid, spec);
    f.front() = -1.0;
    f.back() = 1.0;

    const double inv_h2 = 1.0 / (h * h);
    const double D = weights.bilaplacian;
    const double lam = weights.well;
    const bool balanced = weights.kind == ModelKind::Balanced;

    std::vector<double> lap(static_cast<size_t>(n_nodes));
    std::vector<double> res(static_cast<size_t>(n_nodes), 0.0);

    // Off-domain ghosts clamp to the plateau values carried by the end nodes.
    auto at = [&](const std::vector<double>& v, int i) {
        if (i < 0) return v.front();
        if (i >= n_nodes) return v.back();
        return v[static_cast<size_t>(i)];
    };

    RelaxResult out;
    for (int s = 0; s < max_steps; ++s) {
        for (int i = 0; i < n_nodes; ++i)
            lap[static_cast<size_t>(i)] =
                (at(f, i - 1) - 2.0 * f[static_cast<size_t>(i)] + at(f, i + 1)) * inv_h2;
        double rmax = 0.0;
        for (int i = 1; i + 1 < n_nodes; ++i) {
            const double p = f[static_cast<size_t>(i)];
            const double nonlin = lam * (p * p * p - p);
            double r;
            if (balanced) {
                const double bilap =
                    (at(lap, i - 1) - 2.0 * lap[static_cast<size_t>(i)] + at(lap, i + 1)) *
                    inv_h2;
                r = D * bilap + lap[static_cast<size_t>(i)] + nonlin;
            } else {
                r = -lap[static_cast<size_t>(i)] + nonlin;
            }
            res[static_cast<size_t>(i)] = r;
            rmax = std::max(rmax, std::abs(r));
        }
        out.residual_max = rmax;
        out.steps = s;
        if (rmax < tol) break;
        for (int i = 1; i + 1 < n_nodes; ++i)
            f[static_cast<size_t>(i)] -= dt * res[static_cast<size_t>(i)];
        for (double v : f)
            if (!std::isfinite(v))
                throw std::runtime_error("relax_profile_1d diverged; reduce dt");
        out.steps = s + 1;
    }
    out.profile = std::move(f);
    return out;
}

}  // namespace balfield
