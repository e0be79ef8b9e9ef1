#include "balfield/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "balfield/parallel.hpp"

namespace balfield {

namespace {

void require_positive_width(double width) {
    if (!(width > 0.0))
        throw std::invalid_argument("width must be positive");
}

double cell_measure(const GridSpec& g) {
    return g.dim == 3 ? g.h * g.h * g.h : g.h * g.h;
}

}  // namespace

ModelWeights weights_from_width(double width) {
    require_positive_width(width);
    ModelWeights w;
    w.kind = ModelKind::Balanced;
    w.bilaplacian = width * width / 16.0;
    w.well = 21.0 / (width * width);
    return w;
}

ModelWeights gl_weights_from_width(double width) {
    require_positive_width(width);
    ModelWeights w;
    w.kind = ModelKind::GinzburgLandau;
    w.bilaplacian = 0.0;
    w.well = 21.0 / (width * width);
    return w;
}

double optimal_width(const ModelWeights& weights) {
    const double D = weights.bilaplacian;
    const double lam = weights.well;
    if (!(D > 0.0) || !(lam > 0.0))
        throw std::invalid_argument("optimal_width needs positive bilaplacian and well weights");
    // Positive root of lam W^4 + 24 W^2 - 720 D = 0, solved for W^2.
    const double w2 = (-12.0 + std::sqrt(144.0 + 720.0 * D * lam)) / lam;
    return std::sqrt(w2);
}

BalanceResiduals balance_residuals(double width, const ModelWeights& weights) {
    require_positive_width(width);
    const double W = width;
    BalanceResiduals r;
    r.quartic = weights.well * W * W * W * W + 24.0 * W * W - 720.0 * weights.bilaplacian;
    r.pointwise = 48.0 * weights.bilaplacian / (W * W * W) - 3.0 / W;
    return r;
}

Field el_residual(const Field& f, const ModelWeights& weights) {
    require_valid_input(f, "el_residual");
    Field lap = laplacian(f);
    Field out(f.grid);
    if (weights.kind == ModelKind::Balanced) {
        Field bilap = laplacian(lap);
        const double D = weights.bilaplacian;
        const double lam = weights.well;
        const int n = static_cast<int>(f.size());
        for (int i = 0; i < n; ++i) {
            const double p = f.v[i];
            out.v[i] = D * bilap.v[i] + lap.v[i] + lam * (p * p * p - p);
        }
    } else {
        const double lam = weights.well;
        const int n = static_cast<int>(f.size());
        for (int i = 0; i < n; ++i) {
            const double p = f.v[i];
            out.v[i] = -lap.v[i] + lam * (p * p * p - p);
        }
    }
    return out;
}

namespace {

// Forward-difference Dirichlet form per node, so that its exact discrete
// gradient is the usual 2dim+1 point Laplacian under both boundary rules.
// Each axis contributes (f(i+1)-f(i))^2 / h^2 attributed to node i; at the
// upper edge the mirrored (periodic: wrapped) neighbor is used.
double gradient_form_plane(const Field& f, int z) {
    const GridSpec& g = f.grid;
    const int nx = g.nx, ny = g.ny;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const bool per = g.boundary == Boundary::Periodic;
    auto up = [per](int i, int n) {
        if (i + 1 < n) return i + 1;
        return per ? 0 : i;  // mirror ghost equals the edge node: zero jump
    };
    double sum = 0.0, c = 0.0;
    const int zp = (g.dim == 3) ? up(z, g.nz) : z;
    for (int j = 0; j < ny; ++j) {
        const int jp = up(j, ny);
        for (int i = 0; i < nx; ++i) {
            const int ip = up(i, nx);
            const double v = f.at(i, j, z);
            double q = 0.0;
            const double dx = f.at(ip, j, z) - v;
            q += dx * dx;
            const double dy = f.at(i, jp, z) - v;
            q += dy * dy;
            if (g.dim == 3) {
                const double dz = f.at(i, j, zp) - v;
                q += dz * dz;
            }
            const double y = q * inv_h2 - c;
            const double t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
    }
    return sum;
}

double well_plane(const Field& f, int z) {
    const GridSpec& g = f.grid;
    double sum = 0.0, c = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double p = f.at(i, j, z);
            const double q = p * p - 1.0;
            const double y = 0.25 * q * q - c;
            const double t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
    return sum;
}

double sq_plane(const Field& f, int z) {
    const GridSpec& g = f.grid;
    double sum = 0.0, c = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double p = f.at(i, j, z);
            const double y = p * p - c;
            const double t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
    return sum;
}

template <class PlaneFn>
double reduce_deterministic(const Field& f, PlaneFn fn) {
    const GridSpec& g = f.grid;
    const int planes = (g.dim == 3) ? g.nz : 1;
    std::vector<double> partial(static_cast<size_t>(planes));
    parallel_for(planes, [&](int z) { partial[static_cast<size_t>(z)] = fn(f, z); });
    double sum = 0.0, c = 0.0;
    for (double p : partial) {
        const double y = p - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

EnergyBreakdown energy(const Field& f, const ModelWeights& weights) {
    require_valid_input(f, "energy");
    const double vol = cell_measure(f.grid);
    EnergyBreakdown e;
    const double grad_form = reduce_deterministic(f, gradient_form_plane);
    e.well = weights.well * vol * reduce_deterministic(f, well_plane);
    if (weights.kind == ModelKind::Balanced) {
        Field lap = laplacian(f);
        e.bilaplacian = 0.5 * weights.bilaplacian * vol *
                        reduce_deterministic(lap, sq_plane);
        e.gradient = -0.5 * vol * grad_form;
    } else {
        e.bilaplacian = 0.0;
        e.gradient = 0.5 * vol * grad_form;
    }
    e.total = e.bilaplacian + e.gradient + e.well;
    return e;
}

double stable_dt(const ModelWeights& weights, const GridSpec& grid) {
    grid.validate();
    const double h = grid.h;
    if (weights.kind == ModelKind::Balanced) {
        if (!(weights.bilaplacian > 0.0))
            throw std::invalid_argument("balanced weights need a positive bilaplacian coefficient");
        return h * h * h * h / (80.0 * weights.bilaplacian);
    }
    return h * h / (4.0 * grid.dim + 2.0 * weights.well);
}

void step(Field& f, const ModelWeights& weights, double dt) {
    if (!(dt > 0.0))
        throw std::invalid_argument("step needs dt > 0");
    Field r = el_residual(f, weights);
    const int n = static_cast<int>(f.size());
    for (int i = 0; i < n; ++i) f.v[i] -= dt * r.v[i];
    if (!all_finite(f)) {
        std::ostringstream msg;
        msg << "step produced a non-finite value (dt=" << dt
            << ", max|residual|=" << max_abs(r) << "); the step size is likely unstable";
        throw std::runtime_error(msg.str());
    }
}

void reinitialize(Field& f, double width, int n) {
    if (n < 1)
        throw std::invalid_argument("reinitialize needs at least one step");
    const ModelWeights w = weights_from_width(width);
    const double dt = stable_dt(w, f.grid);
    for (int i = 0; i < n; ++i) step(f, w, dt);
}

}  // namespace balfield
