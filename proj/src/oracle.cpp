#include "balfield/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace balfield {

namespace {

constexpr double kPi = std::numbers::pi;

void check_surface(const AnalyticSurface& s, const char* op) {
    if (const auto* sp = std::get_if<AnalyticSphere>(&s)) {
        if (!(sp->radius > 0.0))
            throw std::invalid_argument(std::string(op) + ": sphere radius must be positive");
    } else if (const auto* t = std::get_if<AnalyticTorus>(&s)) {
        if (!(t->minor_radius > 0.0 && t->major_radius > t->minor_radius))
            throw std::invalid_argument(std::string(op) + ": torus radii must satisfy 0 < r < R");
    }
}

struct GaussRule {
    std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

// Gauss-Legendre nodes by Newton iteration on the recurrence for P_n.
const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        constexpr int n = 48;
        GaussRule g;
        g.x.assign(n, 0.0);
        g.w.assign(n, 0.0);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 64; ++it) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double dz = p1 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            g.x[i] = -z;
            g.x[n - 1 - i] = z;
            g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
        }
        return g;
    }();
    return rule;
}

double well_density(double phi) {
    const double q = phi * phi - 1.0;
    return 0.25 * q * q;
}

struct Vec3 {
    double x, y, z;
};
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

}  // namespace

double analytic_area(const AnalyticSurface& s) {
    check_surface(s, "analytic_area");
    if (std::holds_alternative<AnalyticPlane>(s))
        throw std::invalid_argument("analytic_area: the plane is unbounded");
    if (const auto* sp = std::get_if<AnalyticSphere>(&s))
        return 4.0 * kPi * sp->radius * sp->radius;
    const auto& t = std::get<AnalyticTorus>(s);
    return 4.0 * kPi * kPi * t.major_radius * t.minor_radius;
}

CurvatureSample curvature_at(const AnalyticSurface& s, double theta) {
    check_surface(s, "curvature_at");
    CurvatureSample c;
    if (std::holds_alternative<AnalyticPlane>(s)) return c;
    if (const auto* sp = std::get_if<AnalyticSphere>(&s)) {
        c.k_s = 2.0 / sp->radius;
        // Written as a square of half K_S so K_S^2 - 4 K_G is an exact
        // floating-point zero for every radius.
        c.k_g = (0.5 * c.k_s) * (0.5 * c.k_s);
        c.lap_t_k_s = 0.0;
        return c;
    }
    const auto& t = std::get<AnalyticTorus>(s);
    const double R = t.major_radius, r = t.minor_radius;
    const double u = R + r * std::cos(theta);
    c.k_s = 1.0 / r + std::cos(theta) / u;
    c.k_g = std::cos(theta) / (r * u);
    c.lap_t_k_s = -R * (R * std::cos(theta) + r) / (r * r * u * u * u);
    return c;
}

std::array<double, 2> principal_curvatures(const CurvatureSample& c) {
    const double disc = std::max(c.k_s * c.k_s - 4.0 * c.k_g, 0.0);
    const double d = std::sqrt(disc);
    return {0.5 * (c.k_s + d), 0.5 * (c.k_s - d)};
}

double metric_factor(double w, const CurvatureSample& c) {
    return 1.0 - w * c.k_s + (w * w) * c.k_g;
}

double adapted_log_metric_derivative(double w, const CurvatureSample& c) {
    const double m = metric_factor(w, c);
    if (m <= 1e-12)
        throw std::domain_error(
            "adapted_log_metric_derivative: focal point reached at offset w=" +
            std::to_string(w) + " (metric factor " + std::to_string(m) + ")");
    return (-c.k_s + 2.0 * w * c.k_g) / m;
}

double gaussian_area_identity(const AnalyticSurface& s, int n_u, int n_v) {
    check_surface(s, "gaussian_area_identity");
    if (n_u < 1 || n_v < 1)
        throw std::invalid_argument("gaussian_area_identity: sample grid must be at least 1x1");
    if (std::holds_alternative<AnalyticPlane>(s)) return 0.0;

    double max_diff = 0.0, max_rhs = 0.0;
    auto accumulate = [&](const Vec3& su, const Vec3& sv, const Vec3& nu,
                          const Vec3& nv, double k_g) {
        const Vec3 sxs = cross(su, sv);
        const double root_g = norm(sxs);
        const Vec3 shat{sxs.x / root_g, sxs.y / root_g, sxs.z / root_g};
        const double lhs = dot(cross(nu, nv), shat);
        const double rhs = root_g * k_g;
        max_diff = std::max(max_diff, std::abs(lhs - rhs));
        max_rhs = std::max(max_rhs, std::abs(rhs));
    };

    if (const auto* sp = std::get_if<AnalyticSphere>(&s)) {
        const double R = sp->radius;
        for (int i = 0; i < n_u; ++i) {
            const double th = (i + 0.5) * kPi / n_u;  // cell centers skip the poles
            const double st = std::sin(th), ct = std::cos(th);
            for (int j = 0; j < n_v; ++j) {
                const double ph = (j + 0.5) * 2.0 * kPi / n_v;
                const double cp = std::cos(ph), spn = std::sin(ph);
                const Vec3 su{R * ct * cp, R * ct * spn, -R * st};
                const Vec3 sv{-R * st * spn, R * st * cp, 0.0};
                const Vec3 nu{ct * cp, ct * spn, -st};
                const Vec3 nv{-st * spn, st * cp, 0.0};
                accumulate(su, sv, nu, nv, 1.0 / (R * R));
            }
        }
    } else {
        const auto& t = std::get<AnalyticTorus>(s);
        const double R = t.major_radius, r = t.minor_radius;
        for (int i = 0; i < n_u; ++i) {
            const double th = (i + 0.5) * 2.0 * kPi / n_u;
            const double st = std::sin(th), ct = std::cos(th);
            const double u = R + r * ct;
            for (int j = 0; j < n_v; ++j) {
                const double ph = (j + 0.5) * 2.0 * kPi / n_v;
                const double cp = std::cos(ph), spn = std::sin(ph);
                const Vec3 su{-r * st * cp, -r * st * spn, r * ct};
                const Vec3 sv{-u * spn, u * cp, 0.0};
                const Vec3 nu{-st * cp, -st * spn, ct};
                const Vec3 nv{-ct * spn, ct * cp, 0.0};
                accumulate(su, sv, nu, nv, ct / (r * u));
            }
        }
    }
    return max_rhs > 0.0 ? max_diff / max_rhs : max_diff;
}

double energy_by_width(double width, const ModelWeights& weights, double area) {
    const double W = width;
    return (weights.bilaplacian * 24.0 / (W * W * W) - 12.0 / (5.0 * W) +
            weights.well * W / 10.0) *
           area;
}

double zero_set_velocity(const CurvatureSample& c, const ModelWeights& weights,
                         const ProfileSpec& spec) {
    const double d = weights.bilaplacian;
    const double w = spec.width;
    // 16 D / W^2 evaluates to exactly 1.0 for the balanced D = W^2/16, so the
    // curvature-rate term drops out bit-exactly there.
    return d * (c.lap_t_k_s + c.k_s * (c.k_s * c.k_s - 4.0 * c.k_g)) -
           c.k_s * (16.0 * d / (w * w) - 1.0);
}

std::pair<double, double> elastica_gap(const CurvatureSample& c) {
    const double cubic = c.k_s * (c.k_s * c.k_s - 4.0 * c.k_g);
    return {c.lap_t_k_s + cubic, c.lap_t_k_s + 0.5 * cubic};
}

namespace {

// Integrates fn over |w| <= W/2 with the cached Gauss-Legendre rule.
template <class Fn>
double band_quadrature(double width, Fn&& fn) {
    const GaussRule& g = gauss_rule();
    const double half = 0.5 * width;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i)
        acc += half * g.w[i] * fn(half * g.x[i]);
    return acc;
}

// Rejects widths whose offset band reaches a focal point of the sample.
// metric_factor factors as (1 - kappa_1 w)(1 - kappa_2 w), so the nearest
// focal offset is the reciprocal of the largest-magnitude curvature.
void check_focal(double width, const CurvatureSample& c, const char* op) {
    const double half = 0.5 * width;
    double m_min = std::min(metric_factor(-half, c), metric_factor(half, c));
    if (c.k_g > 0.0) {
        const double vertex = 0.5 * c.k_s / c.k_g;
        if (std::abs(vertex) <= half) m_min = std::min(m_min, metric_factor(vertex, c));
    }
    if (m_min <= 0.0) {
        const auto pc = principal_curvatures(c);
        const double kmax = std::max(std::abs(pc[0]), std::abs(pc[1]));
        throw std::domain_error(std::string(op) +
                                ": offset frame degenerates inside the band (nearest focal "
                                "offset " +
                                std::to_string(1.0 / kmax) + ", half-width " +
                                std::to_string(half) + ")");
    }
}

struct SurfaceIntegrals {
    double area = 0.0;
    double int_k_g = 0.0;    // integral of K_G dA
    double int_k_s_sq = 0.0; // integral of K_S^2 dA
    bool per_unit_area = false;
};

SurfaceIntegrals closed_form_integrals(const AnalyticSurface& s) {
    SurfaceIntegrals out;
    if (std::holds_alternative<AnalyticPlane>(s)) {
        out.area = 1.0;
        out.per_unit_area = true;
        return out;
    }
    if (const auto* sp = std::get_if<AnalyticSphere>(&s)) {
        const double R = sp->radius;
        out.area = 4.0 * kPi * R * R;
        out.int_k_g = 4.0 * kPi;
        out.int_k_s_sq = 16.0 * kPi;
        return out;
    }
    const auto& t = std::get<AnalyticTorus>(s);
    const double R = t.major_radius, r = t.minor_radius;
    out.area = 4.0 * kPi * kPi * R * r;
    out.int_k_g = 0.0;  // closed orientable genus-1
    out.int_k_s_sq = 4.0 * kPi * kPi * R * R / (r * std::sqrt(R * R - r * r));
    return out;
}

}  // namespace

EnergyTermReport energy_term_report(double width, const AnalyticSurface& s,
                                    const ModelWeights& weights) {
    check_surface(s, "energy_term_report");
    if (!(width > 0.0))
        throw std::invalid_argument("energy_term_report: width must be positive");
    const double W = width, D = weights.bilaplacian, lam = weights.well;
    const ProfileSpec spec{W};
    const SurfaceIntegrals si = closed_form_integrals(s);

    EnergyTermReport rep;
    auto& bend = rep.rows[0];
    auto& grad = rep.rows[1];
    auto& well = rep.rows[2];
    bend.name = "bending";
    grad.name = "gradient";
    well.name = "well";

    bend.dominant = D * 24.0 / (W * W * W) * si.area;
    bend.flat_exact = bend.dominant;
    bend.neglected = D * (12.0 / (5.0 * W)) * (si.int_k_s_sq - 0.5 * si.int_k_g);
    rep.sq_curvature_neglected =
        D * (12.0 / (5.0 * W)) * (si.int_k_s_sq - 2.0 * si.int_k_g);

    grad.dominant = -(12.0 / (5.0 * W)) * si.area;
    grad.flat_exact = grad.dominant;
    grad.neglected = -(3.0 * W / 35.0) * si.int_k_g;

    well.dominant = lam * (W / 10.0) * si.area;
    well.flat_exact = lam * (486.0 / 5005.0) * W * si.area;
    well.neglected = lam * (37.0 / 18018.0) * (W * W * W) * si.int_k_g;

    for (auto& row : rep.rows)
        row.ratio = row.flat_exact != 0.0
                        ? std::abs(row.neglected) / std::abs(row.flat_exact)
                        : 0.0;

    // Quadrature columns. Flat densities are curvature-free, so their
    // surface integral is density * area.
    auto phi = [&](double w) { return ansatz_value(w, spec); };
    auto dphi = [&](double w) { return ansatz_derivative(w, spec, 1); };
    auto ddphi = [&](double w) { return ansatz_derivative(w, spec, 2); };

    bend.quad_flat = si.area * band_quadrature(W, [&](double w) {
        const double p2 = ddphi(w);
        return 0.5 * D * p2 * p2;
    });
    grad.quad_flat = si.area * band_quadrature(W, [&](double w) {
        const double p1 = dphi(w);
        return -0.5 * p1 * p1;
    });
    well.quad_flat =
        si.area * band_quadrature(W, [&](double w) { return lam * well_density(phi(w)); });

    // Adapted densities at one curvature sample, integrated over the band.
    auto adapted_at = [&](const CurvatureSample& c, double out[3]) {
        check_focal(W, c, "energy_term_report");
        out[0] = band_quadrature(W, [&](double w) {
            const double m = metric_factor(w, c);
            const double mu = (-c.k_s + 2.0 * w * c.k_g) / m;
            const double val = ddphi(w) + mu * dphi(w);
            return 0.5 * D * val * val * m;
        });
        out[1] = band_quadrature(W, [&](double w) {
            const double p1 = dphi(w);
            return -0.5 * p1 * p1 * metric_factor(w, c);
        });
        out[2] = band_quadrature(W, [&](double w) {
            return lam * well_density(phi(w)) * metric_factor(w, c);
        });
    };

    double ad[3] = {0.0, 0.0, 0.0};
    if (std::holds_alternative<AnalyticTorus>(s)) {
        // Periodic trapezoid in the tube angle; the area element is
        // r (R + r cos theta) dtheta dphi.
        const auto& t = std::get<AnalyticTorus>(s);
        const double R = t.major_radius, r = t.minor_radius;
        constexpr int kPanels = 256;
        for (int i = 0; i < kPanels; ++i) {
            const double th = 2.0 * kPi * i / kPanels;
            double local[3];
            adapted_at(curvature_at(s, th), local);
            const double da =
                2.0 * kPi * r * (R + r * std::cos(th)) * (2.0 * kPi / kPanels);
            for (int q = 0; q < 3; ++q) ad[q] += local[q] * da;
        }
    } else {
        // Constant curvature across the surface (or zero on the plane).
        adapted_at(curvature_at(s), ad);
        for (double& v : ad) v *= si.area;
    }
    bend.quad_adapted = ad[0];
    grad.quad_adapted = ad[1];
    well.quad_adapted = ad[2];

    rep.width_energy = energy_by_width(W, weights, si.area);
    rep.adapted_total = bend.quad_adapted + grad.quad_adapted + well.quad_adapted;
    return rep;
}

WellBandIntegral double_well_band_integral(double width) {
    if (!(width > 0.0))
        throw std::invalid_argument("double_well_band_integral: width must be positive");
    const ProfileSpec spec{width};
    WellBandIntegral out;
    out.value = band_quadrature(
        width, [&](double w) { return well_density(ansatz_value(w, spec)); });
    out.ratio = out.value / (0.1 * width);
    return out;
}

}  // namespace balfield
