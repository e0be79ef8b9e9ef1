#pragma once

#include <array>
#include <string>
#include <utility>
#include <variant>

#include "balfield/model.hpp"
#include "balfield/profile.hpp"

namespace balfield {

/// Pointwise curvature data of a surface: sum curvature (1/length),
/// Gaussian curvature (1/length^2) and the tangential Laplacian of the sum
/// curvature (1/length^3). For any real surface K_S^2 - 4 K_G >= 0 (it is
/// the squared principal-curvature difference).
struct CurvatureSample {
    double k_s = 0.0;
    double k_g = 0.0;
    double lap_t_k_s = 0.0;
};

/// Reference surfaces with closed-form area and curvatures. The torus has
/// tube angle theta measured from the outer equator: theta = 0 outside
/// (both curvatures positive), theta = pi inside (Gaussian negative).
struct AnalyticPlane {};
struct AnalyticSphere {
    double radius = 1.0;
};
struct AnalyticTorus {
    double major_radius = 2.0;  ///< center-of-tube ring radius R
    double minor_radius = 1.0;  ///< tube radius r, 0 < r < R
};
using AnalyticSurface = std::variant<AnalyticPlane, AnalyticSphere, AnalyticTorus>;

/// Closed-form surface area. Throws std::invalid_argument for the plane
/// (unbounded).
double analytic_area(const AnalyticSurface& s);

/// Curvature sample at a point of the surface; `theta` selects the tube
/// angle on the torus and is ignored for the sphere and plane. Torus closed
/// forms, with u = R + r cos(theta):
///   K_S = 1/r + cos(theta)/u,
///   K_G = cos(theta)/(r u),
///   lap_T K_S = -R (R cos(theta) + r) / (r^2 u^3),
/// the last from the surface Laplacian (1/(r u)) d/dtheta [(u/r) dK_S/dtheta].
CurvatureSample curvature_at(const AnalyticSurface& s, double theta = 0.0);

/// kappa_1 >= kappa_2 recovered from (K_S, K_G); the discriminant
/// K_S^2 - 4 K_G is clamped at zero against roundoff.
std::array<double, 2> principal_curvatures(const CurvatureSample& c);

/// Area dilation of the offset surface at signed normal distance w:
/// 1 - w K_S + w^2 K_G. Equals the ratio of the offset area element to the
/// base one; for a sphere it is (1 - w/R)^2 exactly.
double metric_factor(double w, const CurvatureSample& c);

/// d/dw log(metric_factor) = (-K_S + 2 w K_G) / (1 - w K_S + w^2 K_G).
/// At w = 0 this is -K_S. Throws std::domain_error when the factor is
/// <= 1e-12 (at or beyond a focal point), reporting the offending offset.
double adapted_log_metric_derivative(double w, const CurvatureSample& c);

/// Checks the vector identity n_u x n_v = K_G (S_u x S_v) on a closed-form
/// parameterization, comparing (n_u x n_v) . s_hat against sqrt(G) K_G on an
/// n_u x n_v sample grid (cell centers, so the sphere poles are avoided).
/// Returns the largest |lhs - rhs| divided by the largest |rhs| over the
/// grid; both sides vanish identically on the plane, where 0 is returned.
double gaussian_area_identity(const AnalyticSurface& s, int n_u, int n_v);

/// Interface energy of a width-W cubic profile on area A under the given
/// weights: (D 24/W^3 - 12/(5W) + lambda W/10) A. With the balanced weights
/// this collapses to 1.2 A / W.
double energy_by_width(double width, const ModelWeights& weights, double area);

/// Normal speed of the zero set predicted by the adapted-frame analysis of
/// the descent flow, for a cubic profile of the given width:
///   v = D (lap_T K_S + K_S (K_S^2 - 4 K_G)) - K_S (16 D / W^2 - 1),
/// positive toward the interior (a shrinking sphere has v > 0). The last
/// factor is 16 D/W^2 - 1, exactly zero for the balanced weights, so
/// umbilic samples (K_S^2 = 4 K_G, lap_T K_S = 0) return exactly 0. With
/// D = 0 the speed reduces to K_S: interfaces move at the sum-curvature
/// rate.
double zero_set_velocity(const CurvatureSample& c, const ModelWeights& weights,
                         const ProfileSpec& spec);

/// The residual motion term of the balanced model next to the variational
/// bending-energy (elastica) term it approximates:
///   (lap_T K_S + K_S (K_S^2 - 4 K_G), lap_T K_S + 1/2 K_S (K_S^2 - 4 K_G)).
/// They differ by the factor on the cubic part; both vanish on umbilics.
std::pair<double, double> elastica_gap(const CurvatureSample& c);

/// One row of the interface-energy decomposition over a surface.
struct EnergyTermRow {
    std::string name;       ///< "bending", "gradient" or "well"
    double dominant = 0.0;  ///< flat-profile closed form, width-energy convention
    double flat_exact = 0.0; ///< exact flat-profile closed form (differs from
                             ///< `dominant` only for the well row, whose
                             ///< convention rounds the band integral to W/10)
    double neglected = 0.0;  ///< leading curvature correction, closed form
    double ratio = 0.0;      ///< |neglected| / |flat_exact|
    double quad_flat = 0.0;  ///< quadrature of the flat density, times area
    double quad_adapted = 0.0;  ///< quadrature with the offset metric factor
};

/// Closed-form vs quadrature decomposition of the interface energy on an
/// analytic surface. Closed forms per row (profile width W, area A):
///   bending : dominant D 24/W^3 A,
///             neglected D (12/(5W)) * integral of (K_S^2 - K_G/2) dA
///             (exact for umbilic surfaces, where the adapted bending
///             density is polynomial in w; quadratic truncation otherwise);
///   gradient: dominant -(12/(5W)) A,
///             neglected -(3W/35) * integral of K_G dA;
///   well    : dominant lambda (W/10) A, exact flat value lambda (486/5005) W A,
///             neglected lambda (37/18018) W^3 * integral of K_G dA.
/// quad_adapted integrates the same densities against the offset metric
/// factor, with the adapted normal-derivative correction on the bending row;
/// the torus surface direction uses a 256-panel periodic trapezoid.
struct EnergyTermReport {
    std::array<EnergyTermRow, 3> rows;
    double width_energy = 0.0;   ///< energy_by_width(W, weights, A)
    double adapted_total = 0.0;  ///< sum of quad_adapted over the rows
    /// Bending correction grouped as D (12/(5W)) * integral of
    /// (kappa_1^2 + kappa_2^2) dA instead: the grouping suggested by the
    /// w-independent prefactor alone. It drops the profile cross term and
    /// second moments that enter at the same curvature order (which shift
    /// the coefficient to K_S^2 - K_G/2), so it is reported for comparison
    /// but not used in `ratio`.
    double sq_curvature_neglected = 0.0;
};

/// Decomposes the interface energy on the surface. The plane (no finite
/// area) is reported per unit area with all corrections exactly zero.
/// Throws std::domain_error when the offset band |w| <= W/2 reaches a focal
/// point (metric factor <= 0 at a quadrature sample): the width is too
/// large for the curvature and the offset frame degenerates.
EnergyTermReport energy_term_report(double width, const AnalyticSurface& s,
                                    const ModelWeights& weights);

/// Band integral of the double-well density along the cubic profile,
/// integral of (phi^2-1)^2/4 over |w| <= W/2. The exact value is
/// (486/5005) W; `ratio` compares it against the conventional W/10.
struct WellBandIntegral {
    double value = 0.0;
    double ratio = 0.0;  ///< value / (W/10)
};
WellBandIntegral double_well_band_integral(double width);

}  // namespace balfield
