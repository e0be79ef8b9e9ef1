#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "balfield/grid.hpp"

namespace balfield {

/// One zero crossing on a grid edge. `node` is the flat index of the lower
/// node, `axis` the edge direction, `t` the interpolation weight from that
/// node in [0, 1].
struct ZeroCrossing {
    std::size_t node = 0;
    int axis = 0;
    double t = 0.0;
    std::array<double, 3> position{};
};

/// All edge crossings of the zero level set, ordered lexicographically by
/// (node index, axis). Empty when the field does not change sign; callers
/// that require a surface treat that as an error, callers that report it
/// treat it as data.
struct ZeroCrossings {
    std::vector<ZeroCrossing> points;
    bool empty() const { return points.empty(); }
};

/// A node is "inside" when its value is strictly positive; an edge crosses
/// when exactly one endpoint is inside. The crossing parameter is the linear
/// root t = f_a / (f_a - f_b). Every sign-classification in this module
/// (crossings, surface extraction, volume) uses this one rule, so the
/// measured quantities are mutually consistent.
ZeroCrossings extract_zero_crossings(const Field& f);

/// Triangle mesh of the zero level set (3-D). Vertices on shared cell edges
/// are merged, so the mesh is watertight wherever the case table is.
struct TriMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> triangles;
};

/// Marching-cubes extraction with the standard 256-entry case table.
/// Faces whose four corner signs alternate diagonally are ambiguous; they are
/// resolved by the asymptotic decider: the sign of the bilinear saddle value
/// (ac - bd)/(a + c - b - d) picks which diagonal pair of corners stays
/// connected across the face. When a cell has exactly one ambiguous face and
/// the table's triangulation disagrees with the decider, the complementary
/// configuration's triangulation is used instead; cells with several
/// ambiguous faces keep the default table (such cells need sign patterns far
/// below the resolved-interface scale this engine requires). Throws if f
/// never changes sign.
TriMesh extract_surface(const Field& f);

/// 3-D: summed triangle areas of extract_surface. 2-D: summed marching-
/// squares segment lengths, with the same saddle decider on the ambiguous
/// cell. Throws if f never changes sign.
double surface_area(const Field& f);

/// Writes the mesh in OFF format (header, vertex list, triangle index list).
void write_off(const TriMesh& mesh, std::ostream& out);

/// Volume of the region {f > 0}, measured per x-column: whole-sign cell
/// segments count their full length, sign-change segments are split at the
/// linear-interpolation root; columns carry trapezoidal transverse weights
/// (1/2 on boundary rows/planes, 1/4 on their corners). Exact for uniform
/// fields (the node-span box ((n-1)h)^dim) and for axis-normal half spaces;
/// second order on smooth interfaces. Works for single-signed fields.
double enclosed_volume(const Field& f);

/// Curvature sampled on the grid with a validity mask: nodes where
/// |grad f| < 1e-6/h are set to 0 and marked invalid rather than clamped, so
/// they can be excluded from statistics instead of biasing them.
struct CurvatureField {
    Field values;
    std::vector<std::uint8_t> valid;
};

/// Sum curvature (twice the mean curvature) of the level sets of f, from
/// central-difference first and second derivatives in the expanded form
///   K_S = -(lap f * |grad f|^2 - grad f . H grad f) / |grad f|^3,
/// which is -div(grad f/|grad f|) with the quotient differentiated
/// analytically; one differentiation stage keeps it consistent with the
/// Gaussian field below. With f > 0 inside, the normal points inward and a
/// sphere of radius R measures K_S = +2/R.
CurvatureField sum_curvature_field(const Field& f);

/// Gaussian curvature of the level sets (3-D only; throws on 2-D grids):
///   K_G = grad f . adj(H) grad f / |grad f|^4.
/// Derivation: for a regular level set with unit normal n = grad f/|grad f|,
/// K_G = det(shape operator) = det(-dn restricted to the tangent plane).
/// Extending -dn to all of R^3 by its action H/|grad f| and projecting,
/// the product of the two tangent-plane eigenvalues equals
/// n . adj(H/|grad f|) n (the adjugate carries the 2x2 minor orthogonal to
/// n), hence K_G = (grad f . adj(H) grad f)/|grad f|^4. Orientation drops
/// out (both principal signs flip together).
CurvatureField gaussian_curvature_field(const Field& f);

/// Distance-from-center statistics over all zero crossings.
struct RadiusStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;
    int count = 0;
};

/// Crossing-based radius of a sphere-topology zero set. Throws when the
/// field has no crossings (the tracked surface vanished; callers report the
/// vanishing time upstream).
RadiusStats sphere_radius(const Field& f, const std::array<double, 3>& center);

/// Bundle the scalar surface measurements used by the experiment loop.
struct SurfaceMetrics {
    double area = 0.0;
    double volume = 0.0;
    double radius = 0.0;     ///< mean crossing distance from `center`
    double mean_k_s = 0.0;   ///< sum curvature averaged over the crossings
};

/// area + volume + radius + band curvature in one pass over the crossings.
/// mean_k_s interpolates sum_curvature_field linearly along each crossing
/// edge, skipping edges with an invalid endpoint. Throws without crossings.
SurfaceMetrics surface_metrics(const Field& f,
                               const std::array<double, 3>& center);

}  // namespace balfield
