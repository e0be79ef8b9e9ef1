#pragma once

#include <array>
#include <variant>
#include <vector>

#include "balfield/grid.hpp"
#include "balfield/model.hpp"

namespace balfield {

/// Interface band width W. The transition occupies |w| <= W/2 around the
/// zero set; resolution floor is W >= 4h on any grid the profile is placed on.
struct ProfileSpec {
    double width;
};

/// Cubic interface profile: phi(w) = -(4/W^3) w^3 + (3/W) w on |w| <= W/2,
/// clamped to +-1 outside the band. C^1 at the band edges by construction.
double ansatz_value(double w, const ProfileSpec& spec);

/// d^order phi / dw^order of the profile, order 1 or 2; zero outside the band.
double ansatz_derivative(double w, const ProfileSpec& spec, int order);

/// Axis-aligned plane x[axis] == offset; w grows toward larger coordinates.
struct PlaneShape {
    int axis = 0;
    double offset = 0.0;
};

/// Sphere in 3-D, circle in 2-D (center z ignored); w > 0 inside.
struct SphereShape {
    std::array<double, 3> center{};
    double radius = 0.0;
};

/// Torus around the z axis through center; w > 0 inside the tube. 3-D only.
struct TorusShape {
    std::array<double, 3> center{};
    double major_radius = 0.0;
    double minor_radius = 0.0;
};

using Shape = std::variant<PlaneShape, SphereShape, TorusShape>;

/// Signed distance to the shape's zero set, positive on the +1 side.
double signed_distance(const Shape& shape, double x, double y, double z);

/// Field initializer: phi = ansatz(signed distance). flip_sign swaps which
/// side maps to +1.
struct SignedDistanceInit {
    Shape shape;
    bool flip_sign = false;
};

/// Samples ansatz(signed_distance) on every node. Throws if the zero set
/// comes closer than W/2 + 2h to the domain boundary along the shape's
/// normal degree of freedom, or if the shape needs more dimensions than the
/// grid has, or if W < 4h.
Field init_field(const GridSpec& grid, const SignedDistanceInit& init,
                 const ProfileSpec& spec);

struct RelaxResult {
    std::vector<double> profile;   ///< steady node values, left plateau -1
    double residual_max = 0.0;     ///< max-norm of the final interior residual
    int steps = 0;                 ///< descent steps actually taken
};

/// 1-D steady transition profile by explicit gradient descent with the ends
/// pinned to -1 and +1. Runs until the interior residual max-norm drops
/// below tol or max_steps is exhausted. The 1-D domain must span >= 4 W.
RelaxResult relax_profile_1d(const ProfileSpec& spec, const ModelWeights& weights,
                             int n_nodes, double h, double dt, int max_steps,
                             double tol = 1e-8);

}  // namespace balfield
