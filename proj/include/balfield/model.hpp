#pragma once

#include "balfield/field_ops.hpp"
#include "balfield/grid.hpp"

namespace balfield {

/// Which energy drives the dynamics.
///
/// Balanced: E = sum D/2 (lap phi)^2 - 1/2 |grad phi|^2 + lambda well(phi),
/// descent residual D lap(lap phi) + lap phi + lambda (phi^3 - phi).
/// The destabilizing gradient term is held in check by the fourth-order one.
///
/// GinzburgLandau: E = sum 1/2 |grad phi|^2 + lambda well(phi),
/// descent residual -lap phi + lambda (phi^3 - phi). Reference dynamics;
/// interfaces move by mean curvature.
enum class ModelKind { Balanced, GinzburgLandau };

struct ModelWeights {
    ModelKind kind = ModelKind::Balanced;
    double bilaplacian = 0.0;  ///< D; zero for GinzburgLandau
    double well = 0.0;         ///< lambda
};

/// Weights that make the cubic profile of width W stationary under the
/// balanced energy: D = W^2/16, lambda = 21/W^2.
ModelWeights weights_from_width(double width);

/// Width-matched Ginzburg-Landau weights: same lambda = 21/W^2, no
/// fourth-order term. Used for like-for-like comparisons.
ModelWeights gl_weights_from_width(double width);

/// The width whose cubic profile is stationary for given balanced weights:
/// the positive root of lambda W^4 + 24 W^2 - 720 D = 0.
double optimal_width(const ModelWeights& weights);

struct BalanceResiduals {
    double quartic = 0.0;   ///< lambda W^4 + 24 W^2 - 720 D
    double pointwise = 0.0; ///< 48 D / W^3 - 3 / W
};

/// How far (W, weights) sit from the stationarity conditions; both vanish
/// at weights_from_width(W).
BalanceResiduals balance_residuals(double width, const ModelWeights& weights);

/// Variational residual (the descent direction is its negative). Shape and
/// boundary follow the input field.
Field el_residual(const Field& f, const ModelWeights& weights);

struct EnergyBreakdown {
    double bilaplacian = 0.0;  ///< D/2 sum (lap phi)^2 h^d
    double gradient = 0.0;     ///< -+ 1/2 sum |grad phi|^2 h^d (sign per kind)
    double well = 0.0;         ///< lambda sum (phi^2-1)^2/4 h^d
    double total = 0.0;
};

/// Discrete energy whose exact gradient (per node, divided by h^d) is
/// el_residual. The gradient term uses one-sided differences so the
/// discrete chain rule closes; everything is summed with compensation, so
/// the value is independent of the worker count.
EnergyBreakdown energy(const Field& f, const ModelWeights& weights);

/// Largest explicit Euler step that keeps descent stable on the given grid:
/// h^4 / (80 D) for the balanced model, h^2 / (4 dim + 2 lambda) for
/// Ginzburg-Landau.
double stable_dt(const ModelWeights& weights, const GridSpec& grid);

/// One explicit descent step, f <- f - dt * el_residual(f). Throws
/// std::runtime_error if the update produces a non-finite value.
void step(Field& f, const ModelWeights& weights, double dt);

/// n descent steps at stable_dt under the balanced weights for the given
/// width. Pulls a perturbed field back toward the stationary profile shape
/// without moving the zero set appreciably. n must be >= 1.
void reinitialize(Field& f, double width, int n = 10);

}  // namespace balfield
