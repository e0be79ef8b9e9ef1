#pragma once

#include "balfield/grid.hpp"

namespace balfield {

/// Second-order Laplacian: per axis (f[i+1] - 2 f[i] + f[i-1]) / h^2,
/// 5-point in 2-D, 7-point in 3-D, boundary closure from the grid.
Field laplacian(const Field& f);

/// Laplacian applied twice; the boundary rule is re-applied between passes.
/// Interior 1-D composition is (f[i+2] - 4f[i+1] + 6f[i] - 4f[i-1] + f[i-2])/h^4
/// plus the cross terms the composition generates in 2-D/3-D.
Field bilaplacian(const Field& f);

/// |grad f|^2 from central first differences per axis, summed squares.
Field gradient_magnitude_sq(const Field& f);

/// Deterministic compensated (Kahan) sum of all node values, accumulated one
/// z-plane (y-row in 2-D) at a time in plane order regardless of worker count.
double field_sum(const Field& f);

/// Compensated deterministic dot product; fields must share the grid.
double inner_product(const Field& a, const Field& b);

/// Max |value| over every node.
double max_abs(const Field& f);

/// True if every node value is finite.
bool all_finite(const Field& f);

/// Throws std::invalid_argument if f has non-finite entries or an invalid grid.
void require_valid_input(const Field& f, const char* op);

}  // namespace balfield
