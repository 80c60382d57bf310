#pragma once

#include <span>
#include <vector>

namespace mixedpde {

/// Finite-difference weights for the d-th derivative at z on arbitrary
/// nodes (Fornberg's recursion).
std::vector<double> fd_weights(double z, std::span<const double> nodes, int d);

/// Weights for the d-th derivative on the centred stencil -w..w with unit
/// spacing; divide by h^d.
std::vector<double> central_weights(int d, int half_width);

}  // namespace mixedpde
