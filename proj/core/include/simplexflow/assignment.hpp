#pragma once

#include <vector>

#include "simplexflow/types.hpp"

namespace simplexflow {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with potentials, O(n^3)). Returns col[row].
std::vector<int> solve_assignment(const Matrix& cost);

}  // namespace simplexflow
