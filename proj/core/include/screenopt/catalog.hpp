#pragma once

#include "screenopt/design.hpp"

#include <vector>

namespace screenopt {

// Orders with an embedded conference matrix.
std::vector<int> conference_orders();

// C with zero diagonal, +/-1 elsewhere and C'C = (order - 1) I.
Matrix conference_matrix(int order);

// Stacks (half; -half) and optionally a centre run.
Design foldover(const Matrix& half, bool append_center);

Design dsd(int k);

// Builds the (k + f)-factor DSD and keeps the first k columns. With
// drop_center the final centre run is removed.
Design adsd(int k, int f, bool drop_center = false);

}  // namespace screenopt
