#pragma once

#include <optional>
#include <vector>

namespace aeroprint {

// Lower-bound difference constraint: S[to] >= S[from] + weight.
struct DiffArc {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

// Nodes are task start times plus an implicit zero origin (every node also
// satisfies S >= 0). Feasible iff the arc graph has no positive cycle under
// longest-path semantics.
struct DiffConstraintSystem {
  int node_count = 0;
  std::vector<DiffArc> arcs;
};

// Componentwise-minimal nonnegative solution (longest path from the origin),
// or nullopt when a positive cycle makes the system infeasible.
// Bellman-Ford, O(V * E).
std::optional<std::vector<double>> earliest_starts(const DiffConstraintSystem& sys);

}  // namespace aeroprint
