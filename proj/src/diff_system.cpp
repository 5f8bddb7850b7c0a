#include "aeroprint/diff_system.hpp"

namespace aeroprint {

std::optional<std::vector<double>> earliest_starts(const DiffConstraintSystem& sys) {
  std::vector<double> s(sys.node_count, 0.0);
  // At most node_count rounds of relaxation can make progress on a feasible
  // system; one more changing round certifies a positive cycle.
  for (int round = 0; round <= sys.node_count; ++round) {
    bool changed = false;
    for (const DiffArc& arc : sys.arcs) {
      const double bound = s[arc.from] + arc.weight;
      if (bound > s[arc.to]) {
        s[arc.to] = bound;
        changed = true;
      }
    }
    if (!changed) return s;
  }
  return std::nullopt;
}

}  // namespace aeroprint
