#pragma once

#include "aeroprint/solver.hpp"

namespace aeroprint {

// Exhaustive ground-truth scheduler for tiny instances: enumerates every
// task-to-robot assignment, every per-robot task permutation and every
// orientation of cross-robot conflicting segment pairs, evaluates each
// combination through the earliest-start system and returns the certified
// global minimum. Guarded to at most 7 tasks.
SolveReport brute_force_schedule(const MissionInstance& instance, int m_robots,
                                 Variant variant);

}  // namespace aeroprint
