#pragma once

#include <string>
#include <vector>

#include "aeroprint/solver.hpp"

namespace aeroprint {

// Contents of a schedule file: assignments plus the provenance needed to
// re-validate them (variant, objective, the exact parameters used).
struct PlanFile {
  std::vector<int> robot_of;     // dense by task id
  std::vector<double> start_s;
  double makespan_s = 0.0;
  double objective = 0.0;
  Variant variant = Variant::P1;
  MissionParams params_used;
};

std::string save_schedule_json(const Schedule& schedule, Variant variant,
                               double objective,
                               const MissionParams& params_used);

PlanFile load_schedule_json(const std::string& text);

// Re-assembles a full Schedule against an instance; the stored makespan is
// kept so a tampered value fails the checker.
Schedule plan_to_schedule(const MissionInstance& instance, const PlanFile& plan);

}  // namespace aeroprint
