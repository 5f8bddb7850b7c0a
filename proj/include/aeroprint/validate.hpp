#pragma once

#include <string>
#include <vector>

#include "aeroprint/solver.hpp"

namespace aeroprint {

// One broken constraint, re-derived arithmetically from the instance data.
struct Violation {
  enum class Kind {
    Assignment,
    Precedence,
    Ordering,
    Material,
    Battery,
    Conflict,
    Makespan,
  };
  Kind kind;
  int a = -1;  // task / robot id, depending on kind
  int b = -1;
  double magnitude = 0.0;  // how far violated, native units
  std::string detail;
};

const char* violation_kind_name(Violation::Kind kind);

// Re-checks every constraint family against the stored assignment and start
// times. Shares no constraint-generation code with the model module.
// Budgets are checked exactly; timing rows with a 1e-6 s tolerance.
std::vector<Violation> check_schedule(const MissionInstance& instance,
                                      const Schedule& schedule);

struct SimSample {
  double t = 0.0;
  double dist = 0.0;  // +inf when fewer than two robots are printing
  int a = -1;         // tasks attaining the minimum
  int b = -1;
};

struct SimReport {
  double dt_s = 0.0;
  bool has_min = false;  // false when no two robots ever print concurrently
  double min_distance_m = 0.0;
  double min_time_s = 0.0;
  int min_task_a = -1;
  int min_task_b = -1;
  std::vector<SimSample> series;   // uniform grid, ceil(makespan/dt)+1 samples
  std::vector<double> material_l;  // per robot
  std::vector<double> flight_s;    // per robot
  double makespan_s = 0.0;
};

// Samples every printing robot's position at the grid times plus all segment
// boundary instants; clearance is tracked only between concurrently printing
// robots (logistics flights are coordinated elsewhere).
SimReport simulate(const MissionInstance& instance, const Schedule& schedule,
                   double dt);

std::string sim_report_json(const SimReport& report);

struct GanttOutput {
  std::string svg;
  std::string csv;  // task,robot,start_s,print_start_s,print_end_s,complete_s
};

GanttOutput emit_gantt(const MissionInstance& instance, const Schedule& schedule);

}  // namespace aeroprint
