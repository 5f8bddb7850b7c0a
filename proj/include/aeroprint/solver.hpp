#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aeroprint/instance.hpp"
#include "aeroprint/model.hpp"

namespace aeroprint {

enum class SolveStatus { Optimal, FeasibleTimeout, Infeasible };

const char* status_name(SolveStatus status);

struct SolveLimits {
  double time_limit_s = 300.0;
  double gap_abs = 0.0;  // extra slack allowed when pruning; 0 = exact search
  int threads = 0;       // 0 = hardware concurrency
};

// A complete mission plan: assignment and start time per task plus everything
// derived from them.
struct Schedule {
  std::vector<int> robot_of;    // per task
  std::vector<double> start_s;  // per task
  std::vector<std::vector<int>> robot_sequences;  // per robot, by start time
  // Per conflict pair: 1 when task_a's segment is entered first, else 0.
  std::vector<int> orientations;
  double makespan_s = 0.0;
  std::vector<double> material_l;  // per robot
  std::vector<double> flight_s;    // per robot
  std::vector<char> used;          // per robot

  int task_count() const { return static_cast<int>(robot_of.size()); }
  int robot_count() const { return static_cast<int>(material_l.size()); }
};

struct ObjectiveBreakdown {
  double j = 0.0;
  double j_ms = 0.0;  // makespan
  double j_im = 0.0;  // importance-weighted completion sum
  double j_ut = 0.0;  // used robot count
};

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  double j_ms = 0.0;
  double j_im = 0.0;
  double j_ut = 0.0;
  double gap_abs = 0.0;  // incumbent minus best open bound, on timeout
  std::uint64_t nodes = 0;
  double wall_s = 0.0;
  std::optional<Schedule> schedule;
  std::string certificate;  // infeasibility reason when status == Infeasible
};

// Derives sequences, orientations, makespan, budgets and used flags from an
// assignment + start vector.
Schedule assemble_schedule(const MissionInstance& instance, int m_robots,
                           const std::vector<int>& robot_of,
                           const std::vector<double>& start_s);

// Objective value of a schedule under a variant's weights. j_im and j_ut are
// always reported; they enter j only for the variants that price them.
ObjectiveBreakdown objective_of(const MissionInstance& instance, Variant variant,
                                const Schedule& schedule);

// Exact branch-and-bound: branches task assignments in descending-importance
// order, resolves ordering/conflict disjunctions lazily, and evaluates start
// times through the earliest-start difference system.
SolveReport solve(const MissionInstance& instance, int m_robots, Variant variant,
                  const SolveLimits& limits = {});

struct SweepEntry {
  int m_robots = 0;
  bool material_infeasible = false;  // necessary-condition check for this M
  SolveReport report;
};

// One solve per fleet size in [m_min, m_max].
std::vector<SweepEntry> sweep_fleet(const MissionInstance& instance, int m_min,
                                    int m_max, Variant variant,
                                    const SolveLimits& limits = {});

}  // namespace aeroprint
