#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aeroprint/instance.hpp"

namespace aeroprint {

// P1 minimizes makespan; P2 adds importance-weighted completion times;
// P3 adds the per-robot utilization cost.
enum class Variant { P1, P2, P3 };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);  // "p1" | "p2" | "p3"

enum class VarKind { X, Y, Z, COrient, U, Start, Makespan };

struct VarRef {
  VarKind kind;
  int i = -1;  // task (X/Y/Z/Start), conflict pair (COrient)
  int j = -1;  // second task (Y/Z)
  int k = -1;  // robot (X/Y/Z/U)
  bool binary = false;
  std::string name;
};

// Which formulation row family a constraint came from.
enum class RowTag { Eq1, Eq2, Eq4, Eq6, Eq7, Eq8, Eq10, Eq16, Eq17, Eq23 };

const char* row_tag_name(RowTag tag);

struct LinearConstraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  char sense = 'L';                           // 'L' <=, 'E' =, 'G' >=
  double rhs = 0.0;
  RowTag tag = RowTag::Eq1;
};

struct MilpModel {
  Variant variant = Variant::P1;
  int n_tasks = 0;
  int m_robots = 0;
  int n_conflicts = 0;
  double big_m = 0.0;

  std::vector<VarRef> vars;
  std::vector<LinearConstraint> rows;
  std::vector<std::pair<int, double>> objective;  // minimized
  double objective_constant = 0.0;

  int x_index(int i, int k) const;
  int y_index(int k, int i, int j) const;  // i != j
  int z_index(int k, int i, int j) const;  // unordered, pass i < j
  int c_index(int p) const;
  int u_index(int k) const;                // P3 only
  int s_index(int i) const;
  int cmax_index() const;
};

// Horizon-based big-M: sum of all occupancy intervals plus the longest task
// duration plus one second. Strictly larger than any start time or makespan
// of a left-justified schedule, which is what the ordering and conflict rows
// need released.
double big_m_value(const MissionInstance& instance);

// First m robots of the instance fleet; if m exceeds the fleet the specs are
// repeated cyclically with fresh ids.
std::vector<RobotSpec> fleet_for(const MissionInstance& instance, int m_robots);

MilpModel build_model(const MissionInstance& instance, int m_robots,
                      Variant variant);

// CPLEX-LP text, LF line endings, deterministic for identical input.
std::string export_lp(const MilpModel& model);

}  // namespace aeroprint
