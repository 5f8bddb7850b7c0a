#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aeroprint/geometry.hpp"

namespace aeroprint {

// One printing task: a chunk's manufacturing path plus the material it
// consumes. duration_s is always derived as total path length / v_ex.
struct Task {
  int id = -1;
  PrintPath path;
  double volume_l = 0.0;
  double duration_s = 0.0;
};

struct RobotSpec {
  int id = -1;
  double capacity_l = 0.0;
  double battery_s = 0.0;
};

// Global mission parameters. Defaults follow the reference configuration:
// 15 s logistics windows, 0.1 m/s extrusion speed, 1 m clearance, beta 0.5,
// gains 1 / 0.07 / 100.
struct MissionParams {
  double tau_log_s = 15.0;  // logistics window before printing [s]
  double tau_log_e = 15.0;  // logistics window after printing [s]
  double v_ex = 0.1;        // constant extrusion/printing speed [m/s]
  double r_c = 1.0;         // minimum clearance between UAVs [m]
  double beta = 0.5;        // second-order in-degree scaling
  double g_ms = 1.0;        // makespan gain
  double g_im = 0.07;       // importance gain
  double g_ut = 100.0;      // per-robot utilization cost
  double delta = 0.0;       // FIFO exit-before-entry buffer [s]

  // Empty string when valid, otherwise "<field> <complaint>".
  std::string first_violation() const;
};

// DAG over task ids; edge (i -> j) means task i must complete before j starts.
class DependencyGraph {
public:
  DependencyGraph() = default;
  DependencyGraph(int node_count, std::vector<std::pair<int, int>> edges);

  int node_count() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& predecessors(int node) const;
  const std::vector<int>& successors(int node) const;

  // Number of incoming edges; throws on unknown node.
  int in_degree(int node) const;

  bool is_acyclic() const;

  // Second-order in-degree importance:
  //   alpha_i = in_degree(i) + beta * sum over direct predecessors u of in_degree(u)
  std::vector<double> importance(double beta) const;

private:
  void check_node(int node) const;

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> preds_;
  std::vector<std::vector<int>> succs_;
};

struct MissionInstance {
  std::vector<Task> tasks;        // ids dense 0..N-1, stored in id order
  DependencyGraph deps;
  std::vector<RobotSpec> robots;  // ids dense 0..M-1
  MissionParams params;
  ConflictSet conflicts;          // recomputed from the paths, never loaded

  int task_count() const { return static_cast<int>(tasks.size()); }
  int robot_count() const { return static_cast<int>(robots.size()); }
  // Span a task blocks its robot: tau_s + d_i + tau_e.
  double occupancy_s(int task) const {
    return params.tau_log_s + tasks[task].duration_s + params.tau_log_e;
  }
};

// Assembles an instance from parts: validates ids, derives durations from the
// paths and recomputes the conflict cache. Throws SchemaError on bad input.
MissionInstance make_instance(std::vector<Task> tasks,
                              std::vector<std::pair<int, int>> dependency_edges,
                              std::vector<RobotSpec> robots,
                              const MissionParams& params);

// Mission file round trip. Durations and conflicts are recomputed on load;
// unknown fields are rejected.
MissionInstance load_instance(const std::string& text);
std::string save_instance(const MissionInstance& instance);

// Non-throwing health check: empty result means the instance is schedulable
// as far as the necessary conditions go.
std::vector<std::string> validate_instance(const MissionInstance& instance);

// Synthetic stand-in for an external chunker: tiles a rectangular volume into
// nx * ny * nz box chunks, each printed as a per-layer boustrophedon path.
struct RectGridSpec {
  double width = 2.0;    // x extent [m]
  double length = 2.0;   // y extent [m]
  double height = 0.5;   // z extent [m]
  int nx = 3;
  int ny = 3;
  int nz = 2;
  int robot_count = 8;
  double capacity_l = 60.0;
  double battery_s = 3600.0;
  int layers_per_chunk = 2;
  double pass_spacing = 0.2;       // target boustrophedon pass pitch [m]
  double expansion_factor = 10.0;  // deposited volume / carried volume
};

MissionInstance generate_rect_instance(const RectGridSpec& spec,
                                       const MissionParams& params = {});

}  // namespace aeroprint
