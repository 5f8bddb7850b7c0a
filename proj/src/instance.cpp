#include "aeroprint/instance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"

namespace aeroprint {

using ordered_json = nlohmann::ordered_json;
using detail::get_int;
using detail::get_number;
using detail::require_keys;

std::string MissionParams::first_violation() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };
  // zero logistics windows are allowed; they only shrink the occupancy span
  if (!non_negative(tau_log_s)) return "tau_log_s must be >= 0";
  if (!non_negative(tau_log_e)) return "tau_log_e must be >= 0";
  if (!positive(v_ex)) return "v_ex must be > 0";
  if (!positive(r_c)) return "r_c must be > 0";
  if (!positive(beta)) return "beta must be > 0";
  if (!non_negative(g_ms)) return "g_ms must be >= 0";
  if (!non_negative(g_im)) return "g_im must be >= 0";
  if (!non_negative(g_ut)) return "g_ut must be >= 0";
  if (!non_negative(delta)) return "delta must be >= 0";
  return {};
}

DependencyGraph::DependencyGraph(int node_count,
                                 std::vector<std::pair<int, int>> edges)
    : n_(node_count), edges_(std::move(edges)) {
  if (n_ < 0) throw SchemaError("dependency graph node count must be >= 0");
  preds_.resize(n_);
  succs_.resize(n_);
  std::set<std::pair<int, int>> seen;
  for (const auto& [u, v] : edges_) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) {
      throw SchemaError("dependencies: edge references unknown task id");
    }
    if (!seen.insert({u, v}).second) {
      throw SchemaError("dependencies: duplicate edge");
    }
    preds_[v].push_back(u);
    succs_[u].push_back(v);
  }
  for (auto& p : preds_) std::sort(p.begin(), p.end());
  for (auto& s : succs_) std::sort(s.begin(), s.end());
}

void DependencyGraph::check_node(int node) const {
  if (node < 0 || node >= n_) throw ParamError("unknown node in dependency graph");
}

const std::vector<int>& DependencyGraph::predecessors(int node) const {
  check_node(node);
  return preds_[node];
}

const std::vector<int>& DependencyGraph::successors(int node) const {
  check_node(node);
  return succs_[node];
}

int DependencyGraph::in_degree(int node) const {
  check_node(node);
  return static_cast<int>(preds_[node].size());
}

bool DependencyGraph::is_acyclic() const {
  std::vector<int> indeg(n_, 0);
  for (const auto& [u, v] : edges_) {
    (void)u;
    ++indeg[v];
  }
  std::deque<int> ready;
  for (int i = 0; i < n_; ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  int visited = 0;
  while (!ready.empty()) {
    int u = ready.front();
    ready.pop_front();
    ++visited;
    for (int v : succs_[u]) {
      if (--indeg[v] == 0) ready.push_back(v);
    }
  }
  return visited == n_;
}

std::vector<double> DependencyGraph::importance(double beta) const {
  std::vector<double> alpha(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double second = 0.0;
    for (int u : preds_[i]) second += static_cast<double>(preds_[u].size());
    alpha[i] = static_cast<double>(preds_[i].size()) + beta * second;
  }
  return alpha;
}

MissionInstance make_instance(std::vector<Task> tasks,
                              std::vector<std::pair<int, int>> dependency_edges,
                              std::vector<RobotSpec> robots,
                              const MissionParams& params) {
  if (const std::string v = params.first_violation(); !v.empty()) {
    throw SchemaError("params." + v);
  }
  if (tasks.empty()) throw SchemaError("tasks: need at least one task");
  if (robots.empty()) throw SchemaError("robots: need at least one robot");

  std::sort(tasks.begin(), tasks.end(),
            [](const Task& a, const Task& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].id != static_cast<int>(i)) {
      std::ostringstream os;
      os << "tasks: ids must be dense 0.." << tasks.size() - 1
         << " (duplicate or missing id " << i << ")";
      throw SchemaError(os.str());
    }
    if (!(tasks[i].volume_l > 0.0) || !std::isfinite(tasks[i].volume_l)) {
      std::ostringstream os;
      os << "tasks[" << i << "].volume_l must be > 0";
      throw SchemaError(os.str());
    }
  }
  std::sort(robots.begin(), robots.end(),
            [](const RobotSpec& a, const RobotSpec& b) { return a.id < b.id; });
  for (std::size_t k = 0; k < robots.size(); ++k) {
    if (robots[k].id != static_cast<int>(k)) {
      throw SchemaError("robots: ids must be dense (duplicate or missing id)");
    }
    if (!(robots[k].capacity_l > 0.0) || !std::isfinite(robots[k].capacity_l)) {
      std::ostringstream os;
      os << "robots[" << k << "].capacity_l must be > 0";
      throw SchemaError(os.str());
    }
    if (!(robots[k].battery_s > 0.0) || !std::isfinite(robots[k].battery_s)) {
      std::ostringstream os;
      os << "robots[" << k << "].battery_s must be > 0";
      throw SchemaError(os.str());
    }
  }

  MissionInstance inst;
  inst.params = params;
  inst.tasks = std::move(tasks);
  inst.robots = std::move(robots);
  inst.deps = DependencyGraph(static_cast<int>(inst.tasks.size()),
                              std::move(dependency_edges));
  if (!inst.deps.is_acyclic()) throw SchemaError("dependency cycle");

  std::vector<PrintPath> paths;
  paths.reserve(inst.tasks.size());
  for (auto& t : inst.tasks) {
    t.duration_s = t.path.total_length() / params.v_ex;
    paths.push_back(t.path);
  }
  inst.conflicts = detect_conflicts(paths, params.r_c);
  return inst;
}

MissionInstance load_instance(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("mission file is not valid JSON: ") + e.what());
  }
  require_keys(doc, "mission", {"params", "robots", "tasks", "dependencies"});

  const MissionParams params = detail::params_from_json(doc["params"], "params");

  const auto& jr = doc["robots"];
  if (!jr.is_array() || jr.empty()) {
    throw SchemaError("robots must be a non-empty array");
  }
  std::vector<RobotSpec> robots;
  robots.reserve(jr.size());
  for (std::size_t k = 0; k < jr.size(); ++k) {
    const std::string where = "robots[" + std::to_string(k) + "]";
    require_keys(jr[k], where, {"id", "capacity_l", "battery_s"});
    RobotSpec r;
    r.id = get_int(jr[k], where, "id");
    r.capacity_l = get_number(jr[k], where, "capacity_l");
    r.battery_s = get_number(jr[k], where, "battery_s");
    robots.push_back(r);
  }

  const auto& jt = doc["tasks"];
  if (!jt.is_array() || jt.empty()) {
    throw SchemaError("tasks must be a non-empty array");
  }
  std::vector<Task> tasks;
  tasks.reserve(jt.size());
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const std::string where = "tasks[" + std::to_string(i) + "]";
    require_keys(jt[i], where, {"id", "volume_l", "waypoints"});
    Task t;
    t.id = get_int(jt[i], where, "id");
    t.volume_l = get_number(jt[i], where, "volume_l");
    const auto& jw = jt[i]["waypoints"];
    if (!jw.is_array() || jw.size() < 2) {
      throw SchemaError(where + ".waypoints must be an array of >= 2 points");
    }
    std::vector<Point3> wps;
    wps.reserve(jw.size());
    for (std::size_t w = 0; w < jw.size(); ++w) {
      const auto& jpnt = jw[w];
      if (!jpnt.is_array() || jpnt.size() != 3 || !jpnt[0].is_number() ||
          !jpnt[1].is_number() || !jpnt[2].is_number()) {
        throw SchemaError(where + ".waypoints[" + std::to_string(w) +
                          "] must be [x, y, z]");
      }
      wps.push_back(
          {jpnt[0].get<double>(), jpnt[1].get<double>(), jpnt[2].get<double>()});
    }
    try {
      t.path = PrintPath(std::move(wps));
    } catch (const GeometryError& e) {
      throw SchemaError(where + ".waypoints: " + e.what());
    }
    tasks.push_back(std::move(t));
  }

  const auto& jd = doc["dependencies"];
  if (!jd.is_array()) throw SchemaError("dependencies must be an array");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(jd.size());
  for (std::size_t e = 0; e < jd.size(); ++e) {
    const auto& je = jd[e];
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
        !je[1].is_number_integer()) {
      throw SchemaError("dependencies[" + std::to_string(e) + "] must be [i, j]");
    }
    edges.emplace_back(je[0].get<int>(), je[1].get<int>());
  }

  return make_instance(std::move(tasks), std::move(edges), std::move(robots),
                       params);
}

std::string save_instance(const MissionInstance& instance) {
  ordered_json doc;
  doc["params"] = detail::params_to_json(instance.params);

  ordered_json jr = ordered_json::array();
  for (const auto& r : instance.robots) {
    ordered_json o;
    o["id"] = r.id;
    o["capacity_l"] = r.capacity_l;
    o["battery_s"] = r.battery_s;
    jr.push_back(std::move(o));
  }
  doc["robots"] = std::move(jr);

  ordered_json jt = ordered_json::array();
  for (const auto& t : instance.tasks) {
    ordered_json o;
    o["id"] = t.id;
    o["volume_l"] = t.volume_l;
    ordered_json jw = ordered_json::array();
    for (const auto& p : t.path.waypoints()) {
      jw.push_back(ordered_json::array({p.x, p.y, p.z}));
    }
    o["waypoints"] = std::move(jw);
    jt.push_back(std::move(o));
  }
  doc["tasks"] = std::move(jt);

  auto edges = instance.deps.edges();
  std::sort(edges.begin(), edges.end());
  ordered_json jd = ordered_json::array();
  for (const auto& [u, v] : edges) jd.push_back(ordered_json::array({u, v}));
  doc["dependencies"] = std::move(jd);

  return doc.dump(2) + "\n";
}

std::vector<std::string> validate_instance(const MissionInstance& instance) {
  std::vector<std::string> findings;
  if (!instance.deps.is_acyclic()) findings.push_back("dependency cycle");

  double total_volume = 0.0;
  for (const auto& t : instance.tasks) {
    if (!(t.volume_l > 0.0)) {
      findings.push_back("task " + std::to_string(t.id) + ": non-positive volume");
    }
    if (!(t.duration_s > 0.0)) {
      findings.push_back("task " + std::to_string(t.id) + ": non-positive duration");
    }
    total_volume += t.volume_l;
  }

  double fleet_capacity = 0.0;
  double max_battery = 0.0;
  for (const auto& r : instance.robots) {
    fleet_capacity += r.capacity_l;
    max_battery = std::max(max_battery, r.battery_s);
  }
  if (total_volume > fleet_capacity) {
    std::ostringstream os;
    os << "material infeasible: total task volume " << total_volume
       << " L exceeds fleet capacity " << fleet_capacity << " L";
    findings.push_back(os.str());
  }
  for (const auto& t : instance.tasks) {
    const double occ = instance.occupancy_s(t.id);
    if (occ > max_battery) {
      std::ostringstream os;
      os << "task " << t.id << " unschedulable: battery (occupancy " << occ
         << " s exceeds max battery " << max_battery << " s)";
      findings.push_back(os.str());
    }
  }
  return findings;
}

namespace {

// Serpentine deposition path over the chunk footprint, one pass set per
// layer, connected by vertical risers. Pass order flips between layers so the
// polyline stays continuous.
PrintPath boustrophedon_path(double x0, double y0, double z0, double cw,
                             double cl, double ch, int layers,
                             double pass_spacing) {
  const double inset = 0.1 * std::min(cw, cl);
  const double xlo = x0 + inset;
  const double xhi = x0 + cw - inset;
  const double ylo = y0 + inset;
  const double yhi = y0 + cl - inset;
  const double span = yhi - ylo;
  const int passes =
      std::max(2, static_cast<int>(std::lround(span / pass_spacing)) + 1);
  const double sub_h = ch / layers;

  std::vector<Point3> wps;
  bool at_hi = false;
  for (int l = 0; l < layers; ++l) {
    const double z = z0 + (l + 1) * sub_h;
    std::vector<double> ys(passes);
    for (int p = 0; p < passes; ++p) {
      ys[p] = ylo + span * p / (passes - 1);
    }
    if (l % 2 == 1) std::reverse(ys.begin(), ys.end());

    if (wps.empty()) {
      wps.push_back({xlo, ys[0], z});
      at_hi = false;
    } else {
      // riser: same footprint point, next deposition height
      wps.push_back({wps.back().x, wps.back().y, z});
    }
    for (int p = 0; p < passes; ++p) {
      if (p > 0) wps.push_back({at_hi ? xhi : xlo, ys[p], z});
      at_hi = !at_hi;
      wps.push_back({at_hi ? xhi : xlo, ys[p], z});
    }
  }
  return PrintPath(std::move(wps));
}

}  // namespace

MissionInstance generate_rect_instance(const RectGridSpec& spec,
                                       const MissionParams& params) {
  if (!(spec.width > 0.0) || !(spec.length > 0.0) || !(spec.height > 0.0)) {
    throw ParamError("rect dimensions must be > 0");
  }
  if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1) {
    throw ParamError("grid counts must be >= 1");
  }
  if (spec.robot_count < 1) throw ParamError("robot_count must be >= 1");
  if (spec.layers_per_chunk < 1) throw ParamError("layers_per_chunk must be >= 1");
  if (!(spec.pass_spacing > 0.0)) throw ParamError("pass_spacing must be > 0");
  if (!(spec.expansion_factor > 0.0)) {
    throw ParamError("expansion_factor must be > 0");
  }

  const double cw = spec.width / spec.nx;
  const double cl = spec.length / spec.ny;
  const double ch = spec.height / spec.nz;
  const double chunk_volume_l =
      cw * cl * ch * 1000.0 / spec.expansion_factor;

  std::vector<Task> tasks;
  std::vector<std::pair<int, int>> edges;
  for (int iz = 0; iz < spec.nz; ++iz) {
    for (int iy = 0; iy < spec.ny; ++iy) {
      for (int ix = 0; ix < spec.nx; ++ix) {
        const int id = iz * spec.nx * spec.ny + iy * spec.nx + ix;
        Task t;
        t.id = id;
        t.volume_l = chunk_volume_l;
        t.path = boustrophedon_path(ix * cw, iy * cl, iz * ch, cw, cl, ch,
                                    spec.layers_per_chunk, spec.pass_spacing);
        tasks.push_back(std::move(t));

        // vertical support: the chunk below must be finished first
        if (iz > 0) edges.emplace_back(id - spec.nx * spec.ny, id);
        // same-layer interlock: depend on face-adjacent neighbors that were
        // emitted earlier (lower id)
        if (ix > 0) edges.emplace_back(id - 1, id);
        if (iy > 0) edges.emplace_back(id - spec.nx, id);
      }
    }
  }

  std::vector<RobotSpec> robots;
  for (int k = 0; k < spec.robot_count; ++k) {
    robots.push_back({k, spec.capacity_l, spec.battery_s});
  }
  return make_instance(std::move(tasks), std::move(edges), std::move(robots),
                       params);
}

}  // namespace aeroprint
