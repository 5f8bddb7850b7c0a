#include "aeroprint/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace aeroprint {

namespace {

constexpr double kTimeTol = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

const char* violation_kind_name(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::Assignment: return "assignment";
    case Violation::Kind::Precedence: return "precedence";
    case Violation::Kind::Ordering: return "ordering";
    case Violation::Kind::Material: return "material";
    case Violation::Kind::Battery: return "battery";
    case Violation::Kind::Conflict: return "conflict";
    case Violation::Kind::Makespan: return "makespan";
  }
  return "?";
}

std::vector<Violation> check_schedule(const MissionInstance& instance,
                                      const Schedule& schedule) {
  std::vector<Violation> out;
  const int n = instance.task_count();
  const int m = schedule.robot_count();
  const MissionParams& prm = instance.params;

  if (schedule.task_count() != n) {
    out.push_back({Violation::Kind::Assignment, -1, -1, 1.0,
                   "schedule covers " + std::to_string(schedule.task_count()) +
                       " of " + std::to_string(n) + " tasks"});
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (schedule.robot_of[i] < 0 || schedule.robot_of[i] >= m) {
      out.push_back({Violation::Kind::Assignment, i, -1, 1.0,
                     "task " + std::to_string(i) + " has no valid robot"});
    }
    if (schedule.start_s[i] < -kTimeTol) {
      out.push_back({Violation::Kind::Assignment, i, -1, -schedule.start_s[i],
                     "task " + std::to_string(i) + " starts before t=0"});
    }
  }
  if (!out.empty()) return out;

  auto occ = [&](int i) { return instance.occupancy_s(i); };

  // precedence: S_i + d_i <= S_j
  for (const auto& [i, j] : instance.deps.edges()) {
    const double short_by =
        schedule.start_s[i] + instance.tasks[i].duration_s - schedule.start_s[j];
    if (short_by > kTimeTol) {
      out.push_back({Violation::Kind::Precedence, i, j, short_by,
                     "task " + std::to_string(j) + " starts " + fmt(short_by) +
                         " s before its dependency " + std::to_string(i) +
                         " completes printing"});
    }
  }

  // same-robot occupancy intervals must not overlap
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (schedule.robot_of[i] != schedule.robot_of[j]) continue;
      const double end_i = schedule.start_s[i] + occ(i);
      const double end_j = schedule.start_s[j] + occ(j);
      const double overlap = std::min(end_i, end_j) -
                             std::max(schedule.start_s[i], schedule.start_s[j]);
      if (overlap > kTimeTol) {
        out.push_back({Violation::Kind::Ordering, i, j, overlap,
                       "tasks " + std::to_string(i) + " and " +
                           std::to_string(j) + " overlap " + fmt(overlap) +
                           " s on robot " +
                           std::to_string(schedule.robot_of[i])});
      }
    }
  }

  // budgets, exact
  {
    std::vector<double> v(m, 0.0), f(m, 0.0);
    for (int i = 0; i < n; ++i) {
      v[schedule.robot_of[i]] += instance.tasks[i].volume_l;
      f[schedule.robot_of[i]] += occ(i);
    }
    const auto fleet = fleet_for(instance, m);
    for (int k = 0; k < m; ++k) {
      if (v[k] > fleet[k].capacity_l) {
        out.push_back({Violation::Kind::Material, k, -1,
                       v[k] - fleet[k].capacity_l,
                       "robot " + std::to_string(k) + " carries " + fmt(v[k]) +
                           " L over capacity " + fmt(fleet[k].capacity_l)});
      }
      if (f[k] > fleet[k].battery_s) {
        out.push_back({Violation::Kind::Battery, k, -1,
                       f[k] - fleet[k].battery_s,
                       "robot " + std::to_string(k) + " flies " + fmt(f[k]) +
                           " s over battery " + fmt(fleet[k].battery_s)});
      }
    }
  }

  // conflicting segment pairs: some FIFO orientation must hold
  for (const ConflictPair& cp : instance.conflicts.pairs) {
    const auto off_a = arrival_offsets(instance.tasks[cp.task_a].path, prm.v_ex);
    const auto off_b = arrival_offsets(instance.tasks[cp.task_b].path, prm.v_ex);
    const double base_a = schedule.start_s[cp.task_a] + prm.tau_log_s;
    const double base_b = schedule.start_s[cp.task_b] + prm.tau_log_s;
    const double en_a = base_a + (cp.seg_a == 0 ? 0.0 : off_a[cp.seg_a - 1]);
    const double ex_a = base_a + off_a[cp.seg_a];
    const double en_b = base_b + (cp.seg_b == 0 ? 0.0 : off_b[cp.seg_b - 1]);
    const double ex_b = base_b + off_b[cp.seg_b];
    const double viol_a_first = std::max(0.0, ex_a + prm.delta - en_b);
    const double viol_b_first = std::max(0.0, ex_b + prm.delta - en_a);
    const double mag = std::min(viol_a_first, viol_b_first);
    if (mag > kTimeTol) {
      std::ostringstream os;
      os << "tasks " << cp.task_a << "/" << cp.task_b << " co-occupy segments "
         << cp.seg_a << "/" << cp.seg_b << " (min distance " << fmt(cp.min_dist)
         << " m)";
      out.push_back(
          {Violation::Kind::Conflict, cp.task_a, cp.task_b, mag, os.str()});
    }
  }

  // stored makespan must cover every completion
  for (int i = 0; i < n; ++i) {
    const double over = schedule.start_s[i] + occ(i) - schedule.makespan_s;
    if (over > kTimeTol) {
      out.push_back({Violation::Kind::Makespan, i, -1, over,
                     "task " + std::to_string(i) + " completes " + fmt(over) +
                         " s after the stored makespan"});
    }
  }
  return out;
}

SimReport simulate(const MissionInstance& instance, const Schedule& schedule,
                   double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParamError("dt must be > 0");
  const int n = instance.task_count();
  const int m = schedule.robot_count();
  const MissionParams& prm = instance.params;

  SimReport rep;
  rep.dt_s = dt;
  rep.material_l.assign(m, 0.0);
  rep.flight_s.assign(m, 0.0);
  for (int i = 0; i < n; ++i) {
    rep.material_l[schedule.robot_of[i]] += instance.tasks[i].volume_l;
    rep.flight_s[schedule.robot_of[i]] += instance.occupancy_s(i);
    rep.makespan_s =
        std::max(rep.makespan_s, schedule.start_s[i] + instance.occupancy_s(i));
  }

  struct PrintWindow {
    int task;
    double begin, end;  // absolute printing interval
  };
  std::vector<PrintWindow> windows(n);
  std::vector<double> events;
  for (int i = 0; i < n; ++i) {
    const double begin = schedule.start_s[i] + prm.tau_log_s;
    windows[i] = {i, begin, begin + instance.tasks[i].duration_s};
    // segment boundary instants catch boundary-equality cases that the
    // uniform grid misses
    events.push_back(begin);
    for (double off :
         arrival_offsets(instance.tasks[i].path, prm.v_ex)) {
      events.push_back(begin + off);
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  rep.min_distance_m = kInf;
  auto measure = [&](double t) -> SimSample {
    SimSample s;
    s.t = t;
    s.dist = kInf;
    // gather concurrently printing tasks and their nozzle positions
    static thread_local std::vector<std::pair<int, Point3>> active;
    active.clear();
    for (const PrintWindow& w : windows) {
      if (t < w.begin || t > w.end) continue;
      const double arc = (t - w.begin) * prm.v_ex;
      active.push_back({w.task, instance.tasks[w.task].path.point_at_arc_length(arc)});
    }
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        if (schedule.robot_of[active[x].first] ==
            schedule.robot_of[active[y].first]) {
          continue;  // same robot cannot conflict with itself
        }
        const double d = distance(active[x].second, active[y].second);
        if (d < s.dist) {
          s.dist = d;
          s.a = active[x].first;
          s.b = active[y].first;
        }
      }
    }
    return s;
  };

  auto track_min = [&](const SimSample& s) {
    if (s.a >= 0 && s.dist < rep.min_distance_m) {
      rep.has_min = true;
      rep.min_distance_m = s.dist;
      rep.min_time_s = s.t;
      rep.min_task_a = s.a;
      rep.min_task_b = s.b;
    }
  };

  const std::size_t grid_count =
      static_cast<std::size_t>(std::ceil(rep.makespan_s / dt)) + 1;
  rep.series.reserve(grid_count);
  for (std::size_t g = 0; g < grid_count; ++g) {
    const SimSample s = measure(static_cast<double>(g) * dt);
    track_min(s);
    rep.series.push_back(s);
  }
  for (double t : events) {
    if (t < 0.0 || t > rep.makespan_s) continue;
    track_min(measure(t));
  }
  if (!rep.has_min) rep.min_distance_m = kInf;
  return rep;
}

std::string sim_report_json(const SimReport& report) {
  nlohmann::ordered_json doc;
  doc["dt_s"] = report.dt_s;
  doc["makespan_s"] = report.makespan_s;
  if (report.has_min) {
    doc["min_distance_m"] = report.min_distance_m;
    doc["min_time_s"] = report.min_time_s;
    doc["min_pair"] = {report.min_task_a, report.min_task_b};
  } else {
    doc["min_distance_m"] = nullptr;  // fewer than two concurrent printers
    doc["min_time_s"] = nullptr;
    doc["min_pair"] = nullptr;
  }
  doc["material_l"] = report.material_l;
  doc["flight_s"] = report.flight_s;
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const SimSample& s : report.series) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    row.push_back(s.t);
    if (s.a >= 0) {
      row.push_back(s.dist);
      row.push_back(s.a);
      row.push_back(s.b);
    } else {
      row.push_back(nullptr);
      row.push_back(nullptr);
      row.push_back(nullptr);
    }
    series.push_back(std::move(row));
  }
  doc["series"] = std::move(series);
  return doc.dump(2) + "\n";
}

namespace {

std::string task_color(int task) {
  // golden-angle hue walk, fixed saturation/value
  const double h = std::fmod(task * 137.508, 360.0) / 60.0;
  const double s = 0.62, v = 0.85;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), u = v * (1 - s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v; g = u; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = u; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = u; g = p; b = v; break;
    case 5: r = v; g = p; b = q; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r * 255),
                static_cast<int>(g * 255), static_cast<int>(b * 255));
  return buf;
}

}  // namespace

GanttOutput emit_gantt(const MissionInstance& instance, const Schedule& schedule) {
  const int n = instance.task_count();
  if (n == 0) throw ParamError("cannot draw an empty schedule");
  const int m = schedule.robot_count();
  const MissionParams& prm = instance.params;

  GanttOutput out;
  out.csv = "task,robot,start_s,print_start_s,print_end_s,complete_s\n";
  for (int i = 0; i < n; ++i) {
    const double s = schedule.start_s[i];
    const double ps = s + prm.tau_log_s;
    const double pe = ps + instance.tasks[i].duration_s;
    const double c = pe + prm.tau_log_e;
    out.csv += std::to_string(i) + "," + std::to_string(schedule.robot_of[i]) +
               "," + fmt(s) + "," + fmt(ps) + "," + fmt(pe) + "," + fmt(c) + "\n";
  }

  const double left = 70.0, top = 30.0, row_h = 26.0, row_gap = 10.0;
  const double plot_w = 920.0;
  const double height = top + m * (row_h + row_gap) + 44.0;
  const double scale = plot_w / std::max(schedule.makespan_s, 1e-9);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << left + plot_w + 30 << "\" height=\"" << height << "\">\n";
  svg << "<text x=\"" << left << "\" y=\"18\" font-family=\"sans-serif\" "
         "font-size=\"13\">schedule, makespan "
      << fmt(schedule.makespan_s) << " s</text>\n";
  for (int k = 0; k < m; ++k) {
    const double y = top + k * (row_h + row_gap);
    svg << "<text x=\"8\" y=\"" << y + row_h * 0.7
        << "\" font-family=\"sans-serif\" font-size=\"12\">R" << k
        << "</text>\n";
  }
  for (int i = 0; i < n; ++i) {
    const int k = schedule.robot_of[i];
    const double y = top + k * (row_h + row_gap);
    const double s = schedule.start_s[i];
    const double d = instance.tasks[i].duration_s;
    auto rect = [&](double t0, double w, const std::string& fill) {
      svg << "<rect x=\"" << left + t0 * scale << "\" y=\"" << y << "\" width=\""
          << std::max(w * scale, 0.5) << "\" height=\"" << row_h << "\" fill=\""
          << fill << "\"/>\n";
    };
    rect(s, prm.tau_log_s, "#b0b0b0");
    rect(s + prm.tau_log_s, d, task_color(i));
    rect(s + prm.tau_log_s + d, prm.tau_log_e, "#b0b0b0");
    svg << "<text x=\"" << left + (s + prm.tau_log_s + d / 2) * scale
        << "\" y=\"" << y + row_h * 0.7
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"white\" "
           "text-anchor=\"middle\">"
        << i << "</text>\n";
  }
  // time axis with a 1/2/5 tick step
  const double axis_y = top + m * (row_h + row_gap) + 8.0;
  svg << "<line x1=\"" << left << "\" y1=\"" << axis_y << "\" x2=\""
      << left + plot_w << "\" y2=\"" << axis_y
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  double step = std::pow(10.0, std::floor(std::log10(
                                   std::max(schedule.makespan_s, 1.0) / 8.0)));
  if (schedule.makespan_s / step > 40) step *= 5;
  if (schedule.makespan_s / step > 16) step *= 2;
  for (double t = 0.0; t <= schedule.makespan_s + 1e-9; t += step) {
    const double x = left + t * scale;
    svg << "<line x1=\"" << x << "\" y1=\"" << axis_y << "\" x2=\"" << x
        << "\" y2=\"" << axis_y + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << axis_y + 18
        << "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"middle\">"
        << static_cast<long long>(std::llround(t)) << "</text>\n";
  }
  svg << "</svg>\n";
  out.svg = svg.str();
  return out;
}

}  // namespace aeroprint
