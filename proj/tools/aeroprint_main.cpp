// aeroprint command line: generate synthetic missions, plan them, validate
// and simulate the resulting schedules, sweep fleet sizes, export MILP files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aeroprint/instance.hpp"
#include "aeroprint/log.hpp"
#include "aeroprint/model.hpp"
#include "aeroprint/oracle.hpp"
#include "aeroprint/schedule_io.hpp"
#include "aeroprint/solver.hpp"
#include "aeroprint/validate.hpp"

namespace {

using namespace aeroprint;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

// Optional overrides for the mission parameters baked into a file; any
// override rebuilds the instance so durations and conflicts stay consistent.
struct ParamOverrides {
  std::optional<double> tau_s, tau_e, v_ex, r_c, beta, g_ms, g_im, g_ut, delta;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--tau-s", tau_s, "logistics window before printing [s]");
    cmd->add_option("--tau-e", tau_e, "logistics window after printing [s]");
    cmd->add_option("--v-ex", v_ex, "printing speed [m/s]");
    cmd->add_option("--rc", r_c, "clearance radius [m]");
    cmd->add_option("--beta", beta, "second-order in-degree scaling");
    cmd->add_option("--gms", g_ms, "makespan gain");
    cmd->add_option("--gim", g_im, "importance gain");
    cmd->add_option("--gut", g_ut, "utilization cost per robot");
    cmd->add_option("--delta", delta, "FIFO exit/entry buffer [s]");
  }

  bool any() const {
    return tau_s || tau_e || v_ex || r_c || beta || g_ms || g_im || g_ut || delta;
  }

  MissionParams apply(MissionParams p) const {
    if (tau_s) p.tau_log_s = *tau_s;
    if (tau_e) p.tau_log_e = *tau_e;
    if (v_ex) p.v_ex = *v_ex;
    if (r_c) p.r_c = *r_c;
    if (beta) p.beta = *beta;
    if (g_ms) p.g_ms = *g_ms;
    if (g_im) p.g_im = *g_im;
    if (g_ut) p.g_ut = *g_ut;
    if (delta) p.delta = *delta;
    return p;
  }
};

MissionInstance load_with_overrides(const std::string& path,
                                    const ParamOverrides& ovr) {
  MissionInstance inst = load_instance(read_file(path));
  if (!ovr.any()) return inst;
  const MissionParams params = ovr.apply(inst.params);
  if (const std::string v = params.first_violation(); !v.empty()) {
    throw ParamError("params." + v);
  }
  return make_instance(inst.tasks, inst.deps.edges(), inst.robots, params);
}

void parse_robot_range(const std::string& text, int& lo, int& hi) {
  const auto pos = text.find("..");
  try {
    if (pos == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, pos));
      hi = std::stoi(text.substr(pos + 2));
    }
  } catch (const std::exception&) {
    throw ParamError("cannot parse robot range '" + text + "' (expected N or A..B)");
  }
  if (lo < 1 || hi < lo) {
    throw ParamError("robot range must satisfy 1 <= A <= B");
  }
}

void print_solve_summary(const SolveReport& rep, Variant variant, int robots) {
  std::printf("status: %s\n", status_name(rep.status));
  std::printf("variant: %s  robots: %d\n", variant_name(variant), robots);
  if (rep.schedule) {
    int used = 0;
    for (char u : rep.schedule->used) used += u ? 1 : 0;
    std::printf("makespan_s: %.6f\n", rep.j_ms);
    std::printf("objective: %.6f  (j_ms=%.6f j_im=%.6f j_ut=%.0f)\n",
                rep.objective, rep.j_ms, rep.j_im, rep.j_ut);
    std::printf("used_robots: %d\n", used);
    if (rep.status == SolveStatus::FeasibleTimeout) {
      std::printf("gap_abs: %.6f\n", rep.gap_abs);
    }
  } else {
    std::printf("certificate: %s\n", rep.certificate.c_str());
  }
  std::printf("nodes: %llu  wall_s: %.3f\n",
              static_cast<unsigned long long>(rep.nodes), rep.wall_s);
}

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return 0;
    case SolveStatus::FeasibleTimeout: return 3;
    case SolveStatus::Infeasible: return 4;
  }
  return 1;
}

std::string sweep_csv(const std::vector<SweepEntry>& entries) {
  std::string csv = "M,status,makespan_s,objective,used_robots,wall_s\n";
  char buf[160];
  for (const auto& e : entries) {
    const SolveReport& r = e.report;
    if (r.schedule) {
      int used = 0;
      for (char u : r.schedule->used) used += u ? 1 : 0;
      std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.6f,%d,%.3f\n", e.m_robots,
                    status_name(r.status), r.j_ms, r.objective, used, r.wall_s);
    } else {
      std::snprintf(buf, sizeof(buf), "%d,%s,,,,%.3f\n", e.m_robots,
                    status_name(r.status), r.wall_s);
    }
    csv += buf;
  }
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aeroprint: collision-free scheduling for multi-UAV 3D printing"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "generate a synthetic mission file");
  gen->require_subcommand(1);
  auto* rect = gen->add_subcommand("rect", "rectangular volume tiled into chunks");
  std::vector<double> rect_size{2.0, 2.0, 0.5};
  std::vector<int> rect_grid{3, 3, 2};
  RectGridSpec rect_spec;
  std::string gen_out;
  ParamOverrides gen_ovr;
  rect->add_option("--size", rect_size, "width length height [m]")
      ->expected(3)
      ->required();
  rect->add_option("--grid", rect_grid, "nx ny nz chunks")->expected(3)->required();
  rect->add_option("-o,--output", gen_out, "mission file to write")->required();
  rect->add_option("--robots", rect_spec.robot_count, "fleet size");
  rect->add_option("--capacity", rect_spec.capacity_l, "material per robot [L]");
  rect->add_option("--battery", rect_spec.battery_s, "flight time per robot [s]");
  rect->add_option("--layers", rect_spec.layers_per_chunk, "print layers per chunk");
  rect->add_option("--pass-spacing", rect_spec.pass_spacing,
                   "boustrophedon pass pitch [m]");
  rect->add_option("--expansion", rect_spec.expansion_factor,
                   "material expansion factor");
  gen_ovr.add_flags(rect);

  // ---- plan ----
  auto* plan = app.add_subcommand("plan", "compute an optimal schedule");
  std::string plan_mission, plan_out, plan_variant = "p1";
  int plan_robots = 0;
  SolveLimits plan_limits;
  ParamOverrides plan_ovr;
  plan->add_option("mission", plan_mission, "mission file")->required();
  plan->add_option("--robots", plan_robots, "fleet size (default: from file)")
      ->check(CLI::PositiveNumber);
  plan->add_option("--variant", plan_variant, "p1 | p2 | p3");
  plan->add_option("-o,--output", plan_out, "schedule file to write");
  plan->add_option("--time-limit", plan_limits.time_limit_s, "seconds, 0 = none");
  plan->add_option("--threads", plan_limits.threads, "0 = machine parallelism");
  plan->add_option("--gap", plan_limits.gap_abs, "absolute pruning slack on J");
  plan_ovr.add_flags(plan);

  // ---- validate ----
  auto* val = app.add_subcommand("validate", "check and simulate a schedule");
  std::string val_mission, val_schedule, val_out, val_svg, val_csv;
  double val_dt = 0.1;
  ParamOverrides val_ovr;
  val->add_option("mission", val_mission, "mission file")->required();
  val->add_option("schedule", val_schedule, "schedule file")->required();
  val->add_option("--dt", val_dt, "simulation step [s]");
  val->add_option("-o,--output", val_out, "simulation report JSON");
  val->add_option("--svg", val_svg, "Gantt chart SVG path");
  val->add_option("--csv", val_csv, "schedule table CSV path");
  val_ovr.add_flags(val);

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "solve for a range of fleet sizes");
  std::string sweep_mission, sweep_robots = "1..6", sweep_variant = "p1",
              sweep_out;
  SolveLimits sweep_limits;
  ParamOverrides sweep_ovr;
  sweep->add_option("mission", sweep_mission, "mission file")->required();
  sweep->add_option("--robots", sweep_robots, "N or A..B range");
  sweep->add_option("--variant", sweep_variant, "p1 | p2 | p3");
  sweep->add_option("-o,--output", sweep_out, "CSV file to write");
  sweep->add_option("--time-limit", sweep_limits.time_limit_s, "per solve [s]");
  sweep->add_option("--threads", sweep_limits.threads, "0 = machine parallelism");
  sweep->add_option("--gap", sweep_limits.gap_abs, "absolute pruning slack on J");
  sweep_ovr.add_flags(sweep);

  // ---- export-lp ----
  auto* lp = app.add_subcommand("export-lp", "write the MILP in CPLEX-LP format");
  std::string lp_mission, lp_variant = "p1", lp_out;
  int lp_robots = 0;
  ParamOverrides lp_ovr;
  lp->add_option("mission", lp_mission, "mission file")->required();
  lp->add_option("--variant", lp_variant, "p1 | p2 | p3");
  lp->add_option("--robots", lp_robots, "fleet size (default: from file)")
      ->check(CLI::PositiveNumber);
  lp->add_option("-o,--output", lp_out, "LP file to write")->required();
  lp_ovr.add_flags(lp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (rect->parsed()) {
      rect_spec.width = rect_size[0];
      rect_spec.length = rect_size[1];
      rect_spec.height = rect_size[2];
      rect_spec.nx = rect_grid[0];
      rect_spec.ny = rect_grid[1];
      rect_spec.nz = rect_grid[2];
      const MissionParams params = gen_ovr.apply(MissionParams{});
      const MissionInstance inst = generate_rect_instance(rect_spec, params);
      write_file(gen_out, save_instance(inst));
      std::printf("wrote %s: %d tasks, %zu dependencies, %zu conflict pairs\n",
                  gen_out.c_str(), inst.task_count(), inst.deps.edges().size(),
                  inst.conflicts.pairs.size());
      for (const std::string& finding : validate_instance(inst)) {
        std::printf("finding: %s\n", finding.c_str());
      }
      return 0;
    }

    if (plan->parsed()) {
      const MissionInstance inst = load_with_overrides(plan_mission, plan_ovr);
      const Variant variant = parse_variant(plan_variant);
      const int robots = plan_robots > 0 ? plan_robots : inst.robot_count();
      const SolveReport rep = solve(inst, robots, variant, plan_limits);
      print_solve_summary(rep, variant, robots);
      if (!plan_out.empty() && rep.schedule) {
        write_file(plan_out, save_schedule_json(*rep.schedule, variant,
                                                rep.objective, inst.params));
      }
      return exit_code_for(rep.status);
    }

    if (val->parsed()) {
      const MissionInstance base = load_instance(read_file(val_mission));
      const PlanFile plan_file = load_schedule_json(read_file(val_schedule));
      // re-check under the parameters the plan was produced with
      MissionParams params = val_ovr.apply(plan_file.params_used);
      if (const std::string v = params.first_violation(); !v.empty()) {
        throw ParamError("params." + v);
      }
      const MissionInstance inst =
          make_instance(base.tasks, base.deps.edges(), base.robots, params);
      const Schedule schedule = plan_to_schedule(inst, plan_file);

      const auto violations = check_schedule(inst, schedule);
      for (const auto& v : violations) {
        std::printf("violation: %s (magnitude %.9g): %s\n",
                    violation_kind_name(v.kind), v.magnitude, v.detail.c_str());
      }
      const SimReport sim = simulate(inst, schedule, val_dt);
      if (sim.has_min) {
        std::printf("min_distance_m: %.6f at t=%.3f s (tasks %d/%d)\n",
                    sim.min_distance_m, sim.min_time_s, sim.min_task_a,
                    sim.min_task_b);
      } else {
        std::printf("min_distance_m: none (no concurrent printing)\n");
      }
      std::printf("violations: %zu\n", violations.size());
      if (!val_out.empty()) write_file(val_out, sim_report_json(sim));
      if (!val_svg.empty() || !val_csv.empty()) {
        const GanttOutput gantt = emit_gantt(inst, schedule);
        if (!val_svg.empty()) write_file(val_svg, gantt.svg);
        if (!val_csv.empty()) write_file(val_csv, gantt.csv);
      }
      return violations.empty() ? 0 : 5;
    }

    if (sweep->parsed()) {
      const MissionInstance inst = load_with_overrides(sweep_mission, sweep_ovr);
      const Variant variant = parse_variant(sweep_variant);
      int lo = 1, hi = 1;
      parse_robot_range(sweep_robots, lo, hi);
      const auto entries = sweep_fleet(inst, lo, hi, variant, sweep_limits);
      const std::string csv = sweep_csv(entries);
      std::fputs(csv.c_str(), stdout);
      if (!sweep_out.empty()) write_file(sweep_out, csv);
      return 0;
    }

    if (lp->parsed()) {
      const MissionInstance inst = load_with_overrides(lp_mission, lp_ovr);
      const Variant variant = parse_variant(lp_variant);
      const int robots = lp_robots > 0 ? lp_robots : inst.robot_count();
      const MilpModel model = build_model(inst, robots, variant);
      write_file(lp_out, export_lp(model));
      std::printf("wrote %s: %zu variables, %zu rows\n", lp_out.c_str(),
                  model.vars.size(), model.rows.size());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 2;
}
