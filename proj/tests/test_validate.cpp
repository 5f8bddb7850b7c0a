#include "aeroprint/validate.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "aeroprint/oracle.hpp"
#include "support.hpp"
#include "test_util.hpp"

using namespace aeroprint;

namespace {

bool has_kind(const std::vector<Violation>& vs, Violation::Kind kind) {
  for (const auto& v : vs) {
    if (v.kind == kind) return true;
  }
  return false;
}

void test_check_schedule() {
  // solver/oracle outputs pass clean
  const MissionInstance fx = support::four_task_fixture();
  const SolveReport rep = solve(fx, 2, Variant::P1);
  REQUIRE(rep.status == SolveStatus::Optimal);
  CHECK(check_schedule(fx, *rep.schedule).empty());

  // overlapping occupancy on one robot
  {
    Schedule s = assemble_schedule(fx, 2, {0, 0, 1, 1},
                                   {0.0, 10.0, 0.0, 200.0});
    const auto vs = check_schedule(fx, s);
    CHECK(has_kind(vs, Violation::Kind::Ordering));
    bool positive = false;
    for (const auto& v : vs) {
      if (v.kind == Violation::Kind::Ordering) positive = v.magnitude > 0;
    }
    CHECK(positive);
  }

  // broken precedence (edge 0 -> 3)
  {
    const double occ = fx.occupancy_s(0);
    Schedule s = assemble_schedule(fx, 2, {0, 1, 0, 1}, {occ, 0.0, 0.0, 2 * occ});
    // move task 3 before task 0 finishes printing
    s.start_s[3] = 0.0;
    s = assemble_schedule(fx, 2, s.robot_of, s.start_s);
    const auto vs = check_schedule(fx, s);
    CHECK(has_kind(vs, Violation::Kind::Precedence));
  }

  // equal starts on a crossing pair: conflict violation
  {
    std::vector<Task> tasks;
    tasks.push_back(support::make_task(0, support::seg_path({-1, 0, 0}, {1, 0, 0}), 1));
    tasks.push_back(support::make_task(1, support::seg_path({0, -1, 0}, {0, 1, 0}), 1));
    const MissionInstance cross = make_instance(
        std::move(tasks), {}, {{0, 10, 1e5}, {1, 10, 1e5}}, MissionParams{});
    REQUIRE(cross.conflicts.pairs.size() == 1);
    const Schedule s = assemble_schedule(cross, 2, {0, 1}, {0.0, 0.0});
    const auto vs = check_schedule(cross, s);
    CHECK(has_kind(vs, Violation::Kind::Conflict));
  }

  // material over capacity
  {
    std::vector<Task> tasks;
    tasks.push_back(support::make_task(0, support::seg_path({0, 0, 0}, {5, 0, 0}), 8.0));
    tasks.push_back(support::make_task(1, support::seg_path({0, 50, 0}, {5, 50, 0}), 8.0));
    const MissionInstance inst = make_instance(
        std::move(tasks), {}, {{0, 10, 1e5}, {1, 10, 1e5}}, MissionParams{});
    const Schedule s = assemble_schedule(inst, 2, {0, 0}, {0.0, 200.0});
    const auto vs = check_schedule(inst, s);
    CHECK(has_kind(vs, Violation::Kind::Material));
  }

  // stored makespan below a completion
  {
    Schedule s = *rep.schedule;
    s.makespan_s -= 50.0;
    const auto vs = check_schedule(fx, s);
    CHECK(has_kind(vs, Violation::Kind::Makespan));
  }
}

void test_simulate() {
  // two parallel straight paths 2 m apart, printed concurrently
  std::vector<Task> tasks;
  tasks.push_back(support::make_task(0, support::seg_path({0, 0, 0}, {10, 0, 0}), 1));
  tasks.push_back(support::make_task(1, support::seg_path({0, 2, 0}, {10, 2, 0}), 1));
  MissionParams p;
  p.r_c = 0.5;  // keep the pair conflict-free
  const MissionInstance par =
      make_instance(std::move(tasks), {}, {{0, 10, 1e5}, {1, 10, 1e5}}, p);
  const Schedule s = assemble_schedule(par, 2, {0, 1}, {0.0, 0.0});
  const SimReport rep = simulate(par, s, 0.1);
  REQUIRE(rep.has_min);
  CHECK_NEAR(rep.min_distance_m, 2.0, 1e-9);
  CHECK(rep.series.size() ==
        static_cast<std::size_t>(std::ceil(rep.makespan_s / 0.1)) + 1);
  CHECK_NEAR(rep.makespan_s, 130.0, 1e-9);
  CHECK(rep.material_l[0] == 1.0 && rep.material_l[1] == 1.0);
  CHECK(rep.flight_s[0] == 130.0 && rep.flight_s[1] == 130.0);

  // single-robot mission: no concurrent printing, sentinel "none"
  const MissionInstance one = support::one_task_instance();
  const Schedule s1 = assemble_schedule(one, 1, {0}, {0.0});
  const SimReport rep1 = simulate(one, s1, 0.5);
  CHECK(!rep1.has_min);
  const auto doc = nlohmann::json::parse(sim_report_json(rep1));
  CHECK(doc["min_distance_m"].is_null());

  CHECK_THROWS(simulate(one, s1, 0.0), ParamError);
  CHECK_THROWS(simulate(one, s1, -1.0), ParamError);

  // json round-trips as valid json with the series intact
  const auto doc2 = nlohmann::json::parse(sim_report_json(rep));
  CHECK(doc2["series"].size() == rep.series.size());
  CHECK_NEAR(doc2["min_distance_m"].get<double>(), 2.0, 1e-9);
}

void test_gantt() {
  const MissionInstance one = support::one_task_instance();
  const Schedule s = assemble_schedule(one, 1, {0}, {0.0});
  const GanttOutput g = emit_gantt(one, s);

  // one task: exactly three blocks (gray, colored, gray)
  std::size_t rects = 0;
  for (std::size_t pos = g.svg.find("<rect"); pos != std::string::npos;
       pos = g.svg.find("<rect", pos + 1)) {
    ++rects;
  }
  CHECK(rects == 3);
  CHECK(g.svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") !=
        std::string::npos);

  // CSV header and computed completion column
  const MissionInstance fx = support::four_task_fixture();
  const SolveReport rep = solve(fx, 2, Variant::P1);
  const GanttOutput g2 = emit_gantt(fx, *rep.schedule);
  CHECK(g2.csv.rfind("task,robot,start_s,print_start_s,print_end_s,complete_s\n",
                     0) == 0);
  std::istringstream lines(g2.csv);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    int task = 0, robot = 0;
    double start = 0, ps = 0, pe = 0, complete = 0;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &task, &robot,
                        &start, &ps, &pe, &complete) == 6);
    CHECK_NEAR(ps, start + fx.params.tau_log_s, 1e-6);
    CHECK_NEAR(pe, ps + fx.tasks[task].duration_s, 1e-6);
    CHECK_NEAR(complete, start + fx.occupancy_s(task), 1e-6);
    ++rows;
  }
  CHECK(rows == fx.task_count());
}

// If the checker is clean, sampled clearance never drops below
// r_c - 2 * v_ex * dt between concurrently printing robots.
void test_clearance_property() {
  const MissionInstance tri = support::triangle_conflict_instance();
  const SolveReport rep = solve(tri, 2, Variant::P1);
  REQUIRE(rep.status == SolveStatus::Optimal);
  REQUIRE(check_schedule(tri, *rep.schedule).empty());
  const double dt = 0.05;
  const SimReport sim = simulate(tri, *rep.schedule, dt);
  if (sim.has_min) {
    CHECK_MSG(sim.min_distance_m >=
                  tri.params.r_c - 2.0 * tri.params.v_ex * dt - 1e-9,
              "clearance %f below sampled bound", sim.min_distance_m);
  }
}

}  // namespace

int main() {
  test_check_schedule();
  test_simulate();
  test_gantt();
  test_clearance_property();
  return testutil::summary("test_validate");
}
