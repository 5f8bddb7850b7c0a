#include "aeroprint/schedule_io.hpp"

#include <algorithm>

#include "json_util.hpp"

namespace aeroprint {

using detail::ordered_json;

std::string save_schedule_json(const Schedule& schedule, Variant variant,
                               double objective,
                               const MissionParams& params_used) {
  ordered_json doc;
  ordered_json assignments = ordered_json::array();
  for (int i = 0; i < schedule.task_count(); ++i) {
    ordered_json a;
    a["task"] = i;
    a["robot"] = schedule.robot_of[i];
    a["start_s"] = schedule.start_s[i];
    assignments.push_back(std::move(a));
  }
  doc["assignments"] = std::move(assignments);
  doc["makespan_s"] = schedule.makespan_s;
  doc["objective"] = objective;
  doc["variant"] = variant_name(variant);
  doc["params_used"] = detail::params_to_json(params_used);
  return doc.dump(2) + "\n";
}

PlanFile load_schedule_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schedule file is not valid JSON: ") + e.what());
  }
  detail::require_keys(
      doc, "schedule",
      {"assignments", "makespan_s", "objective", "variant", "params_used"});

  PlanFile plan;
  const auto& ja = doc["assignments"];
  if (!ja.is_array() || ja.empty()) {
    throw SchemaError("schedule.assignments must be a non-empty array");
  }
  struct Row {
    int task, robot;
    double start;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string where = "assignments[" + std::to_string(i) + "]";
    detail::require_keys(ja[i], where, {"task", "robot", "start_s"});
    rows.push_back({detail::get_int(ja[i], where, "task"),
                    detail::get_int(ja[i], where, "robot"),
                    detail::get_number(ja[i], where, "start_s")});
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.task < b.task; });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].task != static_cast<int>(i)) {
      throw SchemaError("schedule.assignments: task ids must be dense 0..N-1");
    }
    if (rows[i].robot < 0) {
      throw SchemaError("schedule.assignments: robot ids must be >= 0");
    }
    plan.robot_of.push_back(rows[i].robot);
    plan.start_s.push_back(rows[i].start);
  }

  if (!doc["makespan_s"].is_number()) {
    throw SchemaError("schedule.makespan_s must be a number");
  }
  plan.makespan_s = doc["makespan_s"].get<double>();
  if (!doc["objective"].is_number()) {
    throw SchemaError("schedule.objective must be a number");
  }
  plan.objective = doc["objective"].get<double>();
  if (!doc["variant"].is_string()) {
    throw SchemaError("schedule.variant must be a string");
  }
  plan.variant = parse_variant(doc["variant"].get<std::string>());
  plan.params_used = detail::params_from_json(doc["params_used"], "params_used");
  return plan;
}

Schedule plan_to_schedule(const MissionInstance& instance, const PlanFile& plan) {
  if (static_cast<int>(plan.robot_of.size()) != instance.task_count()) {
    throw SchemaError("schedule covers " + std::to_string(plan.robot_of.size()) +
                      " tasks but the mission has " +
                      std::to_string(instance.task_count()));
  }
  const int m =
      1 + *std::max_element(plan.robot_of.begin(), plan.robot_of.end());
  Schedule s = assemble_schedule(instance, m, plan.robot_of, plan.start_s);
  s.makespan_s = plan.makespan_s;
  return s;
}

}  // namespace aeroprint
