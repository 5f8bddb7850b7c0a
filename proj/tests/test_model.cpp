#include "aeroprint/model.hpp"

#include <map>
#include <set>

#include "aeroprint/oracle.hpp"
#include "support.hpp"
#include "support_model.hpp"
#include "test_util.hpp"

using namespace aeroprint;

namespace {

int count_tag(const MilpModel& m, RowTag tag) {
  int c = 0;
  for (const auto& row : m.rows) c += row.tag == tag ? 1 : 0;
  return c;
}

const LinearConstraint* find_row(const MilpModel& m, const std::string& name) {
  for (const auto& row : m.rows) {
    if (row.name == name) return &row;
  }
  return nullptr;
}

void test_big_m() {
  // one task, d = 100, tau 15/15: O = (130) + 100 + 1
  CHECK_NEAR(big_m_value(support::one_task_instance()), 231.0, 1e-9);

  // two tasks, d = 10 each, tau = 0: O = 20 + 10 + 1
  MissionParams p;
  p.tau_log_s = 0.0;
  p.tau_log_e = 0.0;
  std::vector<Task> tasks;
  tasks.push_back(support::make_task(0, support::seg_path({0, 0, 0}, {1, 0, 0}), 1));
  tasks.push_back(support::make_task(1, support::seg_path({0, 9, 0}, {1, 9, 0}), 1));
  const MissionInstance two =
      make_instance(std::move(tasks), {}, {{0, 10, 1e5}}, p);
  CHECK_NEAR(big_m_value(two), 31.0, 1e-9);

  // the literal "O > max d_i" rule is insufficient: on a 3-task chain forced
  // onto one robot, the released ordering rows would cut off the optimum
  std::vector<Task> chain;
  chain.push_back(support::make_task(0, support::seg_path({0, 0, 0}, {1, 0, 0}), 1));
  chain.push_back(support::make_task(1, support::seg_path({0, 9, 0}, {1, 9, 0}), 1));
  chain.push_back(support::make_task(2, support::seg_path({0, 18, 0}, {1, 18, 0}), 1));
  MissionParams pc;
  pc.tau_log_s = 5.0;
  pc.tau_log_e = 5.0;
  const MissionInstance inst =
      make_instance(std::move(chain), {{0, 1}, {1, 2}}, {{0, 10, 1e5}}, pc);
  const SolveReport rep = brute_force_schedule(inst, 1, Variant::P1);
  REQUIRE(rep.status == SolveStatus::Optimal);
  const auto& s = rep.schedule->start_s;
  // The optimum runs 0 -> 1 -> 2, so y_{2,0} = 0 and its Eq. 6 row is
  // released: S_2 + occ_2 <= S_0 + O. The horizon O absorbs it, the paper's
  // literal "O > max d_i" would cut this optimum off.
  const double o_literal = inst.tasks[0].duration_s + 1.0;
  const double released_lhs = s[2] - s[0] + inst.occupancy_s(2);
  CHECK(released_lhs <= big_m_value(inst) + 1e-9);
  CHECK_MSG(released_lhs > o_literal + 1e-9,
            "literal big-M would not have cut the optimum");
}

void test_variable_and_row_counts() {
  const MissionInstance one = support::one_task_instance();
  const MilpModel m1 = build_model(one, 1, Variant::P1);
  CHECK(m1.n_conflicts == 0);
  // 1 X + 0 Y + 0 Z + 0 C + 1 S + Cmax
  CHECK(m1.vars.size() == 3);
  const auto* ms_row = find_row(m1, "eq17_0");
  REQUIRE(ms_row != nullptr);
  CHECK_NEAR(ms_row->rhs, -130.0, 1e-9);  // S_0 + 130 <= Cmax

  // N=2 with one dependency edge: exactly one Eq. 4 row, S_1 - S_0 >= d_0
  std::vector<Task> tasks;
  tasks.push_back(support::make_task(0, support::seg_path({0, 0, 0}, {10, 0, 0}), 1));
  tasks.push_back(support::make_task(1, support::seg_path({0, 50, 0}, {10, 50, 0}), 1));
  const MissionInstance dep = make_instance(
      std::move(tasks), {{0, 1}}, {{0, 10, 1e5}, {1, 10, 1e5}}, MissionParams{});
  const MilpModel m2 = build_model(dep, 2, Variant::P1);
  CHECK(count_tag(m2, RowTag::Eq4) == 1);
  const auto* dep_row = find_row(m2, "eq4_0");
  REQUIRE(dep_row != nullptr);
  CHECK_NEAR(dep_row->rhs, -100.0, 1e-9);

  // P3 on N=2, M=2: two U variables and four Eq. 23 rows
  const MilpModel m3 = build_model(dep, 2, Variant::P3);
  int u_vars = 0;
  for (const auto& v : m3.vars) u_vars += v.kind == VarKind::U ? 1 : 0;
  CHECK(u_vars == 2);
  CHECK(count_tag(m3, RowTag::Eq23) == 4);

  // closed-form family counts on a conflicted fixture
  const MissionInstance fx = support::four_task_fixture();
  const int n = fx.task_count();
  const int conflicts = static_cast<int>(fx.conflicts.pairs.size());
  CHECK(conflicts > 0);
  for (const Variant variant : {Variant::P1, Variant::P2, Variant::P3}) {
    const MilpModel m = build_model(fx, 2, variant);
    const int mm = 2;
    CHECK(count_tag(m, RowTag::Eq1) == n);
    CHECK(count_tag(m, RowTag::Eq2) == n);
    CHECK(count_tag(m, RowTag::Eq4) == (int)fx.deps.edges().size());
    CHECK(count_tag(m, RowTag::Eq6) == n * (n - 1) * mm);
    CHECK(count_tag(m, RowTag::Eq7) == 4 * (n * (n - 1) / 2) * mm);
    CHECK(count_tag(m, RowTag::Eq8) == mm);
    CHECK(count_tag(m, RowTag::Eq10) == mm);
    CHECK(count_tag(m, RowTag::Eq16) == 4 * conflicts);
    CHECK(count_tag(m, RowTag::Eq17) == n);
    CHECK(count_tag(m, RowTag::Eq23) == (variant == Variant::P3 ? 2 * mm : 0));

    int x = 0, y = 0, z = 0, c = 0, u = 0, s = 0, cmax = 0;
    for (const auto& v : m.vars) {
      switch (v.kind) {
        case VarKind::X: ++x; break;
        case VarKind::Y: ++y; break;
        case VarKind::Z: ++z; break;
        case VarKind::COrient: ++c; break;
        case VarKind::U: ++u; break;
        case VarKind::Start: ++s; break;
        case VarKind::Makespan: ++cmax; break;
      }
    }
    CHECK(x == n * mm);
    CHECK(y == n * (n - 1) * mm);
    CHECK(z == n * (n - 1) / 2 * mm);
    CHECK(c == conflicts);
    CHECK(u == (variant == Variant::P3 ? mm : 0));
    CHECK(s == n);
    CHECK(cmax == 1);

    // no duplicate variables within a row; finite data
    for (const auto& row : m.rows) {
      std::set<int> seen;
      for (const auto& [var, coeff] : row.terms) {
        CHECK(seen.insert(var).second);
        CHECK(std::isfinite(coeff));
      }
      CHECK(std::isfinite(row.rhs));
    }
  }
}

void test_linearization_exactness() {
  const MissionInstance fx = support::four_task_fixture();
  const MilpModel m = build_model(fx, 2, Variant::P1);
  // For every (x_i, x_j) combination, the three z rows admit exactly
  // z = x_i * x_j.
  const int k = 1, i = 0, j = 2;
  const int zi = m.z_index(k, i, j);
  const int xi = m.x_index(i, k);
  const int xj = m.x_index(j, k);
  auto z_feasible = [&](int x1, int x2, int z) {
    std::map<int, double> v{{zi, (double)z}, {xi, (double)x1}, {xj, (double)x2}};
    for (const char* name : {"eq7za_1_0_2", "eq7zb_1_0_2", "eq7zc_1_0_2"}) {
      const auto* row = find_row(m, name);
      REQUIRE(row != nullptr);
      double lhs = 0;
      for (const auto& [var, coeff] : row->terms) lhs += coeff * v.at(var);
      if (row->sense == 'L' && lhs > row->rhs + 1e-12) return false;
      if (row->sense == 'G' && lhs < row->rhs - 1e-12) return false;
    }
    return true;
  };
  for (int x1 = 0; x1 <= 1; ++x1) {
    for (int x2 = 0; x2 <= 1; ++x2) {
      CHECK(z_feasible(x1, x2, x1 * x2));
      CHECK(!z_feasible(x1, x2, 1 - x1 * x2));
    }
  }
}

void test_export_lp() {
  const MissionInstance one = support::one_task_instance();
  const MilpModel m = build_model(one, 1, Variant::P1);
  const std::string lp = export_lp(m);
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Binaries") != std::string::npos);
  CHECK(lp.find("S_0") != std::string::npos);
  CHECK(lp.find("obj: 1 Cmax") != std::string::npos);  // P1, G_ms = 1
  CHECK(lp.find("End") != std::string::npos);

  // deterministic: rebuilding the model gives byte-identical text
  const MissionInstance fx = support::four_task_fixture();
  CHECK(export_lp(build_model(fx, 2, Variant::P3)) ==
        export_lp(build_model(fx, 2, Variant::P3)));

  // P3 adds u binaries to the Binaries section
  const std::string lp3 = export_lp(build_model(fx, 2, Variant::P3));
  const auto bin_pos = lp3.find("Binaries");
  CHECK(lp3.find(" u_0", bin_pos) != std::string::npos);
  CHECK(lp3.find(" u_1", bin_pos) != std::string::npos);
}

void test_model_matches_oracle_and_big_m_doubling() {
  // The enumerated optimum of the model rows equals the brute-force optimum
  // of the instance, and doubling O changes nothing.
  for (const Variant variant : {Variant::P1, Variant::P2, Variant::P3}) {
    const MissionInstance fx = support::triangle_conflict_instance();
    const SolveReport oracle = brute_force_schedule(fx, 2, variant);
    REQUIRE(oracle.status == SolveStatus::Optimal);

    const MilpModel m = build_model(fx, 2, variant);
    const auto opt = support::model_optimum(m);
    REQUIRE(opt.feasible);
    CHECK_NEAR(opt.j, oracle.objective, 1e-6);

    // Double O in place: rows of the form "... + O b <= O + c" gain O on the
    // rhs, rows with "-O b" only scale the coefficient.
    MilpModel doubled = build_model(fx, 2, variant);
    const double o1 = doubled.big_m;
    for (auto& row : doubled.rows) {
      if (row.tag != RowTag::Eq6 && row.tag != RowTag::Eq16) continue;
      for (auto& [var, coeff] : row.terms) {
        if (!doubled.vars[var].binary || std::fabs(coeff) != o1) continue;
        if (coeff > 0) row.rhs += o1;
        coeff *= 2.0;
      }
    }
    doubled.big_m *= 2.0;
    const auto opt2 = support::model_optimum(doubled);
    REQUIRE(opt2.feasible);
    CHECK_NEAR(opt2.j, opt.j, 1e-6);
  }
}

}  // namespace

int main() {
  test_big_m();
  test_variable_and_row_counts();
  test_linearization_exactness();
  test_export_lp();
  test_model_matches_oracle_and_big_m_doubling();
  return testutil::summary("test_model");
}
