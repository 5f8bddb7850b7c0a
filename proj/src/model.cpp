#include "aeroprint/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace aeroprint {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::P1: return "p1";
    case Variant::P2: return "p2";
    case Variant::P3: return "p3";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "p1" || name == "P1") return Variant::P1;
  if (name == "p2" || name == "P2") return Variant::P2;
  if (name == "p3" || name == "P3") return Variant::P3;
  throw ParamError("unknown variant '" + name + "' (expected p1, p2 or p3)");
}

const char* row_tag_name(RowTag tag) {
  switch (tag) {
    case RowTag::Eq1: return "eq1";
    case RowTag::Eq2: return "eq2";
    case RowTag::Eq4: return "eq4";
    case RowTag::Eq6: return "eq6";
    case RowTag::Eq7: return "eq7";
    case RowTag::Eq8: return "eq8";
    case RowTag::Eq10: return "eq10";
    case RowTag::Eq16: return "eq16";
    case RowTag::Eq17: return "eq17";
    case RowTag::Eq23: return "eq23";
  }
  return "?";
}

double big_m_value(const MissionInstance& instance) {
  double sum_occ = 0.0;
  double max_d = 0.0;
  for (const auto& t : instance.tasks) {
    sum_occ += instance.occupancy_s(t.id);
    max_d = std::max(max_d, t.duration_s);
  }
  return sum_occ + max_d + 1.0;
}

std::vector<RobotSpec> fleet_for(const MissionInstance& instance, int m_robots) {
  if (m_robots < 1) throw ParamError("robot count must be >= 1");
  std::vector<RobotSpec> fleet;
  fleet.reserve(m_robots);
  const int avail = instance.robot_count();
  for (int k = 0; k < m_robots; ++k) {
    RobotSpec r = instance.robots[k % avail];
    r.id = k;
    fleet.push_back(r);
  }
  return fleet;
}

namespace {

int pair_rank(int n, int i, int j) {  // i < j
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

int MilpModel::x_index(int i, int k) const { return i * m_robots + k; }

int MilpModel::y_index(int k, int i, int j) const {
  const int base = n_tasks * m_robots;
  return base + k * n_tasks * (n_tasks - 1) + i * (n_tasks - 1) +
         (j < i ? j : j - 1);
}

int MilpModel::z_index(int k, int i, int j) const {
  const int base = n_tasks * m_robots + n_tasks * (n_tasks - 1) * m_robots;
  const int pairs = n_tasks * (n_tasks - 1) / 2;
  return base + k * pairs + pair_rank(n_tasks, i, j);
}

int MilpModel::c_index(int p) const {
  const int base = n_tasks * m_robots + n_tasks * (n_tasks - 1) * m_robots +
                   n_tasks * (n_tasks - 1) / 2 * m_robots;
  return base + p;
}

int MilpModel::u_index(int k) const { return c_index(n_conflicts) + k; }

int MilpModel::s_index(int i) const {
  const int base = c_index(n_conflicts) + (variant == Variant::P3 ? m_robots : 0);
  return base + i;
}

int MilpModel::cmax_index() const { return s_index(n_tasks); }

MilpModel build_model(const MissionInstance& instance, int m_robots,
                      Variant variant) {
  if (instance.tasks.empty()) throw ParamError("cannot build model: no tasks");
  const auto fleet = fleet_for(instance, m_robots);
  const int n = instance.task_count();
  const int m = m_robots;
  const int n_conf = static_cast<int>(instance.conflicts.pairs.size());
  const MissionParams& prm = instance.params;

  MilpModel model;
  model.variant = variant;
  model.n_tasks = n;
  model.m_robots = m;
  model.n_conflicts = n_conf;
  model.big_m = big_m_value(instance);
  const double O = model.big_m;

  auto name2 = [](const char* stem, int a, int b) {
    std::ostringstream os;
    os << stem << '_' << a << '_' << b;
    return os.str();
  };
  auto name3 = [](const char* stem, int a, int b, int c) {
    std::ostringstream os;
    os << stem << '_' << a << '_' << b << '_' << c;
    return os.str();
  };

  // variables, in the fixed block order X, Y, Z, C, U (P3), S, Cmax
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      model.vars.push_back({VarKind::X, i, -1, k, true, name2("x", i, k)});
    }
  }
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        model.vars.push_back({VarKind::Y, i, j, k, true, name3("y", k, i, j)});
      }
    }
  }
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        model.vars.push_back({VarKind::Z, i, j, k, true, name3("z", k, i, j)});
      }
    }
  }
  for (int p = 0; p < n_conf; ++p) {
    model.vars.push_back(
        {VarKind::COrient, p, -1, -1, true, "c_" + std::to_string(p)});
  }
  if (variant == Variant::P3) {
    for (int k = 0; k < m; ++k) {
      model.vars.push_back({VarKind::U, -1, -1, k, true, "u_" + std::to_string(k)});
    }
  }
  for (int i = 0; i < n; ++i) {
    model.vars.push_back(
        {VarKind::Start, i, -1, -1, false, "S_" + std::to_string(i)});
  }
  model.vars.push_back({VarKind::Makespan, -1, -1, -1, false, "Cmax"});

  auto add_row = [&model](std::string name, RowTag tag, char sense, double rhs,
                          std::vector<std::pair<int, double>> terms) {
    model.rows.push_back(
        {std::move(name), std::move(terms), sense, rhs, tag});
  };

  // Eq 1: S_i >= 0
  for (int i = 0; i < n; ++i) {
    add_row("eq1_" + std::to_string(i), RowTag::Eq1, 'G', 0.0,
            {{model.s_index(i), 1.0}});
  }

  // Eq 2: sum_k x_{i,k} = 1
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int k = 0; k < m; ++k) terms.push_back({model.x_index(i, k), 1.0});
    add_row("eq2_" + std::to_string(i), RowTag::Eq2, 'E', 1.0, std::move(terms));
  }

  // Eq 4: S_i + d_i <= S_j for every dependency edge
  {
    auto edges = instance.deps.edges();
    std::sort(edges.begin(), edges.end());
    int e = 0;
    for (const auto& [i, j] : edges) {
      add_row("eq4_" + std::to_string(e++), RowTag::Eq4, 'L',
              -instance.tasks[i].duration_s,
              {{model.s_index(i), 1.0}, {model.s_index(j), -1.0}});
    }
  }

  // Eq 6 with full occupancy: S_i + tau_s + d_i + tau_e <= S_j + O(1 - y^k_ij)
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        add_row(name3("eq6", k, i, j), RowTag::Eq6, 'L',
                O - instance.occupancy_s(i),
                {{model.s_index(i), 1.0},
                 {model.s_index(j), -1.0},
                 {model.y_index(k, i, j), O}});
      }
    }
  }

  // Eq 7 linearized through z = x_i * x_j:
  //   z <= x_i, z <= x_j, z >= x_i + x_j - 1, y_ij + y_ji = z
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int z = model.z_index(k, i, j);
        add_row(name3("eq7za", k, i, j), RowTag::Eq7, 'L', 0.0,
                {{z, 1.0}, {model.x_index(i, k), -1.0}});
        add_row(name3("eq7zb", k, i, j), RowTag::Eq7, 'L', 0.0,
                {{z, 1.0}, {model.x_index(j, k), -1.0}});
        add_row(name3("eq7zc", k, i, j), RowTag::Eq7, 'G', -1.0,
                {{z, 1.0},
                 {model.x_index(i, k), -1.0},
                 {model.x_index(j, k), -1.0}});
        add_row(name3("eq7y", k, i, j), RowTag::Eq7, 'E', 0.0,
                {{model.y_index(k, i, j), 1.0},
                 {model.y_index(k, j, i), 1.0},
                 {z, -1.0}});
      }
    }
  }

  // Eq 8: material budget per robot
  for (int k = 0; k < m; ++k) {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < n; ++i) {
      terms.push_back({model.x_index(i, k), instance.tasks[i].volume_l});
    }
    add_row("eq8_" + std::to_string(k), RowTag::Eq8, 'L', fleet[k].capacity_l,
            std::move(terms));
  }

  // Eqs 9-10: total flight time per robot bounded by battery estimate
  for (int k = 0; k < m; ++k) {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < n; ++i) {
      terms.push_back({model.x_index(i, k), instance.occupancy_s(i)});
    }
    add_row("eq10_" + std::to_string(k), RowTag::Eq10, 'L', fleet[k].battery_s,
            std::move(terms));
  }

  // Eq 16 per conflict pair, orientation binary c released by big-M.
  // c = 1 means task_a's segment is entered first; rows (c)/(d) enforce
  // exit-before-entry with the FIFO buffer delta.
  for (int p = 0; p < n_conf; ++p) {
    const ConflictPair& cp = instance.conflicts.pairs[p];
    const auto off_a = arrival_offsets(instance.tasks[cp.task_a].path, prm.v_ex);
    const auto off_b = arrival_offsets(instance.tasks[cp.task_b].path, prm.v_ex);
    const double en_a = cp.seg_a == 0 ? 0.0 : off_a[cp.seg_a - 1];
    const double ex_a = off_a[cp.seg_a];
    const double en_b = cp.seg_b == 0 ? 0.0 : off_b[cp.seg_b - 1];
    const double ex_b = off_b[cp.seg_b];
    const int sa = model.s_index(cp.task_a);
    const int sb = model.s_index(cp.task_b);
    const int c = model.c_index(p);
    const std::string ps = std::to_string(p);
    add_row("eq16a_" + ps, RowTag::Eq16, 'L', O + en_b - en_a,
            {{sa, 1.0}, {sb, -1.0}, {c, O}});
    add_row("eq16b_" + ps, RowTag::Eq16, 'L', en_a - en_b,
            {{sb, 1.0}, {sa, -1.0}, {c, -O}});
    add_row("eq16c_" + ps, RowTag::Eq16, 'L', O + en_b - ex_a - prm.delta,
            {{sa, 1.0}, {sb, -1.0}, {c, O}});
    add_row("eq16d_" + ps, RowTag::Eq16, 'L', en_a - ex_b - prm.delta,
            {{sb, 1.0}, {sa, -1.0}, {c, -O}});
  }

  // Eq 17: completion (with logistics) bounded by the makespan variable
  for (int i = 0; i < n; ++i) {
    add_row("eq17_" + std::to_string(i), RowTag::Eq17, 'L',
            -instance.occupancy_s(i),
            {{model.s_index(i), 1.0}, {model.cmax_index(), -1.0}});
  }

  // Eq 23 (P3): robot is flagged used iff it carries at least one task;
  // task count N is the tight release constant.
  if (variant == Variant::P3) {
    for (int k = 0; k < m; ++k) {
      std::vector<std::pair<int, double>> terms;
      for (int i = 0; i < n; ++i) terms.push_back({model.x_index(i, k), 1.0});
      terms.push_back({model.u_index(k), -static_cast<double>(n)});
      add_row("eq23a_" + std::to_string(k), RowTag::Eq23, 'L', 0.0,
              std::move(terms));

      std::vector<std::pair<int, double>> terms2;
      terms2.push_back({model.u_index(k), 1.0});
      for (int i = 0; i < n; ++i) terms2.push_back({model.x_index(i, k), -1.0});
      add_row("eq23b_" + std::to_string(k), RowTag::Eq23, 'L', 0.0,
              std::move(terms2));
    }
  }

  // objective: G_ms * Cmax (+ G_im * J_im) (+ G_ut * J_ut)
  model.objective.push_back({model.cmax_index(), prm.g_ms});
  if (variant == Variant::P2 || variant == Variant::P3) {
    const auto alpha = instance.deps.importance(prm.beta);
    for (int i = 0; i < n; ++i) {
      if (alpha[i] != 0.0) {
        model.objective.push_back({model.s_index(i), prm.g_im * alpha[i]});
      }
      model.objective_constant += prm.g_im * alpha[i] * instance.occupancy_s(i);
    }
  }
  if (variant == Variant::P3) {
    for (int k = 0; k < m; ++k) {
      model.objective.push_back({model.u_index(k), prm.g_ut});
    }
  }
  return model;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_terms(std::string& out,
                  const std::vector<std::pair<int, double>>& terms,
                  const std::vector<VarRef>& vars) {
  bool first = true;
  for (const auto& [idx, coeff] : terms) {
    if (coeff >= 0.0) {
      out += first ? "" : " + ";
    } else {
      out += first ? "- " : " - ";
    }
    out += fmt17(std::abs(coeff));
    out += ' ';
    out += vars[idx].name;
    first = false;
  }
}

}  // namespace

std::string export_lp(const MilpModel& model) {
  std::string out;
  out += "\\ aeroprint scheduling model, variant ";
  out += variant_name(model.variant);
  out += ", tasks=" + std::to_string(model.n_tasks) +
         " robots=" + std::to_string(model.m_robots) +
         " conflicts=" + std::to_string(model.n_conflicts) + "\n";
  out += "Minimize\n obj: ";
  append_terms(out, model.objective, model.vars);
  if (model.objective_constant != 0.0) {
    out += " + " + fmt17(model.objective_constant);
  }
  out += "\nSubject To\n";
  for (const auto& row : model.rows) {
    out += ' ';
    out += row.name;
    out += ": ";
    append_terms(out, row.terms, model.vars);
    switch (row.sense) {
      case 'L': out += " <= "; break;
      case 'E': out += " = "; break;
      case 'G': out += " >= "; break;
    }
    out += fmt17(row.rhs);
    out += '\n';
  }
  out += "Binaries\n";
  int on_line = 0;
  for (const auto& v : model.vars) {
    if (!v.binary) continue;
    if (on_line == 8) {
      out += '\n';
      on_line = 0;
    }
    out += ' ';
    out += v.name;
    ++on_line;
  }
  if (on_line > 0) out += '\n';
  out += "End\n";
  return out;
}

}  // namespace aeroprint
