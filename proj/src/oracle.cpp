#include "aeroprint/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "aeroprint/diff_system.hpp"

namespace aeroprint {

namespace {

constexpr int kMaxTasks = 7;
constexpr int kMaxOrientedPairs = 22;

struct SegWindow {
  int a = 0, b = 0;          // tasks, a < b
  double en_a = 0, ex_a = 0;  // time offsets from print start of a
  double en_b = 0, ex_b = 0;
};

struct Candidate {
  double j = std::numeric_limits<double>::infinity();
  std::vector<int> robot_of;
  std::vector<double> starts;
  bool has = false;
};

// Total order on (J, assignment, starts); keeps the oracle's pick canonical.
bool better(double j, const std::vector<int>& robot_of,
            const std::vector<double>& starts, const Candidate& best) {
  if (!best.has) return true;
  if (j < best.j - 1e-12) return true;
  if (j > best.j + 1e-12) return false;
  if (robot_of != best.robot_of) return robot_of < best.robot_of;
  return starts < best.starts;
}

}  // namespace

SolveReport brute_force_schedule(const MissionInstance& instance, int m_robots,
                                 Variant variant) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = instance.task_count();
  if (n > kMaxTasks) {
    throw ParamError("brute_force_schedule refuses instances with more than " +
                     std::to_string(kMaxTasks) + " tasks");
  }
  const auto fleet = fleet_for(instance, m_robots);
  const int m = m_robots;
  const MissionParams& prm = instance.params;

  std::vector<double> occ(n), vol(n);
  for (int i = 0; i < n; ++i) {
    occ[i] = instance.occupancy_s(i);
    vol[i] = instance.tasks[i].volume_l;
  }
  const auto alpha = instance.deps.importance(prm.beta);

  std::vector<std::vector<double>> off(n);
  for (int i = 0; i < n; ++i) {
    off[i] = arrival_offsets(instance.tasks[i].path, prm.v_ex);
  }
  std::vector<SegWindow> windows;
  windows.reserve(instance.conflicts.pairs.size());
  for (const ConflictPair& cp : instance.conflicts.pairs) {
    SegWindow w;
    w.a = cp.task_a;
    w.b = cp.task_b;
    w.en_a = cp.seg_a == 0 ? 0.0 : off[cp.task_a][cp.seg_a - 1];
    w.ex_a = off[cp.task_a][cp.seg_a];
    w.en_b = cp.seg_b == 0 ? 0.0 : off[cp.task_b][cp.seg_b - 1];
    w.ex_b = off[cp.task_b][cp.seg_b];
    windows.push_back(w);
  }

  std::vector<DiffArc> base_arcs;
  for (const auto& [u, v] : instance.deps.edges()) {
    base_arcs.push_back({u, v, instance.tasks[u].duration_s});
  }

  Candidate best;
  std::uint64_t evaluated = 0;

  std::vector<int> robot_of(n, 0);
  std::vector<std::vector<int>> per_robot(m);
  std::vector<std::vector<int>> perm(m);
  std::vector<int> pos(n, 0);  // position of each task within its robot order

  auto evaluate_orientations = [&](const std::vector<DiffArc>& arcs_fixed) {
    // cross-robot windows get a free orientation bit, same-robot windows are
    // already serialized by the robot order
    std::vector<const SegWindow*> active;
    for (const SegWindow& w : windows) {
      if (robot_of[w.a] != robot_of[w.b]) active.push_back(&w);
    }
    if (static_cast<int>(active.size()) > kMaxOrientedPairs) {
      throw ParamError("brute force: too many cross-robot conflicting segment pairs");
    }
    DiffConstraintSystem sys;
    sys.node_count = n;
    for (std::uint64_t mask = 0; mask < (1ull << active.size()); ++mask) {
      sys.arcs = arcs_fixed;
      for (std::size_t p = 0; p < active.size(); ++p) {
        const SegWindow& w = *active[p];
        if (mask & (1ull << p)) {
          // task a enters (and exits) the pair first
          sys.arcs.push_back({w.a, w.b, w.ex_a - w.en_b + prm.delta});
        } else {
          sys.arcs.push_back({w.b, w.a, w.ex_b - w.en_a + prm.delta});
        }
      }
      ++evaluated;
      const auto starts = earliest_starts(sys);
      if (!starts) continue;
      double j_ms = 0.0;
      for (int i = 0; i < n; ++i) j_ms = std::max(j_ms, (*starts)[i] + occ[i]);
      double j = prm.g_ms * j_ms;
      if (variant != Variant::P1) {
        double jim = 0.0;
        for (int i = 0; i < n; ++i) jim += alpha[i] * ((*starts)[i] + occ[i]);
        j += prm.g_im * jim;
      }
      if (variant == Variant::P3) {
        int used = 0;
        for (int k = 0; k < m; ++k) used += per_robot[k].empty() ? 0 : 1;
        j += prm.g_ut * used;
      }
      if (better(j, robot_of, *starts, best)) {
        best.has = true;
        best.j = j;
        best.robot_of = robot_of;
        best.starts = *starts;
      }
    }
  };

  auto evaluate_permutation = [&]() {
    std::vector<DiffArc> arcs = base_arcs;
    for (int k = 0; k < m; ++k) {
      for (std::size_t q = 0; q < perm[k].size(); ++q) {
        pos[perm[k][q]] = static_cast<int>(q);
        if (q > 0) {
          arcs.push_back({perm[k][q - 1], perm[k][q], occ[perm[k][q - 1]]});
        }
      }
    }
    // implied FIFO arcs for same-robot conflicting windows
    for (const SegWindow& w : windows) {
      if (robot_of[w.a] != robot_of[w.b]) continue;
      if (pos[w.a] < pos[w.b]) {
        arcs.push_back({w.a, w.b, w.ex_a - w.en_b + prm.delta});
      } else {
        arcs.push_back({w.b, w.a, w.ex_b - w.en_a + prm.delta});
      }
    }
    evaluate_orientations(arcs);
  };

  // nested permutations over every robot's assigned set
  auto permute_from = [&](auto&& self, int k) -> void {
    if (k == m) {
      evaluate_permutation();
      return;
    }
    perm[k] = per_robot[k];
    if (perm[k].empty()) {
      self(self, k + 1);
      return;
    }
    do {
      self(self, k + 1);
    } while (std::next_permutation(perm[k].begin(), perm[k].end()));
  };

  const std::uint64_t total_assignments = [&] {
    std::uint64_t t = 1;
    for (int i = 0; i < n; ++i) t *= static_cast<std::uint64_t>(m);
    return t;
  }();
  for (std::uint64_t code = 0; code < total_assignments; ++code) {
    std::uint64_t c = code;
    for (int i = 0; i < n; ++i) {
      robot_of[i] = static_cast<int>(c % m);
      c /= m;
    }
    // material and battery budgets (Eq. 8 / Eq. 10) filter assignments
    bool ok = true;
    for (int k = 0; k < m && ok; ++k) {
      double v = 0.0, t = 0.0;
      for (int i = 0; i < n; ++i) {
        if (robot_of[i] == k) {
          v += vol[i];
          t += occ[i];
        }
      }
      ok = v <= fleet[k].capacity_l && t <= fleet[k].battery_s;
    }
    if (!ok) continue;
    for (int k = 0; k < m; ++k) per_robot[k].clear();
    for (int i = 0; i < n; ++i) per_robot[robot_of[i]].push_back(i);
    permute_from(permute_from, 0);
  }

  SolveReport rep;
  rep.nodes = evaluated;
  rep.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (!best.has) {
    rep.status = SolveStatus::Infeasible;
    rep.certificate = "exhaustive enumeration found no feasible combination";
    return rep;
  }
  rep.status = SolveStatus::Optimal;
  rep.schedule = assemble_schedule(instance, m, best.robot_of, best.starts);
  const auto b = objective_of(instance, variant, *rep.schedule);
  rep.objective = b.j;
  rep.j_ms = b.j_ms;
  rep.j_im = b.j_im;
  rep.j_ut = b.j_ut;
  return rep;
}

}  // namespace aeroprint
