#pragma once

// Shared fixtures: deterministic RNG, the dense-sampling distance oracle and
// the small-instance corpus used for solver-vs-oracle equivalence.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "aeroprint/geometry.hpp"
#include "aeroprint/instance.hpp"

namespace support {

using namespace aeroprint;

// mt19937 raw draws only; distribution classes are implementation-defined and
// would make fixtures compiler-dependent.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : g_(seed) {}
  double real(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(g_()) / 4294967296.0);
  }
  int integer(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(g_() % static_cast<std::uint32_t>(hi - lo + 1));
  }

 private:
  std::mt19937 g_;
};

// Independent distance oracle: the distance over the parameter square is
// jointly convex, so min over t for fixed s (and the resulting profile in s)
// can be nailed by nested ternary search; a coarse grid guards the result.
inline double sampled_min_distance(const Segment& s1, const Segment& s2) {
  const Point3 d1 = s1.b - s1.a;
  const Point3 d2 = s2.b - s2.a;
  auto at = [&](double s, double t) {
    return distance(s1.a + d1 * s, s2.a + d2 * t);
  };
  auto min_over_t = [&](double s) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 90; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (at(s, m1) < at(s, m2)) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
    return at(s, 0.5 * (lo + hi));
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 90; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (min_over_t(m1) < min_over_t(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  double best = min_over_t(0.5 * (lo + hi));
  for (int i = 0; i <= 24; ++i) {
    for (int j = 0; j <= 24; ++j) {
      best = std::min(best, at(i / 24.0, j / 24.0));
    }
  }
  return best;
}

inline PrintPath seg_path(const Point3& a, const Point3& b) {
  return PrintPath({a, b});
}

inline Task make_task(int id, PrintPath path, double volume_l) {
  Task t;
  t.id = id;
  t.path = std::move(path);
  t.volume_l = volume_l;
  return t;
}

// Single 10 m task: d = 100 s at the default 0.1 m/s, completion 130 s with
// the default 15 s logistics windows.
inline MissionInstance one_task_instance() {
  std::vector<Task> tasks;
  tasks.push_back(make_task(0, seg_path({0, 0, 0}, {10, 0, 0}), 1.0));
  return make_instance(std::move(tasks), {}, {{0, 10.0, 10000.0}},
                       MissionParams{});
}

// Two 10 m tasks far apart (no conflict), no dependencies, two robots.
inline MissionInstance two_parallel_tasks() {
  std::vector<Task> tasks;
  tasks.push_back(make_task(0, seg_path({0, 0, 0}, {10, 0, 0}), 1.0));
  tasks.push_back(make_task(1, seg_path({0, 50, 0}, {10, 50, 0}), 1.0));
  return make_instance(std::move(tasks), {},
                       {{0, 10.0, 10000.0}, {1, 10.0, 10000.0}},
                       MissionParams{});
}

// Three short tasks whose paths pairwise cross within the clearance radius;
// two robots, so at most two can print concurrently and every concurrent pair
// must resolve its FIFO orientation.
inline MissionInstance triangle_conflict_instance() {
  std::vector<Task> tasks;
  tasks.push_back(make_task(0, seg_path({-1, 0, 0}, {1, 0, 0}), 1.0));
  tasks.push_back(make_task(1, seg_path({0, -1, 0.2}, {0, 1, 0.2}), 1.0));
  tasks.push_back(make_task(2, seg_path({-1, 1, 0.4}, {1, -1, 0.4}), 1.0));
  MissionParams p;
  p.delta = 0.05;
  return make_instance(std::move(tasks), {},
                       {{0, 10.0, 10000.0}, {1, 10.0, 10000.0}}, p);
}

// Four tasks, two conflict pairs, one dependency chain; used as the midsize
// solver fixture.
inline MissionInstance four_task_fixture() {
  std::vector<Task> tasks;
  tasks.push_back(make_task(0, seg_path({0, 0, 0}, {5, 0, 0}), 2.0));
  tasks.push_back(make_task(1, seg_path({0, 0.5, 0}, {5, 0.5, 0}), 2.0));
  tasks.push_back(make_task(2, seg_path({0, 10, 0}, {5, 10, 0}), 2.0));
  tasks.push_back(make_task(3, seg_path({0, 10.5, 0}, {5, 10.5, 0}), 2.0));
  std::vector<std::pair<int, int>> edges{{0, 3}};
  MissionParams p;
  p.delta = 0.05;
  return make_instance(std::move(tasks), std::move(edges),
                       {{0, 10.0, 10000.0}, {1, 10.0, 10000.0}}, p);
}

// Axis-aligned zigzag walk in the z = height plane.
inline PrintPath zigzag_path(Rng& rng, double x0, double y0, double z,
                             int segments) {
  std::vector<Point3> wps;
  double x = x0, y = y0;
  wps.push_back({x, y, z});
  for (int s = 0; s < segments; ++s) {
    if (s % 2 == 0) {
      x += rng.real(0.4, 1.6);
    } else {
      y += rng.real(0.4, 1.6);
    }
    wps.push_back({x, y, z});
  }
  return PrintPath(std::move(wps));
}

// Deterministic corpus of tiny instances for oracle equivalence: at most 6
// tasks, 3 robots and 8 conflicting segment pairs each.
inline std::vector<MissionInstance> oracle_corpus(std::size_t count = 30) {
  std::vector<MissionInstance> out;
  std::uint32_t seed = 1000;
  while (out.size() < count && seed < 5000) {
    Rng rng(++seed);
    const int n = rng.integer(2, 6);
    const int m = rng.integer(1, 3);

    std::vector<Task> tasks;
    double total_vol = 0.0, max_vol = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x0 = rng.real(0.0, 4.5);
      const double y0 = rng.real(0.0, 4.5);
      const double z = rng.real(0.0, 1.0);
      const double vol = rng.real(1.0, 4.0);
      tasks.push_back(make_task(i, zigzag_path(rng, x0, y0, z, rng.integer(1, 3)), vol));
      total_vol += vol;
      max_vol = std::max(max_vol, vol);
    }

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.real(0.0, 1.0) < 0.25) edges.emplace_back(i, j);
      }
    }

    MissionParams params;
    params.delta = (seed % 2 == 0) ? 0.05 : 0.0;

    // generous budgets keep the corpus feasible; every third instance gets a
    // tight material budget to exercise the Eq. 8 filter
    const bool tight = out.size() % 3 == 2;
    const double cap = tight
                           ? std::max(max_vol * 1.1, total_vol / m * 1.25)
                           : std::max(max_vol * 1.5, total_vol / m * 2.0);
    std::vector<RobotSpec> robots;
    double total_occ = 0.0;
    for (const Task& t : tasks) {
      total_occ += params.tau_log_s + t.path.total_length() / params.v_ex +
                   params.tau_log_e;
    }
    for (int k = 0; k < m; ++k) {
      robots.push_back({k, cap, total_occ * rng.real(1.1, 1.6)});
    }

    MissionInstance inst =
        make_instance(std::move(tasks), std::move(edges), std::move(robots), params);
    if (inst.conflicts.pairs.size() > 8) continue;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace support
