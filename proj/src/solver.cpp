#include "aeroprint/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "aeroprint/diff_system.hpp"
#include "aeroprint/log.hpp"

namespace aeroprint {

const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleTimeout: return "feasible-timeout";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Objective values closer than this are treated as ties; ties are resolved
// toward the lexicographically smallest branch path so the reported schedule
// does not depend on thread scheduling.
constexpr double kTieEps = 1e-9;
// Open-interval containment tolerance for the forbidden-difference checks.
constexpr double kIntervalTol = 1e-9;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Forbidden values of delta = S_b - S_a for one task pair (a < b), merged
// from the pair's conflicting segment windows. delta inside any interval
// means two segments of the pair would be co-occupied.
struct PairGeom {
  int a = 0;
  int b = 0;
  std::vector<Interval> forbidden;
};

// Tasks whose prints can never run concurrently must serialize; any clique of
// such pairs bounds the makespan from below by its total print duration.
struct SerialClique {
  std::vector<int> members;
  double sum_duration = 0.0;
};

// Immutable per-solve context shared by all workers.
struct Prep {
  const MissionInstance* inst = nullptr;
  std::vector<RobotSpec> fleet;
  Variant variant = Variant::P1;
  int n = 0;
  int m = 0;
  double g_ms = 1.0, g_im = 0.0, g_ut = 0.0;
  double tau_s = 0.0, tau_e = 0.0;

  std::vector<double> occ;    // per task
  std::vector<double> dur;    // per task
  std::vector<double> vol;    // per task
  std::vector<double> alpha;  // per task
  std::vector<double> tail;   // longest print chain from the task, incl. itself
  double total_occ = 0.0;
  double total_vol = 0.0;

  std::vector<int> branch_order;  // tasks by descending alpha, then id
  std::vector<DiffArc> dep_arcs;
  std::vector<PairGeom> pairs;
  std::vector<int> pair_index;  // key a*n+b (a<b) -> pairs index or -1
  std::vector<int> robot_class;
  int class_count = 0;
  std::vector<SerialClique> cliques;
};

Prep make_prep(const MissionInstance& inst, int m_robots, Variant variant) {
  Prep P;
  P.inst = &inst;
  P.fleet = fleet_for(inst, m_robots);
  P.variant = variant;
  P.n = inst.task_count();
  P.m = m_robots;
  P.g_ms = inst.params.g_ms;
  P.g_im = inst.params.g_im;
  P.g_ut = inst.params.g_ut;

  P.tau_s = inst.params.tau_log_s;
  P.tau_e = inst.params.tau_log_e;
  P.occ.resize(P.n);
  P.dur.resize(P.n);
  P.vol.resize(P.n);
  for (int i = 0; i < P.n; ++i) {
    P.occ[i] = inst.occupancy_s(i);
    P.dur[i] = inst.tasks[i].duration_s;
    P.vol[i] = inst.tasks[i].volume_l;
    P.total_occ += P.occ[i];
    P.total_vol += P.vol[i];
  }
  P.alpha = inst.deps.importance(inst.params.beta);

  // Longest chain of print durations below each task (Eq. 4 semantics: the
  // logistics windows cancel between print end and successor print start).
  P.tail.assign(P.n, 0.0);
  {
    std::vector<int> order(P.n), indeg(P.n, 0);
    for (const auto& [u, v] : inst.deps.edges()) ++indeg[v], (void)u;
    std::vector<int> ready;
    for (int i = 0; i < P.n; ++i) {
      if (indeg[i] == 0) ready.push_back(i);
    }
    int filled = 0;
    while (!ready.empty()) {
      const int u = ready.back();
      ready.pop_back();
      order[filled++] = u;
      for (int v : inst.deps.successors(u)) {
        if (--indeg[v] == 0) ready.push_back(v);
      }
    }
    for (int idx = filled - 1; idx >= 0; --idx) {
      const int u = order[idx];
      double best = 0.0;
      for (int v : inst.deps.successors(u)) best = std::max(best, P.tail[v]);
      P.tail[u] = P.dur[u] + best;
    }
  }

  P.branch_order.resize(P.n);
  for (int i = 0; i < P.n; ++i) P.branch_order[i] = i;
  std::stable_sort(P.branch_order.begin(), P.branch_order.end(),
                   [&](int a, int b) {
                     if (P.alpha[a] != P.alpha[b]) return P.alpha[a] > P.alpha[b];
                     return a < b;
                   });

  for (const auto& [u, v] : inst.deps.edges()) {
    P.dep_arcs.push_back({u, v, inst.tasks[u].duration_s});
  }

  // Forbidden start-difference intervals. Segment pair of tasks (a, b) with
  // entry/exit time offsets en/ex forbids
  //   delta in (en_a - ex_b - delta_fifo, ex_a - en_b + delta_fifo)
  // which is exactly "neither FIFO orientation holds".
  const double dfifo = inst.params.delta;
  std::vector<std::vector<double>> off(P.n);
  for (int i = 0; i < P.n; ++i) {
    off[i] = arrival_offsets(inst.tasks[i].path, inst.params.v_ex);
  }
  P.pair_index.assign(static_cast<std::size_t>(P.n) * P.n, -1);
  for (const ConflictPair& cp : inst.conflicts.pairs) {
    const double en_a = cp.seg_a == 0 ? 0.0 : off[cp.task_a][cp.seg_a - 1];
    const double ex_a = off[cp.task_a][cp.seg_a];
    const double en_b = cp.seg_b == 0 ? 0.0 : off[cp.task_b][cp.seg_b - 1];
    const double ex_b = off[cp.task_b][cp.seg_b];
    const double lo = en_a - ex_b - dfifo;
    const double hi = ex_a - en_b + dfifo;
    if (!(hi > lo)) continue;  // two zero-length segments with no buffer
    const int key = cp.task_a * P.n + cp.task_b;
    if (P.pair_index[key] < 0) {
      P.pair_index[key] = static_cast<int>(P.pairs.size());
      P.pairs.push_back({cp.task_a, cp.task_b, {}});
    }
    P.pairs[P.pair_index[key]].forbidden.push_back({lo, hi});
  }
  for (PairGeom& pg : P.pairs) {
    std::sort(pg.forbidden.begin(), pg.forbidden.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> merged;
    for (const Interval& iv : pg.forbidden) {
      // strict overlap only: touching intervals leave the shared endpoint
      // feasible and must stay separate
      if (!merged.empty() && iv.lo < merged.back().hi) {
        merged.back().hi = std::max(merged.back().hi, iv.hi);
      } else {
        merged.push_back(iv);
      }
    }
    pg.forbidden = std::move(merged);
  }

  // Pairs whose forbidden components swallow the whole print-overlap window
  // (-d_b, d_a) can never print concurrently. Greedy duration-weighted
  // cliques over that graph give strong static makespan bounds.
  if (P.n <= 64) {
    std::vector<std::uint64_t> never(P.n, 0);
    for (const PairGeom& pg : P.pairs) {
      const double da = P.dur[pg.a];
      const double db = P.dur[pg.b];
      for (const Interval& iv : pg.forbidden) {
        if (iv.lo <= -db && iv.hi >= da) {
          never[pg.a] |= 1ull << pg.b;
          never[pg.b] |= 1ull << pg.a;
          break;
        }
      }
    }
    std::vector<int> by_duration(P.n);
    for (int i = 0; i < P.n; ++i) by_duration[i] = i;
    std::stable_sort(by_duration.begin(), by_duration.end(),
                     [&](int a, int b) { return P.dur[a] > P.dur[b]; });
    std::vector<std::uint64_t> seen_masks;
    for (int v = 0; v < P.n; ++v) {
      std::uint64_t mask = 1ull << v;
      SerialClique clique;
      clique.members.push_back(v);
      clique.sum_duration = P.dur[v];
      for (int u : by_duration) {
        if (mask & (1ull << u)) continue;
        if ((never[u] & mask) == mask) {  // adjacent to every member
          mask |= 1ull << u;
          clique.members.push_back(u);
          clique.sum_duration += P.dur[u];
        }
      }
      if (clique.members.size() < 2) continue;
      if (std::find(seen_masks.begin(), seen_masks.end(), mask) !=
          seen_masks.end()) {
        continue;
      }
      seen_masks.push_back(mask);
      P.cliques.push_back(std::move(clique));
    }
  }

  // Robots with identical capacity and battery are interchangeable while
  // still empty; group them so only the first empty robot of a class is
  // branched on.
  P.robot_class.resize(P.m);
  std::vector<std::pair<double, double>> classes;
  for (int k = 0; k < P.m; ++k) {
    const std::pair<double, double> sig{P.fleet[k].capacity_l,
                                        P.fleet[k].battery_s};
    auto it = std::find(classes.begin(), classes.end(), sig);
    if (it == classes.end()) {
      classes.push_back(sig);
      it = std::prev(classes.end());
    }
    P.robot_class[k] = static_cast<int>(it - classes.begin());
  }
  P.class_count = static_cast<int>(classes.size());
  return P;
}

struct Incumbent {
  std::mutex mu;
  std::atomic<std::uint64_t> generation{0};
  bool has = false;
  double j = kInf;
  std::vector<int> path;  // tree path; heuristic solutions carry a sentinel
  std::vector<int> robot_of;
  std::vector<double> starts;

  // Total order on (J, path, assignment, starts) makes the final incumbent
  // independent of exploration and thread interleaving.
  bool accepts(double j2, const std::vector<int>& path2,
               const std::vector<int>& robot2,
               const std::vector<double>& starts2) const {
    if (!has) return true;
    if (j2 < j - kTieEps) return true;
    if (j2 > j + kTieEps) return false;
    if (path2 != path) return path2 < path;
    if (robot2 != robot_of) return robot2 < robot_of;
    return starts2 < starts;
  }
};

struct Shared {
  const Prep* P = nullptr;
  Incumbent inc;
  std::chrono::steady_clock::time_point deadline;
  bool has_deadline = false;
  double prune_slack = 0.0;  // > 0 enables gap-tolerant pruning
  std::atomic<std::uint64_t> nodes{0};
  std::mutex open_mu;
  double open_min_lb = kInf;
  bool any_open = false;
};

struct Action {
  enum Type { Assign, Arc } type = Assign;
  int a = 0;
  int b = 0;
  double w = 0.0;
};

struct Job {
  std::vector<Action> actions;
  std::vector<int> path;
  double lb = 0.0;
};

struct ViolationHit {
  int key = -1;  // a*n+b
  double lo = 0.0, hi = 0.0, delta = 0.0;
  double when = kInf;  // overlap start; resolving the earliest conflict first
                       // keeps dives chronological
};

class Worker {
 public:
  Worker(const Prep& P, Shared& sh) : P_(P), sh_(sh) {
    vol_.resize(P.m);
    tload_.resize(P.m);
    cnt_.resize(P.m);
    adj_.resize(P.n);
    relax_count_.assign(P.n, 0);
    in_queue_.assign(P.n, 0);
    cache_gen_ = ~0ull;
  }

  void run_job(const Job& job) {
    reset();
    if (!replay(job)) return;
    path_ = job.path;
    // cheap diversified descents seed the incumbent before the exact search
    std::uint32_t seed = 0x9e3779b9u;
    for (const int p : job.path) seed = seed * 1000003u + static_cast<std::uint32_t>(p);
    for (std::uint32_t dive = 0; dive < 192 && !deadline_passed(); ++dive) {
      completion_dive(seed + dive * 2654435761u);
    }
    if (!dfs()) record_open(job.lb);
  }

  // One randomized no-backtrack descent to a leaf: pick a violated pair near
  // the time frontier, resolve it to a seeded side, assign tasks to a seeded
  // feasible robot. Leaves go through the same canonical incumbent gate as
  // the exact search; the context is fully unwound afterwards.
  void completion_dive(std::uint32_t seed) {
    std::uint32_t state = seed | 1u;
    auto rnd = [&state]() {
      state ^= state << 13;
      state ^= state >> 17;
      state ^= state << 5;
      return state;
    };
    const std::size_t path_before = path_.size();
    const std::size_t watched_before_all = watched_.size();
    const std::size_t arcs_before = arc_from_.size();
    saved_S_.push_back(S_);
    std::vector<std::pair<int, int>> assigned;  // (task, robot) for unwind

    for (int step = 0; step < 8 * P_.n * P_.n + 64; ++step) {
      if (auto v = find_violation()) {
        const int a = v->key / P_.n;
        const int b = v->key % P_.n;
        // mostly keep the current order, sometimes flip
        const bool keep = rnd() % 8 != 0;
        const int side = (v->delta < 0.0) == keep ? 0 : 1;
        const bool ok = side == 0 ? propagate(b, a, -v->lo)
                                  : propagate(a, b, v->hi);
        if (!ok) {
          undo_arc();
          break;
        }
        path_.push_back(side);
        continue;
      }
      if (depth_ < P_.n) {
        const int t = P_.branch_order[depth_];
        int pick = -1;
        int seen = 0;
        std::vector<char> seen_class(P_.class_count, 0);
        for (int k = 0; k < P_.m; ++k) {
          if (cnt_[k] == 0) {
            if (seen_class[P_.robot_class[k]]) continue;
            seen_class[P_.robot_class[k]] = 1;
          }
          if (vol_[k] + P_.vol[t] > P_.fleet[k].capacity_l) continue;
          if (tload_[k] + P_.occ[t] > P_.fleet[k].battery_s) continue;
          ++seen;
          if (rnd() % seen == 0) pick = k;  // reservoir pick among feasible
        }
        if (pick < 0) break;
        apply_assign(t, pick);
        path_.push_back(pick);
        assigned.push_back({t, pick});
        continue;
      }
      try_leaf();
      break;
    }

    for (auto it = assigned.rbegin(); it != assigned.rend(); ++it) {
      undo_assign(it->first, it->second, watched_before_all);
    }
    watched_.resize(watched_before_all);
    while (arc_from_.size() > arcs_before) undo_arc();
    path_.resize(path_before);
    S_ = saved_S_.back();
    saved_S_.pop_back();
  }

  void record_open(double lb) {
    std::lock_guard<std::mutex> g(sh_.open_mu);
    sh_.open_min_lb = std::min(sh_.open_min_lb, lb);
    sh_.any_open = true;
  }

  void run_probe(std::uint32_t seed) { heuristic_probe(seed); }

  bool aborted() const { return aborted_; }
  std::uint64_t nodes() const { return local_nodes_; }

  // Exposed for the sequential expansion pass.
  void reset() {
    std::fill(vol_.begin(), vol_.end(), 0.0);
    std::fill(tload_.begin(), tload_.end(), 0.0);
    std::fill(cnt_.begin(), cnt_.end(), 0);
    robot_of_.assign(P_.n, -1);
    depth_ = 0;
    assigned_vol_ = assigned_occ_ = 0.0;
    for (auto& lst : adj_) lst.clear();
    arc_from_.clear();
    watched_.clear();
    path_.clear();
    S_.assign(P_.n, 0.0);
    for (const DiffArc& a : P_.dep_arcs) propagate(a.from, a.to, a.weight);
  }

  bool replay(const Job& job) {
    for (const Action& act : job.actions) {
      if (act.type == Action::Assign) {
        apply_assign(act.a, act.b);
      } else if (!propagate(act.a, act.b, act.w)) {
        return false;
      }
    }
    return true;
  }

  double node_lower_bound() {
    return lower_bound(std::numeric_limits<double>::max() / 2);  // escalated
  }

  void set_path(const std::vector<int>& path) { path_ = path; }

  // Children of the current node as (action, path slot) in deterministic
  // order, or empty for a leaf / pruned node; used only while seeding
  // parallel jobs. Path slots are the same values dfs() pushes: the robot id
  // for assignments, 0/1 for the two disjunction sides.
  std::vector<std::pair<Action, int>> expand_children() {
    std::vector<std::pair<Action, int>> kids;
    if (lower_bound() >= kInf) return kids;
    if (auto v = find_violation()) {
      const int a = v->key / P_.n;
      const int b = v->key % P_.n;
      kids.push_back({{Action::Arc, b, a, -v->lo}, 0});  // delta <= lo
      kids.push_back({{Action::Arc, a, b, v->hi}, 1});   // delta >= hi
      return kids;
    }
    if (depth_ < P_.n) {
      const int t = P_.branch_order[depth_];
      std::vector<char> seen(P_.class_count, 0);
      for (int k = 0; k < P_.m; ++k) {
        if (cnt_[k] == 0) {
          if (seen[P_.robot_class[k]]) continue;
          seen[P_.robot_class[k]] = 1;
        }
        if (vol_[k] + P_.vol[t] > P_.fleet[k].capacity_l) continue;
        if (tload_[k] + P_.occ[t] > P_.fleet[k].battery_s) continue;
        kids.push_back({{Action::Assign, t, k, 0.0}, k});
      }
      return kids;
    }
    try_leaf();
    return kids;
  }

 private:
  bool deadline_passed() {
    if (!sh_.has_deadline) return false;
    if ((local_nodes_ & 0xFF) != 0) return aborted_;
    if (std::chrono::steady_clock::now() >= sh_.deadline) aborted_ = true;
    return aborted_;
  }

  void refresh_cache() {
    const std::uint64_t gen = sh_.inc.generation.load(std::memory_order_acquire);
    if (gen == cache_gen_) return;
    std::lock_guard<std::mutex> g(sh_.inc.mu);
    cache_gen_ = sh_.inc.generation.load(std::memory_order_relaxed);
    cache_j_ = sh_.inc.j;
    cache_path_ = sh_.inc.path;
    cache_has_ = sh_.inc.has;
  }

  // Queue-based incremental longest path after appending one arc.
  // Returns false when the arc closes a positive cycle.
  bool propagate(int from, int to, double w) {
    adj_[from].push_back({to, w});
    arc_from_.push_back(from);
    if (S_[to] >= S_[from] + w) return true;
    for (int t : touched_) relax_count_[t] = 0;
    touched_.clear();
    queue_.clear();
    S_[to] = S_[from] + w;
    queue_.push_back(to);
    in_queue_[to] = 1;
    relax_count_[to] = 1;
    touched_.push_back(to);
    std::size_t head = 0;
    while (head < queue_.size()) {
      const int u = queue_[head++];
      in_queue_[u] = 0;
      for (const auto& [v, wv] : adj_[u]) {
        const double nv = S_[u] + wv;
        if (nv > S_[v]) {
          S_[v] = nv;
          if (relax_count_[v] == 0) touched_.push_back(v);
          if (++relax_count_[v] > P_.n + 1) {
            for (std::size_t h = head; h < queue_.size(); ++h) {
              in_queue_[queue_[h]] = 0;
            }
            return false;  // positive cycle
          }
          if (!in_queue_[v]) {
            in_queue_[v] = 1;
            queue_.push_back(v);
          }
        }
      }
    }
    return true;
  }

  void undo_arc() {
    adj_[arc_from_.back()].pop_back();
    arc_from_.pop_back();
  }

  void apply_assign(int t, int k) {
    robot_of_[t] = k;
    ++depth_;
    vol_[k] += P_.vol[t];
    tload_[k] += P_.occ[t];
    ++cnt_[k];
    assigned_vol_ += P_.vol[t];
    assigned_occ_ += P_.occ[t];
    for (int u = 0; u < P_.n; ++u) {
      if (u == t || robot_of_[u] < 0) continue;
      const int a = std::min(u, t);
      const int b = std::max(u, t);
      const int key = a * P_.n + b;
      if (P_.pair_index[key] >= 0 || robot_of_[u] == k) {
        watched_.push_back(key);
      }
    }
  }

  void undo_assign(int t, int k, std::size_t watched_before) {
    watched_.resize(watched_before);
    assigned_occ_ -= P_.occ[t];
    assigned_vol_ -= P_.vol[t];
    --cnt_[k];
    tload_[k] -= P_.occ[t];
    vol_[k] -= P_.vol[t];
    --depth_;
    robot_of_[t] = -1;
  }

  // Minimum extra robots that must still be opened to cover the unassigned
  // volume / occupancy, or -1 when no completion can cover them.
  int extra_robots_needed() {
    double deficit_v = P_.total_vol - assigned_vol_;
    double deficit_t = P_.total_occ - assigned_occ_;
    scratch_caps_.clear();
    scratch_batts_.clear();
    for (int k = 0; k < P_.m; ++k) {
      if (cnt_[k] > 0) {
        deficit_v -= P_.fleet[k].capacity_l - vol_[k];
        deficit_t -= P_.fleet[k].battery_s - tload_[k];
      } else {
        scratch_caps_.push_back(P_.fleet[k].capacity_l);
        scratch_batts_.push_back(P_.fleet[k].battery_s);
      }
    }
    int extra = 0;
    if (deficit_v > 1e-9) {
      std::sort(scratch_caps_.rbegin(), scratch_caps_.rend());
      int cnt = 0;
      for (double c : scratch_caps_) {
        deficit_v -= c;
        ++cnt;
        if (deficit_v <= 1e-9) break;
      }
      if (deficit_v > 1e-9) return -1;
      extra = cnt;
    }
    if (deficit_t > 1e-9) {
      std::sort(scratch_batts_.rbegin(), scratch_batts_.rend());
      int cnt = 0;
      for (double b : scratch_batts_) {
        deficit_t -= b;
        ++cnt;
        if (deficit_t <= 1e-9) break;
      }
      if (deficit_t > 1e-9) return -1;
      extra = std::max(extra, cnt);
    }
    return extra;
  }

  // Exact preemptive one-machine bound for a serialized clique: releases are
  // the current earliest starts, tails the dependency residuals; running the
  // largest-tail available print first gives max over subsets J of
  // r(J) + p(J) + q(J).
  double clique_jps(const SerialClique& q) {
    auto& mem = clique_scratch_;
    mem.clear();
    for (int i : q.members) mem.push_back({S_[i], i});
    std::sort(mem.begin(), mem.end());
    auto& rem = jps_rem_;
    rem.clear();  // (tail, remaining duration), max-heap by tail
    double t = mem[0].first;
    double bound = 0.0;
    std::size_t next = 0;
    while (next < mem.size() || !rem.empty()) {
      if (rem.empty()) t = std::max(t, mem[next].first);
      while (next < mem.size() && mem[next].first <= t) {
        const int task = mem[next].second;
        rem.push_back({P_.tail[task] - P_.dur[task], P_.dur[task]});
        std::push_heap(rem.begin(), rem.end());
        ++next;
      }
      const double horizon = next < mem.size() ? mem[next].first : kInf;
      std::pop_heap(rem.begin(), rem.end());
      auto [tail, left] = rem.back();
      rem.pop_back();
      if (t + left <= horizon) {
        t += left;
        bound = std::max(bound, t + tail);
      } else {
        rem.push_back({tail, left - (horizon - t)});
        std::push_heap(rem.begin(), rem.end());
        t = horizon;
      }
    }
    return bound;
  }

  // Admissible bound: earliest-start makespan of the relaxation, per-robot
  // serialized load, total work over fleet size, plus the priced objective
  // terms that can only grow. Serialized-clique bounds escalate from a cheap
  // sorted-suffix form to the exact preemptive value only when the cheap form
  // is not enough to prune.
  double lower_bound(double prune_at = kInf) {
    double cmax = 0.0;
    for (int i = 0; i < P_.n; ++i) {
      cmax = std::max(cmax, S_[i] + P_.tau_s + P_.tail[i] + P_.tau_e);
    }
    double load = 0.0;
    for (int k = 0; k < P_.m; ++k) load = std::max(load, tload_[k]);
    const double energy = P_.total_occ / P_.m;
    double tlb = std::max(cmax, std::max(load, energy));
    for (const SerialClique& q : P_.cliques) {
      auto& mem = clique_scratch_;
      mem.clear();
      for (int i : q.members) mem.push_back({S_[i], i});
      std::sort(mem.begin(), mem.end());
      double suffix_d = 0.0;
      double min_residual = kInf;
      double bound = 0.0;
      for (int j = static_cast<int>(mem.size()) - 1; j >= 0; --j) {
        const int task = mem[j].second;
        suffix_d += P_.dur[task];
        min_residual = std::min(min_residual, P_.tail[task] - P_.dur[task]);
        bound = std::max(bound, mem[j].first + suffix_d + min_residual);
      }
      tlb = std::max(tlb, bound + P_.tau_s + P_.tau_e);
    }

    double rest = 0.0;
    if (P_.variant != Variant::P1) {
      double jim = 0.0;
      for (int i = 0; i < P_.n; ++i) jim += P_.alpha[i] * (S_[i] + P_.occ[i]);
      rest += P_.g_im * jim;
    }
    const int extra = extra_robots_needed();
    if (extra < 0) return kInf;
    if (P_.variant == Variant::P3) {
      int used = 0;
      for (int k = 0; k < P_.m; ++k) used += cnt_[k] > 0 ? 1 : 0;
      rest += P_.g_ut * (used + extra);
    }

    double j = P_.g_ms * tlb + rest;
    // escalate only when the exact clique value could flip a prune decision
    if (j > prune_at || !std::isfinite(prune_at)) return j;
    for (const SerialClique& q : P_.cliques) {
      tlb = std::max(tlb, clique_jps(q) + P_.tau_s + P_.tau_e);
    }
    return P_.g_ms * tlb + rest;
  }

  std::optional<ViolationHit> find_violation() {
    std::optional<ViolationHit> best;
    for (const int key : watched_) {
      const int a = key / P_.n;
      const int b = key % P_.n;
      const bool same_robot = robot_of_[a] == robot_of_[b];
      const int pi = P_.pair_index[key];
      const double d = S_[b] - S_[a];

      bool have = false;
      double lo = 0.0, hi = 0.0;
      auto seed = [&](double l, double h) {
        if (l + kIntervalTol < d && d < h - kIntervalTol) {
          if (!have) {
            lo = l;
            hi = h;
            have = true;
          } else {
            lo = std::min(lo, l);
            hi = std::max(hi, h);
          }
        }
      };
      if (pi >= 0) {
        for (const Interval& iv : P_.pairs[pi].forbidden) seed(iv.lo, iv.hi);
      }
      if (same_robot) seed(-P_.occ[b], P_.occ[a]);
      if (!have) continue;

      // expand to the full connected component of strictly overlapping
      // forbidden intervals
      bool changed = true;
      while (changed) {
        changed = false;
        auto absorb = [&](double l, double h) {
          if (l < hi && h > lo && (l < lo || h > hi)) {
            lo = std::min(lo, l);
            hi = std::max(hi, h);
            changed = true;
          }
        };
        if (pi >= 0) {
          for (const Interval& iv : P_.pairs[pi].forbidden) absorb(iv.lo, iv.hi);
        }
        if (same_robot) absorb(-P_.occ[b], P_.occ[a]);
      }

      const double when = std::max(S_[a], S_[b]);
      if (!best || when < best->when ||
          (when == best->when && key < best->key)) {
        best = ViolationHit{key, lo, hi, d, when};
      }
    }
    return best;
  }

  void try_leaf() {
    // budgets re-verified with task-id-order sums, matching the checker
    std::vector<double> v(P_.m, 0.0), t(P_.m, 0.0);
    for (int i = 0; i < P_.n; ++i) {
      v[robot_of_[i]] += P_.vol[i];
      t[robot_of_[i]] += P_.occ[i];
    }
    for (int k = 0; k < P_.m; ++k) {
      if (v[k] > P_.fleet[k].capacity_l || t[k] > P_.fleet[k].battery_s) return;
    }

    double j_ms = 0.0;
    for (int i = 0; i < P_.n; ++i) j_ms = std::max(j_ms, S_[i] + P_.occ[i]);
    double j = P_.g_ms * j_ms;
    if (P_.variant != Variant::P1) {
      double jim = 0.0;
      for (int i = 0; i < P_.n; ++i) jim += P_.alpha[i] * (S_[i] + P_.occ[i]);
      j += P_.g_im * jim;
    }
    if (P_.variant == Variant::P3) {
      int used = 0;
      for (int k = 0; k < P_.m; ++k) used += cnt_[k] > 0 ? 1 : 0;
      j += P_.g_ut * used;
    }

    std::lock_guard<std::mutex> g(sh_.inc.mu);
    Incumbent& inc = sh_.inc;
    if (!inc.accepts(j, path_, robot_of_, S_)) return;
    inc.has = true;
    inc.j = j;
    inc.path = path_;
    inc.robot_of = robot_of_;
    inc.starts = S_;
    inc.generation.fetch_add(1, std::memory_order_release);
    LOG_DEBUG("incumbent J=%.6f nodes=%llu", j,
              static_cast<unsigned long long>(local_nodes_));
  }

  // Seeded construction probe: schedule tasks in a random topological order,
  // placing each on the robot that lets it start earliest, pushing the start
  // right past forbidden windows of already placed tasks. Feasible results
  // enter the incumbent with a sentinel path so any tying exact-search leaf
  // supersedes them.
  void heuristic_probe(std::uint32_t seed) {
    std::uint32_t state = seed * 2654435761u | 1u;
    auto rnd = [&state]() {
      state ^= state << 13;
      state ^= state >> 17;
      state ^= state << 5;
      return state;
    };
    const int n = P_.n;
    probe_indeg_.assign(n, 0);
    for (const DiffArc& arc : P_.dep_arcs) ++probe_indeg_[arc.to];
    probe_ready_.clear();
    for (int i = 0; i < n; ++i) {
      if (probe_indeg_[i] == 0) probe_ready_.push_back(i);
    }
    probe_S_.assign(n, -1.0);
    probe_robot_.assign(n, -1);
    probe_avail_.assign(P_.m, 0.0);
    probe_vol_.assign(P_.m, 0.0);
    probe_time_.assign(P_.m, 0.0);

    while (!probe_ready_.empty()) {
      const std::size_t pick = rnd() % probe_ready_.size();
      const int t = probe_ready_[pick];
      probe_ready_[pick] = probe_ready_.back();
      probe_ready_.pop_back();
      for (int v : P_.inst->deps.successors(t)) {
        if (--probe_indeg_[v] == 0) probe_ready_.push_back(v);
      }

      double es0 = 0.0;
      for (const DiffArc& arc : P_.dep_arcs) {
        if (arc.to == t && probe_S_[arc.from] >= 0.0) {
          es0 = std::max(es0, probe_S_[arc.from] + arc.weight);
        }
      }
      double best_score = kInf;
      double best_start = kInf;
      int best_robot = -1;
      for (int k = 0; k < P_.m; ++k) {
        if (probe_vol_[k] + P_.vol[t] > P_.fleet[k].capacity_l) continue;
        if (probe_time_[k] + P_.occ[t] > P_.fleet[k].battery_s) continue;
        double s = std::max(es0, probe_avail_[k]);
        bool stable = false;
        for (int guard = 0; guard < 64 && !stable; ++guard) {
          stable = true;
          for (int u = 0; u < n; ++u) {
            if (probe_S_[u] < 0.0 || u == t) continue;
            const int a = std::min(u, t);
            const int b = std::max(u, t);
            const int pi = P_.pair_index[a * n + b];
            if (pi < 0) continue;
            const double delta = b == t ? s - probe_S_[u] : probe_S_[u] - s;
            for (const Interval& iv : P_.pairs[pi].forbidden) {
              if (iv.lo + kIntervalTol < delta && delta < iv.hi - kIntervalTol) {
                s = b == t ? probe_S_[u] + iv.hi : probe_S_[u] - iv.lo;
                stable = false;
                break;
              }
            }
            if (!stable) break;
          }
        }
        if (!stable) continue;
        // opening an unused robot is priced for the utilization variant
        double score = s;
        if (P_.variant == Variant::P3 && probe_time_[k] == 0.0) {
          score += P_.g_ut / std::max(P_.g_ms, 1e-9);
        }
        if (score < best_score) {
          best_score = score;
          best_start = s;
          best_robot = k;
        }
      }
      if (best_robot < 0) return;  // probe dead-ends, fine
      probe_S_[t] = best_start;
      probe_robot_[t] = best_robot;
      probe_avail_[best_robot] = best_start + P_.occ[t];
      probe_vol_[best_robot] += P_.vol[t];
      probe_time_[best_robot] += P_.occ[t];
    }

    double j_ms = 0.0;
    for (int i = 0; i < n; ++i) j_ms = std::max(j_ms, probe_S_[i] + P_.occ[i]);
    double j = P_.g_ms * j_ms;
    if (P_.variant != Variant::P1) {
      double jim = 0.0;
      for (int i = 0; i < n; ++i) jim += P_.alpha[i] * (probe_S_[i] + P_.occ[i]);
      j += P_.g_im * jim;
    }
    if (P_.variant == Variant::P3) {
      int used = 0;
      for (int k = 0; k < P_.m; ++k) used += probe_time_[k] > 0.0 ? 1 : 0;
      j += P_.g_ut * used;
    }

    static const std::vector<int> kSentinelPath{
        std::numeric_limits<int>::max()};
    std::lock_guard<std::mutex> g(sh_.inc.mu);
    Incumbent& inc = sh_.inc;
    if (!inc.accepts(j, kSentinelPath, probe_robot_, probe_S_)) return;
    inc.has = true;
    inc.j = j;
    inc.path = kSentinelPath;
    inc.robot_of = probe_robot_;
    inc.starts = probe_S_;
    inc.generation.fetch_add(1, std::memory_order_release);
    LOG_DEBUG("probe incumbent J=%.6f", j);
  }

  // Everything at or above this bound value is prunable against the cached
  // incumbent (tie-zone nodes still recurse for the path comparison).
  double prune_threshold() {
    refresh_cache();
    if (!cache_has_) return kInf;
    if (sh_.prune_slack > 0.0) return cache_j_ - sh_.prune_slack;
    return cache_j_ + kTieEps;
  }

  bool prune(double lb) {
    if (!cache_has_) return false;
    if (sh_.prune_slack > 0.0) return lb >= cache_j_ - sh_.prune_slack;
    if (lb > cache_j_ + kTieEps) return true;
    // tie zone: only the lexicographically earliest path may still win
    return lb > cache_j_ - kTieEps && path_ > cache_path_;
  }

  bool dfs() {
    if (deadline_passed()) return false;
    ++local_nodes_;
    const double threshold = prune_threshold();
    const double lb = lower_bound(threshold);
    if (lb >= kInf || prune(lb)) return true;

    if (auto v = find_violation()) {
      const int a = v->key / P_.n;
      const int b = v->key % P_.n;
      // peek both children's bounds, recurse into the cheaper side first
      double lbs[2];
      for (int side = 0; side < 2; ++side) {
        saved_S_.push_back(S_);
        const bool ok = side == 0 ? propagate(b, a, -v->lo)
                                  : propagate(a, b, v->hi);
        lbs[side] = ok ? lower_bound(threshold) : kInf;
        undo_arc();
        S_ = saved_S_.back();
        saved_S_.pop_back();
      }
      int order[2] = {0, 1};
      if (lbs[1] < lbs[0]) {
        order[0] = 1;
        order[1] = 0;
      }
      for (const int side : order) {
        if (lbs[side] >= kInf) continue;
        if (cache_has_ && sh_.prune_slack > 0.0 &&
            lbs[side] >= cache_j_ - sh_.prune_slack) {
          continue;
        }
        if (cache_has_ && sh_.prune_slack <= 0.0 &&
            lbs[side] > cache_j_ + kTieEps) {
          continue;
        }
        saved_S_.push_back(S_);
        const bool ok = side == 0 ? propagate(b, a, -v->lo)
                                  : propagate(a, b, v->hi);
        bool cont = true;
        if (ok) {
          path_.push_back(side);
          cont = dfs();
          path_.pop_back();
        }
        undo_arc();
        S_ = saved_S_.back();
        saved_S_.pop_back();
        if (!cont) return false;
      }
      return true;
    }

    if (depth_ < P_.n) {
      const int t = P_.branch_order[depth_];
      std::vector<char> seen(P_.class_count, 0);
      for (int k = 0; k < P_.m; ++k) {
        if (cnt_[k] == 0) {
          if (seen[P_.robot_class[k]]) continue;
          seen[P_.robot_class[k]] = 1;
        }
        if (vol_[k] + P_.vol[t] > P_.fleet[k].capacity_l) continue;
        if (tload_[k] + P_.occ[t] > P_.fleet[k].battery_s) continue;
        const std::size_t watched_before = watched_.size();
        apply_assign(t, k);
        path_.push_back(k);
        const bool cont = dfs();
        path_.pop_back();
        undo_assign(t, k, watched_before);
        if (!cont) return false;
      }
      return true;
    }

    try_leaf();
    return true;
  }

  const Prep& P_;
  Shared& sh_;

  std::vector<int> robot_of_;
  int depth_ = 0;
  std::vector<double> vol_, tload_;
  std::vector<int> cnt_;
  double assigned_vol_ = 0.0, assigned_occ_ = 0.0;
  std::vector<double> S_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<int> arc_from_;
  std::vector<int> watched_;
  std::vector<int> path_;

  std::vector<int> queue_;
  std::vector<int> relax_count_;
  std::vector<char> in_queue_;
  std::vector<int> touched_;
  std::vector<std::vector<double>> saved_S_;
  std::vector<double> scratch_caps_, scratch_batts_;
  std::vector<std::pair<double, int>> clique_scratch_;
  std::vector<std::pair<double, double>> jps_rem_;
  std::vector<int> probe_indeg_, probe_ready_, probe_robot_;
  std::vector<double> probe_S_, probe_avail_, probe_vol_, probe_time_;

  std::uint64_t cache_gen_ = 0;
  double cache_j_ = kInf;
  std::vector<int> cache_path_;
  bool cache_has_ = false;

  std::uint64_t local_nodes_ = 0;
  bool aborted_ = false;
};

// Necessary feasibility conditions cheap enough to certify up front.
std::string infeasibility_certificate(const MissionInstance& inst,
                                      const std::vector<RobotSpec>& fleet) {
  if (!inst.deps.is_acyclic()) return "dependency cycle";
  double cap = 0.0, max_cap = 0.0, max_batt = 0.0;
  for (const auto& r : fleet) {
    cap += r.capacity_l;
    max_cap = std::max(max_cap, r.capacity_l);
    max_batt = std::max(max_batt, r.battery_s);
  }
  double vol = 0.0;
  for (const auto& t : inst.tasks) vol += t.volume_l;
  if (vol > cap) {
    std::ostringstream os;
    os << "material budget unsatisfiable: total volume " << vol
       << " L exceeds fleet capacity " << cap << " L";
    return os.str();
  }
  for (const auto& t : inst.tasks) {
    if (t.volume_l > max_cap) {
      return "task " + std::to_string(t.id) + " volume exceeds every capacity";
    }
    if (inst.occupancy_s(t.id) > max_batt) {
      return "task " + std::to_string(t.id) + " occupancy exceeds every battery";
    }
  }
  return {};
}

}  // namespace

Schedule assemble_schedule(const MissionInstance& instance, int m_robots,
                           const std::vector<int>& robot_of,
                           const std::vector<double>& start_s) {
  const int n = instance.task_count();
  Schedule s;
  s.robot_of = robot_of;
  s.start_s = start_s;
  s.robot_sequences.assign(m_robots, {});
  s.material_l.assign(m_robots, 0.0);
  s.flight_s.assign(m_robots, 0.0);
  s.used.assign(m_robots, 0);
  for (int i = 0; i < n; ++i) {
    const int k = robot_of[i];
    s.robot_sequences[k].push_back(i);
    s.material_l[k] += instance.tasks[i].volume_l;
    s.flight_s[k] += instance.occupancy_s(i);
    s.used[k] = 1;
    s.makespan_s = std::max(s.makespan_s, start_s[i] + instance.occupancy_s(i));
  }
  for (auto& seq : s.robot_sequences) {
    std::sort(seq.begin(), seq.end(), [&](int a, int b) {
      if (start_s[a] != start_s[b]) return start_s[a] < start_s[b];
      return a < b;
    });
  }
  s.orientations.reserve(instance.conflicts.pairs.size());
  for (const ConflictPair& cp : instance.conflicts.pairs) {
    const auto off_a = arrival_offsets(instance.tasks[cp.task_a].path,
                                       instance.params.v_ex);
    const auto off_b = arrival_offsets(instance.tasks[cp.task_b].path,
                                       instance.params.v_ex);
    const double en_a =
        start_s[cp.task_a] + (cp.seg_a == 0 ? 0.0 : off_a[cp.seg_a - 1]);
    const double en_b =
        start_s[cp.task_b] + (cp.seg_b == 0 ? 0.0 : off_b[cp.seg_b - 1]);
    int orient;
    if (en_a < en_b) {
      orient = 1;
    } else if (en_b < en_a) {
      orient = 0;
    } else {
      const double ex_a = start_s[cp.task_a] + off_a[cp.seg_a];
      const double ex_b = start_s[cp.task_b] + off_b[cp.seg_b];
      orient = ex_a <= ex_b ? 1 : 0;
    }
    s.orientations.push_back(orient);
  }
  return s;
}

ObjectiveBreakdown objective_of(const MissionInstance& instance, Variant variant,
                                const Schedule& schedule) {
  ObjectiveBreakdown b;
  b.j_ms = schedule.makespan_s;
  const auto alpha = instance.deps.importance(instance.params.beta);
  for (int i = 0; i < instance.task_count(); ++i) {
    b.j_im += alpha[i] * (schedule.start_s[i] + instance.occupancy_s(i));
  }
  for (char u : schedule.used) b.j_ut += u ? 1.0 : 0.0;
  b.j = instance.params.g_ms * b.j_ms;
  if (variant != Variant::P1) b.j += instance.params.g_im * b.j_im;
  if (variant == Variant::P3) b.j += instance.params.g_ut * b.j_ut;
  return b;
}

SolveReport solve(const MissionInstance& instance, int m_robots, Variant variant,
                  const SolveLimits& limits) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;

  const auto fleet = fleet_for(instance, m_robots);
  if (const std::string cert = infeasibility_certificate(instance, fleet);
      !cert.empty()) {
    rep.status = SolveStatus::Infeasible;
    rep.certificate = cert;
    rep.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
  }

  const Prep P = make_prep(instance, m_robots, variant);
  Shared sh;
  sh.P = &P;
  sh.prune_slack = limits.gap_abs;
  if (limits.time_limit_s > 0.0) {
    sh.has_deadline = true;
    sh.deadline = t0 + std::chrono::duration_cast<
                           std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(limits.time_limit_s));
  }

  int threads = limits.threads;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }

  // Seed jobs: breadth-first over the same branching rule until there is
  // enough parallel work. Leaves reached while seeding update the incumbent
  // directly.
  std::vector<Job> jobs;
  {
    Worker seeder(P, sh);
    std::deque<Job> q;
    q.push_back({});
    const std::size_t target =
        threads == 1 ? 1 : static_cast<std::size_t>(threads) * 4;
    int expansions = 0;
    while (!q.empty() && q.size() < target && expansions < 2048) {
      Job job = std::move(q.front());
      q.pop_front();
      ++expansions;
      seeder.reset();
      if (!seeder.replay(job)) continue;
      seeder.set_path(job.path);
      auto kids = seeder.expand_children();
      if (kids.empty()) continue;  // pruned or leaf
      for (const auto& [act, slot] : kids) {
        Job child = job;
        child.actions.push_back(act);
        child.path = job.path;
        child.path.push_back(slot);
        child.lb = job.lb;
        q.push_back(std::move(child));
      }
    }
    jobs.assign(q.begin(), q.end());
    // Tighter per-job bounds for honest gap reporting on timeout.
    for (Job& job : jobs) {
      seeder.reset();
      if (seeder.replay(job)) job.lb = seeder.node_lower_bound();
    }
    sh.nodes.fetch_add(seeder.nodes());
  }

  // Heuristic probe phase: seeded diversified constructions give the exact
  // search a strong incumbent to prune against.
  {
    const std::uint32_t probes = P.n <= 8 ? 256 : 3000;
    std::atomic<std::uint32_t> next_probe{0};
    auto probe_loop = [&](Worker& w) {
      while (true) {
        if (sh.has_deadline &&
            std::chrono::steady_clock::now() >= sh.deadline) {
          break;
        }
        const std::uint32_t s = next_probe.fetch_add(1);
        if (s >= probes) break;
        w.run_probe(s);
      }
    };
    if (threads == 1) {
      Worker w(P, sh);
      probe_loop(w);
    } else {
      std::vector<std::unique_ptr<Worker>> pws;
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pws.push_back(std::make_unique<Worker>(P, sh));
      for (int t = 0; t < threads; ++t) pool.emplace_back([&, t] { probe_loop(*pws[t]); });
      for (auto& th : pool) th.join();
    }
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::unique_ptr<Worker>> workers;
  bool aborted_any = false;
  auto drain = [&](Worker& w) {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      if (w.aborted()) {
        w.record_open(jobs[i].lb);
        continue;
      }
      w.run_job(jobs[i]);
    }
  };
  if (threads == 1 || jobs.size() <= 1) {
    Worker w(P, sh);
    drain(w);
    sh.nodes.fetch_add(w.nodes());
    aborted_any = w.aborted();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) workers.push_back(std::make_unique<Worker>(P, sh));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] { drain(*workers[t]); });
    }
    for (auto& th : pool) th.join();
    for (auto& w : workers) {
      sh.nodes.fetch_add(w->nodes());
      aborted_any = aborted_any || w->aborted();
    }
  }

  rep.nodes = sh.nodes.load();
  rep.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const bool open = sh.any_open;
  if (sh.inc.has) {
    rep.schedule = assemble_schedule(instance, m_robots, sh.inc.robot_of,
                                     sh.inc.starts);
    const auto b = objective_of(instance, variant, *rep.schedule);
    rep.objective = b.j;
    rep.j_ms = b.j_ms;
    rep.j_im = b.j_im;
    rep.j_ut = b.j_ut;
    if (open || aborted_any) {
      rep.status = SolveStatus::FeasibleTimeout;
      rep.gap_abs = std::max(0.0, rep.objective - sh.open_min_lb);
    } else {
      rep.status = SolveStatus::Optimal;
      rep.gap_abs = 0.0;
    }
  } else if (open || aborted_any) {
    rep.status = SolveStatus::FeasibleTimeout;
    rep.certificate = "time limit reached before any feasible schedule was found";
    rep.gap_abs = kInf;
  } else {
    rep.status = SolveStatus::Infeasible;
    rep.certificate = "search tree exhausted: no assignment satisfies all constraints";
  }
  return rep;
}

std::vector<SweepEntry> sweep_fleet(const MissionInstance& instance, int m_min,
                                    int m_max, Variant variant,
                                    const SolveLimits& limits) {
  if (m_min < 1) throw ParamError("sweep m_min must be >= 1");
  if (m_max < m_min) throw ParamError("sweep range must satisfy m_min <= m_max");
  std::vector<SweepEntry> entries;
  double total_vol = 0.0;
  for (const auto& t : instance.tasks) total_vol += t.volume_l;
  for (int m = m_min; m <= m_max; ++m) {
    SweepEntry e;
    e.m_robots = m;
    double cap = 0.0;
    for (const auto& r : fleet_for(instance, m)) cap += r.capacity_l;
    e.material_infeasible = total_vol > cap;
    e.report = solve(instance, m, variant, limits);
    LOG_INFO("sweep M=%d status=%s makespan=%.3f", m,
             status_name(e.report.status), e.report.j_ms);
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace aeroprint
