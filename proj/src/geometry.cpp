#include "aeroprint/geometry.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace aeroprint {

namespace {

constexpr double kDegenerateSq = 1e-30;  // squared-length threshold for a point segment

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct Aabb {
  double lo[3];
  double hi[3];
};

Aabb segment_box(const Segment& s) {
  Aabb b;
  b.lo[0] = std::min(s.a.x, s.b.x);
  b.lo[1] = std::min(s.a.y, s.b.y);
  b.lo[2] = std::min(s.a.z, s.b.z);
  b.hi[0] = std::max(s.a.x, s.b.x);
  b.hi[1] = std::max(s.a.y, s.b.y);
  b.hi[2] = std::max(s.a.z, s.b.z);
  return b;
}

// Boxes inflated by r cannot contain a pair within distance r when they are
// separated on some axis. Inclusive comparison keeps distance == r pairs.
bool boxes_within(const Aabb& a, const Aabb& b, double r) {
  for (int d = 0; d < 3; ++d) {
    if (a.lo[d] > b.hi[d] + r || b.lo[d] > a.hi[d] + r) return false;
  }
  return true;
}

}  // namespace

PrintPath::PrintPath(std::vector<Point3> waypoints)
    : waypoints_(std::move(waypoints)) {
  if (waypoints_.size() < 2) {
    throw GeometryError("print path needs at least 2 waypoints");
  }
  cumulative_lengths_.reserve(waypoints_.size() - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
    if (!waypoints_[i].finite() || !waypoints_[i + 1].finite()) {
      throw GeometryError("print path waypoint is not finite");
    }
    acc += distance(waypoints_[i], waypoints_[i + 1]);
    cumulative_lengths_.push_back(acc);
  }
  if (!(acc > 0.0)) {
    throw GeometryError("print path has zero total length");
  }
}

Point3 PrintPath::point_at_arc_length(double s) const {
  s = std::clamp(s, 0.0, total_length());
  auto it = std::lower_bound(cumulative_lengths_.begin(), cumulative_lengths_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - cumulative_lengths_.begin());
  if (i >= segment_count()) i = segment_count() - 1;
  const double seg_start = i == 0 ? 0.0 : cumulative_lengths_[i - 1];
  const double seg_len = cumulative_lengths_[i] - seg_start;
  const Point3& a = waypoints_[i];
  if (seg_len <= 0.0) return a;
  const double t = (s - seg_start) / seg_len;
  return a + (waypoints_[i + 1] - a) * t;
}

// Clamped minimization of |a(s) - b(t)|^2 over the unit square: closed-form
// critical point, then edge clamping. Degenerate segments reduce to
// point-segment / point-point distance.
double segment_min_distance(const Segment& s1, const Segment& s2) {
  if (!s1.a.finite() || !s1.b.finite() || !s2.a.finite() || !s2.b.finite()) {
    throw GeometryError("segment endpoint is not finite");
  }
  const Point3 d1 = s1.b - s1.a;
  const Point3 d2 = s2.b - s2.a;
  const Point3 r = s1.a - s2.a;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);

  double s = 0.0;
  double t = 0.0;
  if (a <= kDegenerateSq && e <= kDegenerateSq) {
    // both points
  } else if (a <= kDegenerateSq) {
    t = clamp01(f / e);
  } else {
    const double c = dot(d1, r);
    if (e <= kDegenerateSq) {
      s = clamp01(-c / a);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;  // >= 0 by Cauchy-Schwarz
      if (denom > 0.0) {
        s = clamp01((b * f - c * e) / denom);
      }
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = clamp01(-c / a);
      } else if (t > 1.0) {
        t = 1.0;
        s = clamp01((b - c) / a);
      }
    }
  }
  return norm((s1.a + d1 * s) - (s2.a + d2 * t));
}

ConflictSet detect_conflicts(const std::vector<PrintPath>& paths, double r_c) {
  if (!(r_c > 0.0) || !std::isfinite(r_c)) {
    throw ParamError("r_c must be > 0");
  }
  if (paths.empty()) {
    throw ParamError("detect_conflicts needs at least one path");
  }
  const int n = static_cast<int>(paths.size());
  ConflictSet out;
  out.graph = ConflictGraph(n);

  // Per-path segment boxes for the prefilter.
  std::vector<std::vector<Aabb>> boxes(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    boxes[i].reserve(paths[i].segment_count());
    for (std::size_t s = 0; s < paths[i].segment_count(); ++s) {
      boxes[i].push_back(segment_box(paths[i].segment(s)));
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::size_t hits = 0;
      for (std::size_t si = 0; si < paths[i].segment_count(); ++si) {
        for (std::size_t sj = 0; sj < paths[j].segment_count(); ++sj) {
          if (!boxes_within(boxes[i][si], boxes[j][sj], r_c)) continue;
          const double d =
              segment_min_distance(paths[i].segment(si), paths[j].segment(sj));
          if (d <= r_c) {
            out.pairs.push_back(
                {i, j, static_cast<int>(si), static_cast<int>(sj), d});
            ++hits;
          }
        }
      }
      const double denom = static_cast<double>(paths[i].segment_count()) *
                           static_cast<double>(paths[j].segment_count());
      out.graph.set(i, j, static_cast<double>(hits) / denom);
    }
  }

  std::sort(out.pairs.begin(), out.pairs.end(), [](const ConflictPair& a, const ConflictPair& b) {
    return std::tie(a.task_a, a.task_b, a.seg_a, a.seg_b) <
           std::tie(b.task_a, b.task_b, b.seg_a, b.seg_b);
  });
  return out;
}

double conflict_probability(const PrintPath& a, const PrintPath& b, double r_c) {
  if (!(r_c > 0.0) || !std::isfinite(r_c)) {
    throw ParamError("r_c must be > 0");
  }
  std::size_t hits = 0;
  for (std::size_t si = 0; si < a.segment_count(); ++si) {
    for (std::size_t sj = 0; sj < b.segment_count(); ++sj) {
      if (segment_min_distance(a.segment(si), b.segment(sj)) <= r_c) ++hits;
    }
  }
  return static_cast<double>(hits) /
         (static_cast<double>(a.segment_count()) * static_cast<double>(b.segment_count()));
}

std::vector<double> arrival_offsets(const PrintPath& path, double v_ex) {
  if (!(v_ex > 0.0) || !std::isfinite(v_ex)) {
    throw ParamError("v_ex must be > 0");
  }
  std::vector<double> offsets;
  offsets.reserve(path.cumulative_lengths().size());
  for (double c : path.cumulative_lengths()) offsets.push_back(c / v_ex);
  return offsets;
}

}  // namespace aeroprint
