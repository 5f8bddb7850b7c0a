#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "aeroprint/errors.hpp"

namespace aeroprint {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Point3 operator*(const Point3& a, double s) {
  return {a.x * s, a.y * s, a.z * s};
}
inline double dot(const Point3& a, const Point3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

// Closed segment; a == b is permitted and treated as a point.
struct Segment {
  Point3 a;
  Point3 b;
};

// Ordered polyline a UAV traverses at constant speed while depositing.
// cumulative_lengths[i] is the arc length from the first waypoint to the end
// of segment i; it is always derived from the waypoints, never stored
// externally. Zero-length segments (duplicate waypoints) are allowed, the
// total length must be positive.
class PrintPath {
public:
  PrintPath() = default;
  explicit PrintPath(std::vector<Point3> waypoints);

  const std::vector<Point3>& waypoints() const { return waypoints_; }
  std::size_t segment_count() const { return waypoints_.size() - 1; }
  Segment segment(std::size_t i) const {
    return {waypoints_[i], waypoints_[i + 1]};
  }
  const std::vector<double>& cumulative_lengths() const {
    return cumulative_lengths_;
  }
  double total_length() const { return cumulative_lengths_.back(); }

  // Position at arc length s from the start, clamped to [0, total_length].
  Point3 point_at_arc_length(double s) const;

private:
  std::vector<Point3> waypoints_;
  std::vector<double> cumulative_lengths_;
};

// One element of the conflict set: segment seg_a of task_a and segment seg_b
// of task_b pass within the clearance radius of each other.
// Canonical order: task_a < task_b.
struct ConflictPair {
  int task_a = -1;
  int task_b = -1;
  int seg_a = -1;
  int seg_b = -1;
  double min_dist = 0.0;
};

// Task-pair conflict probabilities p(i,j) = conflicting segment pairs over
// all segment pairs. Symmetric, zero exactly for pairs without conflicts.
class ConflictGraph {
public:
  ConflictGraph() = default;
  explicit ConflictGraph(int task_count)
      : n_(task_count), p_(static_cast<std::size_t>(task_count) * task_count, 0.0) {}

  int task_count() const { return n_; }
  double p(int i, int j) const { return p_[static_cast<std::size_t>(i) * n_ + j]; }
  void set(int i, int j, double value) {
    p_[static_cast<std::size_t>(i) * n_ + j] = value;
    p_[static_cast<std::size_t>(j) * n_ + i] = value;
  }

private:
  int n_ = 0;
  std::vector<double> p_;
};

// All conflicting segment pairs across distinct paths, sorted canonically by
// (task_a, task_b, seg_a, seg_b), plus the derived conflict graph.
struct ConflictSet {
  std::vector<ConflictPair> pairs;
  ConflictGraph graph;
};

// Exact minimum Euclidean distance between two closed segments.
// Symmetric in its arguments; throws GeometryError on non-finite input.
double segment_min_distance(const Segment& s1, const Segment& s2);

// All segment pairs over distinct path pairs with min distance <= r_c
// (inclusive). Self-pairs within one path are excluded. Result is
// independent of path ordering beyond the canonical sort.
ConflictSet detect_conflicts(const std::vector<PrintPath>& paths, double r_c);

// Fraction of conflicting segment pairs between two paths: count / (Na * Nb).
double conflict_probability(const PrintPath& a, const PrintPath& b, double r_c);

// Per-segment-end time offsets from the start of printing:
// offsets[i] = cumulative_lengths[i] / v_ex. The entry time offset of
// segment i is offsets[i-1] (0 for i = 0).
std::vector<double> arrival_offsets(const PrintPath& path, double v_ex);

}  // namespace aeroprint
