#include "aeroprint/geometry.hpp"

#include <limits>

#include "support.hpp"
#include "test_util.hpp"

using namespace aeroprint;

namespace {

Segment rand_segment(support::Rng& rng) {
  const Point3 a{rng.real(-3, 3), rng.real(-3, 3), rng.real(-3, 3)};
  const Point3 b{rng.real(-3, 3), rng.real(-3, 3), rng.real(-3, 3)};
  return {a, b};
}

void test_segment_min_distance() {
  // parallel offset segments
  CHECK_NEAR(segment_min_distance({{0, 0, 0}, {1, 0, 0}}, {{0, 1, 0}, {1, 1, 0}}),
             1.0, 1e-12);
  // degenerate point segment lying on the other segment
  CHECK_NEAR(segment_min_distance({{0, 0, 0}, {1, 0, 0}},
                                  {{0.5, 0, 0}, {0.5, 0, 0}}),
             0.0, 1e-12);
  // skew diagonals one meter apart in z; value confirmed by the sampling oracle
  const Segment d1{{0, 0, 0}, {1, 1, 0}};
  const Segment d2{{1, 0, 1}, {0, 1, 1}};
  CHECK_NEAR(segment_min_distance(d1, d2), 1.0, 1e-9);
  CHECK_NEAR(support::sampled_min_distance(d1, d2), 1.0, 1e-6);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(segment_min_distance({{nan, 0, 0}, {1, 0, 0}}, d2), GeometryError);

  // symmetry and agreement with the sampling oracle on random segments
  support::Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const Segment a = rand_segment(rng);
    const Segment b = rand_segment(rng);
    const double ab = segment_min_distance(a, b);
    const double ba = segment_min_distance(b, a);
    CHECK_NEAR(ab, ba, 1e-12);
    const double sampled = support::sampled_min_distance(a, b);
    CHECK_MSG(ab <= sampled + 1e-9, "exact %g above sampled %g", ab, sampled);
    CHECK_NEAR(ab, sampled, 1e-6);
  }

  // closed-form result never exceeds any sampled point pair at 1e-3 steps,
  // and matches the refined oracle on the same segments
  support::Rng rng2(77);
  for (int trial = 0; trial < 5; ++trial) {
    const Segment a = rand_segment(rng2);
    const Segment b = rand_segment(rng2);
    const double exact = segment_min_distance(a, b);
    const Point3 da = a.b - a.a;
    const Point3 db = b.b - b.a;
    double sampled_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
      for (int j = 0; j <= 1000; ++j) {
        const double d =
            distance(a.a + da * (i / 1000.0), b.a + db * (j / 1000.0));
        sampled_min = std::min(sampled_min, d);
      }
    }
    CHECK(exact <= sampled_min + 1e-12);
    CHECK_NEAR(exact, support::sampled_min_distance(a, b), 1e-6);
  }
}

void test_print_path() {
  CHECK_THROWS(PrintPath({{0, 0, 0}}), GeometryError);
  CHECK_THROWS(PrintPath({{1, 2, 3}, {1, 2, 3}}), GeometryError);  // zero length

  const PrintPath p({{0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 2, 0}});
  CHECK(p.segment_count() == 3);
  CHECK_NEAR(p.cumulative_lengths()[0], 1.0, 1e-12);
  CHECK_NEAR(p.cumulative_lengths()[1], 1.0, 1e-12);  // zero-length middle
  CHECK_NEAR(p.total_length(), 3.0, 1e-12);
  const Point3 mid = p.point_at_arc_length(2.0);
  CHECK_NEAR(mid.x, 1.0, 1e-12);
  CHECK_NEAR(mid.y, 1.0, 1e-12);
}

void test_detect_conflicts() {
  const PrintPath far_a = support::seg_path({0, 0, 0}, {1, 0, 0});
  const PrintPath far_b = support::seg_path({0, 10, 0}, {1, 10, 0});
  const ConflictSet none = detect_conflicts({far_a, far_b}, 1.0);
  CHECK(none.pairs.empty());
  CHECK(none.graph.p(0, 1) == 0.0);

  const ConflictSet same = detect_conflicts({far_a, far_a}, 1.0);
  REQUIRE(same.pairs.size() == 1);
  CHECK(same.pairs[0].task_a == 0 && same.pairs[0].task_b == 1);
  CHECK_NEAR(same.pairs[0].min_dist, 0.0, 1e-12);
  CHECK(same.graph.p(0, 1) == 1.0);

  // perpendicular crossing segments; the sampling oracle confirms contact
  const PrintPath cross_a = support::seg_path({-1, 0, 0}, {1, 0, 0});
  const PrintPath cross_b = support::seg_path({0, -1, 0}, {0, 1, 0});
  CHECK_NEAR(support::sampled_min_distance(cross_a.segment(0), cross_b.segment(0)),
             0.0, 1e-6);
  const ConflictSet crossing = detect_conflicts({cross_a, cross_b}, 1.0);
  REQUIRE(crossing.pairs.size() == 1);
  CHECK_NEAR(crossing.pairs[0].min_dist, 0.0, 1e-12);

  // result independent of path list ordering (up to the index relabeling)
  support::Rng rng(7);
  std::vector<PrintPath> paths;
  for (int i = 0; i < 4; ++i) {
    paths.push_back(support::zigzag_path(rng, i * 0.8, 0.0, 0.0, 2));
  }
  const ConflictSet fwd = detect_conflicts(paths, 1.0);
  std::vector<PrintPath> rev(paths.rbegin(), paths.rend());
  const ConflictSet bwd = detect_conflicts(rev, 1.0);
  CHECK(fwd.pairs.size() == bwd.pairs.size());
  const int last = static_cast<int>(paths.size()) - 1;
  for (const ConflictPair& cp : fwd.pairs) {
    const int ra = last - cp.task_b;  // reversed indices, canonical order
    const int rb = last - cp.task_a;
    const bool found =
        std::any_of(bwd.pairs.begin(), bwd.pairs.end(), [&](const ConflictPair& q) {
          return q.task_a == ra && q.task_b == rb && q.seg_a == cp.seg_b &&
                 q.seg_b == cp.seg_a;
        });
    CHECK_MSG(found, "pair (%d,%d,%d,%d) missing after reversal", cp.task_a,
              cp.task_b, cp.seg_a, cp.seg_b);
  }

  // every non-conflicting segment pair stays clear of r_c at sampled points
  const double r_c = 1.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      for (std::size_t si = 0; si < paths[i].segment_count(); ++si) {
        for (std::size_t sj = 0; sj < paths[j].segment_count(); ++sj) {
          const bool in_set = std::any_of(
              fwd.pairs.begin(), fwd.pairs.end(), [&](const ConflictPair& q) {
                return q.task_a == static_cast<int>(i) &&
                       q.task_b == static_cast<int>(j) &&
                       q.seg_a == static_cast<int>(si) &&
                       q.seg_b == static_cast<int>(sj);
              });
          if (in_set) continue;
          const double d = support::sampled_min_distance(paths[i].segment(si),
                                                         paths[j].segment(sj));
          CHECK_MSG(d > r_c, "unlisted pair sampled at %g <= r_c", d);
        }
      }
    }
  }

  CHECK_THROWS(detect_conflicts({}, 1.0), ParamError);
  CHECK_THROWS(detect_conflicts({far_a}, 0.0), ParamError);
}

void test_conflict_probability() {
  const PrintPath far_a = support::seg_path({0, 0, 0}, {1, 0, 0});
  const PrintPath far_b = support::seg_path({0, 10, 0}, {1, 10, 0});
  CHECK(conflict_probability(far_a, far_b, 1.0) == 0.0);

  // coincident two-segment paths of total length 0.2: every pair within r_c
  const PrintPath tiny({{0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}});
  CHECK(conflict_probability(tiny, tiny, 1.0) == 1.0);

  // L-shaped vs straight: probability equals the independent double loop
  const PrintPath ell({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
  const PrintPath straight({{0, 0.5, 0}, {2, 0.5, 0}, {3, 0.5, 0}});
  const double r_c = 0.6;
  std::size_t hits = 0;
  for (std::size_t si = 0; si < ell.segment_count(); ++si) {
    for (std::size_t sj = 0; sj < straight.segment_count(); ++sj) {
      if (segment_min_distance(ell.segment(si), straight.segment(sj)) <= r_c) {
        ++hits;
      }
    }
  }
  const double expected = static_cast<double>(hits) /
                          (ell.segment_count() * straight.segment_count());
  CHECK(conflict_probability(ell, straight, r_c) == expected);

  // exact consistency with the conflict set
  const ConflictSet cs = detect_conflicts({ell, straight}, r_c);
  CHECK(cs.graph.p(0, 1) == expected);
  CHECK(cs.pairs.size() == hits);
}

void test_arrival_offsets() {
  const PrintPath one = support::seg_path({0, 0, 0}, {1, 0, 0});
  const auto offs = arrival_offsets(one, 0.1);
  REQUIRE(offs.size() == 1);
  CHECK_NEAR(offs[0], 10.0, 1e-12);

  const PrintPath two({{0, 0, 0}, {0.5, 0, 0}, {1, 0, 0}});
  const auto offs2 = arrival_offsets(two, 0.1);
  REQUIRE(offs2.size() == 2);
  CHECK_NEAR(offs2[0], 5.0, 1e-12);
  CHECK_NEAR(offs2[1], 10.0, 1e-12);

  // duplicate waypoint: repeated offset value
  const PrintPath dup({{0, 0, 0}, {0.5, 0, 0}, {0.5, 0, 0}, {1, 0, 0}});
  const auto offs3 = arrival_offsets(dup, 0.1);
  REQUIRE(offs3.size() == 3);
  CHECK(offs3[0] == offs3[1]);

  CHECK_THROWS(arrival_offsets(one, 0.0), ParamError);
  CHECK_THROWS(arrival_offsets(one, -1.0), ParamError);
}

}  // namespace

int main() {
  test_segment_min_distance();
  test_print_path();
  test_detect_conflicts();
  test_conflict_probability();
  test_arrival_offsets();
  return testutil::summary("test_geometry");
}
