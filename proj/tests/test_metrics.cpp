#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "cuplen/metrics.hpp"
#include "cuplen/synth.hpp"

using namespace cuplen;

namespace {

constexpr double pi = std::numbers::pi;

void expect_triangle_inequality(const DistanceMatrix& d, std::uint64_t seed, int triples = 2000) {
  std::mt19937_64 rng(seed);
  for (int t = 0; t < triples; ++t) {
    const std::size_t i = rng() % d.size(), j = rng() % d.size(), k = rng() % d.size();
    EXPECT_LE(d(i, k), d(i, j) + d(j, k) + 1e-12) << i << " " << j << " " << k;
  }
}

}  // namespace

TEST(EuclideanDistance, Examples) {
  const auto d = euclidean_distance_matrix({{0, 0}, {3, 4}});
  EXPECT_DOUBLE_EQ(d(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(d(1, 0), 5.0);
  EXPECT_DOUBLE_EQ(euclidean_distance_matrix({{1, 2}, {1, 2}})(0, 1), 0.0);
  const auto e = euclidean_distance_matrix({{0}, {1}, {4}});
  EXPECT_DOUBLE_EQ(e(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(e(0, 2), 4.0);
  EXPECT_DOUBLE_EQ(e(1, 2), 3.0);
  EXPECT_DOUBLE_EQ(e(2, 2), 0.0);
  EXPECT_THROW(euclidean_distance_matrix({{0, 0}, {1}}), std::invalid_argument);
}

TEST(TorusMetric, Examples) {
  EXPECT_NEAR(torus_intrinsic_metric({{0, 0}, {pi, pi}})(0, 1), pi * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(torus_intrinsic_metric({{0.1, 0}, {2 * pi - 0.1, 0}})(0, 1), 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(torus_intrinsic_metric({{1, 2}, {1, 2}})(0, 1), 0.0);
  EXPECT_THROW(torus_intrinsic_metric({{2 * pi, 0}}), std::invalid_argument);
  expect_triangle_inequality(torus_intrinsic_metric(sample_torus(200, 3)), 4);
}

TEST(WedgeMetric, Examples) {
  DistanceMatrix a(2), b(3);
  a.set(1, 0, 2.0);
  b.set(1, 0, 1.0);
  b.set(2, 0, 5.0);
  b.set(2, 1, 4.5);
  const auto d = wedge_path_metric({{a, 0}, {b, 1}});
  ASSERT_EQ(d.size(), 5u);
  // a's basepoint (0) to b's points: d_B(y, x0)
  EXPECT_DOUBLE_EQ(d(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(d(0, 4), 4.5);
  // both basepoints
  EXPECT_DOUBLE_EQ(d(0, 3), 0.0);
  EXPECT_DOUBLE_EQ(d(1, 4), 2.0 + 4.5);
  // within a component
  EXPECT_DOUBLE_EQ(d(2, 4), 5.0);
  EXPECT_THROW(wedge_path_metric({{a, 2}, {b, 0}}), std::invalid_argument);
}

TEST(WedgeMetric, AntipodalPointsOnGluedCircles) {
  const std::vector<double> t{0.0, pi};
  DistanceMatrix c(2);
  c.set(1, 0, circle_arc(t[1], t[0]));
  const auto d = wedge_path_metric({{c, 0}, {c, 0}});
  EXPECT_NEAR(d(1, 3), 2 * pi, 1e-12);
}

TEST(Landmarks, AllPoints) {
  const auto d = euclidean_distance_matrix({{0}, {1}, {3}, {7}});
  const auto sel = maxmin_landmarks(d, 4, 5);
  EXPECT_EQ(sel.indices.size(), 4u);
  EXPECT_DOUBLE_EQ(sel.cover_radius, 0.0);
  std::vector<std::size_t> sorted = sel.indices;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Landmarks, CollinearFarthestPoint) {
  const auto d = euclidean_distance_matrix({{0}, {1}, {3}});
  std::uint64_t seed = 0;
  while (maxmin_landmarks(d, 1, seed).indices.front() != 0) ++seed;
  const auto sel = maxmin_landmarks(d, 2, seed);
  EXPECT_EQ(sel.indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_DOUBLE_EQ(sel.cover_radius, 1.0);
}

TEST(Landmarks, SingleLandmarkCoversToFarthestPoint) {
  const auto d = euclidean_distance_matrix({{0}, {1}, {3}, {-2}});
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto sel = maxmin_landmarks(d, 1, seed);
    double far = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) far = std::max(far, d(sel.indices[0], i));
    EXPECT_DOUBLE_EQ(sel.cover_radius, far);
  }
}

TEST(Landmarks, Errors) {
  const auto d = euclidean_distance_matrix({{0}, {1}});
  EXPECT_THROW(maxmin_landmarks(d, 3, 0), std::invalid_argument);
  EXPECT_THROW(maxmin_landmarks(d, 0, 0), std::invalid_argument);
}

TEST(Landmarks, CoverRadiusNonIncreasingAndDistinct) {
  const auto d = torus_intrinsic_metric(sample_torus(300, 11));
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= 60; ++n) {
    const auto sel = maxmin_landmarks(d, n, 9);
    EXPECT_LE(sel.cover_radius, prev);
    prev = sel.cover_radius;
    std::set<std::size_t> uniq(sel.indices.begin(), sel.indices.end());
    EXPECT_EQ(uniq.size(), n);
    // cover radius is the largest distance to the nearest landmark
    double cover = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      double near = std::numeric_limits<double>::infinity();
      for (std::size_t l : sel.indices) near = std::min(near, d(i, l));
      cover = std::max(cover, near);
    }
    EXPECT_DOUBLE_EQ(sel.cover_radius, cover);
  }
}

TEST(DistanceMatrix, Restrict) {
  const auto d = euclidean_distance_matrix({{0}, {1}, {3}, {7}});
  const std::vector<std::size_t> idx{3, 1};
  const auto r = d.restrict(idx);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r(0, 1), 6.0);
  EXPECT_DOUBLE_EQ(r(0, 0), 0.0);
}

TEST(GeneratedMatrices, TriangleInequality) {
  expect_triangle_inequality(
      wedge_sum_dataset({{WedgePiece::Kind::circle, 50, 1.0}, {WedgePiece::Kind::sphere, 80, 1.5},
                         {WedgePiece::Kind::torus, 60, 1.0}},
                        2),
      5);
  expect_triangle_inequality(euclidean_distance_matrix(sample_torus_embedded(150, 5, 2, 1)), 6);
}

TEST(Csv, PointsRoundTrip) {
  const PointCloud pts{{0.1, -2.5, 1e-300}, {3.0, 4.0, 1.0 / 3.0}};
  std::stringstream ss;
  write_points_csv(ss, pts);
  EXPECT_EQ(read_points_csv(ss), pts);
}

TEST(Csv, LowerDistanceRoundTrip) {
  const auto d = torus_intrinsic_metric(sample_torus(12, 8));
  std::stringstream ss;
  write_lower_distance_csv(ss, d);
  const auto back = read_lower_distance_csv(ss);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(back(i, j), d(i, j));
}

TEST(Csv, Errors) {
  std::stringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_points_csv(ragged), parse_error);
  std::stringstream junk("1,x\n");
  EXPECT_THROW(read_points_csv(junk), parse_error);
  std::stringstream bad_lower("\n1\n2\n");
  EXPECT_THROW(read_lower_distance_csv(bad_lower), parse_error);
}
