#include <gtest/gtest.h>

#include <numbers>

#include "cuplen/synth.hpp"

using namespace cuplen;

namespace {

constexpr double pi = std::numbers::pi;

double surface_residual(const Point& p, double R, double r) {
  const double ring = std::hypot(p[0], p[1]) - R;
  return ring * ring + p[2] * p[2] - r * r;
}

// Trapezoid rule on a periodic integrand.
template <class Fn>
double periodic_integral(Fn f, int steps = 20000) {
  double s = 0.0;
  for (int i = 0; i < steps; ++i) s += f(2 * pi * i / steps);
  return s * 2 * pi / steps;
}

}  // namespace

TEST(SampleTorus, IntrinsicAnglesInRange) {
  const auto a = sample_torus(1000, 4);
  ASSERT_EQ(a.size(), 1000u);
  for (const auto& x : a) {
    EXPECT_GE(x.theta, 0.0);
    EXPECT_LT(x.theta, 2 * pi);
    EXPECT_GE(x.phi, 0.0);
    EXPECT_LT(x.phi, 2 * pi);
  }
}

TEST(SampleTorus, EmbeddedPointsOnSurface) {
  const auto one = sample_torus_embedded(1, 5, 2, 1);
  ASSERT_EQ(one.size(), 1u);
  const double rho = std::hypot(one[0][0], one[0][1]);
  EXPECT_GE(rho, 3.0 - 1e-12);
  EXPECT_LE(rho, 7.0 + 1e-12);
  for (const auto& p : sample_torus_embedded(5000, 5, 2, 2)) EXPECT_NEAR(surface_residual(p, 5, 2), 0.0, 1e-12);
  EXPECT_THROW(sample_torus_embedded(10, 2, 2, 0), std::invalid_argument);
}

TEST(SampleTorus, AreaWeightedMomentMatchesQuadrature) {
  const double R = 5, r = 2;
  const double want = periodic_integral([&](double p) { return std::cos(p) * (R + r * std::cos(p)); }) /
                      periodic_integral([&](double p) { return R + r * std::cos(p); });
  double mean = 0.0;
  const auto pts = sample_torus_embedded(100000, R, r, 17);
  for (const auto& p : pts) mean += (std::hypot(p[0], p[1]) - R) / r;  // cos(phi)
  mean /= static_cast<double>(pts.size());
  EXPECT_NEAR(want, r / (2 * R), 1e-9);
  EXPECT_NEAR(mean, want, 0.01);
}

TEST(SampleTorus, Deterministic) {
  EXPECT_EQ(sample_torus_embedded(100, 5, 2, 9), sample_torus_embedded(100, 5, 2, 9));
  EXPECT_NE(sample_torus_embedded(100, 5, 2, 9), sample_torus_embedded(100, 5, 2, 10));
}

TEST(WedgeSum, Sizes) {
  const auto d = wedge_sum_dataset({{WedgePiece::Kind::circle, 400, 1}, {WedgePiece::Kind::sphere, 1200, 1},
                                    {WedgePiece::Kind::circle, 400, 1}},
                                   1);
  EXPECT_EQ(d.size(), 2000u);
  EXPECT_THROW(wedge_sum_dataset({{WedgePiece::Kind::circle, 10, 1}}, 1), std::invalid_argument);
}

TEST(WedgeSum, RoutingBound) {
  const auto d = wedge_sum_dataset({{WedgePiece::Kind::circle, 200, 1.0}, {WedgePiece::Kind::circle, 200, 2.0}}, 3);
  EXPECT_LE(d.max_distance(), pi * 1.0 + pi * 2.0 + 1e-12);
  EXPECT_GT(d.max_distance(), 0.9 * 3 * pi);
}

TEST(WedgeSum, SinglePointComponents) {
  const auto d = wedge_sum_dataset({{WedgePiece::Kind::circle, 1, 1}, {WedgePiece::Kind::sphere, 1, 1},
                                    {WedgePiece::Kind::torus, 1, 1}},
                                   5);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.max_distance(), 0.0);
}

TEST(WedgeSum, SphereDistancesAreGeodesic) {
  const auto d = wedge_sum_dataset({{WedgePiece::Kind::sphere, 300, 1.5}, {WedgePiece::Kind::circle, 2, 1}}, 8);
  for (std::size_t i = 0; i < 300; ++i)
    for (std::size_t j = 0; j < i; ++j) EXPECT_LE(d(i, j), 1.5 * pi + 1e-12);
}

TEST(RemoveCap, Examples) {
  const auto a = sample_torus(10000, 6);
  EXPECT_EQ(torus_remove_cap(a, {1, 1}, {0, 2 * pi}).size(), a.size());
  EXPECT_TRUE(torus_remove_cap(a, {0, 2 * pi}, {0, 2 * pi}).empty());
  const auto half = torus_remove_cap(a, {0, pi}, {0, 2 * pi}).size();
  EXPECT_NEAR(static_cast<double>(half), 5000.0, 250.0);
  EXPECT_THROW(torus_remove_cap(a, {2, 1}, {0, 1}), std::invalid_argument);
}

TEST(RemoveCap, SamplerFillsToCount) {
  const auto a = sample_torus_cap_removed(2000, {0, 1.5}, {0, 1.5}, 2);
  ASSERT_EQ(a.size(), 2000u);
  for (const auto& x : a) EXPECT_FALSE(x.theta < 1.5 && x.phi < 1.5);
  EXPECT_THROW(sample_torus_cap_removed(5, {0, 2 * pi}, {0, 2 * pi}, 0), std::invalid_argument);
}

TEST(DeformTorus, Examples) {
  const auto a = sample_torus_area(500, 5, 2, 3);
  EXPECT_EQ(deform_torus(a, {1.0, 0.5, 0.0}, 5, 2), embed_torus(a, 5, 2));
  // at the bump center the tube radius is r + a
  const auto peak = deform_torus({{1.0, 0.3}}, {1.0, 0.5, 1.5}, 5, 2);
  EXPECT_NEAR(surface_residual(peak[0], 5, 3.5), 0.0, 1e-12);
  // outside the bump support the standard surface equation holds
  for (const auto& x : a) {
    if (std::fabs(wrap_angle(x.theta - 1.0)) < 0.5) continue;
    EXPECT_NEAR(surface_residual(deform_torus({x}, {1.0, 0.5, 1.5}, 5, 2)[0], 5, 2), 0.0, 1e-12);
  }
  EXPECT_THROW(deform_torus(a, {0, 1, -1}, 5, 2), std::invalid_argument);
}

TEST(GaussianNoise, Examples) {
  const auto pts = sample_torus_embedded(100000, 5, 2, 1);
  EXPECT_EQ(add_gaussian_noise(pts, 0.0, 3), pts);
  const double sigma = 0.3;
  const auto noisy = add_gaussian_noise(pts, sigma, 3);
  for (int c = 0; c < 3; ++c) {
    double m = 0, m2 = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double e = noisy[i][c] - pts[i][c];
      m += e;
      m2 += e * e;
    }
    m /= pts.size();
    const double var = m2 / pts.size() - m * m;
    EXPECT_NEAR(var / (sigma * sigma), 1.0, 0.05) << "coordinate " << c;
  }
  EXPECT_NE(add_gaussian_noise(pts, sigma, 3), add_gaussian_noise(pts, sigma, 4));
  EXPECT_THROW(add_gaussian_noise(pts, -1.0, 0), std::invalid_argument);
}

TEST(RandomWalk, SampleCountAndBounds) {
  const auto tr = random_walk(1000, 0.2, WalkParams{}, 5);
  ASSERT_EQ(tr.positions.size(), 5000u);
  ASSERT_EQ(tr.speeds.size(), 5000u);
  for (const auto& p : tr.positions) {
    EXPECT_GE(p[0], 0.0);
    EXPECT_LE(p[0], 150.0);
    EXPECT_GE(p[1], 0.0);
    EXPECT_LE(p[1], 150.0);
  }
  EXPECT_EQ(random_walk(1, 0.3, WalkParams{}, 0).positions.size(), 4u);
}

TEST(RandomWalk, StationaryWithoutNoise) {
  WalkParams p;
  p.speed_scale = 0.0;
  const auto tr = random_walk(10, 0.2, p, 1);
  for (const auto& x : tr.positions) EXPECT_EQ(x, tr.positions.front());
  for (double s : tr.speeds) EXPECT_EQ(s, 0.0);
}

TEST(RandomWalk, SlowBinFraction) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto tr = random_walk(1000, 0.2, WalkParams{}, seed);
    double slow = 0;
    for (double s : tr.speeds) slow += s < 5.0;
    slow /= static_cast<double>(tr.speeds.size());
    EXPECT_GE(slow, 0.10);
    EXPECT_LE(slow, 0.20);
  }
}

TEST(GridCells, TuningCurveExamples) {
  const auto m = make_grid_module(5, 40.0, 0.3, 2);
  const auto A = m.shear();
  for (const auto& b : m.offsets) {
    EXPECT_GE(b[0], -0.5);
    EXPECT_LT(b[0], 0.5);
    const std::array<double, 2> at{A[0] * b[0] + A[1] * b[1], A[2] * b[0] + A[3] * b[1]};
    EXPECT_NEAR(grid_cell_rate(m, at, b), 1.0, 1e-12);
    // residual (0.45 l) along the first lattice direction: A e1 has norm l
    const std::array<double, 2> edge{at[0] + 0.45 * A[0], at[1] + 0.45 * A[2]};
    EXPECT_NEAR(grid_cell_rate(m, edge, b), 0.0, 1e-12);
  }
}

TEST(GridCells, LatticePeriodicAndBounded) {
  const auto m = make_grid_module(8, 40.0, 0.0, 4);
  const auto A = m.shear();
  const auto tr = random_walk(50, 0.2, WalkParams{}, 6);
  const auto rates = grid_cell_rates(tr, m);
  ASSERT_EQ(rates.size(), tr.positions.size());
  for (std::size_t t = 0; t < rates.size(); ++t)
    for (std::size_t c = 0; c < m.offsets.size(); ++c) {
      EXPECT_GE(rates[t][c], 0.0);
      EXPECT_LE(rates[t][c], 1.0);
      const auto x = tr.positions[t];
      const std::array<double, 2> shifted{x[0] + 2 * A[0] - A[1], x[1] + 2 * A[2] - A[3]};
      EXPECT_NEAR(grid_cell_rate(m, shifted, m.offsets[c]), rates[t][c], 1e-9);
    }
}

TEST(Preprocess, SpeedCutZeroKeepsRows) {
  const std::vector<std::vector<double>> rates{{1, 2}, {3, 4}, {5, 6}};
  const auto out = preprocess_rates(rates, {0, 0, 0}, 0.0, 3, 1);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_DOUBLE_EQ(out[0][0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(out[2][1], 6.0 / 4.0);
}

TEST(Preprocess, ConstantNeuronBecomesOnes) {
  const auto out = preprocess_rates({{2, 0.5}, {2, 1.0}, {2, 0.0}}, {9, 9, 9}, 5.0, 3, 1);
  for (const auto& row : out) EXPECT_DOUBLE_EQ(row[0], 1.0);
}

TEST(Preprocess, FullTargetIsIdentityInTimeOrder) {
  const std::vector<std::vector<double>> rates{{1, 0}, {0, 1}, {1, 1}, {2, 1}};
  const auto out = preprocess_rates(rates, {9, 9, 9, 9}, 5.0, 4, 3);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_DOUBLE_EQ(out[0][0], 1.0);
  EXPECT_DOUBLE_EQ(out[3][0], 2.0 / 1.0);
  EXPECT_DOUBLE_EQ(out[1][1], 1.0 / 0.75);
}

TEST(Preprocess, StepOrder) {
  // speed filter before normalization: the mean is taken after zeroing row 0
  const auto out = preprocess_rates({{2.0}, {1.0}}, {1.0, 9.0}, 5.0, 1, 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0][0], 2.0);
}

TEST(Preprocess, Errors) {
  EXPECT_THROW(preprocess_rates({{1.0}, {2.0}}, {0.0, 0.0}, 5.0, 1, 0), validation_error);
  EXPECT_THROW(preprocess_rates({{1.0}}, {9.0}, 5.0, 2, 0), std::invalid_argument);
  EXPECT_THROW(preprocess_rates({{1.0}}, {9.0, 9.0}, 5.0, 1, 0), std::invalid_argument);
}
