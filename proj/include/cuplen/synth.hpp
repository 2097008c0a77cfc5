#pragma once

// Seeded generators for the synthetic datasets: tori (flat and embedded), wedge
// sums, cap removal, deformation, noise, and simulated grid-cell populations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cuplen/core.hpp"
#include "cuplen/metrics.hpp"
#include "cuplen/random.hpp"

namespace cuplen {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform angles on the flat torus.
inline std::vector<TorusAngle> sample_torus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TorusAngle> out(n);
  for (auto& a : out) {
    a.theta = kTwoPi * rng.uniform();
    a.phi = kTwoPi * rng.uniform();
  }
  return out;
}

// Angles distributed by surface area of the embedded torus with radii R > r.
inline std::vector<TorusAngle> sample_torus_area(std::size_t n, double R, double r, std::uint64_t seed) {
  if (!(R > r && r > 0.0)) throw std::invalid_argument("sample_torus_area: need R > r > 0");
  Rng rng(seed);
  std::vector<TorusAngle> out;
  out.reserve(n);
  while (out.size() < n) {
    const double theta = kTwoPi * rng.uniform();
    const double phi = kTwoPi * rng.uniform();
    if (rng.uniform() * (R + r) <= R + r * std::cos(phi)) out.push_back(TorusAngle{theta, phi});
  }
  return out;
}

inline Point embed_torus_point(const TorusAngle& a, double R, double r) {
  const double ring = R + r * std::cos(a.phi);
  return Point{ring * std::cos(a.theta), ring * std::sin(a.theta), r * std::sin(a.phi)};
}

inline PointCloud embed_torus(const std::vector<TorusAngle>& angles, double R, double r) {
  PointCloud out;
  out.reserve(angles.size());
  for (const auto& a : angles) out.push_back(embed_torus_point(a, R, r));
  return out;
}

inline PointCloud sample_torus_embedded(std::size_t n, double R, double r, std::uint64_t seed) {
  return embed_torus(sample_torus_area(n, R, r, seed), R, r);
}

// Half-open angular range [lo, hi); lo == hi is empty.
struct AngleRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double a) const { return lo <= a && a < hi; }
};

// Drops samples with theta in theta_range and phi in phi_range.
inline std::vector<TorusAngle> torus_remove_cap(const std::vector<TorusAngle>& angles, AngleRange theta_range,
                                                AngleRange phi_range) {
  for (const auto* r : {&theta_range, &phi_range})
    if (!(r->lo >= 0.0 && r->lo <= r->hi && r->hi <= kTwoPi))
      throw std::invalid_argument("torus_remove_cap: ranges must satisfy 0 <= lo <= hi <= 2pi");
  std::vector<TorusAngle> out;
  for (const auto& a : angles)
    if (!(theta_range.contains(a.theta) && phi_range.contains(a.phi))) out.push_back(a);
  return out;
}

// n flat-torus samples outside the excluded patch; draws in batches of n until enough remain.
inline std::vector<TorusAngle> sample_torus_cap_removed(std::size_t n, AngleRange theta_range, AngleRange phi_range,
                                                        std::uint64_t seed) {
  if ((theta_range.hi - theta_range.lo) * (phi_range.hi - phi_range.lo) >= kTwoPi * kTwoPi && n > 0)
    throw std::invalid_argument("sample_torus_cap_removed: the excluded patch covers the whole torus");
  std::vector<TorusAngle> out;
  for (std::uint64_t batch = 0; out.size() < n; ++batch) {
    const auto kept = torus_remove_cap(sample_torus(n, derive_seed(seed, batch)), theta_range, phi_range);
    out.insert(out.end(), kept.begin(), kept.end());
  }
  out.resize(n);
  return out;
}

struct Bump {
  double center = 0.0;     // theta of the peak
  double width = 1.0;      // half-width in radians
  double amplitude = 0.0;  // added to the minor radius at the peak
};

// Raised cosine on (-1, 1), zero outside.
inline double raised_cosine(double z) { return std::fabs(z) < 1.0 ? 0.5 * (1.0 + std::cos(std::numbers::pi * z)) : 0.0; }

inline double wrap_angle(double a) { return a - kTwoPi * std::floor((a + std::numbers::pi) / kTwoPi); }

// Embedded torus whose minor radius grows by a smooth bump around one theta.
inline PointCloud deform_torus(const std::vector<TorusAngle>& angles, const Bump& bump, double R, double r) {
  if (bump.amplitude < 0.0 || bump.width <= 0.0) throw std::invalid_argument("deform_torus: need amplitude >= 0 and width > 0");
  PointCloud out;
  out.reserve(angles.size());
  for (const auto& a : angles) {
    const double local = r + bump.amplitude * raised_cosine(wrap_angle(a.theta - bump.center) / bump.width);
    out.push_back(embed_torus_point(a, R, local));
  }
  return out;
}

inline PointCloud add_gaussian_noise(PointCloud points, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return points;
  Rng rng(seed);
  for (auto& p : points)
    for (auto& x : p) x += sigma * rng.normal();
  return points;
}

// ---------------------------------------------------------------------------
// Wedge sums

struct WedgePiece {
  enum class Kind { circle, sphere, torus };
  Kind kind = Kind::circle;
  std::size_t n = 0;
  double radius = 1.0;
};

// Intrinsic metric of one piece; sample 0 is the basepoint.
inline DistanceMatrix wedge_piece_metric(const WedgePiece& piece, Rng& rng) {
  if (piece.n == 0) throw std::invalid_argument("wedge_sum_dataset: every component needs at least its basepoint");
  const std::size_t n = piece.n;
  DistanceMatrix d(n);
  switch (piece.kind) {
    case WedgePiece::Kind::circle: {
      std::vector<double> t(n, 0.0);
      for (std::size_t i = 1; i < n; ++i) t[i] = kTwoPi * rng.uniform();
      for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) d.set(i, j, piece.radius * circle_arc(t[i], t[j]));
      break;
    }
    case WedgePiece::Kind::sphere: {
      std::vector<std::array<double, 3>> u(n, {0.0, 0.0, 1.0});
      for (std::size_t i = 1; i < n; ++i) {
        const double z = 2.0 * rng.uniform() - 1.0;
        const double lon = kTwoPi * rng.uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        u[i] = {s * std::cos(lon), s * std::sin(lon), z};
      }
      for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
          const double dot = u[i][0] * u[j][0] + u[i][1] * u[j][1] + u[i][2] * u[j][2];
          d.set(i, j, piece.radius * std::acos(std::clamp(dot, -1.0, 1.0)));
        }
      break;
    }
    case WedgePiece::Kind::torus: {
      std::vector<TorusAngle> a(n);
      for (std::size_t i = 1; i < n; ++i) a[i] = TorusAngle{kTwoPi * rng.uniform(), kTwoPi * rng.uniform()};
      for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) d.set(i, j, piece.radius * torus_distance(a[i], a[j]));
      break;
    }
  }
  return d;
}

inline DistanceMatrix wedge_sum_dataset(const std::vector<WedgePiece>& pieces, std::uint64_t seed) {
  if (pieces.size() < 2) throw std::invalid_argument("wedge_sum_dataset: need at least two components");
  Rng rng(seed);
  std::vector<WedgeComponent> comps;
  for (const auto& p : pieces) comps.push_back(WedgeComponent{wedge_piece_metric(p, rng), 0});
  return wedge_path_metric(comps);
}

// ---------------------------------------------------------------------------
// Grid cells

struct Trajectory {
  std::vector<std::array<double, 2>> positions;  // cm
  std::vector<double> speeds;                    // cm/s
  double dt = 0.2;
};

struct WalkParams {
  double arena = 150.0;       // square side, cm
  double tau = 2.0;           // velocity relaxation time, s
  double speed_scale = 8.8;   // stationary std of each velocity component, cm/s
  std::array<double, 2> initial_velocity{0.0, 0.0};
};

// Ornstein-Uhlenbeck velocity with reflecting walls, starting at the arena center.
inline Trajectory random_walk(double T, double dt, const WalkParams& p, std::uint64_t seed) {
  if (!(T > 0.0 && dt > 0.0)) throw std::invalid_argument("random_walk: T and dt must be positive");
  if (!(p.arena > 0.0 && p.tau > 0.0 && p.speed_scale >= 0.0)) throw std::invalid_argument("random_walk: bad parameters");
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  Rng rng(seed);
  Trajectory tr;
  tr.dt = dt;
  tr.positions.reserve(n);
  std::array<double, 2> x{p.arena / 2, p.arena / 2};
  std::array<double, 2> v = p.initial_velocity;
  const double kick = p.speed_scale * std::sqrt(2.0 * dt / p.tau);
  for (std::size_t i = 0; i < n; ++i) {
    tr.positions.push_back(x);
    for (int c = 0; c < 2; ++c) {
      v[c] += -v[c] / p.tau * dt + kick * rng.normal();
      x[c] += v[c] * dt;
      // reflect (repeat in case of very large steps)
      while (x[c] < 0.0 || x[c] > p.arena) {
        if (x[c] < 0.0) x[c] = -x[c];
        if (x[c] > p.arena) x[c] = 2 * p.arena - x[c];
        v[c] = -v[c];
      }
    }
  }
  tr.speeds.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = tr.positions[i + 1][0] - tr.positions[i][0];
    const double dy = tr.positions[i + 1][1] - tr.positions[i][1];
    tr.speeds[i] = std::hypot(dx, dy) / dt;
  }
  if (n >= 2) tr.speeds[n - 1] = tr.speeds[n - 2];
  return tr;
}

struct GridCellModule {
  double scale = 40.0;  // cm
  double orientation = 0.0;
  std::vector<std::array<double, 2>> offsets;

  // Columns (cos phi, sin phi) and (cos(phi + pi/3), sin(phi + pi/3)), scaled.
  std::array<double, 4> shear() const {
    const double a = orientation, b = orientation + std::numbers::pi / 3;
    return {scale * std::cos(a), scale * std::cos(b), scale * std::sin(a), scale * std::sin(b)};
  }
};

inline GridCellModule make_grid_module(std::size_t n_cells, double scale, double orientation, std::uint64_t seed) {
  if (!(scale > 0.0)) throw std::invalid_argument("make_grid_module: scale must be positive");
  Rng rng(seed);
  GridCellModule m{scale, orientation, {}};
  for (std::size_t i = 0; i < n_cells; ++i) m.offsets.push_back({rng.uniform() - 0.5, rng.uniform() - 0.5});
  return m;
}

// Centered wrap into [-1/2, 1/2).
inline double centered_wrap(double u) { return u - std::floor(u + 0.5); }

inline double grid_cell_rate(const GridCellModule& m, std::array<double, 2> x, std::array<double, 2> offset) {
  const auto A = m.shear();  // row-major [a00 a01; a10 a11]
  const double det = A[0] * A[3] - A[1] * A[2];
  if (det == 0.0) throw std::invalid_argument("grid_cell_rate: singular shear matrix");
  const double u0 = (A[3] * x[0] - A[1] * x[1]) / det - offset[0];
  const double u1 = (-A[2] * x[0] + A[0] * x[1]) / det - offset[1];
  const double w0 = centered_wrap(u0), w1 = centered_wrap(u1);
  const double y0 = A[0] * w0 + A[1] * w1, y1 = A[2] * w0 + A[3] * w1;
  return raised_cosine(std::hypot(y0, y1) / (0.45 * m.scale));
}

// Rows are timepoints, columns are cells.
inline std::vector<std::vector<double>> grid_cell_rates(const Trajectory& tr, const GridCellModule& m) {
  std::vector<std::vector<double>> out(tr.positions.size(), std::vector<double>(m.offsets.size()));
  for (std::size_t t = 0; t < tr.positions.size(); ++t)
    for (std::size_t c = 0; c < m.offsets.size(); ++c) out[t][c] = grid_cell_rate(m, tr.positions[t], m.offsets[c]);
  return out;
}

inline constexpr double kNearZeroActivity = 1e-6;

// Speed filter, per-cell mean normalization, removal of silent rows, then maxmin
// subsampling of the remaining rows (kept in time order).
inline PointCloud preprocess_rates(std::vector<std::vector<double>> rates, const std::vector<double>& speeds,
                                   double speed_cut, std::size_t target_n, std::uint64_t seed) {
  if (rates.size() != speeds.size()) throw std::invalid_argument("preprocess_rates: one speed per timepoint required");
  if (target_n == 0) throw std::invalid_argument("preprocess_rates: target_n must be positive");
  if (target_n > rates.size()) throw std::invalid_argument("preprocess_rates: target_n exceeds the number of timepoints");
  for (std::size_t t = 0; t < rates.size(); ++t)
    if (speeds[t] < speed_cut) std::fill(rates[t].begin(), rates[t].end(), 0.0);
  const std::size_t cells = rates.empty() ? 0 : rates.front().size();
  for (std::size_t c = 0; c < cells; ++c) {
    double mean = 0.0;
    for (const auto& row : rates) mean += row[c];
    mean /= static_cast<double>(rates.size());
    if (mean > 0.0)
      for (auto& row : rates) row[c] /= mean;
  }
  PointCloud kept;
  for (auto& row : rates) {
    double total = 0.0;
    for (double v : row) total += v;
    if (total >= kNearZeroActivity) kept.push_back(std::move(row));
  }
  if (kept.empty()) throw validation_error("preprocess_rates: every timepoint is silent after filtering");
  const std::size_t n_out = std::min(target_n, kept.size());
  auto dist = [&kept](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < kept[i].size(); ++c) {
      const double diff = kept[i][c] - kept[j][c];
      s += diff * diff;
    }
    return std::sqrt(s);
  };
  auto sel = maxmin_landmarks(kept.size(), dist, n_out, seed);
  std::sort(sel.indices.begin(), sel.indices.end());
  PointCloud out;
  out.reserve(n_out);
  for (std::size_t i : sel.indices) out.push_back(kept[i]);
  return out;
}

}  // namespace cuplen
