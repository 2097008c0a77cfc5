#pragma once

// Distance matrices, intrinsic metrics for the synthetic spaces, maxmin landmarks
// and the CSV formats for point clouds and lower-triangular distance matrices.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cuplen/core.hpp"
#include "cuplen/random.hpp"

namespace cuplen {

using Point = std::vector<double>;
using PointCloud = std::vector<Point>;

// Symmetric dissimilarity matrix with zero diagonal, stored as the strict lower triangle.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  explicit DistanceMatrix(std::size_t n) : n_(n), lower_(n * (n - (n > 0 ? 1 : 0)) / 2, 0.0) {}

  DistanceMatrix(std::size_t n, std::vector<double> lower) : n_(n), lower_(std::move(lower)) {
    if (lower_.size() != n * (n - (n > 0 ? 1 : 0)) / 2)
      throw std::invalid_argument("DistanceMatrix: lower triangle has wrong length");
    for (double v : lower_)
      if (!(v >= 0.0) || std::isinf(v)) throw std::invalid_argument("DistanceMatrix: entries must be finite and nonnegative");
  }

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i < j) std::swap(i, j);
    return lower_[i * (i - 1) / 2 + j];
  }

  void set(std::size_t i, std::size_t j, double v) {
    if (i == j) return;
    if (i < j) std::swap(i, j);
    lower_[i * (i - 1) / 2 + j] = v + 0.0;  // folds -0.0 into +0.0
  }

  std::span<const double> lower() const { return lower_; }

  DistanceMatrix restrict(std::span<const std::size_t> indices) const {
    DistanceMatrix out(indices.size());
    for (std::size_t a = 1; a < indices.size(); ++a)
      for (std::size_t b = 0; b < a; ++b) out.set(a, b, (*this)(indices[a], indices[b]));
    return out;
  }

  // min over i of max over j of d(i, j): beyond this scale the Rips complex is a cone.
  double enclosing_radius() const {
    if (n_ == 0) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      double row_max = 0.0;
      for (std::size_t j = 0; j < n_; ++j) row_max = std::max(row_max, (*this)(i, j));
      best = std::min(best, row_max);
    }
    return best;
  }

  double max_distance() const {
    double m = 0.0;
    for (double v : lower_) m = std::max(m, v);
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> lower_;
};

inline DistanceMatrix euclidean_distance_matrix(const PointCloud& points) {
  const std::size_t n = points.size();
  if (n > 0) {
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
      if (p.size() != dim) throw std::invalid_argument("euclidean_distance_matrix: ragged point cloud");
  }
  DistanceMatrix d(n);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < points[i].size(); ++c) {
        const double diff = points[i][c] - points[j][c];
        s += diff * diff;
      }
      d.set(i, j, std::sqrt(s));
    }
  return d;
}

// Shortest arc on the unit circle between two angles.
inline double circle_arc(double a, double b) {
  const double diff = std::fabs(a - b);
  return std::min(diff, 2.0 * std::numbers::pi - diff);
}

struct TorusAngle {
  double theta = 0.0;
  double phi = 0.0;
};

inline double torus_distance(const TorusAngle& a, const TorusAngle& b) {
  const double dt = circle_arc(a.theta, b.theta);
  const double dp = circle_arc(a.phi, b.phi);
  return std::sqrt(dt * dt + dp * dp);
}

// Product of circular geodesic distances on the flat torus.
inline DistanceMatrix torus_intrinsic_metric(const std::vector<TorusAngle>& angles) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (const auto& a : angles)
    if (!(a.theta >= 0.0 && a.theta < two_pi && a.phi >= 0.0 && a.phi < two_pi))
      throw std::invalid_argument("torus_intrinsic_metric: angles must lie in [0, 2pi)");
  DistanceMatrix d(angles.size());
  for (std::size_t i = 1; i < angles.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) d.set(i, j, torus_distance(angles[i], angles[j]));
  return d;
}

// One piece of a wedge sum: its intrinsic metric and the index of its basepoint sample.
struct WedgeComponent {
  DistanceMatrix metric;
  std::size_t basepoint = 0;
};

// Concatenates the components; cross-component distances route through the shared basepoint.
inline DistanceMatrix wedge_path_metric(const std::vector<WedgeComponent>& components) {
  std::size_t total = 0;
  std::vector<std::size_t> offset;
  for (const auto& c : components) {
    if (c.metric.size() == 0 || c.basepoint >= c.metric.size())
      throw std::invalid_argument("wedge_path_metric: every component needs a basepoint sample");
    offset.push_back(total);
    total += c.metric.size();
  }
  DistanceMatrix d(total);
  for (std::size_t a = 0; a < components.size(); ++a) {
    const auto& ca = components[a];
    for (std::size_t i = 0; i < ca.metric.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) d.set(offset[a] + i, offset[a] + j, ca.metric(i, j));
      const double to_base_a = ca.metric(i, ca.basepoint);
      for (std::size_t b = 0; b < a; ++b) {
        const auto& cb = components[b];
        for (std::size_t j = 0; j < cb.metric.size(); ++j)
          d.set(offset[a] + i, offset[b] + j, to_base_a + cb.metric(j, cb.basepoint));
      }
    }
  }
  return d;
}

struct LandmarkSelection {
  std::vector<std::size_t> indices;
  double cover_radius = 0.0;
};

// Farthest-point sampling over n points with an arbitrary distance callback.
// The first landmark is a seeded uniform draw; ties in the argmax go to the lowest index.
template <class DistanceFn>
LandmarkSelection maxmin_landmarks(std::size_t n, DistanceFn&& dist, std::size_t n_land, std::uint64_t seed) {
  if (n_land == 0) throw std::invalid_argument("maxmin_landmarks: need at least one landmark");
  if (n_land > n) throw std::invalid_argument("maxmin_landmarks: more landmarks than points");
  LandmarkSelection sel;
  Rng rng(seed);
  std::size_t current = static_cast<std::size_t>(rng.below(n));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t step = 0; step < n_land; ++step) {
    sel.indices.push_back(current);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], static_cast<double>(dist(current, i)));
    nearest[current] = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (nearest[i] > nearest[best]) best = i;
    sel.cover_radius = nearest[best];
    current = best;
  }
  return sel;
}

inline LandmarkSelection maxmin_landmarks(const DistanceMatrix& d, std::size_t n_land, std::uint64_t seed) {
  return maxmin_landmarks(d.size(), [&d](std::size_t i, std::size_t j) { return d(i, j); }, n_land, seed);
}

// ---------------------------------------------------------------------------
// CSV formats

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& raw, std::size_t line_no) {
  std::size_t first = raw.find_first_not_of(" \t\r");
  std::size_t last = raw.find_last_not_of(" \t\r");
  if (first == std::string::npos) throw parse_error("line " + std::to_string(line_no) + ": empty field");
  const std::string s = raw.substr(first, last - first + 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw parse_error("");
    return v;
  } catch (const std::exception&) {
    throw parse_error("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}

inline bool is_blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace detail

// One point per row, comma-separated real coordinates. Blank lines are skipped.
inline PointCloud read_points_csv(std::istream& in) {
  PointCloud pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    Point p;
    for (const auto& f : detail::split_csv_line(line)) p.push_back(detail::parse_number(f, line_no));
    if (!pts.empty() && p.size() != pts.front().size())
      throw parse_error("line " + std::to_string(line_no) + ": ragged row");
    pts.push_back(std::move(p));
  }
  return pts;
}

inline void write_points_csv(std::ostream& out, const PointCloud& pts) {
  for (const auto& p : pts) {
    for (std::size_t c = 0; c < p.size(); ++c) out << (c ? "," : "") << format_double(p[c]);
    out << '\n';
  }
}

// Row i holds d(i, 0..i-1). Row 0 is either an empty first line or absent.
inline DistanceMatrix read_lower_distance_csv(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  while (!lines.empty() && detail::is_blank(lines.back())) lines.pop_back();
  if (lines.empty()) throw parse_error("lower-distance CSV: no rows");
  const bool has_row0 = detail::is_blank(lines.front());
  const std::size_t n = has_row0 ? lines.size() : lines.size() + 1;
  std::vector<double> lower;
  lower.reserve(n * (n - 1) / 2);
  for (std::size_t r = has_row0 ? 1 : 0; r < lines.size(); ++r) {
    const std::size_t row = has_row0 ? r : r + 1;
    const auto fields = detail::split_csv_line(lines[r]);
    if (fields.size() != row)
      throw parse_error("lower-distance CSV: row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                        " entries, expected " + std::to_string(row));
    for (const auto& f : fields) {
      const double v = detail::parse_number(f, r + 1);
      if (!(v >= 0.0) || std::isinf(v)) throw parse_error("lower-distance CSV: negative or non-finite distance on row " + std::to_string(row));
      lower.push_back(v + 0.0);
    }
  }
  return DistanceMatrix(n, std::move(lower));
}

inline void write_lower_distance_csv(std::ostream& out, const DistanceMatrix& d) {
  out << '\n';  // row 0
  for (std::size_t i = 1; i < d.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) out << (j ? "," : "") << format_double(d(i, j));
    out << '\n';
  }
}

}  // namespace cuplen
