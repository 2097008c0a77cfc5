#pragma once

// landmarks -> Rips filtration -> annotated barcode -> cup-length -> toroidal evidence.

#include <chrono>
#include <cmath>
#include <string>
#include <optional>

#include "cuplen/cohomology.hpp"
#include "cuplen/cuplength.hpp"
#include "cuplen/metrics.hpp"
#include "cuplen/rips.hpp"

namespace cuplen {

struct AnalysisOptions {
  std::size_t landmarks = 150;  // 0 keeps every point
  std::uint64_t seed = 0;
  int maxdim = 2;
  std::optional<double> threshold;  // unset: enclosing radius
  double min_persistence = 0.0;
  int k = 2;
  std::size_t max_simplices = kDefaultMaxSimplices;
};

struct Analysis {
  LandmarkSelection landmarks;
  std::optional<Filtration> filtration;
  AnnotatedBarcode barcode;
  CupLengthResult cuplength;
  ToroidalEvidence evidence;
  bool h1_gap = false;
  double seconds = 0.0;
};

inline void run_on_landmarks(Analysis& a, DistanceMatrix d, const AnalysisOptions& opt) {
  a.filtration.emplace(Filtration::rips(std::move(d), opt.maxdim, opt.threshold, opt.max_simplices));
  a.barcode = persistent_cohomology(*a.filtration);
  a.cuplength = persistent_cuplength(*a.filtration, a.barcode, CupLengthOptions{opt.k, opt.min_persistence, {}});
  a.evidence = detect_toroidal(a.cuplength);
  a.h1_gap = h1_gap_heuristic(a.barcode);
}

inline std::size_t landmark_count(std::size_t n, std::size_t requested) {
  if (n == 0) throw validation_error("landmarks: no points");
  if (requested > n)
    throw validation_error("landmarks: " + std::to_string(requested) + " requested but the data has " + std::to_string(n) + " points");
  return requested == 0 ? n : requested;
}

struct LandmarkMetric {
  LandmarkSelection selection;
  DistanceMatrix distances{0};
};

inline LandmarkMetric landmark_metric(const DistanceMatrix& d, std::size_t landmarks, std::uint64_t seed) {
  LandmarkMetric m;
  m.selection = maxmin_landmarks(d, landmark_count(d.size(), landmarks), seed);
  m.distances = d.restrict(m.selection.indices);
  return m;
}

inline double euclidean(const Point& p, const Point& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
  return std::sqrt(s);
}

// Euclidean point cloud; only landmark distances are stored.
inline LandmarkMetric landmark_metric(const PointCloud& pts, std::size_t landmarks, std::uint64_t seed) {
  for (const auto& p : pts)
    if (p.size() != pts.front().size()) throw validation_error("landmarks: points have mixed dimensions");
  LandmarkMetric m;
  m.selection = maxmin_landmarks(
      pts.size(), [&pts](std::size_t i, std::size_t j) { return euclidean(pts[i], pts[j]); },
      landmark_count(pts.size(), landmarks), seed);
  const auto& idx = m.selection.indices;
  m.distances = DistanceMatrix(idx.size());
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) m.distances.set(i, j, euclidean(pts[idx[i]], pts[idx[j]]));
  return m;
}

template <class Data>
Analysis analyze(const Data& data, const AnalysisOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  auto m = landmark_metric(data, opt.landmarks, opt.seed);
  Analysis a;
  a.landmarks = std::move(m.selection);
  run_on_landmarks(a, std::move(m.distances), opt);
  a.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return a;
}

}  // namespace cuplen
