#pragma once

// Simplex-wise filtrations: Vietoris-Rips over a distance matrix, or an explicit
// ordered list of simplices. Simplices of dimension 0..maxdim are materialized
// in filtration order; for Rips filtrations the (maxdim+1)-simplices stay
// implicit and are only produced as cofacets.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "cuplen/core.hpp"
#include "cuplen/metrics.hpp"

namespace cuplen {

inline constexpr std::size_t kDefaultMaxSimplices = 60'000'000;
inline constexpr int kMaxSupportedDim = 5;

struct FiltrationSimplex {
  double value = 0.0;
  index_t index = 0;
  int dim = 0;
};

// Position in the total order. Rips: (value asc, dim asc, index desc).
// Explicit filtrations store the ordinal in `value` and leave the rest zero.
struct OrderKey {
  double value = 0.0;
  int dim = 0;
  index_t index = 0;

  friend bool operator<(const OrderKey& a, const OrderKey& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.index > b.index;
  }
  friend bool operator==(const OrderKey&, const OrderKey&) = default;
};

inline OrderKey infinite_order_key() { return OrderKey{std::numeric_limits<double>::infinity(), 0, 0}; }

// A cofacet as produced by enumeration. `key` orders simplices of one dimension:
// bit pattern of the (nonnegative) diameter for Rips, the ordinal otherwise.
struct Cofacet {
  index_t index = 0;
  double value = 0.0;
  std::uint64_t key = 0;
};

inline std::uint64_t value_key(double v) { return std::bit_cast<std::uint64_t>(v + 0.0); }

inline double simplex_diameter(const DistanceMatrix& d, std::span<const vertex_t> vertices) {
  double diam = 0.0;
  for (std::size_t a = 1; a < vertices.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      diam = std::max(diam, d(static_cast<std::size_t>(vertices[a]), static_cast<std::size_t>(vertices[b])));
  return diam;
}

class Filtration {
 public:
  enum class Kind { rips, explicit_order };

  // Vietoris-Rips filtration up to `maxdim`; threshold defaults to the enclosing radius.
  static Filtration rips(DistanceMatrix d, int maxdim, std::optional<double> threshold = std::nullopt,
                         std::size_t max_simplices = kDefaultMaxSimplices) {
    if (maxdim < 1 || maxdim + 1 > kMaxSupportedDim) throw std::invalid_argument("build_filtration: maxdim must be in [1, 4]");
    if (d.size() == 0) throw std::invalid_argument("build_filtration: empty distance matrix");
    if (threshold && !(*threshold > 0.0)) throw std::invalid_argument("build_filtration: threshold must be positive");
    Filtration f;
    f.kind_ = Kind::rips;
    f.n_ = static_cast<int>(d.size());
    f.maxdim_ = maxdim;
    f.threshold_ = threshold ? *threshold : d.enclosing_radius();
    f.binom_ = BinomialTable(static_cast<index_t>(f.n_), maxdim + 2);
    f.dist_ = std::move(d);
    f.enumerate_rips(max_simplices);
    return f;
  }

  // Explicit simplex-wise filtration. Every face must appear before its cofaces.
  // Values default to the ordinals and must be nondecreasing along the order.
  static Filtration from_simplices(int n_vertices, const std::vector<std::vector<vertex_t>>& ordered,
                                   std::vector<double> values = {}) {
    if (n_vertices <= 0) throw std::invalid_argument("from_simplices: need at least one vertex");
    if (!values.empty() && values.size() != ordered.size())
      throw std::invalid_argument("from_simplices: one value per simplex required");
    Filtration f;
    f.kind_ = Kind::explicit_order;
    f.n_ = n_vertices;
    int maxdim = 0;
    for (const auto& s : ordered) maxdim = std::max(maxdim, static_cast<int>(s.size()) - 1);
    if (maxdim + 1 > kMaxSupportedDim) throw std::invalid_argument("from_simplices: dimension too large");
    f.maxdim_ = maxdim;
    f.binom_ = BinomialTable(static_cast<index_t>(n_vertices), maxdim + 2);
    f.lookup_.resize(static_cast<std::size_t>(maxdim + 1));
    f.simplices_.reserve(ordered.size());
    for (std::size_t ord = 0; ord < ordered.size(); ++ord) {
      const auto& vs = ordered[ord];
      if (vs.empty()) throw std::invalid_argument("from_simplices: empty simplex");
      for (std::size_t j = 0; j < vs.size(); ++j) {
        if (vs[j] < 0 || vs[j] >= n_vertices) throw std::invalid_argument("from_simplices: vertex out of range");
        if (j > 0 && vs[j] <= vs[j - 1]) throw std::invalid_argument("from_simplices: vertices must be strictly increasing");
      }
      const int dim = static_cast<int>(vs.size()) - 1;
      const index_t idx = f.index_of(vs);
      if (!f.lookup_[static_cast<std::size_t>(dim)].emplace(idx, ord).second)
        throw std::invalid_argument("from_simplices: duplicate simplex");
      if (dim > 0) {
        std::vector<vertex_t> face(vs.size() - 1);
        for (std::size_t drop = 0; drop < vs.size(); ++drop) {
          std::size_t w = 0;
          for (std::size_t j = 0; j < vs.size(); ++j)
            if (j != drop) face[w++] = vs[j];
          if (!f.lookup_[static_cast<std::size_t>(dim - 1)].contains(f.index_of(face)))
            throw std::invalid_argument("from_simplices: simplex " + std::to_string(ord) + " appears before one of its faces");
        }
      }
      const double v = values.empty() ? static_cast<double>(ord) : values[ord];
      if (!f.simplices_.empty() && v < f.simplices_.back().value)
        throw std::invalid_argument("from_simplices: values must be nondecreasing along the order");
      f.simplices_.push_back(FiltrationSimplex{v, idx, dim});
    }
    f.threshold_ = f.simplices_.empty() ? 0.0 : f.simplices_.back().value;
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_rips() const { return kind_ == Kind::rips; }
  int n_vertices() const { return n_; }
  int maxdim() const { return maxdim_; }
  double threshold() const { return threshold_; }
  std::size_t size() const { return simplices_.size(); }
  const FiltrationSimplex& operator[](std::size_t ordinal) const { return simplices_[ordinal]; }
  Simplex simplex(std::size_t ordinal) const { return Simplex{simplices_[ordinal].dim, simplices_[ordinal].index}; }
  const std::vector<FiltrationSimplex>& simplices() const { return simplices_; }
  const DistanceMatrix& distances() const { return dist_; }
  const BinomialTable& binomials() const { return binom_; }

  index_t index_of(std::span<const vertex_t> vs) const {
    index_t idx = 0;
    for (std::size_t j = 0; j < vs.size(); ++j) idx += binom_(static_cast<index_t>(vs[j]), static_cast<int>(j + 1));
    return idx;
  }

  // Vertices in increasing order. Valid for any simplex with dim <= maxdim + 1.
  std::vector<vertex_t> vertices(const Simplex& s) const {
    std::vector<vertex_t> out(static_cast<std::size_t>(s.dim + 1));
    decode_descending(s, out.data());
    std::reverse(out.begin(), out.end());
    return out;
  }

  bool vertices_in_range(std::span<const vertex_t> vs) const {
    return std::all_of(vs.begin(), vs.end(), [this](vertex_t v) { return v >= 0 && v < n_; });
  }

  // Filtration value; for Rips this is the diameter and is defined for every simplex.
  double value(const Simplex& s) const {
    if (kind_ == Kind::rips) {
      std::array<vertex_t, kMaxSupportedDim + 1> ws{};
      decode_descending(s, ws.data());
      return diameter_of(std::span<const vertex_t>(ws.data(), static_cast<std::size_t>(s.dim + 1)));
    }
    const auto ord = ordinal(s);
    if (!ord) throw std::invalid_argument("Filtration::value: simplex not in filtration");
    return simplices_[*ord].value;
  }

  std::optional<std::size_t> ordinal(const Simplex& s) const {
    if (s.dim < 0 || s.dim > maxdim_) return std::nullopt;
    if (kind_ == Kind::explicit_order) {
      const auto& m = lookup_[static_cast<std::size_t>(s.dim)];
      auto it = m.find(s.index);
      if (it == m.end()) return std::nullopt;
      return it->second;
    }
    if (!index_in_range(s)) return std::nullopt;
    const double v = value(s);
    if (v > threshold_) return std::nullopt;
    const OrderKey key{v, s.dim, s.index};
    const std::size_t pos = prefix_size(key);
    if (pos < simplices_.size() && simplices_[pos].dim == s.dim && simplices_[pos].index == s.index) return pos;
    return std::nullopt;
  }

  bool contains(const Simplex& s) const { return ordinal(s).has_value(); }

  OrderKey order_key_at(std::size_t ordinal) const {
    if (kind_ == Kind::explicit_order) return OrderKey{static_cast<double>(ordinal), 0, 0};
    const auto& e = simplices_[ordinal];
    return OrderKey{e.value, e.dim, e.index};
  }

  // Order key of any simplex; for Rips this includes the implicit top dimension.
  OrderKey order_key(const Simplex& s) const {
    if (kind_ == Kind::rips) return OrderKey{value(s), s.dim, s.index};
    const auto ord = ordinal(s);
    if (!ord) throw std::invalid_argument("Filtration::order_key: simplex not in filtration");
    return order_key_at(*ord);
  }

  // Number of materialized simplices strictly before `cut`.
  std::size_t prefix_size(const OrderKey& cut) const {
    if (kind_ == Kind::explicit_order) {
      if (cut.value <= 0.0) return 0;
      return std::min(simplices_.size(), static_cast<std::size_t>(std::ceil(cut.value)));
    }
    auto it = std::partition_point(simplices_.begin(), simplices_.end(), [&cut](const FiltrationSimplex& e) {
      return OrderKey{e.value, e.dim, e.index} < cut;
    });
    return static_cast<std::size_t>(it - simplices_.begin());
  }

  // Heap key of a simplex among simplices of its own dimension.
  std::optional<Cofacet> entry(const Simplex& s) const {
    if (kind_ == Kind::rips) {
      if (s.dim > maxdim_ + 1 || !index_in_range(s)) return std::nullopt;
      const double v = value(s);
      if (v > threshold_) return std::nullopt;
      return Cofacet{s.index, v, value_key(v)};
    }
    const auto ord = ordinal(s);
    if (!ord) return std::nullopt;
    return Cofacet{s.index, simplices_[*ord].value, static_cast<std::uint64_t>(*ord)};
  }

  // Calls fn(Cofacet) for each cofacet of s present in the filtration, in
  // decreasing index order. Rips filtrations also yield (maxdim+1)-cofacets.
  // A callback returning bool stops the enumeration by returning false.
  template <class Fn>
  void for_each_cofacet(const Simplex& s, double s_value, Fn&& fn) const {
    const int co_dim = s.dim + 1;
    if (co_dim > maxdim_ + (kind_ == Kind::rips ? 1 : 0)) return;
    const int k = s.dim + 1;
    std::array<vertex_t, kMaxSupportedDim + 1> ws{};
    decode_descending(s, ws.data());
    std::array<index_t, kMaxSupportedDim + 2> above{}, below{};
    for (int p = 0; p < k; ++p) above[p + 1] = above[p] + binom_(static_cast<index_t>(ws[p]), k - p + 1);
    below[k] = 0;
    for (int p = k - 1; p >= 0; --p) below[p] = below[p + 1] + binom_(static_cast<index_t>(ws[p]), k - p);
    int p = 0;
    if (kind_ == Kind::rips) {
      for (vertex_t v = n_ - 1; v >= 0; --v) {
        if (p < k && ws[p] == v) {
          ++p;
          continue;
        }
        double diam = s_value;
        for (int q = 0; q < k; ++q) diam = std::max(diam, dist_(static_cast<std::size_t>(v), static_cast<std::size_t>(ws[q])));
        if (diam > threshold_) continue;
        const index_t idx = above[p] + binom_(static_cast<index_t>(v), k - p + 1) + below[p];
        if (!emit(fn, Cofacet{idx, diam, value_key(diam)})) return;
      }
    } else {
      const auto& m = lookup_[static_cast<std::size_t>(co_dim)];
      for (vertex_t v = n_ - 1; v >= 0; --v) {
        if (p < k && ws[p] == v) {
          ++p;
          continue;
        }
        const index_t idx = above[p] + binom_(static_cast<index_t>(v), k - p + 1) + below[p];
        auto it = m.find(idx);
        if (it == m.end()) continue;
        if (!emit(fn, Cofacet{idx, simplices_[it->second].value, static_cast<std::uint64_t>(it->second)})) return;
      }
    }
  }

  template <class Fn>
  void for_each_cofacet(const Simplex& s, Fn&& fn) const {
    for_each_cofacet(s, value(s), std::forward<Fn>(fn));
  }

 // Key K such that a simplex precedes K iff its value is below v.
  OrderKey value_cut(double v) const {
    if (std::isinf(v)) return infinite_order_key();
    if (kind_ == Kind::rips) return OrderKey{v, 0, std::numeric_limits<index_t>::max()};
    auto it = std::partition_point(simplices_.begin(), simplices_.end(), [v](const FiltrationSimplex& e) { return e.value < v; });
    return OrderKey{static_cast<double>(it - simplices_.begin()), 0, 0};
  }

  // Order key of a cofacet produced by enumeration from a simplex of dimension dim - 1.
  OrderKey cofacet_key(const Cofacet& c, int dim) const {
    if (kind_ == Kind::rips) return OrderKey{c.value, dim, c.index};
    return OrderKey{static_cast<double>(c.key), 0, 0};
  }

 private:
  Filtration() = default;

  template <class Fn>
  static bool emit(Fn& fn, const Cofacet& c) {
    if constexpr (std::is_same_v<std::invoke_result_t<Fn&, const Cofacet&>, bool>) {
      return fn(c);
    } else {
      fn(c);
      return true;
    }
  }

  bool index_in_range(const Simplex& s) const {
    return s.dim >= 0 && s.dim <= maxdim_ + 1 && s.index < binom_(static_cast<index_t>(n_), s.dim + 1);
  }

  double diameter_of(std::span<const vertex_t> vs) const {
    double diam = 0.0;
    for (std::size_t a = 1; a < vs.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        diam = std::max(diam, dist_(static_cast<std::size_t>(vs[a]), static_cast<std::size_t>(vs[b])));
    return diam;
  }

  // Writes the dim+1 vertices of s in decreasing order.
  void decode_descending(const Simplex& s, vertex_t* out) const {
    index_t idx = s.index;
    index_t upper = static_cast<index_t>(n_);
    for (int k = s.dim + 1, w = 0; k >= 1; --k, ++w) {
      index_t lo = static_cast<index_t>(k - 1), hi = upper - 1;
      while (lo < hi) {
        const index_t mid = lo + (hi - lo + 1) / 2;
        if (binom_(mid, k) <= idx)
          lo = mid;
        else
          hi = mid - 1;
      }
      out[w] = static_cast<vertex_t>(lo);
      idx -= binom_(lo, k);
      upper = lo;
    }
  }

  void enumerate_rips(std::size_t max_simplices) {
    const auto n = static_cast<std::size_t>(n_);
    const double thr = threshold_;
    std::vector<FiltrationSimplex> all;
    for (std::size_t v = 0; v < n; ++v) all.push_back(FiltrationSimplex{0.0, static_cast<index_t>(v), 0});

    // Flat vertex lists of the previous dimension, in increasing vertex order.
    std::vector<vertex_t> prev;
    std::vector<double> prev_val;
    for (std::size_t v = 0; v < n; ++v) {
      prev.push_back(static_cast<vertex_t>(v));
      prev_val.push_back(0.0);
    }
    for (int dim = 1; dim <= maxdim_; ++dim) {
      std::vector<vertex_t> next;
      std::vector<double> next_val;
      const auto width = static_cast<std::size_t>(dim);
      const std::size_t count = prev_val.size();
      for (std::size_t s = 0; s < count; ++s) {
        const vertex_t* vs = prev.data() + s * width;
        for (auto v = static_cast<std::size_t>(vs[width - 1]) + 1; v < n; ++v) {
          double diam = prev_val[s];
          bool ok = true;
          for (std::size_t j = 0; j < width; ++j) {
            const double dv = dist_(v, static_cast<std::size_t>(vs[j]));
            if (dv > thr) {
              ok = false;
              break;
            }
            diam = std::max(diam, dv);
          }
          if (!ok) continue;
          index_t idx = 0;
          for (std::size_t j = 0; j < width; ++j) idx += binom_(static_cast<index_t>(vs[j]), static_cast<int>(j + 1));
          idx += binom_(static_cast<index_t>(v), dim + 1);
          all.push_back(FiltrationSimplex{diam, idx, dim});
          if (all.size() > max_simplices)
            throw resource_error("Rips filtration exceeds " + std::to_string(max_simplices) +
                                 " simplices; use fewer landmarks, a lower maxdim or a smaller threshold");
          if (dim < maxdim_) {
            next.insert(next.end(), vs, vs + width);
            next.push_back(static_cast<vertex_t>(v));
            next_val.push_back(diam);
          }
        }
      }
      prev = std::move(next);
      prev_val = std::move(next_val);
    }
    std::sort(all.begin(), all.end(), [](const FiltrationSimplex& a, const FiltrationSimplex& b) {
      return OrderKey{a.value, a.dim, a.index} < OrderKey{b.value, b.dim, b.index};
    });
    simplices_ = std::move(all);
  }

  Kind kind_ = Kind::rips;
  int n_ = 0;
  int maxdim_ = 0;
  double threshold_ = 0.0;
  BinomialTable binom_;
  DistanceMatrix dist_;
  std::vector<FiltrationSimplex> simplices_;
  std::vector<std::unordered_map<index_t, std::size_t>> lookup_;
};

inline Filtration build_filtration(const DistanceMatrix& d, int maxdim, std::optional<double> threshold = std::nullopt) {
  return Filtration::rips(d, maxdim, threshold);
}

// Cofacets of s present in the filtration, as a cochain of dimension dim(s)+1.
inline Cochain coboundary_column(const Filtration& f, const Simplex& s) {
  if (!f.contains(s)) throw std::invalid_argument("coboundary_column: simplex not in filtration");
  if (s.dim >= f.maxdim()) return Cochain{s.dim + 1, {}};
  Cochain out{s.dim + 1, {}};
  f.for_each_cofacet(s, [&out](const Cofacet& c) { out.terms.push_back(c.index); });
  std::sort(out.terms.begin(), out.terms.end());
  return out;
}

}  // namespace cuplen
