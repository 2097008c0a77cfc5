#pragma once

// Simplex encoding, Z/2 cochains and intervals shared by every other header.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cuplen {

using index_t = std::uint64_t;
using vertex_t = int;

// Error taxonomy. std::invalid_argument covers bad inputs to pure operations.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// C(n, k), or nullopt when the value does not fit in 64 bits.
inline std::optional<index_t> checked_binomial(index_t n, index_t k) {
  if (k > n) return index_t{0};
  k = std::min(k, n - k);
  index_t r = 1;
  for (index_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step
    const index_t num = n - k + i;
    const index_t g = std::gcd(r, i);
    const index_t r_red = r / g;
    const index_t i_red = i / g;
    const index_t num_red = num / i_red;  // i_red divides num after the reduction
    if (num_red != 0 && r_red > std::numeric_limits<index_t>::max() / num_red) return std::nullopt;
    r = r_red * num_red;
  }
  return r;
}

inline index_t binomial(index_t n, index_t k) {
  auto v = checked_binomial(n, k);
  if (!v) throw resource_error("binomial coefficient C(" + std::to_string(n) + "," + std::to_string(k) + ") overflows 64 bits");
  return *v;
}

// Dense table of C(i, j) for i <= n and j <= k_max. Construction fails if any entry overflows.
class BinomialTable {
 public:
  BinomialTable() = default;
  BinomialTable(index_t n, int k_max) : n_(n), k_max_(k_max), table_((n + 1) * static_cast<std::size_t>(k_max + 1), 0) {
    for (index_t i = 0; i <= n; ++i) {
      at(i, 0) = 1;
      for (int j = 1; j <= k_max; ++j) {
        if (static_cast<index_t>(j) > i) break;
        const index_t a = at(i - 1, j - 1);
        const index_t b = static_cast<index_t>(j) <= i - 1 ? at(i - 1, j) : 0;
        if (a > std::numeric_limits<index_t>::max() - b)
          throw resource_error("simplex index space C(" + std::to_string(i) + "," + std::to_string(j) +
                               ") overflows 64 bits; use fewer landmarks");
        at(i, j) = a + b;
      }
    }
  }

  index_t operator()(index_t i, int j) const {
    if (j < 0 || static_cast<index_t>(j) > i) return 0;
    return table_[i * static_cast<std::size_t>(k_max_ + 1) + static_cast<std::size_t>(j)];
  }

  index_t n() const { return n_; }
  int k_max() const { return k_max_; }

 private:
  index_t& at(index_t i, int j) { return table_[i * static_cast<std::size_t>(k_max_ + 1) + static_cast<std::size_t>(j)]; }

  index_t n_ = 0;
  int k_max_ = 0;
  std::vector<index_t> table_;
};

struct Simplex {
  int dim = 0;
  index_t index = 0;

  friend auto operator<=>(const Simplex&, const Simplex&) = default;
};

// Combinatorial-number-system rank: sum over j of C(v_j, j + 1).
inline index_t simplex_index(std::span<const vertex_t> vertices) {
  index_t idx = 0;
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    if (vertices[j] < 0) throw std::invalid_argument("simplex_index: negative vertex");
    if (j > 0 && vertices[j] <= vertices[j - 1]) throw std::invalid_argument("simplex_index: vertices must be strictly increasing");
    idx += binomial(static_cast<index_t>(vertices[j]), j + 1);
  }
  return idx;
}

inline index_t simplex_index(std::initializer_list<vertex_t> vertices) {
  return simplex_index(std::span<const vertex_t>(vertices.begin(), vertices.size()));
}

// Greedy top-down inverse of simplex_index.
inline std::vector<vertex_t> simplex_vertices(index_t index, int dim, int n_vertices) {
  if (dim < 0 || n_vertices <= 0) throw std::invalid_argument("simplex_vertices: bad dimension or vertex count");
  const auto total = checked_binomial(static_cast<index_t>(n_vertices), static_cast<index_t>(dim + 1));
  if (total && index >= *total)
    throw std::invalid_argument("simplex_vertices: index " + std::to_string(index) + " out of range");
  std::vector<vertex_t> out(static_cast<std::size_t>(dim + 1));
  index_t upper = static_cast<index_t>(n_vertices);
  for (int k = dim + 1; k >= 1; --k) {
    // largest v < upper with C(v, k) <= index
    index_t lo = static_cast<index_t>(k - 1), hi = upper - 1;
    while (lo < hi) {
      const index_t mid = lo + (hi - lo + 1) / 2;
      const auto c = checked_binomial(mid, static_cast<index_t>(k));
      if (c && *c <= index)
        lo = mid;
      else
        hi = mid - 1;
    }
    out[static_cast<std::size_t>(k - 1)] = static_cast<vertex_t>(lo);
    index -= binomial(lo, static_cast<index_t>(k));
    upper = lo;
  }
  return out;
}

// A Z/2 cochain: the set of simplices (of one dimension) with coefficient 1, sorted ascending.
struct Cochain {
  int dim = 0;
  std::vector<index_t> terms;

  bool is_zero() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }

  // Sorts and cancels repeated terms in pairs.
  static Cochain from_terms(int dim, std::vector<index_t> terms) {
    std::sort(terms.begin(), terms.end());
    std::vector<index_t> out;
    out.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size();) {
      std::size_t j = i;
      while (j < terms.size() && terms[j] == terms[i]) ++j;
      if ((j - i) % 2 == 1) out.push_back(terms[i]);
      i = j;
    }
    return Cochain{dim, std::move(out)};
  }

  friend bool operator==(const Cochain&, const Cochain&) = default;
};

inline Cochain cochain_add(const Cochain& a, const Cochain& b) {
  if (a.dim != b.dim) throw std::invalid_argument("cochain_add: dimension mismatch");
  Cochain out{a.dim, {}};
  out.terms.reserve(a.terms.size() + b.terms.size());
  std::set_symmetric_difference(a.terms.begin(), a.terms.end(), b.terms.begin(), b.terms.end(),
                                std::back_inserter(out.terms));
  return out;
}

inline bool cochain_eval(const Cochain& c, const Simplex& s) {
  if (c.dim != s.dim) throw std::invalid_argument("cochain_eval: dimension mismatch");
  return std::binary_search(c.terms.begin(), c.terms.end(), s.index);
}

struct Interval {
  double birth = 0.0;
  double death = 0.0;
  int dim = 0;

  double persistence() const { return death - birth; }
  bool contains(const Interval& other) const { return birth <= other.birth && other.death <= death; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace cuplen
