#pragma once

// Cochain-level cup product over Z/2.

#include <algorithm>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cuplen/core.hpp"
#include "cuplen/rips.hpp"

namespace cuplen {

// Sum over term pairs (a, b) with last(a) == first(b) of the simplex a + b[1:],
// counted only when that simplex is in the filtration.
inline Cochain cup_product(const Cochain& s1, const Cochain& s2, const Filtration& f) {
  const int p = s1.dim, q = s2.dim;
  Cochain out{p + q, {}};
  if (p + q > f.maxdim()) return out;

  auto decode = [&f](int dim, index_t idx) {
    const Simplex s{dim, idx};
    if (dim > f.maxdim() || idx >= f.binomials()(static_cast<index_t>(f.n_vertices()), dim + 1))
      throw std::invalid_argument("cup_product: cochain term outside the vertex set");
    return f.vertices(s);
  };

  // Terms of s2 bucketed by their first vertex.
  std::unordered_map<vertex_t, std::vector<std::vector<vertex_t>>> by_first;
  for (index_t t : s2.terms) {
    auto vs = decode(q, t);
    const vertex_t first = vs.front();
    by_first[first].push_back(std::move(vs));
  }

  std::unordered_set<index_t> toggled;
  std::vector<vertex_t> c(static_cast<std::size_t>(p + q + 1));
  for (index_t t : s1.terms) {
    const auto a = decode(p, t);
    auto it = by_first.find(a.back());
    if (it == by_first.end()) continue;
    std::copy(a.begin(), a.end(), c.begin());
    for (const auto& b : it->second) {
      std::copy(b.begin() + 1, b.end(), c.begin() + static_cast<std::ptrdiff_t>(a.size()));
      const Simplex cs{p + q, f.index_of(c)};
      if (!f.contains(cs)) continue;
      if (!toggled.insert(cs.index).second) toggled.erase(cs.index);
    }
  }
  out.terms.assign(toggled.begin(), toggled.end());
  std::sort(out.terms.begin(), out.terms.end());
  return out;
}

}  // namespace cuplen
