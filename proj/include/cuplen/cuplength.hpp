#pragma once

// Persistent cup-length: iterated products of bar representatives, each checked
// for triviality on shrinking prefixes of the filtration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cuplen/cohomology.hpp"
#include "cuplen/core.hpp"
#include "cuplen/cup.hpp"
#include "cuplen/rips.hpp"

namespace cuplen {

inline constexpr std::size_t kNoPrefix = std::numeric_limits<std::size_t>::max();

// Decides whether a cochain, restricted to a prefix of the filtration, is a coboundary there.
//
// The coboundary columns are reduced once so that their smallest entries are distinct.
// Reducing y against them leaves a first surviving entry f(y); y restricted to the
// first p simplices is a coboundary iff f(y) does not exist or f(y) >= p.
class MembershipSolver {
 public:
  explicit MembershipSolver(const Filtration& f) : chain_(f) {}

  const Filtration& filtration() const { return chain_.filtration(); }

  // f(y), ignoring every entry at or after ordinal `cut`.
  std::optional<std::size_t> first_obstruction(const Cochain& y, std::size_t cut = kNoPrefix) {
    const Filtration& f = chain_.filtration();
    if (y.dim == 0) throw std::invalid_argument("coboundary membership: 0-cochains are never coboundaries of anything");
    if (y.dim > f.maxdim()) throw std::invalid_argument("coboundary membership: cochain dimension exceeds the filtration");
    const CoboundaryReduction& red = chain_.at(y.dim - 1);
    const OrderKey cut_key = cut < f.size() ? f.order_key_at(cut) : infinite_order_key();

    detail::CofacetHeap heap;
    for (index_t t : y.terms) {
      const Simplex s{y.dim, t};
      auto e = f.entry(s);
      if (!e || !f.contains(s)) throw std::invalid_argument("coboundary membership: cochain term not in filtration");
      heap.push(*e);
    }
    while (auto piv = detail::get_pivot(heap)) {
      if (!(f.cofacet_key(*piv, y.dim) < cut_key)) return std::nullopt;
      const auto* col = red.column_with_pivot(piv->index);
      if (!col) return f.is_rips() ? *f.ordinal(Simplex{y.dim, piv->index}) : static_cast<std::size_t>(piv->key);
      red.push_reduced_column(*col, heap);
    }
    return std::nullopt;
  }

  bool is_coboundary(const Cochain& y, std::size_t prefix) {
    if (y.is_zero()) return true;
    return !first_obstruction(y, prefix).has_value();
  }

 private:
  ReductionChain chain_;
};

inline bool coboundary_membership(const Filtration& f, const Cochain& y, std::size_t prefix) {
  if (prefix > f.size()) throw std::invalid_argument("coboundary_membership: prefix exceeds filtration size");
  if (y.dim == 0) throw std::invalid_argument("coboundary_membership: dimension 0");
  MembershipSolver solver(f);
  return solver.is_coboundary(y, prefix);
}

struct CupLengthOptions {
  int k = 2;
  double min_persistence = 0.0;
  // Multiply 1-dimensional bars only; unset means "only when k == 2".
  std::optional<bool> h1_factors_only;
};

struct ProductRecord {
  std::size_t birth_ordinal = 0;
  std::size_t death_ordinal = 0;
  double birth = 0.0;
  double death = 0.0;
  Cochain product;
  std::vector<std::size_t> factors;  // bar ids, left to right

  Interval interval() const { return Interval{birth, death, product.dim}; }
};

struct BarInfo {
  int dim = 0;
  double birth = 0.0;
  double death = 0.0;
  double persistence() const { return death - birth; }
};

using CupMatrix = std::map<std::pair<std::size_t, std::size_t>, int>;

struct CupLengthResult {
  std::vector<std::vector<ProductRecord>> levels;  // levels[l - 1]: l-fold products
  std::vector<CupMatrix> matrices;                 // matrices[l - 1]: A_l over (birth, death) ordinals
  std::vector<BarInfo> bars;                       // every input bar, by id
  int k = 2;
  int max_level = 0;
  bool truncated = false;

  const std::vector<ProductRecord>& level(int l) const {
    static const std::vector<ProductRecord> none;
    if (l < 1 || l > static_cast<int>(levels.size())) return none;
    return levels[static_cast<std::size_t>(l - 1)];
  }

  const CupMatrix& matrix() const {
    static const CupMatrix none;
    return matrices.empty() ? none : matrices.back();
  }
};

inline CupLengthResult persistent_cuplength(const Filtration& f, const AnnotatedBarcode& bc,
                                            const CupLengthOptions& opt = {}) {
  if (opt.k < 2) throw std::invalid_argument("persistent_cuplength: k must be at least 2");
  if (!(opt.min_persistence >= 0.0)) throw std::invalid_argument("persistent_cuplength: min_persistence must be >= 0");
  if (!barcode_is_ordered(bc)) throw std::invalid_argument("persistent_cuplength: barcode is not ordered by death then birth");
  const bool h1_only = opt.h1_factors_only.value_or(opt.k == 2);

  CupLengthResult res;
  res.k = opt.k;
  res.truncated = opt.k > f.maxdim();
  for (const auto& b : bc.bars) res.bars.push_back(BarInfo{b.dim, b.birth, b.death});

  std::vector<ProductRecord> first;
  CupMatrix a1;
  for (std::size_t id = 0; id < bc.bars.size(); ++id) {
    const auto& b = bc.bars[id];
    if (b.dim < 1 || b.dim > opt.k) continue;
    if (!(b.birth < b.death) || b.persistence() < opt.min_persistence) continue;
    first.push_back(ProductRecord{b.birth_ordinal, b.death_ordinal, b.birth, b.death, b.cocycle, {id}});
    a1[{b.birth_ordinal, b.death_ordinal}] = 1;
  }
  res.levels.push_back(first);
  res.matrices.push_back(a1);

  // Candidate product births: 2-simplices for Rips cup-length 2, every ordinal otherwise.
  std::vector<std::size_t> grid;
  const bool dim2_grid = f.is_rips() && opt.k == 2;
  if (dim2_grid)
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i].dim == 2) grid.push_back(i);

  MembershipSolver solver(f);
  const std::vector<ProductRecord> base = res.levels.front();
  int l = 1;
  auto changed = [&res](int lvl) {
    const CupMatrix& cur = res.matrices[static_cast<std::size_t>(lvl - 1)];
    if (lvl == 1) return !cur.empty();
    return cur != res.matrices[static_cast<std::size_t>(lvl - 2)];
  };
  while (l <= opt.k - 1 && changed(l)) {
    CupMatrix next = res.matrices.back();
    std::vector<ProductRecord> made;
    const std::vector<ProductRecord> prev = res.levels.back();
    for (std::size_t i1 = 0; i1 < base.size(); ++i1) {
      const auto& r1 = base[i1];
      if (h1_only && r1.product.dim != 1) continue;
      for (std::size_t i2 = (l == 1 ? i1 : 0); i2 < prev.size(); ++i2) {
        const auto& r2 = prev[i2];
        if (h1_only && l == 1 && r2.product.dim != 1) continue;
        Cochain y = cup_product(r1.product, r2.product, f);
        if (y.is_zero()) continue;
        const bool left_dies_first =
            r1.death_ordinal < r2.death_ordinal || (r1.death_ordinal == r2.death_ordinal && r1.death <= r2.death);
        const std::size_t dmin = left_dies_first ? r1.death_ordinal : r2.death_ordinal;
        const double dval = left_dies_first ? r1.death : r2.death;

        const auto fy = solver.first_obstruction(y, dmin);
        if (!fy) continue;  // already a coboundary just before the death
        // Triviality only grows as the prefix shrinks, so the backward search over
        // the birth grid stops at the first grid point at or after f(y).
        std::size_t birth_ord = *fy;
        if (dim2_grid) {
          auto it = std::lower_bound(grid.begin(), grid.end(), *fy);
          if (it == grid.end()) continue;
          birth_ord = *it;
        }
        if (birth_ord >= dmin) continue;
        const double bval = f[birth_ord].value;
        if (!(bval < dval)) continue;

        ProductRecord rec{birth_ord, dmin, bval, dval, std::move(y), r1.factors};
        rec.factors.insert(rec.factors.end(), r2.factors.begin(), r2.factors.end());
        next[{birth_ord, dmin}] = l + 1;
        made.push_back(std::move(rec));
      }
    }
    res.levels.push_back(std::move(made));
    res.matrices.push_back(std::move(next));
    ++l;
  }
  for (int lvl = 1; lvl <= static_cast<int>(res.levels.size()); ++lvl)
    if (!res.level(lvl).empty()) res.max_level = lvl;
  return res;
}

// ---------------------------------------------------------------------------
// Diagram and function

struct CupDiagram {
  std::map<std::pair<double, double>, int> points;  // (birth, death) -> level

  bool empty() const { return points.empty(); }
};

inline CupDiagram cuplength_diagram(const CupLengthResult& r) {
  CupDiagram dg;
  for (std::size_t l = 0; l < r.levels.size(); ++l)
    for (const auto& rec : r.levels[l]) {
      int& v = dg.points[{rec.birth, rec.death}];
      v = std::max(v, static_cast<int>(l + 1));
    }
  return dg;
}

// Max value over diagram intervals containing the query, 0 if none.
inline int cuplength_function(const CupDiagram& dg, const Interval& query) {
  int best = 0;
  for (const auto& [iv, v] : dg.points)
    if (iv.first <= query.birth && query.death <= iv.second) best = std::max(best, v);
  return best;
}

struct ToroidalEvidence {
  bool verdict = false;
  std::optional<Interval> interval;
  std::vector<std::size_t> factor_bars;
  bool two_bar_independence = false;
};

// A nonempty level-2 interval certified by two distinct 1-dimensional bars; the longest one is reported.
inline ToroidalEvidence detect_toroidal(const CupLengthResult& r) {
  ToroidalEvidence ev;
  const ProductRecord* best = nullptr;
  for (const auto& rec : r.level(2)) {
    if (rec.factors.size() != 2 || rec.factors[0] == rec.factors[1]) continue;
    ev.two_bar_independence = true;
    const auto& a = r.bars.at(rec.factors[0]);
    const auto& b = r.bars.at(rec.factors[1]);
    if (a.dim != 1 || b.dim != 1 || !(rec.birth < rec.death)) continue;
    if (!best || rec.death - rec.birth > best->death - best->birth) best = &rec;
  }
  if (best) {
    ev.verdict = true;
    ev.interval = Interval{best->birth, best->death, 2};
    ev.factor_bars = best->factors;
  }
  return ev;
}

// True iff the largest gap between consecutive H1 persistences follows the second bar.
inline bool h1_gap_heuristic(const AnnotatedBarcode& bc) {
  std::vector<double> p;
  for (const auto& b : bc.bars)
    if (b.dim == 1) p.push_back(b.persistence());
  if (p.size() < 3) return p.size() == 2;
  std::sort(p.begin(), p.end(), std::greater<>());
  std::size_t arg = 0;
  double gap = -1.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double g = p[i] - p[i + 1];
    if (g > gap) {
      gap = g;
      arg = i;
    }
  }
  return arg == 1;
}

// ---------------------------------------------------------------------------
// Result JSON

inline void write_result_json(std::ostream& out, const CupLengthResult& r, const ToroidalEvidence& ev) {
  out << "{\n  \"levels\": [";
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    out << (l ? "," : "") << "\n    {\"level\": " << l + 1 << ", \"intervals\": [";
    const auto& recs = r.levels[l];
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& rec = recs[i];
      out << (i ? "," : "") << "\n      {\"birth\": " << json_number(rec.birth) << ", \"death\": " << json_number(rec.death)
          << ", \"factor_bars\": [";
      for (std::size_t j = 0; j < rec.factors.size(); ++j) out << (j ? ", " : "") << rec.factors[j];
      out << "], \"product_size\": " << rec.product.size() << "}";
    }
    out << (recs.empty() ? "]}" : "\n    ]}");
  }
  out << (r.levels.empty() ? "]" : "\n  ]") << ",\n  \"max_level\": " << r.max_level
      << ",\n  \"truncated\": " << (r.truncated ? "true" : "false") << ",\n  \"toroidal\": {\"verdict\": "
      << (ev.verdict ? "true" : "false") << ", \"interval\": ";
  if (ev.interval)
    out << "[" << json_number(ev.interval->birth) << ", " << json_number(ev.interval->death) << "]";
  else
    out << "null";
  out << ", \"factors\": [";
  for (std::size_t j = 0; j < ev.factor_bars.size(); ++j) out << (j ? ", " : "") << ev.factor_bars[j];
  out << "], \"two_bar_independence\": " << (ev.two_bar_independence ? "true" : "false") << "}\n}\n";
}

inline std::string result_json(const CupLengthResult& r, const ToroidalEvidence& ev) {
  std::ostringstream ss;
  write_result_json(ss, r, ev);
  return ss.str();
}

}  // namespace cuplen
