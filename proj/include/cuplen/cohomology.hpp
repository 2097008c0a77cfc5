#pragma once

// Persistent cohomology over Z/2 by reduction of the coboundary matrix, with
// clearing and emergent pairs. Each bar keeps a representative cocycle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cuplen/core.hpp"
#include "cuplen/rips.hpp"

namespace cuplen {

struct AnnotatedBar {
  int dim = 0;
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();
  std::size_t birth_ordinal = 0;
  std::size_t death_ordinal = 0;  // insertion position of the death simplex; |S*| if essential
  OrderKey death_key = infinite_order_key();
  Cochain cocycle;

  bool essential() const { return std::isinf(death); }
  double persistence() const { return death - birth; }
  Interval interval() const { return Interval{birth, death, dim}; }
};

struct AnnotatedBarcode {
  std::vector<AnnotatedBar> bars;

  std::size_t size() const { return bars.size(); }
  bool empty() const { return bars.empty(); }

  std::vector<std::size_t> ids_of_dim(int dim) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bars.size(); ++i)
      if (bars[i].dim == dim) out.push_back(i);
    return out;
  }

  // Bar ids of one dimension, most persistent first (ties: lower id first).
  std::vector<std::size_t> by_persistence(int dim) const {
    auto ids = ids_of_dim(dim);
    std::stable_sort(ids.begin(), ids.end(),
                     [this](std::size_t a, std::size_t b) { return bars[a].persistence() > bars[b].persistence(); });
    return ids;
  }
};

// Increasing death value, then birth ordinal, then dimension; the death key only
// separates bars that tie on all three.
inline void sort_barcode(AnnotatedBarcode& bc) {
  std::stable_sort(bc.bars.begin(), bc.bars.end(), [](const AnnotatedBar& a, const AnnotatedBar& b) {
    if (a.death != b.death) return a.death < b.death;
    if (a.birth_ordinal != b.birth_ordinal) return a.birth_ordinal < b.birth_ordinal;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.death_key < b.death_key;
  });
}

inline bool barcode_is_ordered(const AnnotatedBarcode& bc) {
  for (std::size_t i = 1; i < bc.bars.size(); ++i) {
    const auto& a = bc.bars[i - 1];
    const auto& b = bc.bars[i];
    if (b.death < a.death) return false;
    if (a.death == b.death && b.birth_ordinal < a.birth_ordinal) return false;
  }
  return true;
}

namespace detail {

// Min-heap order on same-dimension entries: key ascending, index descending.
struct CofacetAfter {
  bool operator()(const Cofacet& a, const Cofacet& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.index < b.index;
  }
};

using CofacetHeap = std::priority_queue<Cofacet, std::vector<Cofacet>, CofacetAfter>;

// Pops the smallest entry with odd multiplicity.
inline std::optional<Cofacet> pop_pivot(CofacetHeap& heap) {
  while (!heap.empty()) {
    const Cofacet top = heap.top();
    heap.pop();
    if (!heap.empty() && heap.top().index == top.index) {
      heap.pop();
      continue;
    }
    return top;
  }
  return std::nullopt;
}

inline std::optional<Cofacet> get_pivot(CofacetHeap& heap) {
  auto p = pop_pivot(heap);
  if (p) heap.push(*p);
  return p;
}

// Sorts by index and cancels pairs.
inline void canonicalize(std::vector<Cofacet>& terms) {
  std::sort(terms.begin(), terms.end(), [](const Cofacet& a, const Cofacet& b) { return a.index < b.index; });
  std::size_t w = 0;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i;
    while (j < terms.size() && terms[j].index == terms[i].index) ++j;
    if ((j - i) % 2 == 1) terms[w++] = terms[i];
    i = j;
  }
  terms.resize(w);
}

}  // namespace detail

// Reduction of the coboundary map from dim-simplices to (dim+1)-simplices.
// Columns are processed in reverse filtration order; columns that are pivots of
// the reduction one dimension down are skipped (they reduce to zero).
class CoboundaryReduction {
 public:
  struct Column {
    Cofacet simplex;       // the dim-simplex owning the column
    std::size_t v_begin = 0;  // extra terms of V in the shared pool
    std::size_t v_end = 0;
    std::optional<Cofacet> pivot;
  };

  CoboundaryReduction(const Filtration& f, int dim, const CoboundaryReduction* lower = nullptr)
      : f_(&f), dim_(dim) {
    if (dim < 0 || dim > f.maxdim()) throw std::invalid_argument("CoboundaryReduction: dimension out of range");
    if (lower && lower->dim() != dim - 1) throw std::invalid_argument("CoboundaryReduction: clearing source has wrong dimension");
    run(lower);
  }

  int dim() const { return dim_; }
  const Filtration& filtration() const { return *f_; }
  const std::vector<Column>& columns() const { return columns_; }

  bool is_pivot(index_t cofacet_index) const { return pivot_of_.contains(cofacet_index); }

  const Column* column_with_pivot(index_t cofacet_index) const {
    auto it = pivot_of_.find(cofacet_index);
    return it == pivot_of_.end() ? nullptr : &columns_[it->second];
  }

  // The V column: the owning simplex plus its extra terms.
  template <class Fn>
  void for_each_v_term(const Column& c, Fn&& fn) const {
    fn(c.simplex);
    for (std::size_t i = c.v_begin; i < c.v_end; ++i) fn(pool_[i]);
  }

  // Pushes the reduced column R = delta(V) onto a heap.
  void push_reduced_column(const Column& c, detail::CofacetHeap& heap) const {
    for_each_v_term(c, [&](const Cofacet& t) { push_coboundary(t, heap); });
  }

  void push_coboundary(const Cofacet& t, detail::CofacetHeap& heap) const {
    f_->for_each_cofacet(Simplex{dim_, t.index}, t.value, [&heap](const Cofacet& c) { heap.push(c); });
  }

 private:
  void run(const CoboundaryReduction* lower) {
    const auto& S = f_->simplices();
    const bool rips = f_->is_rips();
    detail::CofacetHeap heap;
    std::vector<Cofacet> v_work;
    for (std::size_t pos = S.size(); pos-- > 0;) {
      const auto& e = S[pos];
      if (e.dim != dim_) continue;
      if (lower && lower->is_pivot(e.index)) continue;
      const Cofacet self{e.index, e.value, rips ? value_key(e.value) : static_cast<std::uint64_t>(pos)};
      const Simplex s{dim_, e.index};

      heap = detail::CofacetHeap();
      v_work.clear();
      std::optional<Cofacet> emergent;
      bool check_emergent = rips;
      f_->for_each_cofacet(s, e.value, [&](const Cofacet& c) {
        heap.push(c);
        if (check_emergent && c.value == e.value) {
          if (!pivot_of_.contains(c.index)) {
            emergent = c;
            return false;
          }
          check_emergent = false;
        }
        return true;
      });

      Column col{self, pool_.size(), pool_.size(), std::nullopt};
      if (emergent) {
        col.pivot = emergent;
      } else {
        auto piv = detail::get_pivot(heap);
        while (piv) {
          auto it = pivot_of_.find(piv->index);
          if (it == pivot_of_.end()) break;
          const Column& other = columns_[it->second];
          for_each_v_term(other, [&](const Cofacet& t) {
            v_work.push_back(t);
            push_coboundary(t, heap);
          });
          piv = detail::get_pivot(heap);
        }
        col.pivot = piv;
        detail::canonicalize(v_work);
        pool_.insert(pool_.end(), v_work.begin(), v_work.end());
        col.v_end = pool_.size();
      }
      if (col.pivot) pivot_of_.emplace(col.pivot->index, columns_.size());
      columns_.push_back(col);
    }
  }

  const Filtration* f_;
  int dim_;
  std::vector<Column> columns_;
  std::vector<Cofacet> pool_;
  std::unordered_map<index_t, std::size_t> pivot_of_;
};

// Reductions for dimensions 0..top, each cleared by the one below.
class ReductionChain {
 public:
  explicit ReductionChain(const Filtration& f) : f_(&f) {}

  const CoboundaryReduction& at(int dim) {
    if (dim < 0 || dim > f_->maxdim()) throw std::invalid_argument("ReductionChain: dimension out of range");
    while (static_cast<int>(chain_.size()) <= dim) {
      const CoboundaryReduction* lower = chain_.empty() ? nullptr : chain_.back().get();
      chain_.push_back(std::make_unique<CoboundaryReduction>(*f_, static_cast<int>(chain_.size()), lower));
    }
    return *chain_[static_cast<std::size_t>(dim)];
  }

  const Filtration& filtration() const { return *f_; }

 private:
  const Filtration* f_;
  std::vector<std::unique_ptr<CoboundaryReduction>> chain_;
};

// The cocycle's terms that precede the cut, as a cochain.
inline Cochain prune_before(const Filtration& f, int dim, std::vector<Cofacet> terms, const OrderKey& cut) {
  Cochain out{dim, {}};
  for (const auto& t : terms) {
    const OrderKey key = f.is_rips() ? OrderKey{t.value, dim, t.index} : OrderKey{static_cast<double>(t.key), 0, 0};
    if (key < cut) out.terms.push_back(t.index);
  }
  std::sort(out.terms.begin(), out.terms.end());
  return out;
}

inline AnnotatedBarcode barcode_from_reduction(const CoboundaryReduction& red, AnnotatedBarcode bc = {}) {
  const Filtration& f = red.filtration();
  const int dim = red.dim();
  for (const auto& col : red.columns()) {
    AnnotatedBar bar;
    bar.dim = dim;
    bar.birth = col.simplex.value;
    bar.birth_ordinal = f.is_rips() ? *f.ordinal(Simplex{dim, col.simplex.index}) : static_cast<std::size_t>(col.simplex.key);
    if (col.pivot) {
      if (col.pivot->value == bar.birth) continue;
      bar.death = col.pivot->value;
      bar.death_key = f.cofacet_key(*col.pivot, dim + 1);
      bar.death_ordinal = f.is_rips() ? f.prefix_size(bar.death_key) : static_cast<std::size_t>(col.pivot->key);
    } else {
      bar.death_key = infinite_order_key();
      bar.death_ordinal = f.size();
    }
    std::vector<Cofacet> terms;
    red.for_each_v_term(col, [&terms](const Cofacet& t) { terms.push_back(t); });
    bar.cocycle = prune_before(f, dim, std::move(terms), bar.death_key);
    bc.bars.push_back(std::move(bar));
  }
  return bc;
}

// Bars of dimensions 0..maxdim (capped at the filtration's maxdim), sorted by death then birth.
inline AnnotatedBarcode persistent_cohomology(const Filtration& f, int maxdim = -1) {
  if (maxdim < 0 || maxdim > f.maxdim()) maxdim = f.maxdim();
  AnnotatedBarcode bc;
  std::unique_ptr<CoboundaryReduction> lower;
  for (int d = 0; d <= maxdim; ++d) {
    auto red = std::make_unique<CoboundaryReduction>(f, d, lower.get());
    bc = barcode_from_reduction(*red, std::move(bc));
    lower = std::move(red);
  }
  sort_barcode(bc);
  return bc;
}

// delta(c) restricted to simplices strictly before `cut`; empty iff c is a cocycle there.
inline Cochain coboundary_before(const Filtration& f, const Cochain& c, const OrderKey& cut) {
  std::vector<index_t> acc;
  if (c.dim + 1 > f.maxdim() + (f.is_rips() ? 1 : 0)) return Cochain{c.dim + 1, {}};
  for (index_t t : c.terms) {
    const Simplex s{c.dim, t};
    if (!f.contains(s)) throw std::invalid_argument("coboundary_before: cochain term not in filtration");
    f.for_each_cofacet(s, [&](const Cofacet& co) {
      if (f.cofacet_key(co, c.dim + 1) < cut) acc.push_back(co.index);
    });
  }
  return Cochain::from_terms(c.dim + 1, std::move(acc));
}

inline bool validate_cocycle(const Filtration& f, const AnnotatedBar& bar) {
  if (bar.cocycle.dim != bar.dim) return false;
  for (index_t t : bar.cocycle.terms)
    if (!f.contains(Simplex{bar.dim, t})) return false;
  return coboundary_before(f, bar.cocycle, bar.death_key).is_zero();
}

// ---------------------------------------------------------------------------
// Barcode JSON: [{"dim", "birth", "death" (number or "inf"), "cocycle": [[v...], ...]}]

inline std::string json_number(double v) {
  if (std::isinf(v)) return "\"inf\"";
  return format_double(v);
}

inline void write_barcode_json(std::ostream& out, const Filtration& f, const AnnotatedBarcode& bc) {
  out << "[";
  for (std::size_t i = 0; i < bc.bars.size(); ++i) {
    const auto& b = bc.bars[i];
    out << (i ? ",\n " : "\n ") << "{\"dim\": " << b.dim << ", \"birth\": " << json_number(b.birth)
        << ", \"death\": " << json_number(b.death) << ", \"cocycle\": [";
    for (std::size_t j = 0; j < b.cocycle.terms.size(); ++j) {
      const auto vs = f.vertices(Simplex{b.dim, b.cocycle.terms[j]});
      out << (j ? ", " : "") << "[";
      for (std::size_t v = 0; v < vs.size(); ++v) out << (v ? ", " : "") << vs[v];
      out << "]";
    }
    out << "]}";
  }
  out << (bc.bars.empty() ? "]\n" : "\n]\n");
}

inline std::string barcode_json(const Filtration& f, const AnnotatedBarcode& bc) {
  std::ostringstream ss;
  write_barcode_json(ss, f, bc);
  return ss.str();
}

namespace detail {

inline double json_value(const nlohmann::json& j, const char* what, std::size_t bar) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "Infinity"))
    return std::numeric_limits<double>::infinity();
  throw parse_error("bar " + std::to_string(bar) + ": '" + what + "' must be a number or \"inf\"");
}

}  // namespace detail

// Reads externally computed bars against a filtration. Ordinals follow the
// value semantics: birth at the first dim-simplex with value >= birth, death
// just before the first simplex with value >= death. Every cocycle is re-validated.
inline AnnotatedBarcode ingest_barcode_json(const Filtration& f, std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("barcode JSON: ") + e.what());
  }
  if (!doc.is_array()) throw parse_error("barcode JSON: top level must be a list of bars");
  AnnotatedBarcode bc;
  const auto& S = f.simplices();
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    if (!rec.is_object() || !rec.contains("dim") || !rec.contains("birth") || !rec.contains("death") ||
        !rec.contains("cocycle"))
      throw parse_error("bar " + std::to_string(i) + ": expected keys dim, birth, death, cocycle");
    if (!rec["dim"].is_number_integer()) throw parse_error("bar " + std::to_string(i) + ": dim must be an integer");
    AnnotatedBar bar;
    bar.dim = rec["dim"].get<int>();
    if (bar.dim < 0 || bar.dim > f.maxdim()) throw parse_error("bar " + std::to_string(i) + ": dim out of range");
    bar.birth = detail::json_value(rec["birth"], "birth", i);
    bar.death = detail::json_value(rec["death"], "death", i);
    if (!(bar.birth <= bar.death)) throw parse_error("bar " + std::to_string(i) + ": birth exceeds death");
    if (!rec["cocycle"].is_array()) throw parse_error("bar " + std::to_string(i) + ": cocycle must be a list");
    std::vector<index_t> terms;
    for (const auto& simplex : rec["cocycle"]) {
      if (!simplex.is_array() || simplex.size() != static_cast<std::size_t>(bar.dim + 1))
        throw parse_error("bar " + std::to_string(i) + ": cocycle simplex has wrong vertex count");
      std::vector<vertex_t> vs;
      for (const auto& v : simplex) {
        if (!v.is_number_integer()) throw parse_error("bar " + std::to_string(i) + ": vertex must be an integer");
        vs.push_back(v.get<vertex_t>());
      }
      std::sort(vs.begin(), vs.end());
      if (std::adjacent_find(vs.begin(), vs.end()) != vs.end() || !f.vertices_in_range(vs))
        throw validation_error("bar " + std::to_string(i) + ": cocycle references an invalid simplex");
      terms.push_back(f.index_of(vs));
    }
    bar.cocycle = Cochain::from_terms(bar.dim, std::move(terms));
    auto it = std::find_if(S.begin(), S.end(),
                           [&bar](const FiltrationSimplex& e) { return e.dim == bar.dim && e.value >= bar.birth; });
    bar.birth_ordinal = static_cast<std::size_t>(it - S.begin());
    bar.death_key = f.value_cut(bar.death);
    bar.death_ordinal = f.prefix_size(bar.death_key);
    if (!validate_cocycle(f, bar))
      throw validation_error("bar " + std::to_string(i) + " (dim " + std::to_string(bar.dim) + ", [" +
                             format_double(bar.birth) + ", " + format_double(bar.death) +
                             ")): representative is not a cocycle before its death");
    bc.bars.push_back(std::move(bar));
  }
  sort_barcode(bc);
  return bc;
}

inline AnnotatedBarcode ingest_barcode_json(const Filtration& f, const std::string& text) {
  std::istringstream ss(text);
  return ingest_barcode_json(f, ss);
}

}  // namespace cuplen
