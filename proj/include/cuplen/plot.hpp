#pragma once

// Static plot output: persistence diagram with cup-length intervals as SVG, and
// the same coordinates as TSV.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cuplen/cohomology.hpp"
#include "cuplen/core.hpp"
#include "cuplen/metrics.hpp"

namespace cuplen {

struct PlotBar {
  int dim = 0;
  double birth = 0.0;
  double death = 0.0;
};

struct PlotInterval {
  int level = 1;
  double birth = 0.0;
  double death = 0.0;
  std::vector<std::size_t> factors;
};

struct PlotData {
  std::vector<PlotBar> bars;
  std::vector<PlotInterval> intervals;  // levels >= 2 only
  std::vector<std::size_t> toroidal_factors;
};

namespace detail {

inline nlohmann::json parse_json(std::istream& in, const char* what) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string(what) + ": " + e.what());
  }
}

inline std::vector<std::size_t> parse_ids(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw parse_error(std::string(what) + " must be a list");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) throw parse_error(std::string(what) + " must hold bar ids");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

}  // namespace detail

inline PlotData read_plot_data(std::istream& barcode, std::istream& result) {
  PlotData pd;
  const auto bars = detail::parse_json(barcode, "barcode JSON");
  if (!bars.is_array()) throw parse_error("barcode JSON: top level must be a list of bars");
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    if (!b.is_object() || !b.contains("dim") || !b.contains("birth") || !b.contains("death") || !b["dim"].is_number_integer())
      throw parse_error("bar " + std::to_string(i) + ": expected dim, birth, death");
    pd.bars.push_back({b["dim"].get<int>(), detail::json_value(b["birth"], "birth", i), detail::json_value(b["death"], "death", i)});
  }

  const auto res = detail::parse_json(result, "result JSON");
  if (!res.is_object() || !res.contains("levels") || !res["levels"].is_array())
    throw parse_error("result JSON: expected an object with a levels list");
  for (const auto& lvl : res["levels"]) {
    if (!lvl.is_object() || !lvl.contains("level") || !lvl["level"].is_number_integer() || !lvl.contains("intervals") ||
        !lvl["intervals"].is_array())
      throw parse_error("result JSON: malformed level entry");
    const int level = lvl["level"].get<int>();
    if (level < 2) continue;
    for (const auto& iv : lvl["intervals"]) {
      if (!iv.is_object() || !iv.contains("birth") || !iv.contains("death") || !iv.contains("factor_bars"))
        throw parse_error("result JSON: malformed interval");
      PlotInterval p{level, detail::json_value(iv["birth"], "birth", 0), detail::json_value(iv["death"], "death", 0),
                     detail::parse_ids(iv["factor_bars"], "factor_bars")};
      for (std::size_t id : p.factors)
        if (id >= pd.bars.size()) throw parse_error("result JSON: factor bar id out of range");
      pd.intervals.push_back(std::move(p));
    }
  }
  if (res.contains("toroidal") && res["toroidal"].is_object() && res["toroidal"].contains("factors"))
    pd.toroidal_factors = detail::parse_ids(res["toroidal"]["factors"], "toroidal factors");
  for (std::size_t id : pd.toroidal_factors)
    if (id >= pd.bars.size()) throw parse_error("result JSON: toroidal factor id out of range");
  return pd;
}

// One row per bar, then one row per interval.
inline void write_plot_tsv(std::ostream& out, const PlotData& pd) {
  out << "kind\tdim_or_level\tbirth\tdeath\n";
  for (const auto& b : pd.bars) out << "bar\t" << b.dim << '\t' << format_double(b.birth) << '\t' << format_double(b.death) << '\n';
  for (const auto& iv : pd.intervals)
    out << "cup\t" << iv.level << '\t' << format_double(iv.birth) << '\t' << format_double(iv.death) << '\n';
}

namespace detail {

inline const char* dim_color(int dim) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b"};
  return colors[std::clamp(dim, 0, 4)];
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

// Left: persistence diagram (bars by dimension, cup-length intervals as black squares).
// Right: annotated bars and cup-length intervals against the filtration axis.
inline void write_plot_svg(std::ostream& out, const PlotData& pd) {
  constexpr double W = 420, H = 420, pad = 45;
  double top = 0.0;
  for (const auto& b : pd.bars) {
    top = std::max(top, b.birth);
    if (std::isfinite(b.death)) top = std::max(top, b.death);
  }
  for (const auto& iv : pd.intervals)
    if (std::isfinite(iv.death)) top = std::max(top, iv.death);
  top = top > 0.0 ? top * 1.05 : 1.0;
  const double span = W - 2 * pad;
  auto sx = [&](double v, double x0) { return x0 + pad + span * std::min(v, top) / top; };
  auto sy = [&](double v) { return H - pad - span * std::min(v, top) / top; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double x0 : {0.0, W}) {
    out << "<line class=\"axis\" x1=\"" << x0 + pad << "\" y1=\"" << H - pad << "\" x2=\"" << x0 + W - pad << "\" y2=\""
        << H - pad << "\" stroke=\"black\"/>\n";
    out << "<line class=\"axis\" x1=\"" << x0 + pad << "\" y1=\"" << pad << "\" x2=\"" << x0 + pad << "\" y2=\"" << H - pad
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x0 + W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
        << (x0 == 0.0 ? "birth" : "filtration value") << " (max " << detail::fmt(top) << ")</text>\n";
  }
  out << "<text x=\"12\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 " << H / 2 << ")\">death</text>\n";
  out << "<line x1=\"" << sx(0, 0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(top, 0) << "\" y2=\"" << sy(top)
      << "\" stroke=\"#999\" stroke-dasharray=\"4\"/>\n";

  for (const auto& b : pd.bars) {
    const double y = std::isfinite(b.death) ? sy(b.death) : pad - 8;
    out << "<circle class=\"bar-dim-" << b.dim << "\" cx=\"" << detail::fmt(sx(b.birth, 0)) << "\" cy=\"" << detail::fmt(y)
        << "\" r=\"3\" fill=\"" << detail::dim_color(b.dim) << "\"/>\n";
  }
  for (const auto& iv : pd.intervals)
    out << "<rect class=\"cup-point\" x=\"" << detail::fmt(sx(iv.birth, 0) - 4) << "\" y=\""
        << detail::fmt((std::isfinite(iv.death) ? sy(iv.death) : pad - 8) - 4) << "\" width=\"8\" height=\"8\" fill=\"black\"/>\n";

  // Right panel rows: bars used as factors, the most persistent 2-bar, then the intervals.
  std::set<std::size_t> shown(pd.toroidal_factors.begin(), pd.toroidal_factors.end());
  for (const auto& iv : pd.intervals) shown.insert(iv.factors.begin(), iv.factors.end());
  std::optional<std::size_t> best2;
  for (std::size_t i = 0; i < pd.bars.size(); ++i)
    if (pd.bars[i].dim == 2 && (!best2 || pd.bars[i].death - pd.bars[i].birth > pd.bars[*best2].death - pd.bars[*best2].birth))
      best2 = i;
  if (best2) shown.insert(*best2);
  const std::size_t rows = shown.size() + pd.intervals.size();
  const double step = rows ? std::min(24.0, span / static_cast<double>(rows)) : 0.0;
  double y = pad + step / 2;
  for (std::size_t id : shown) {
    const auto& b = pd.bars[id];
    out << "<line class=\"annotated-bar\" x1=\"" << detail::fmt(sx(b.birth, W)) << "\" y1=\"" << detail::fmt(y) << "\" x2=\""
        << detail::fmt(sx(std::isfinite(b.death) ? b.death : top, W)) << "\" y2=\"" << detail::fmt(y) << "\" stroke=\""
        << detail::dim_color(b.dim) << "\" stroke-width=\"4\"/>\n";
    y += step;
  }
  for (const auto& iv : pd.intervals) {
    out << "<line class=\"cup-level-" << iv.level << "\" x1=\"" << detail::fmt(sx(iv.birth, W)) << "\" y1=\"" << detail::fmt(y)
        << "\" x2=\"" << detail::fmt(sx(std::isfinite(iv.death) ? iv.death : top, W)) << "\" y2=\"" << detail::fmt(y)
        << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
    y += step;
  }
  out << "</svg>\n";
}

}  // namespace cuplen
