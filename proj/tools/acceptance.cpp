// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   cuplen_acceptance [--only AC1,AC7] [--seed S]

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cuplen/cuplen.hpp"
#include "suites.hpp"

using namespace cuplen;
using Kind = WedgePiece::Kind;

namespace {

std::uint64_t g_seed = 1;
suites::Tally g_delta, g_cocycles;
int g_checked_filtrations = 0;

double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

// Every analysis feeds the invariant tallies reported under AC8.
template <class Data>
Analysis checked_analyze(const Data& data, std::size_t landmarks, std::uint64_t seed) {
  AnalysisOptions opt;
  opt.landmarks = landmarks;
  opt.seed = derive_seed(seed, 7);
  auto a = analyze(data, opt);
  g_delta.merge(suites::coboundary_squared(*a.filtration));
  g_cocycles.merge(suites::cocycles_valid(*a.filtration, a.barcode));
  ++g_checked_filtrations;
  return a;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::set<std::size_t> top_bars(const AnnotatedBarcode& bc, int dim, std::size_t n) {
  auto ids = bc.by_persistence(dim);
  ids.resize(std::min(n, ids.size()));
  return {ids.begin(), ids.end()};
}

double longest(const AnnotatedBarcode& bc, int dim) {
  const auto ids = bc.by_persistence(dim);
  return ids.empty() ? 0.0 : bc.bars[ids.front()].persistence();
}

DistanceMatrix wedge_s1_s2_s1(std::uint64_t seed) {
  return wedge_sum_dataset({{Kind::circle, 400, 1.0}, {Kind::sphere, 1200, 1.0}, {Kind::circle, 400, 1.0}}, seed);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome ac1() {
  const double t0 = now();
  const auto torus = checked_analyze(torus_intrinsic_metric(sample_torus(1000, g_seed)), 150, g_seed);
  const double t1 = now();
  const auto wedge = checked_analyze(wedge_s1_s2_s1(g_seed), 150, g_seed);
  const double t2 = now();
  const auto& fac = torus.evidence.factor_bars;
  const bool factors_ok = std::set<std::size_t>(fac.begin(), fac.end()) == top_bars(torus.barcode, 1, 2);
  const bool pass = torus.evidence.verdict && factors_ok && !wedge.evidence.verdict && t1 - t0 <= 300 && t2 - t1 <= 300;
  return {pass, "torus verdict=" + std::to_string(torus.evidence.verdict) + " factors=top-two-H1:" + std::to_string(factors_ok) +
                    " (" + fmt("%.1f", t1 - t0) + " s); S1vS2vS1 verdict=" + std::to_string(wedge.evidence.verdict) + " (" +
                    fmt("%.1f", t2 - t1) + " s)"};
}

Outcome ac2() {
  int ok = 0, runs = 0;
  std::string verdicts;
  for (std::uint64_t s = g_seed; s < g_seed + 3; ++s) {
    const auto a = checked_analyze(wedge_sum_dataset({{Kind::torus, 2000, 1.0}, {Kind::circle, 300, 1.0}}, s), 150, s);
    const auto b = checked_analyze(torus_intrinsic_metric(sample_torus(2000, s)), 150, s);
    ok += a.evidence.verdict + b.evidence.verdict;
    runs += 2;
    verdicts += " seed " + std::to_string(s) + ": T2vS1=" + std::to_string(a.evidence.verdict) + " T2=" + std::to_string(b.evidence.verdict) + ";";
  }
  return {ok == runs, std::to_string(ok) + "/" + std::to_string(runs) + " true;" + verdicts};
}

// The 2-bar born where the certifying product first becomes nontrivial.
std::optional<std::size_t> certifying_two_bar(const Analysis& a) {
  const auto& ev = a.evidence;
  if (!ev.interval) return std::nullopt;
  for (const auto& rec : a.cuplength.level(2)) {
    if (rec.birth != ev.interval->birth || rec.death != ev.interval->death || rec.factors != ev.factor_bars) continue;
    for (std::size_t id : a.barcode.ids_of_dim(2))
      if (a.barcode.bars[id].birth_ordinal == rec.birth_ordinal) return id;
  }
  return std::nullopt;
}

Outcome ac3() {
  int hits = 0;
  std::string per;
  for (std::uint64_t s = g_seed; s < g_seed + 3; ++s) {
    const auto a = checked_analyze(wedge_sum_dataset({{Kind::torus, 1400, 1.0}, {Kind::sphere, 600, 1.5}}, s), 250, s);
    const auto bar = certifying_two_bar(a);
    const auto top = a.barcode.by_persistence(2);
    std::string rank = "none";
    if (bar) rank = std::to_string(std::find(top.begin(), top.end(), *bar) - top.begin() + 1);
    const bool hit = a.evidence.verdict && bar && !top.empty() && *bar != top.front();
    hits += hit;
    per += " seed " + std::to_string(s) + ": verdict=" + std::to_string(a.evidence.verdict) + " 2-bar rank=" + rank + ";";
  }
  return {hits >= 2, std::to_string(hits) + "/3 certified by a 2-bar other than the most persistent;" + per};
}

Outcome ac4() {
  const auto angles = sample_torus_cap_removed(2000, {0.0, 1.5}, {0.0, 1.5}, g_seed);
  const auto a = checked_analyze(torus_intrinsic_metric(angles), 250, g_seed);
  const double h2 = longest(a.barcode, 2), h1 = longest(a.barcode, 1);
  return {a.evidence.verdict && h2 < 0.5 * h1, "verdict=" + std::to_string(a.evidence.verdict) + ", longest H2 " +
                                                  fmt("%.3f", h2) + " vs half longest H1 " + fmt("%.3f", 0.5 * h1)};
}

Outcome ac5() {
  const double t0 = now();
  const auto low = noise_robustness({0.05, 0.1, 0.2}, {150, 250}, 3, g_seed);
  const auto high = noise_robustness({0.3}, {150}, 3, g_seed);
  const double secs = now() - t0;
  bool pass = secs <= 45 * 60;
  std::string detail;
  for (const auto& r : low.rows) {
    pass = pass && r.cup_rate() == 1.0;
    detail += "s=" + r.params[0].second + "/L=" + r.params[1].second + ":" + fmt("%.2f", r.cup_rate()) + " ";
  }
  pass = pass && high.rows[0].cup_rate() <= 1.0 / 3.0;
  detail += "| s=0.3/L=150:" + fmt("%.2f", high.rows[0].cup_rate()) + " (limit 0.33) | " + fmt("%.0f", secs) + " s";
  return {pass, detail};
}

Outcome ac6() {
  const auto t = gridcell_sweep("gridcell-count", {10, 20, 50, 100}, {1000.0}, 3, g_seed);
  bool monotone = true;
  std::string detail;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (i && t.rows[i].cup_rate() < t.rows[i - 1].cup_rate()) monotone = false;
    detail += "N=" + t.rows[i].params[0].second + ":" + fmt("%.2f", t.rows[i].cup_rate()) + " ";
  }
  const bool top = t.rows.back().cup_rate() == 1.0;
  return {monotone && top, detail + "(non-decreasing=" + std::to_string(monotone) + ", N=100 at 1.0=" + std::to_string(top) + ")"};
}

Outcome ac7() {
  int with_products = 0;
  auto t = suites::random_oracle_equivalence(50, derive_seed(g_seed, 70), &with_products);
  const auto torus = oracle::dimension_order(7, oracle::minimal_torus());
  t.merge(suites::oracle_equivalence(torus, "minimal torus"));
  const int full = oracle::image_cuplength(torus, torus.order.size() - 1, torus.order.size() - 1, 2);
  const auto f = Filtration::from_simplices(7, torus.order);
  const auto res = suites::run_cuplength(f, 2, true);
  const int ours = cuplength_function(cuplength_diagram(res), Interval{double(f.size() - 1), double(f.size()), 0});
  return {t.mismatches == 0 && full == 2 && ours == 2,
          std::to_string(t.checked) + " interval checks, " + std::to_string(t.mismatches) + " mismatches" +
              (t.mismatches ? " (first: " + t.first + ")" : "") + "; " + std::to_string(with_products) +
              "/50 complexes with products; minimal torus cup-length oracle=" + std::to_string(full) +
              " ours=" + std::to_string(ours)};
}

Outcome ac8() {
  if (g_checked_filtrations == 0) {
    checked_analyze(torus_intrinsic_metric(sample_torus(1000, g_seed)), 150, g_seed);
    checked_analyze(wedge_s1_s2_s1(g_seed), 150, g_seed);
  }
  const auto torus = checked_analyze(torus_intrinsic_metric(sample_torus(1000, g_seed)), 150, g_seed);
  const auto mono = suites::containment_monotone(cuplength_diagram(torus.cuplength), 0.0, torus.filtration->threshold(), 1000,
                                                 derive_seed(g_seed, 80));
  const auto member = suites::membership_agreement(1000, derive_seed(g_seed, 81));
  const bool pass = !g_delta.mismatches && !g_cocycles.mismatches && !mono.mismatches && !member.mismatches;
  auto part = [](const char* name, const suites::Tally& t) {
    return std::string(name) + " " + std::to_string(t.mismatches) + "/" + std::to_string(t.checked);
  };
  return {pass, std::to_string(g_checked_filtrations) + " filtrations; mismatches: " + part("dd=0", g_delta) + ", " +
                    part("cocycles", g_cocycles) + ", " + part("containment", mono) + ", " + part("membership", member)};
}

Outcome ac9() {
  auto once = [] {
    const auto a = analyze(torus_intrinsic_metric(sample_torus(1000, g_seed)), AnalysisOptions{150, g_seed});
    std::ostringstream tsv;
    write_rate_tsv(tsv, noise_robustness({0.1}, {150}, 1, g_seed));
    std::ostringstream grid;
    GridCellTrial g;
    g.cells = 20;
    write_points_csv(grid, simulate_gridcells(g, g_seed));
    return result_json(a.cuplength, a.evidence) + barcode_json(*a.filtration, a.barcode) + tsv.str() + grid.str();
  };
  const auto first = once(), second = once();
  return {first == second, "result+barcode JSON, rate TSV and grid-cell CSV: " + std::to_string(first.size()) + " bytes, " +
                               (first == second ? "identical" : "different") + " across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::vector<std::string> only;
  app.add_option("--only", only, "criteria to run, e.g. AC1,AC7")->delimiter(',');
  app.add_option("--seed", g_seed, "base seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 torus vs S1vS2vS1", ac1},         {"AC2 wedge stability", ac2},   {"AC3 second 2-bar", ac3},
      {"AC4 cap removed", ac4},               {"AC5 noise robustness", ac5},  {"AC6 grid-cell trend", ac6},
      {"AC7 oracle equivalence", ac7},        {"AC8 invariant suites", ac8},  {"AC9 determinism", ac9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const std::string id = name.substr(0, name.find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
