// cuplen: persistent cup-length from the command line.
//
//   compute     point cloud or distance matrix -> barcode.json, result.json, diagram.tsv
//   simulate    synthetic dataset + manifest.txt
//   experiment  detection-rate tables
//   diagram     barcode.json + result.json -> diagram.svg, diagram_plot.tsv
//   ingest      externally computed bars (with cocycles) -> result.json
//
// Exit codes: 1 usage, 2 data, 3 resource.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cuplen/cuplen.hpp"

namespace fs = std::filesystem;
using namespace cuplen;

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string format = "points";
  std::string metric;  // defaults from format
  std::size_t landmarks = 150;
  std::uint64_t seed = 0;
  int maxdim = 2;
  std::string threshold = "auto";
  double min_persistence = 0.0;
  int k = 2;
  std::string output = ".";
};

void add_run_options(CLI::App* cmd, RunConfig& c, std::size_t default_landmarks) {
  c.landmarks = default_landmarks;
  cmd->add_option("--input", c.input, "input CSV")->required();
  cmd->add_option("--format", c.format, "points | lower-distance")->check(CLI::IsMember({"points", "lower-distance"}));
  cmd->add_option("--metric", c.metric, "euclidean | precomputed")->check(CLI::IsMember({"euclidean", "precomputed"}));
  cmd->add_option("--landmarks", c.landmarks, "maxmin landmarks, 0 keeps every point")->capture_default_str();
  cmd->add_option("--seed", c.seed, "landmark seed")->capture_default_str();
  cmd->add_option("--maxdim", c.maxdim, "top cohomology dimension")->check(CLI::Range(1, 3))->capture_default_str();
  cmd->add_option("--threshold", c.threshold, "Rips threshold or auto (enclosing radius)")->capture_default_str();
  cmd->add_option("--min-persistence", c.min_persistence, "drop factor bars shorter than this")->capture_default_str();
  cmd->add_option("--k", c.k, "highest product level")->check(CLI::Range(2, 16))->capture_default_str();
  cmd->add_option("--output", c.output, "output directory")->capture_default_str();
}

std::optional<double> parse_threshold(const std::string& s) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  throw usage_error("--threshold must be 'auto' or a positive number, got '" + s + "'");
}

AnalysisOptions analysis_options(const RunConfig& c) {
  if (c.landmarks == 1) throw usage_error("--landmarks must be 0 or at least 2");
  if (!(c.min_persistence >= 0.0)) throw usage_error("--min-persistence must be >= 0");
  AnalysisOptions o;
  o.landmarks = c.landmarks;
  o.seed = c.seed;
  o.maxdim = c.maxdim;
  o.threshold = parse_threshold(c.threshold);
  o.min_persistence = c.min_persistence;
  o.k = c.k;
  return o;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write '" + path.string() + "'");
  return out;
}

fs::path output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw parse_error("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

// Landmark distances for a run config; checks that --format and --metric agree.
LandmarkMetric load_landmarks(const RunConfig& c) {
  const std::string metric = c.metric.empty() ? (c.format == "points" ? "euclidean" : "precomputed") : c.metric;
  if ((c.format == "points") != (metric == "euclidean"))
    throw usage_error("--format " + c.format + " cannot be combined with --metric " + metric);
  auto in = open_in(c.input);
  if (c.format == "points") return landmark_metric(read_points_csv(in), c.landmarks, c.seed);
  return landmark_metric(read_lower_distance_csv(in), c.landmarks, c.seed);
}

void write_persistence_tsv(std::ostream& out, const AnnotatedBarcode& bc) {
  out << "dim\tbirth\tdeath\n";
  for (const auto& b : bc.bars) out << b.dim << '\t' << format_double(b.birth) << '\t' << format_double(b.death) << '\n';
}

void print_summary(const LandmarkSelection& sel, const Filtration& f, const AnnotatedBarcode& bc, const CupLengthResult& r,
                   const ToroidalEvidence& ev) {
  std::printf("landmarks: %zu, simplices: %zu, bars: %zu\n", sel.indices.size(), f.size(), bc.size());
  std::printf("cover_radius: %s\n", format_double(sel.cover_radius).c_str());
  std::printf("stability: barcode and cup-length diagram of the full data lie within cover_radius/2 = %s\n",
              format_double(sel.cover_radius / 2).c_str());
  std::printf("max_level: %d%s\n", r.max_level, r.truncated ? " (truncated: k exceeds maxdim)" : "");
  if (ev.interval)
    std::printf("toroidal: true, interval [%s, %s), factors %zu %zu\n", format_double(ev.interval->birth).c_str(),
                format_double(ev.interval->death).c_str(), ev.factor_bars[0], ev.factor_bars[1]);
  else
    std::printf("toroidal: false\n");
}

int cmd_compute(const RunConfig& c) {
  const auto opt = analysis_options(c);
  auto lm = load_landmarks(c);
  Analysis a;
  a.landmarks = std::move(lm.selection);
  run_on_landmarks(a, std::move(lm.distances), opt);
  const auto dir = output_dir(c.output);
  {
    auto out = open_out(dir / "barcode.json");
    write_barcode_json(out, *a.filtration, a.barcode);
  }
  {
    auto out = open_out(dir / "result.json");
    write_result_json(out, a.cuplength, a.evidence);
  }
  {
    auto out = open_out(dir / "diagram.tsv");
    write_persistence_tsv(out, a.barcode);
  }
  print_summary(a.landmarks, *a.filtration, a.barcode, a.cuplength, a.evidence);
  return 0;
}

int cmd_ingest(const RunConfig& c, const std::string& barcode_path) {
  const auto opt = analysis_options(c);
  auto lm = load_landmarks(c);
  const auto f = Filtration::rips(std::move(lm.distances), opt.maxdim, opt.threshold);
  auto in = open_in(barcode_path);
  const auto bc = ingest_barcode_json(f, in);
  const auto r = persistent_cuplength(f, bc, CupLengthOptions{opt.k, opt.min_persistence, {}});
  const auto ev = detect_toroidal(r);
  const auto dir = output_dir(c.output);
  {
    auto out = open_out(dir / "barcode.json");
    write_barcode_json(out, f, bc);
  }
  {
    auto out = open_out(dir / "result.json");
    write_result_json(out, r, ev);
  }
  print_summary(lm.selection, f, bc, r, ev);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

using Params = std::map<std::string, std::string>;

void read_config(const std::string& path, Params& p) {
  auto in = open_in(path);
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw parse_error(path + ":" + std::to_string(no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    p[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
}

class ParamReader {
 public:
  explicit ParamReader(Params p) : p_(std::move(p)) {}

  double num(const std::string& key, double def) {
    const auto s = take(key, format_double(def));
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw usage_error("parameter " + key + " must be a number, got '" + s + "'");
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const double v = num(key, static_cast<double>(def));
    if (v < 0 || v != std::floor(v)) throw usage_error("parameter " + key + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& def) { return take(key, def); }

  // Every parameter that was read, with its effective value.
  const Params& used() const { return used_; }

  void check_consumed() const {
    for (const auto& [k, v] : p_)
      if (!used_.count(k)) throw usage_error("unknown parameter '" + k + "'");
  }

 private:
  std::string take(const std::string& key, const std::string& def) {
    auto it = p_.find(key);
    const std::string v = it == p_.end() ? def : it->second;
    used_[key] = v;
    return v;
  }

  Params p_;
  Params used_;
};

std::vector<WedgePiece> parse_wedge(const std::string& list) {
  std::vector<WedgePiece> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    std::string kind, n, radius = "1";
    std::getline(is, kind, ':');
    std::getline(is, n, ':');
    std::getline(is, radius, ':');
    WedgePiece piece;
    if (kind == "circle")
      piece.kind = WedgePiece::Kind::circle;
    else if (kind == "sphere")
      piece.kind = WedgePiece::Kind::sphere;
    else if (kind == "torus")
      piece.kind = WedgePiece::Kind::torus;
    else
      throw usage_error("wedge component '" + item + "': kind must be circle, sphere or torus");
    try {
      piece.n = std::stoul(n);
      piece.radius = std::stod(radius);
    } catch (const std::exception&) {
      throw usage_error("wedge component '" + item + "': expected kind:n[:radius]");
    }
    out.push_back(piece);
  }
  return out;
}

int cmd_simulate(std::string kind, const std::string& config, const std::vector<std::string>& overrides,
                 std::optional<std::uint64_t> seed_flag, const std::string& output) {
  Params raw;
  if (!config.empty()) read_config(config, raw);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw usage_error("--param expects key=value, got '" + kv + "'");
    raw[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (kind.empty()) kind = raw.count("kind") ? raw["kind"] : "";
  raw.erase("kind");
  if (kind.empty()) throw usage_error("simulate: no dataset kind given");
  std::uint64_t seed = 0;
  if (raw.count("seed")) {
    try {
      seed = std::stoull(raw["seed"]);
    } catch (const std::exception&) {
      throw usage_error("seed must be a non-negative integer");
    }
    raw.erase("seed");
  }
  if (seed_flag) seed = *seed_flag;

  ParamReader p(raw);
  std::optional<PointCloud> points;
  std::optional<DistanceMatrix> distances;
  if (kind == "torus") {
    const std::size_t n = p.count("n", 1000);
    const std::string mode = p.text("mode", "intrinsic");
    if (mode == "intrinsic") {
      distances = torus_intrinsic_metric(sample_torus(n, seed));
    } else if (mode == "embedded") {
      const double R = p.num("R", 5), r = p.num("r", 2), sigma = p.num("sigma", 0);
      points = add_gaussian_noise(sample_torus_embedded(n, R, r, seed), sigma, derive_seed(seed, 1));
    } else {
      throw usage_error("torus mode must be intrinsic or embedded");
    }
  } else if (kind == "wedge") {
    distances = wedge_sum_dataset(parse_wedge(p.text("components", "circle:400:1,sphere:1200:1,circle:400:1")), seed);
  } else if (kind == "cap") {
    const std::size_t n = p.count("n", 2000);
    const AngleRange theta{p.num("theta_lo", 0), p.num("theta_hi", 1.5)};
    const AngleRange phi{p.num("phi_lo", 0), p.num("phi_hi", 1.5)};
    distances = torus_intrinsic_metric(sample_torus_cap_removed(n, theta, phi, seed));
  } else if (kind == "deformed") {
    const std::size_t n = p.count("n", 2000);
    const double R = p.num("R", 5), r = p.num("r", 2);
    const Bump bump{p.num("center", 0), p.num("width", 1), p.num("amplitude", 1.5)};
    points = deform_torus(sample_torus_area(n, R, r, seed), bump, R, r);
  } else if (kind == "gridcells") {
    GridCellTrial g;
    g.cells = p.count("cells", g.cells);
    g.duration = p.num("duration", g.duration);
    g.dt = p.num("dt", g.dt);
    g.scale = p.num("scale", g.scale);
    g.orientation = p.num("orientation", g.orientation);
    g.speed_cut = p.num("speed_cut", g.speed_cut);
    g.subsample = p.count("subsample", g.subsample);
    g.walk.arena = p.num("arena", g.walk.arena);
    g.walk.tau = p.num("tau", g.walk.tau);
    g.walk.speed_scale = p.num("speed_scale", g.walk.speed_scale);
    points = simulate_gridcells(g, seed);
  } else {
    throw usage_error("unknown dataset kind '" + kind + "' (torus, wedge, cap, deformed, gridcells)");
  }
  p.check_consumed();

  const auto dir = output_dir(output);
  const std::string file = points ? "points.csv" : "distances.csv";
  {
    auto out = open_out(dir / file);
    if (points)
      write_points_csv(out, *points);
    else
      write_lower_distance_csv(out, *distances);
  }
  auto man = open_out(dir / "manifest.txt");
  man << "# cuplen simulate; rerun with: cuplen simulate --config manifest.txt\n";
  man << "# data=" << file << " format=" << (points ? "points" : "lower-distance") << "\n";
  man << "kind=" << kind << "\nseed=" << seed << "\n";
  for (const auto& [k, v] : p.used()) man << k << "=" << v << "\n";
  std::printf("wrote %s (%zu samples)\n", (dir / file).string().c_str(), points ? points->size() : distances->size());
  return 0;
}

// ---------------------------------------------------------------------------
// experiment

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw usage_error(std::string(what) + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw usage_error(std::string(what) + ": empty list");
  return out;
}

std::size_t thread_count() {
  const char* env = std::getenv("CUPLEN_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw usage_error("CUPLEN_THREADS must be a positive integer");
  return static_cast<std::size_t>(v);
}

struct ExperimentArgs {
  std::string name;
  std::string sigmas = "0.05,0.1,0.2,0.25,0.3";
  std::string landmarks = "150,200,250";
  std::string cells = "10,20,50,100";
  std::string durations = "100,250,500,1000";
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  std::string output = ".";
};

int cmd_experiment(const ExperimentArgs& a) {
  if (a.trials < 1) throw usage_error("--trials must be at least 1");
  const std::size_t threads = thread_count();
  RateTable table;
  if (a.name == "noise-robustness") {
    table = noise_robustness(parse_list<double>(a.sigmas, "--sigmas"), parse_list<std::size_t>(a.landmarks, "--landmarks"),
                             a.trials, a.seed, threads);
  } else if (a.name == "gridcell-count") {
    GridCellTrial base;
    base.landmarks = parse_list<std::size_t>(a.landmarks, "--landmarks").front();
    table = gridcell_sweep(a.name, parse_list<std::size_t>(a.cells, "--cells"), {1000.0}, a.trials, a.seed, threads, base);
  } else if (a.name == "gridcell-duration") {
    GridCellTrial base;
    base.landmarks = parse_list<std::size_t>(a.landmarks, "--landmarks").front();
    table = gridcell_sweep(a.name, parse_list<std::size_t>(a.cells, "--cells"), parse_list<double>(a.durations, "--durations"),
                           a.trials, a.seed, threads, base);
  } else {
    throw usage_error("unknown experiment '" + a.name + "'");
  }
  const auto dir = output_dir(a.output);
  {
    auto out = open_out(dir / (a.name + ".tsv"));
    write_rate_tsv(out, table);
  }
  auto man = open_out(dir / (a.name + "_manifest.txt"));
  man << "experiment=" << a.name << "\nseed=" << a.seed << "\ntrials=" << a.trials << "\n";
  if (a.name == "noise-robustness")
    man << "sigmas=" << a.sigmas << "\nlandmarks=" << a.landmarks << "\n";
  else
    man << "cells=" << a.cells << "\nlandmarks=" << a.landmarks << "\n"
        << "durations=" << (a.name == "gridcell-count" ? "1000" : a.durations) << "\n";
  write_rate_tsv(std::cout, table);
  return 0;
}

int cmd_diagram(const std::string& input, std::string barcode, std::string result, const std::string& output) {
  if (barcode.empty()) barcode = (fs::path(input) / "barcode.json").string();
  if (result.empty()) result = (fs::path(input) / "result.json").string();
  auto bin = open_in(barcode);
  auto rin = open_in(result);
  const auto pd = read_plot_data(bin, rin);
  const auto dir = output_dir(output);
  {
    auto out = open_out(dir / "diagram.svg");
    write_plot_svg(out, pd);
  }
  auto out = open_out(dir / "diagram_plot.tsv");
  write_plot_tsv(out, pd);
  std::printf("wrote %s (%zu bars, %zu intervals)\n", (dir / "diagram.svg").string().c_str(), pd.bars.size(),
              pd.intervals.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persistent cup-length of point clouds and distance matrices"};
  app.require_subcommand(1);

  RunConfig compute_cfg;
  auto* compute = app.add_subcommand("compute", "barcode, cup-length and toroidal verdict for one dataset");
  add_run_options(compute, compute_cfg, 150);

  RunConfig ingest_cfg;
  std::string ingest_bars;
  auto* ingest = app.add_subcommand("ingest", "cup-length from an external barcode with cocycles");
  add_run_options(ingest, ingest_cfg, 0);
  ingest->add_option("--barcode", ingest_bars, "bars JSON: [{dim, birth, death, cocycle}]")->required();

  std::string sim_kind, sim_config, sim_output = ".";
  std::vector<std::string> sim_params;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset and its manifest");
  simulate->add_option("kind", sim_kind, "torus | wedge | cap | deformed | gridcells");
  simulate->add_option("--config", sim_config, "key=value file (a manifest works)");
  simulate->add_option("--param", sim_params, "key=value override, repeatable");
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "generator seed");
  simulate->add_option("--output", sim_output, "output directory");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "detection-rate table");
  experiment->add_option("name", exp.name, "noise-robustness | gridcell-count | gridcell-duration")->required();
  experiment->add_option("--sigmas", exp.sigmas, "noise levels")->capture_default_str();
  experiment->add_option("--landmarks", exp.landmarks, "landmark counts (grid-cell runs use the first)")->capture_default_str();
  experiment->add_option("--cells", exp.cells, "grid-cell counts")->capture_default_str();
  experiment->add_option("--durations", exp.durations, "recording durations in seconds")->capture_default_str();
  experiment->add_option("--trials", exp.trials, "trials per cell")->capture_default_str();
  experiment->add_option("--seed", exp.seed, "base seed")->capture_default_str();
  experiment->add_option("--output", exp.output, "output directory")->capture_default_str();

  std::string dg_input = ".", dg_barcode, dg_result, dg_output = ".";
  auto* diagram = app.add_subcommand("diagram", "SVG and TSV plot of a computed result");
  diagram->add_option("--input", dg_input, "directory holding barcode.json and result.json");
  diagram->add_option("--barcode", dg_barcode, "barcode JSON");
  diagram->add_option("--result", dg_result, "result JSON");
  diagram->add_option("--output", dg_output, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*compute) return cmd_compute(compute_cfg);
    if (*ingest) return cmd_ingest(ingest_cfg, ingest_bars);
    if (*simulate)
      return cmd_simulate(sim_kind, sim_config, sim_params,
                          sim_seed_opt->count() ? std::optional<std::uint64_t>(sim_seed) : std::nullopt, sim_output);
    if (*experiment) return cmd_experiment(exp);
    if (*diagram) return cmd_diagram(dg_input, dg_barcode, dg_result, dg_output);
  } catch (const usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const parse_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const validation_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const resource_error& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 3;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "resource error: out of memory\n");
    return 3;
  }
  return 1;
}
