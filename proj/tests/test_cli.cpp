#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("cuplen_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CUPLEN_BIN) + " " + args + " > " + (workdir() / "stdout.txt").string() + " 2> " +
                          (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string dir(const std::string& name) { return (workdir() / name).string(); }

// Simulated torus and wedge, computed once and shared.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ASSERT_EQ(run("simulate torus --seed 1 --output " + dir("torus")), 0);
    ASSERT_EQ(run("compute --input " + dir("torus") + "/distances.csv --format lower-distance --landmarks 150 --seed 1 --output " +
                  dir("torus_out")),
              0);
    ASSERT_EQ(run("simulate wedge --seed 1 --output " + dir("wedge")), 0);
    ASSERT_EQ(run("compute --input " + dir("wedge") + "/distances.csv --format lower-distance --landmarks 150 --seed 1 --output " +
                  dir("wedge_out")),
              0);
  }
};

}  // namespace

TEST_F(CliPipeline, TorusIsToroidal) {
  const auto res = nlohmann::json::parse(slurp(workdir() / "torus_out" / "result.json"));
  EXPECT_TRUE(res["toroidal"]["verdict"].get<bool>());
  EXPECT_EQ(res["max_level"].get<int>(), 2);
  EXPECT_TRUE(fs::exists(workdir() / "torus_out" / "barcode.json"));
  EXPECT_TRUE(fs::exists(workdir() / "torus_out" / "diagram.tsv"));
}

TEST_F(CliPipeline, WedgeIsNotToroidal) {
  const auto res = nlohmann::json::parse(slurp(workdir() / "wedge_out" / "result.json"));
  EXPECT_FALSE(res["toroidal"]["verdict"].get<bool>());
  EXPECT_TRUE(res["toroidal"]["interval"].is_null());
}

TEST_F(CliPipeline, ComputePrintsCoverRadius) {
  ASSERT_EQ(run("compute --input " + dir("torus") + "/distances.csv --format lower-distance --landmarks 60 --output " +
                dir("torus_small")),
            0);
  const auto out = slurp(workdir() / "stdout.txt");
  EXPECT_NE(out.find("cover_radius"), std::string::npos);
  EXPECT_NE(out.find("cover_radius/2"), std::string::npos);
}

TEST_F(CliPipeline, DiagramOfTorus) {
  ASSERT_EQ(run("diagram --input " + dir("torus_out") + " --output " + dir("torus_plot")), 0);
  const auto svg = slurp(workdir() / "torus_plot" / "diagram.svg");
  EXPECT_EQ(count(svg, "class=\"cup-level-2\""), 1u);
  const auto tsv = slurp(workdir() / "torus_plot" / "diagram_plot.tsv");
  const auto bars = nlohmann::json::parse(slurp(workdir() / "torus_out" / "barcode.json")).size();
  EXPECT_EQ(count(tsv, "\n"), 1 + bars + 1);  // header, bars, one interval
}

TEST_F(CliPipeline, DiagramOfEmptyResult) {
  fs::create_directories(workdir() / "empty");
  std::ofstream(workdir() / "empty" / "barcode.json") << "[]";
  std::ofstream(workdir() / "empty" / "result.json")
      << R"({"levels": [], "max_level": 0, "truncated": false, "toroidal": {"verdict": false, "interval": null, "factors": [], "two_bar_independence": false}})";
  ASSERT_EQ(run("diagram --input " + dir("empty") + " --output " + dir("empty_plot")), 0);
  const auto svg = slurp(workdir() / "empty_plot" / "diagram.svg");
  EXPECT_EQ(count(svg, "class=\"axis\""), 4u);
  EXPECT_EQ(count(svg, "<circle"), 0u);
  EXPECT_EQ(count(svg, "cup-"), 0u);
  EXPECT_EQ(count(slurp(workdir() / "empty_plot" / "diagram_plot.tsv"), "\n"), 1u);
}

TEST_F(CliPipeline, IngestReproducesCompute) {
  ASSERT_EQ(run("ingest --input " + dir("torus") + "/distances.csv --format lower-distance --landmarks 150 --seed 1 --barcode " +
                dir("torus_out") + "/barcode.json --output " + dir("torus_ingest")),
            0)
      << slurp(workdir() / "stderr.txt");
  EXPECT_EQ(slurp(workdir() / "torus_ingest" / "result.json"), slurp(workdir() / "torus_out" / "result.json"));
  EXPECT_EQ(slurp(workdir() / "torus_ingest" / "barcode.json"), slurp(workdir() / "torus_out" / "barcode.json"));
}

TEST_F(CliPipeline, IngestRejectsBrokenCocycle) {
  auto bars = nlohmann::json::parse(slurp(workdir() / "torus_out" / "barcode.json"));
  for (auto& b : bars)
    if (b["dim"] == 1 && b["cocycle"].size() > 1) {
      b["cocycle"].erase(b["cocycle"].begin());
      break;
    }
  std::ofstream(workdir() / "broken.json") << bars.dump();
  EXPECT_EQ(run("ingest --input " + dir("torus") + "/distances.csv --format lower-distance --landmarks 150 --seed 1 --barcode " +
                dir("broken.json") + " --output " + dir("broken_out")),
            2);
}

TEST_F(CliPipeline, ComputeIsDeterministic) {
  ASSERT_EQ(run("compute --input " + dir("torus") + "/distances.csv --format lower-distance --landmarks 150 --seed 1 --output " +
                dir("torus_again")),
            0);
  EXPECT_EQ(slurp(workdir() / "torus_again" / "result.json"), slurp(workdir() / "torus_out" / "result.json"));
  EXPECT_EQ(slurp(workdir() / "torus_again" / "diagram.tsv"), slurp(workdir() / "torus_out" / "diagram.tsv"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("compute --input " + dir("does_not_exist.csv") + " --output " + dir("x")), 2);
  EXPECT_EQ(run("simulate klein --output " + dir("x")), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("compute --output " + dir("x")), 1);  // --input missing
  EXPECT_EQ(run("experiment noise-robustness --trials 0 --output " + dir("x")), 1);
  std::ofstream(workdir() / "pts.csv") << "0,0\n1,0\n0,1\n";
  EXPECT_EQ(run("compute --input " + dir("pts.csv") + " --metric precomputed --output " + dir("x")), 1);
  EXPECT_EQ(run("compute --input " + dir("pts.csv") + " --maxdim 7 --output " + dir("x")), 1);
  EXPECT_EQ(run("compute --input " + dir("pts.csv") + " --threshold -1 --landmarks 0 --output " + dir("x")), 1);
  EXPECT_EQ(run("compute --input " + dir("pts.csv") + " --landmarks 10 --output " + dir("x")), 2);
  std::ofstream(workdir() / "junk.csv") << "0,0\n1,zz\n";
  EXPECT_EQ(run("compute --input " + dir("junk.csv") + " --landmarks 0 --output " + dir("x")), 2);
  std::ofstream(workdir() / "junk.json") << "{not json";
  EXPECT_EQ(run("diagram --barcode " + dir("junk.json") + " --result " + dir("junk.json") + " --output " + dir("x")), 2);
  EXPECT_EQ(run("compute --input " + dir("pts.csv") + " --landmarks 0 --output " + dir("tiny")), 0);
}

TEST(Cli, SimulateEmbeddedTorus) {
  ASSERT_EQ(run("simulate torus --param mode=embedded --param n=2000 --param R=5 --param r=2 --seed 3 --output " + dir("emb")), 0);
  const auto csv = slurp(workdir() / "emb" / "points.csv");
  EXPECT_EQ(count(csv, "\n"), 2000u);
  EXPECT_EQ(count(csv.substr(0, csv.find('\n')), ","), 2u);
}

TEST(Cli, SimulateGridCells) {
  ASSERT_EQ(run("simulate gridcells --param cells=20 --param duration=1000 --seed 2 --output " + dir("grid")), 0);
  const auto csv = slurp(workdir() / "grid" / "points.csv");
  EXPECT_EQ(count(csv, "\n"), 1000u);
  EXPECT_EQ(count(csv.substr(0, csv.find('\n')), ","), 19u);
}

TEST(Cli, ManifestReproducesDataset) {
  ASSERT_EQ(run("simulate cap --param n=300 --seed 4 --output " + dir("cap1")), 0);
  ASSERT_EQ(run("simulate --config " + dir("cap1") + "/manifest.txt --output " + dir("cap2")), 0);
  EXPECT_EQ(slurp(workdir() / "cap1" / "distances.csv"), slurp(workdir() / "cap2" / "distances.csv"));
  EXPECT_EQ(slurp(workdir() / "cap1" / "manifest.txt"), slurp(workdir() / "cap2" / "manifest.txt"));
  EXPECT_EQ(run("simulate cap --param bogus=1 --output " + dir("cap3")), 1);
}

TEST(Cli, ExperimentIsDeterministic) {
  const std::string args = "experiment noise-robustness --sigmas 0.1 --landmarks 60 --trials 1 --seed 5 --output ";
  ASSERT_EQ(run(args + dir("exp1")), 0);
  ASSERT_EQ(run(args + dir("exp2")), 0);
  const auto a = slurp(workdir() / "exp1" / "noise-robustness.tsv");
  EXPECT_EQ(a, slurp(workdir() / "exp2" / "noise-robustness.tsv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "sigma\tlandmarks\ttrials\tcup_rate\theuristic_rate");
  EXPECT_EQ(count(a, "\n"), 2u);
}
