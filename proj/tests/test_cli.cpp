#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rparallel/io.hpp"
#include "rparallel/oracle.hpp"

using namespace rparallel;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "rparallel_cli_test";

struct Result {
  int status;
  std::string err;
};

// Runs the CLI inside the work directory, capturing stderr.
Result run(const std::string& args) {
  const fs::path err = kWork / "stderr.txt";
  std::string cmd = "cd '" + kWork.string() + "' && '" RPARALLEL_CLI "' " + args + " > stdout.txt 2> '" + err.string() + "'";
  int raw = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream s;
  s << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, s.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Workspace, "synth, measures and oracle agree; reruns are byte-identical") {
  REQUIRE(run("synth --kind plane-ball --offset 0 --out scenes/tangent.json").status == 0);
  REQUIRE(fs::exists(kWork / "scenes" / "tangent.json"));
  const std::string scene_before = slurp(kWork / "scenes" / "tangent.json");

  const std::string args = "measures --scene scenes/tangent.json --r-max 400 --r-steps 40 --grid-spacing 4 ";
  REQUIRE(run(args + "--out m1").status == 0);
  REQUIRE(run(args + "--out m2").status == 0);
  const auto files = std::vector<fs::path>(fs::directory_iterator(kWork / "m1"), fs::directory_iterator());
  REQUIRE(files.size() == 1);
  const auto name = files[0].filename();
  CHECK(slurp(kWork / "m1" / name) == slurp(kWork / "m2" / name));
  CHECK(slurp(kWork / "scenes" / "tangent.json") == scene_before);  // inputs untouched

  REQUIRE(run("oracle --dim 3 --radius 100 --r-max 400 --r-steps 40 --out oracle.csv").status == 0);
  auto measured = io::read_csv_file(kWork / "m1" / name);
  auto oracle = io::read_csv_file(kWork / "oracle.csv");
  CHECK(measured.header == io::kMeasureColumns);
  CHECK(oracle.header == io::kMeasureColumns);
  auto r = measured.numbers("r");
  CHECK(r == oracle.numbers("r"));
  for (const std::string col : {"mu00", "mu01", "mu10", "mu11"}) {
    auto m = measured.numbers(col), o = oracle.numbers(col);
    const double tol = col == "mu11" ? 0.05 : 0.02;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] < 5.0 || r[k] > 195.0) continue;
      CHECK(std::abs(m[k] / o[k] - 1.0) <= tol);
    }
  }
  CHECK(std::isinf(oracle.numbers("N0")[0]));
  CHECK(oracle.numbers("nu00")[3] == 0.0);

  // Plots: oracle and measured overlaid.
  REQUIRE(run("plot oracle.csv m1/" + name.string() + " --columns mu00 --out overlay.svg").status == 0);
  auto svg = slurp(kWork / "overlay.svg");
  CHECK(svg.find("data-series=\"oracle:mu00\"") != std::string::npos);
}

TEST_CASE_FIXTURE(Workspace, "summary command writes every schema file") {
  REQUIRE(run("synth --kind sphere-process --placement clustered --window 300 --r-max 40 --reference-count 3 "
              "--observed-count 30 --reference-radius 10 --observed-radius 8 --cluster-scale 15 --subdivisions 1 "
              "--seed 5 --out proc.json")
              .status == 0);
  auto res = run("summary --scene proc.json --r-max 40 --r-steps 8 --grid-spacing 4 --pairs 00,11 --point-cross-k --out sum");
  REQUIRE(res.status == 0);
  CHECK(res.err.empty());
  for (const std::string f : {"K_00.csv", "L_00.csv", "K_11.csv", "L_11.csv", "pointK.csv"}) {
    REQUIRE(fs::exists(kWork / "sum" / f));
    auto t = io::read_csv_file(kWork / "sum" / f);
    CHECK(t.header == io::kSummaryColumns);
    CHECK(t.rows.size() == 8);
  }
  CHECK_FALSE(fs::exists(kWork / "sum" / "K_01.csv"));
  CHECK(io::read_csv_file(kWork / "sum" / "L_00.csv").rows[0][2] == "L");
}

TEST_CASE_FIXTURE(Workspace, "errors go to stderr with a nonzero status") {
  REQUIRE(run("synth --out s.json").status == 0);
  auto empty = run("measures --scene s.json --r-max 10 --pairs '' --out m");
  CHECK(empty.status != 0);
  CHECK(empty.err.find("pair") != std::string::npos);
  CHECK(run("measures --scene s.json --r-max 10 --pairs 02 --out m").status != 0);
  CHECK(run("measures --scene missing.json --r-max 10 --out m").status != 0);
  CHECK(run("measures --scene s.json --r-max 10 --grid-spacing 2 --grid-auto --out m").status != 0);
  CHECK(run("summary --scene s.json --r-max 1000 --out m").status == 1);  // beyond the extended window
  CHECK_FALSE(fs::exists(kWork / "m" / "K_00.csv"));
  CHECK(run("frobnicate").status != 0);
  CHECK(run("").status != 0);

  std::ofstream(kWork / "bad.csv") << "x,y\n1,2\n";
  auto plot = run("plot bad.csv --out p.svg");
  CHECK(plot.status == 1);
  CHECK(plot.err.find("'r'") != std::string::npos);
  CHECK_FALSE(fs::exists(kWork / "p.svg"));
}
