// rparallel: command-line front end.
//
//   rparallel synth    --kind plane-ball --out scene.json
//   rparallel measures --scene scene.json --r-max 400 --r-steps 100 --out measures/
//   rparallel summary  --scene scene.json --r-max 200 --r-steps 40 --out summary/
//   rparallel oracle   --dim 3 --radius 100 --r-max 400 --r-steps 100 --out oracle.csv
//   rparallel plot     a.csv b.csv --columns mu00 --out plot.svg

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "rparallel/error.hpp"
#include "rparallel/io.hpp"
#include "rparallel/oracle.hpp"
#include "rparallel/plot.hpp"
#include "rparallel/summary.hpp"
#include "rparallel/synth.hpp"

namespace fs = std::filesystem;
using namespace rparallel;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::array<bool, 4> parse_pairs(const std::string& text) {
  std::array<bool, 4> selected{false, false, false, false};
  if (text == "all") return {true, true, true, true};
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (item.empty()) continue;
    try {
      selected[MeasurePair::parse(item).slot()] = true;
    } catch (const std::exception&) {
      throw UsageError("--pairs: '" + item + "' is not one of 00, 01, 10, 11");
    }
  }
  if (std::none_of(selected.begin(), selected.end(), [](bool b) { return b; })) {
    throw UsageError("--pairs selects no measure pair");
  }
  return selected;
}

struct GridOptions {
  double spacing = 0.0;
  bool automatic = false;
};

void add_grid_options(CLI::App* cmd, GridOptions& g) {
  auto* spacing = cmd->add_option("--grid-spacing", g.spacing, "distance grid spacing")->check(CLI::PositiveNumber);
  auto* automatic = cmd->add_flag("--grid-auto", g.automatic, "choose the grid spacing from the smallest feature (default)");
  spacing->excludes(automatic);
}

// ---------------------------------------------------------------------------

struct MeasuresArgs {
  std::string scene, out, pairs = "all", reference;
  double r_max = 0.0;
  std::size_t r_steps = 100;
  GridOptions grid;
  bool exact = false;
};

void run_measures(const MeasuresArgs& a) {
  const auto selected = parse_pairs(a.pairs);
  const GermGrainScene scene = io::parse_scene(a.scene);
  const RadiusGrid radii = RadiusGrid::uniform(a.r_max, a.r_steps);

  const ReferenceGerm* ref = nullptr;
  for (const auto& g : scene.reference()) {
    if (a.reference.empty() || g.id == a.reference) {
      if (ref) throw UsageError("scene has several reference objects; choose one with --reference");
      ref = &g;
    }
  }
  if (!ref) throw UsageError(a.reference.empty() ? "scene has no reference object" : "no reference object '" + a.reference + "'");
  if (scene.observed().empty()) throw ValidationError("scene has no observed objects");

  // The field has to cover W (for N) and every observed object (for mu).
  std::vector<SimplicialComplex> placed;
  Vec3 lo = scene.window().lower, hi = scene.window().upper;
  for (const auto& g : scene.observed()) {
    placed.push_back(g.placed());
    Box b = bounding_box(placed.back());
    for (int k = 0; k < scene.dim(); ++k) {
      lo[k] = std::min(lo[k], b.lower[k]);
      hi[k] = std::max(hi[k], b.upper[k]);
    }
  }
  const Window cover(scene.dim(), lo, hi);
  const double h = a.grid.spacing > 0.0 ? a.grid.spacing : auto_spacing(feature_scale(scene), cover);
  const GridSpec grid = GridSpec::aligned(scene.window(), cover, h);
  const ReferenceDistance exact(ref->placed(), ref->fill);
  const DistanceField field = build_distance_field(exact, grid);

  fs::create_directories(a.out);
  for (std::size_t i = 0; i < placed.size(); ++i) {
    const auto d = a.exact ? vertex_distances(placed[i], exact) : vertex_distances(placed[i], field);
    const MeasureTable table = measure_table(placed[i], d, field, scene.window(), radii, selected);
    std::ostringstream csv;
    io::write_measure_csv(csv, table);
    io::write_file_atomic(fs::path(a.out) / (scene.observed()[i].id + ".csv"), csv.str());
  }
}

// ---------------------------------------------------------------------------

struct SummaryArgs {
  std::string scene, out, pairs = "all", kinds = "K,L";
  double r_max = 0.0;
  std::size_t r_steps = 50;
  GridOptions grid;
  bool exact = false;
  bool point_k = false;
};

void write_summary(const fs::path& path, const SummaryCurve& curve) {
  std::ostringstream csv;
  io::write_summary_csv(csv, curve);
  io::write_file_atomic(path, csv.str());
}

void run_summary(const SummaryArgs& a) {
  SummaryOptions options;
  options.pairs = parse_pairs(a.pairs);
  options.grid_spacing = a.grid.spacing;
  options.vertex_distance = a.exact ? VertexDistanceMode::kExact : VertexDistanceMode::kInterpolated;
  options.scene_id = fs::path(a.scene).stem().string();
  bool want_k = false, want_l = false;
  std::stringstream s(a.kinds);
  for (std::string item; std::getline(s, item, ',');) {
    if (item == "K") {
      want_k = true;
    } else if (item == "L") {
      want_l = true;
    } else if (!item.empty()) {
      throw UsageError("--kinds: '" + item + "' is not K or L");
    }
  }
  if (!want_k && !want_l && !a.point_k) throw UsageError("nothing to compute: --kinds is empty");

  const GermGrainScene scene = io::parse_scene(a.scene);
  const RadiusGrid radii = RadiusGrid::uniform(a.r_max, a.r_steps);
  fs::create_directories(a.out);
  if (want_k || want_l) {
    const SceneSummary summary = summarize(scene, radii, options);
    for (const auto& pair : kAllPairs) {
      if (!options.pairs[pair.slot()]) continue;
      if (want_k) write_summary(fs::path(a.out) / ("K_" + pair.label() + ".csv"), *summary.k[pair.slot()]);
      if (want_l) write_summary(fs::path(a.out) / ("L_" + pair.label() + ".csv"), *summary.l[pair.slot()]);
    }
  }
  if (a.point_k) {
    std::vector<Vec3> obs, ref;
    for (const auto& g : scene.observed()) obs.push_back(g.location);
    for (const auto& g : scene.reference()) ref.push_back(g.location);
    SummaryCurve curve = cross_k_points(obs, ref, radii, scene.window());
    curve.scene_id = options.scene_id;
    write_summary(fs::path(a.out) / "pointK.csv", curve);
  }
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string kind = "plane-ball", placement = "uniform", out;
  SynthSpec spec;
};

void run_synth(SynthArgs a) {
  if (a.kind == "plane-ball") {
    a.spec.kind = SynthKind::kPlaneBall;
  } else if (a.kind == "plane-cube") {
    a.spec.kind = SynthKind::kPlaneCube;
  } else if (a.kind == "sphere-process") {
    a.spec.kind = SynthKind::kSphereProcess;
  } else {
    throw UsageError("--kind must be plane-ball, plane-cube or sphere-process");
  }
  if (a.placement == "uniform") {
    a.spec.placement = Placement::kUniform;
  } else if (a.placement == "clustered") {
    a.spec.placement = Placement::kClustered;
  } else {
    throw UsageError("--placement must be uniform or clustered");
  }
  const GermGrainScene scene = generate(a.spec);
  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  io::write_scene(scene, out);
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  int dim = 3;
  double radius = 100.0, r_max = 0.0;
  std::size_t r_steps = 100;
  std::string pairs = "all", out;
};

void run_oracle(const OracleArgs& a) {
  const auto selected = parse_pairs(a.pairs);
  const TangentBallScene scene(a.dim, a.radius);
  const RadiusGrid radii = RadiusGrid::uniform(a.r_max, a.r_steps);
  MeasureTable table{radii, selected, {}, {}, {}};
  const double inf = std::numeric_limits<double>::infinity();
  table.n[0].assign(radii.size(), inf);
  table.n[1].assign(radii.size(), inf);
  for (const auto& pair : kAllPairs) {
    if (!selected[pair.slot()]) continue;
    for (double r : radii.values()) {
      table.mu[pair.slot()].push_back(analytic_mu(scene, r, pair));
      table.nu[pair.slot()].push_back(analytic_nu(scene, r, pair));
    }
  }
  std::ostringstream csv;
  io::write_measure_csv(csv, table);
  io::write_file_atomic(a.out, csv.str());
}

// ---------------------------------------------------------------------------

struct PlotArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> columns;
  std::string out, title;
};

void run_plot(const PlotArgs& a) {
  std::vector<plot::Series> series;
  for (const auto& path : a.inputs) {
    const auto table = io::read_csv_file(path);
    const std::string prefix = a.inputs.size() > 1 ? fs::path(path).stem().string() : "";
    auto s = plot::series_from_csv(table, prefix, a.columns);
    series.insert(series.end(), s.begin(), s.end());
  }
  io::write_file_atomic(a.out, plot::render_svg(series, a.title));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measures of observed objects against r-parallel sets of reference objects"};
  app.require_subcommand(1);

  MeasuresArgs measures;
  auto* m = app.add_subcommand("measures", "mu, N and nu curves of every observed object against one reference");
  m->add_option("--scene", measures.scene, "scene JSON file")->required()->check(CLI::ExistingFile);
  m->add_option("--r-max", measures.r_max, "largest radius")->required()->check(CLI::PositiveNumber);
  m->add_option("--r-steps", measures.r_steps, "number of radii in (0, r-max]")->check(CLI::PositiveNumber);
  add_grid_options(m, measures.grid);
  m->add_option("--pairs", measures.pairs, "comma-separated subset of 00,01,10,11, or 'all'");
  m->add_option("--reference", measures.reference, "reference object id (needed if there are several)");
  m->add_flag("--exact-vertex-distance", measures.exact, "exact instead of interpolated distances at mesh vertices");
  m->add_option("--out", measures.out, "output directory; one <id>.csv per observed object")->required();

  SummaryArgs summary;
  auto* s = app.add_subcommand("summary", "K and L summary curves over a scene");
  s->add_option("--scene", summary.scene, "scene JSON file")->required()->check(CLI::ExistingFile);
  s->add_option("--r-max", summary.r_max, "largest radius")->required()->check(CLI::PositiveNumber);
  s->add_option("--r-steps", summary.r_steps, "number of radii in (0, r-max]")->check(CLI::PositiveNumber);
  add_grid_options(s, summary.grid);
  s->add_option("--pairs", summary.pairs, "comma-separated subset of 00,01,10,11, or 'all'");
  s->add_option("--kinds", summary.kinds, "comma-separated subset of K,L");
  s->add_flag("--point-cross-k", summary.point_k, "also write the point cross-K of the germ locations");
  s->add_flag("--exact-vertex-distance", summary.exact, "exact instead of interpolated distances at mesh vertices");
  s->add_option("--out", summary.out, "output directory; K_<pair>.csv and L_<pair>.csv")->required();

  SynthArgs synth;
  auto* y = app.add_subcommand("synth", "generate a synthetic scene");
  y->add_option("--kind", synth.kind, "plane-ball, plane-cube or sphere-process");
  y->add_option("--dim", synth.spec.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  y->add_option("--seed", synth.spec.seed, "random seed");
  y->add_option("--radius", synth.spec.radius, "ball radius (plane-ball)");
  y->add_option("--cube-side", synth.spec.cube_side, "cube side (plane-cube)");
  y->add_option("--offset", synth.spec.offset, "object to plane distance");
  y->add_option("--window", synth.spec.window_side, "window side");
  y->add_option("--r-max", synth.spec.r_max, "largest radius the extended window must support");
  y->add_option("--reference-count", synth.spec.reference_count, "reference spheres (sphere-process)");
  y->add_option("--observed-count", synth.spec.observed_count, "observed spheres (sphere-process)");
  y->add_option("--reference-radius", synth.spec.reference_radius, "reference sphere radius");
  y->add_option("--observed-radius", synth.spec.observed_radius, "observed sphere radius");
  y->add_option("--placement", synth.placement, "uniform or clustered");
  y->add_option("--cluster-scale", synth.spec.cluster_scale, "displacement standard deviation (clustered)");
  y->add_option("--subdivisions", synth.spec.subdivisions, "icosphere subdivision level");
  y->add_option("--out", synth.out, "scene JSON path; meshes are written next to it")->required();

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "closed-form measures of a ball tangent to a plane (measures CSV schema)");
  o->add_option("--dim", oracle.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  o->add_option("--radius", oracle.radius, "ball radius")->check(CLI::PositiveNumber);
  o->add_option("--r-max", oracle.r_max, "largest radius")->required()->check(CLI::PositiveNumber);
  o->add_option("--r-steps", oracle.r_steps, "number of radii in (0, r-max]")->check(CLI::PositiveNumber);
  o->add_option("--pairs", oracle.pairs, "comma-separated subset of 00,01,10,11, or 'all'");
  o->add_option("--out", oracle.out, "output CSV")->required();

  PlotArgs plot_args;
  auto* p = app.add_subcommand("plot", "render CSV curves as an SVG line chart");
  p->add_option("inputs", plot_args.inputs, "measure or summary CSV files")->required()->check(CLI::ExistingFile);
  p->add_option("--columns", plot_args.columns, "columns to draw (default: every numeric column)")->delimiter(',');
  p->add_option("--title", plot_args.title, "chart title");
  p->add_option("--out", plot_args.out, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (m->parsed()) run_measures(measures);
    if (s->parsed()) run_summary(summary);
    if (y->parsed()) run_synth(synth);
    if (o->parsed()) run_oracle(oracle);
    if (p->parsed()) run_plot(plot_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
