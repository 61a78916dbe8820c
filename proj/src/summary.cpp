#include "rparallel/summary.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rparallel/error.hpp"
#include "rparallel/parallel.hpp"

namespace rparallel {

IntensityEstimates estimate_intensities(const GermGrainScene& scene) {
  IntensityEstimates est;
  est.window_volume = scene.window().volume();
  if (!(est.window_volume > 0.0)) throw ValidationError("window volume must be positive");
  for (const auto& g : scene.observed()) est.n_obs += scene.window().contains(g.location) ? 1 : 0;
  for (const auto& g : scene.reference()) est.n_ref += scene.window().contains(g.location) ? 1 : 0;
  est.rho_x = static_cast<double>(est.n_obs) / est.window_volume;
  est.rho_y = static_cast<double>(est.n_ref) / est.window_volume;
  return est;
}

const char* to_string(SummaryKind kind) {
  switch (kind) {
    case SummaryKind::kK: return "K";
    case SummaryKind::kL: return "L";
    case SummaryKind::kPointCrossK: return "pointK";
  }
  return "?";
}

double feature_scale(const GermGrainScene& scene) {
  double scale = std::numeric_limits<double>::infinity();
  auto half_extent = [&](const SimplicialComplex& mesh) {
    Box b = bounding_box(mesh);
    double h = std::numeric_limits<double>::infinity();
    for (int a = 0; a < mesh.dim(); ++a) h = std::min(h, 0.5 * (b.upper[a] - b.lower[a]));
    return h;
  };
  for (const auto& g : scene.reference()) {
    if (const auto* mesh = std::get_if<MeshPtr>(&g.shape)) {
      scale = std::min(scale, half_extent(**mesh));
    } else if (const auto* sphere = std::get_if<Sphere>(&std::get<AnalyticPrimitive>(g.shape).shape())) {
      scale = std::min(scale, sphere->radius);
    }
  }
  for (const auto& g : scene.observed()) scale = std::min(scale, half_extent(*g.shape));
  if (!std::isfinite(scale)) {
    // Only planes and no observed objects: fall back to the window size.
    const Window& w = scene.window();
    scale = w.upper.x - w.lower.x;
  }
  return scale;
}

GridSpec scene_grid(const GermGrainScene& scene, const SummaryOptions& options) {
  double h = options.grid_spacing > 0.0 ? options.grid_spacing
                                        : auto_spacing(feature_scale(scene), scene.extended_window(), options.max_nodes);
  return GridSpec::aligned(scene.window(), scene.extended_window(), h);
}

namespace {

// Bounding box of a placed reference object; empty for unbounded planes.
std::optional<Box> reference_box(const ReferenceShape& shape) {
  if (const auto* mesh = std::get_if<MeshPtr>(&shape)) return bounding_box(**mesh);
  const auto& prim = std::get<AnalyticPrimitive>(shape);
  if (const auto* s = std::get_if<Sphere>(&prim.shape())) {
    Vec3 r{s->radius, s->radius, prim.dim() == 3 ? s->radius : 0.0};
    return Box{s->center - r, s->center + r};
  }
  return std::nullopt;
}

// Nodes of `grid` covering `box` (clamped to the grid), on the same lattice.
GridSpec sub_grid(const GridSpec& grid, const Box& box) {
  std::array<std::size_t, 3> lo{0, 0, 0}, counts{1, 1, 1};
  for (int a = 0; a < grid.dim; ++a) {
    const double n = static_cast<double>(grid.counts[a] - 1);
    double i0 = std::clamp(std::floor((box.lower[a] - grid.origin[a]) / grid.spacing[a]), 0.0, n);
    double i1 = std::clamp(std::ceil((box.upper[a] - grid.origin[a]) / grid.spacing[a]), 0.0, n);
    if (i1 <= i0) i1 = std::min(i0 + 1.0, n), i0 = i1 - 1.0;
    lo[a] = static_cast<std::size_t>(i0);
    counts[a] = static_cast<std::size_t>(i1 - i0) + 1;
  }
  return GridSpec(grid.dim, grid.node(lo[0], lo[1], lo[2]), grid.spacing, counts);
}

// W restricted to the extent of a lattice-aligned sub grid.
std::optional<Window> clip_window(const Window& w, const GridSpec& grid) {
  Vec3 lo = w.lower, hi = w.upper, top = grid.upper();
  for (int a = 0; a < w.dim; ++a) {
    lo[a] = std::max(lo[a], grid.origin[a]);
    hi[a] = std::min(hi[a], top[a]);
    if (!(hi[a] > lo[a])) return std::nullopt;
  }
  return Window(w.dim, lo, hi);
}

}  // namespace

double ordered_sum(std::vector<double> terms) {
  for (double t : terms) {
    if (is_missing(t)) return kMissing;
  }
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

SceneSummary summarize(const GermGrainScene& scene, const RadiusGrid& radii, const SummaryOptions& options) {
  const auto intensities = estimate_intensities(scene);
  if (intensities.n_obs == 0) throw ValidationError("no observed germs in the window: rho_x is zero and K is undefined");
  if (intensities.n_ref == 0) throw ValidationError("no reference germs in the window: rho_y is zero and K is undefined");
  if (radii.max() > scene.max_radius() * (1.0 + 1e-12)) {
    throw ValidationError("r_max exceeds what the extended window supports (" + std::to_string(scene.max_radius()) + ")");
  }
  const GridSpec grid = scene_grid(scene, options);
  const Window& window = scene.window();
  const std::size_t nr = radii.size();
  const double reach = radii.max() + (options.vertex_distance == VertexDistanceMode::kInterpolated ? grid.cell_diagonal() : 0.0);

  // terms[slot][radius] collects one value per evaluated (reference, observed) pair.
  std::array<std::vector<std::vector<double>>, 4> mu_terms, nu_terms;
  for (int s = 0; s < 4; ++s) {
    mu_terms[s].resize(nr);
    nu_terms[s].resize(nr);
  }
  std::vector<bool> n_zero(nr, false);
  std::size_t evaluated = 0;

  double obs_extent = 0.0;
  std::vector<Box> obs_boxes;
  obs_boxes.reserve(scene.observed().size());
  for (const auto& g : scene.observed()) {
    Box b = bounding_box(*g.shape);
    obs_extent = std::max(obs_extent, norm(b.upper - b.lower));
    obs_boxes.push_back(Box{b.lower + g.location, b.upper + g.location});
  }

  for (const auto& ref : scene.reference()) {
    if (!window.contains(ref.location)) continue;
    const ReferenceShape placed_ref = ref.placed();
    const ReferenceDistance exact(placed_ref, ref.fill);
    // Only the part of the grid the reference can reach: beyond it every
    // distance exceeds r_max and neither N nor any near germ needs samples.
    GridSpec local = grid;
    if (auto box = reference_box(placed_ref)) {
      const double margin = reach + obs_extent + 2.0 * grid.cell_diagonal();
      const Vec3 m{margin, margin, scene.dim() == 3 ? margin : 0.0};
      local = sub_grid(grid, Box{box->lower - m, box->upper + m});
    }
    const DistanceField field = build_distance_field(exact, local);
    std::array<MeasureCurve, 2> n{MeasureCurve{"N0", radii, std::vector<double>(nr, 0.0)},
                                  MeasureCurve{"N1", radii, std::vector<double>(nr, 0.0)}};
    if (auto w = clip_window(window, local)) n = n_curves(field, *w, radii);
    for (std::size_t k = 0; k < nr; ++k) {
      for (const auto& pair : kAllPairs) {
        if (options.pairs[pair.slot()] && n[pair.eps_prime()].values[k] == 0.0) n_zero[k] = true;
      }
    }

    std::vector<std::size_t> near;
    for (std::size_t i = 0; i < obs_boxes.size(); ++i) {
      if (exact.lower_bound(obs_boxes[i]) <= reach) near.push_back(i);
    }
    // per near germ: curves for every selected pair
    std::vector<std::array<std::vector<double>, 4>> curves(near.size());
    parallel_for(near.size(), [&](std::size_t q) {
      const SimplicialComplex placed = scene.observed()[near[q]].placed();
      const auto d = options.vertex_distance == VertexDistanceMode::kExact ? vertex_distances(placed, exact)
                                                                           : vertex_distances(placed, field);
      for (const auto& pair : kAllPairs) {
        if (options.pairs[pair.slot()]) curves[q][pair.slot()] = mu_curve(placed, d, radii, pair).values;
      }
    });
    for (const auto& c : curves) {
      for (const auto& pair : kAllPairs) {
        if (!options.pairs[pair.slot()]) continue;
        const int s = pair.slot();
        for (std::size_t k = 0; k < nr; ++k) {
          mu_terms[s][k].push_back(c[s][k]);
          double nv = n[pair.eps_prime()].values[k];
          nu_terms[s][k].push_back(nv == 0.0 ? 0.0 : c[s][k] / nv);
        }
      }
    }
    evaluated += near.size();
  }

  SceneSummary out{radii, intensities, grid, {}, {}, evaluated};
  const double prefactor = 1.0 / (intensities.window_volume * intensities.rho_x * intensities.rho_y);
  for (const auto& pair : kAllPairs) {
    if (!options.pairs[pair.slot()]) continue;
    const int s = pair.slot();
    SummaryCurve k_curve{SummaryKind::kK, pair, radii, std::vector<double>(nr), options.scene_id, intensities};
    SummaryCurve l_curve{SummaryKind::kL, pair, radii, std::vector<double>(nr), options.scene_id, intensities};
    for (std::size_t k = 0; k < nr; ++k) {
      k_curve.values[k] = ordered_sum(std::move(mu_terms[s][k])) * prefactor;
      l_curve.values[k] = n_zero[k] ? kMissing : ordered_sum(std::move(nu_terms[s][k])) * prefactor;
    }
    out.k[s] = std::move(k_curve);
    out.l[s] = std::move(l_curve);
  }
  return out;
}

namespace {

SummaryOptions only(SummaryOptions options, MeasurePair pair) {
  options.pairs = {false, false, false, false};
  options.pairs[pair.slot()] = true;
  return options;
}

}  // namespace

SummaryCurve k_hat(const GermGrainScene& scene, const RadiusGrid& radii, MeasurePair pair,
                   const SummaryOptions& options) {
  return *summarize(scene, radii, only(options, pair)).k[pair.slot()];
}

SummaryCurve l_hat(const GermGrainScene& scene, const RadiusGrid& radii, MeasurePair pair,
                   const SummaryOptions& options) {
  return *summarize(scene, radii, only(options, pair)).l[pair.slot()];
}

SummaryCurve cross_k_points(std::span<const Vec3> observed, std::span<const Vec3> reference, const RadiusGrid& radii,
                            const Window& window) {
  if (observed.empty() || reference.empty()) throw ValidationError("cross K needs nonempty point sets");
  const std::size_t nr = radii.size();
  std::vector<std::int64_t> counts(nr, 0);
  std::size_t n_ref = 0;
  std::vector<double> dist(observed.size());
  for (const auto& y : reference) {
    if (!window.contains(y)) continue;
    ++n_ref;
    for (std::size_t i = 0; i < observed.size(); ++i) dist[i] = distance(observed[i], y);
    std::sort(dist.begin(), dist.end());
    for (std::size_t k = 0; k < nr; ++k) {
      counts[k] += std::upper_bound(dist.begin(), dist.end(), radii[k]) - dist.begin();
    }
  }
  if (n_ref == 0) throw ValidationError("no reference points inside the window");
  SummaryCurve curve{SummaryKind::kPointCrossK, std::nullopt, radii, std::vector<double>(nr), "", {}};
  curve.intensities.window_volume = window.volume();
  curve.intensities.n_ref = n_ref;
  curve.intensities.n_obs = static_cast<std::size_t>(
      std::count_if(observed.begin(), observed.end(), [&](const Vec3& p) { return window.contains(p); }));
  curve.intensities.rho_x = static_cast<double>(curve.intensities.n_obs) / curve.intensities.window_volume;
  curve.intensities.rho_y = static_cast<double>(n_ref) / curve.intensities.window_volume;
  for (std::size_t k = 0; k < nr; ++k) curve.values[k] = static_cast<double>(counts[k]) / static_cast<double>(n_ref);
  return curve;
}

}  // namespace rparallel
