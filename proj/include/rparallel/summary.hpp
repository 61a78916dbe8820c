#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rparallel/measures.hpp"
#include "rparallel/scene.hpp"

namespace rparallel {

struct IntensityEstimates {
  double rho_x = 0.0;  // observed germs in W per unit volume
  double rho_y = 0.0;  // reference germs in W per unit volume
  std::size_t n_obs = 0;
  std::size_t n_ref = 0;
  double window_volume = 0.0;
};

/// Count-per-volume intensities; germs count when their location lies in W.
IntensityEstimates estimate_intensities(const GermGrainScene& scene);

enum class SummaryKind { kK, kL, kPointCrossK };
const char* to_string(SummaryKind kind);

struct SummaryCurve {
  SummaryKind kind = SummaryKind::kK;
  std::optional<MeasurePair> pair;
  RadiusGrid radii;
  std::vector<double> values;
  std::string scene_id;
  IntensityEstimates intensities;
};

enum class VertexDistanceMode { kInterpolated, kExact };

struct SummaryOptions {
  /// Grid spacing; <= 0 selects auto_spacing(feature_scale(scene), ...).
  double grid_spacing = 0.0;
  std::size_t max_nodes = 16'000'000;
  VertexDistanceMode vertex_distance = VertexDistanceMode::kInterpolated;
  std::array<bool, 4> pairs{true, true, true, true};
  std::string scene_id;
};

/// Smallest characteristic length among the grains (ball radius or bounding
/// half-extent).
double feature_scale(const GermGrainScene& scene);

/// Grid shared by every per-reference distance field of the scene.
GridSpec scene_grid(const GermGrainScene& scene, const SummaryOptions& options);

struct SceneSummary {
  RadiusGrid radii;
  IntensityEstimates intensities;
  GridSpec grid;
  std::array<std::optional<SummaryCurve>, 4> k;  // indexed by MeasurePair::slot()
  std::array<std::optional<SummaryCurve>, 4> l;
  std::size_t pairs_evaluated = 0;  // (reference, observed) pairs not skipped as out of reach
};

/// K-hat and L-hat for every selected measure pair in one pass over the
/// reference germs. Sums are order independent: per radius the terms are
/// sorted before they are added.
SceneSummary summarize(const GermGrainScene& scene, const RadiusGrid& radii, const SummaryOptions& options = {});

SummaryCurve k_hat(const GermGrainScene& scene, const RadiusGrid& radii, MeasurePair pair,
                   const SummaryOptions& options = {});
SummaryCurve l_hat(const GermGrainScene& scene, const RadiusGrid& radii, MeasurePair pair,
                   const SummaryOptions& options = {});

/// Classic point cross-K: mean over reference points in W of the number of
/// observed points within distance r.
SummaryCurve cross_k_points(std::span<const Vec3> observed, std::span<const Vec3> reference, const RadiusGrid& radii,
                            const Window& window);

/// Sum of the values in ascending order (kMissing if any value is missing).
double ordered_sum(std::vector<double> terms);

}  // namespace rparallel
