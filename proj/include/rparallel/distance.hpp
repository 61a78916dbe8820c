#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include "rparallel/scene.hpp"
#include "rparallel/vec.hpp"

namespace rparallel {

/// Regular grid of sample nodes. Node (i, j, k) sits at origin + (i, j, k) * spacing.
/// In 2D counts[2] == 1 and the z axis is ignored.
struct GridSpec {
  int dim = 3;
  Vec3 origin;
  Vec3 spacing{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> counts{2, 2, 2};

  GridSpec() = default;
  GridSpec(int dim, Vec3 origin, Vec3 spacing, std::array<std::size_t, 3> counts);

  /// Grid whose node planes include every face of `window` and whose extent
  /// covers `extended`. The per-axis spacing is the largest value <= `spacing`
  /// that divides the window side evenly.
  static GridSpec aligned(const Window& window, const Window& extended, double spacing);

  std::size_t node_count() const { return counts[0] * counts[1] * counts[2]; }
  /// Flat index; x varies fastest, then y, then z.
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + counts[0] * (j + counts[1] * k); }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const;
  Vec3 upper() const;
  double min_spacing() const;
  /// Length of a cell diagonal.
  double cell_diagonal() const;
  bool covers(const Window& window) const;
  bool contains(const Vec3& p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Spacing rule used when none is given: feature_scale / 50, coarsened if
/// the grid over `extended` would exceed `max_nodes` nodes.
double auto_spacing(double feature_scale, const Window& extended, std::size_t max_nodes = 16'000'000);

/// Exact distance from arbitrary points to one reference object.
class ReferenceDistance {
 public:
  ReferenceDistance(ReferenceShape reference, ReferenceFill fill = ReferenceFill::kSolid);
  ~ReferenceDistance();
  ReferenceDistance(ReferenceDistance&&) noexcept;
  ReferenceDistance& operator=(ReferenceDistance&&) noexcept;

  int dim() const { return dim_; }
  double operator()(const Vec3& p) const;
  /// Lower bound of the distance over every point of `box`.
  double lower_bound(const Box& box) const;

 private:
  struct MeshIndex;
  int dim_;
  ReferenceShape reference_;
  ReferenceFill fill_;
  std::unique_ptr<MeshIndex> mesh_;
};

/// Shortest distance to a reference object sampled on a GridSpec.
class DistanceField {
 public:
  DistanceField(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values_[spec_.index(i, j, k)]; }

  /// Multilinear interpolation; throws OutOfDomainError outside the grid.
  double interpolate(const Vec3& p) const;

  /// ASCII header line followed by raw little-endian doubles.
  void dump(std::ostream& out) const;
  static DistanceField load(std::istream& in);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

DistanceField build_distance_field(const ReferenceDistance& reference, const GridSpec& spec);
DistanceField build_distance_field(const ReferenceShape& reference, const GridSpec& spec,
                                   ReferenceFill fill = ReferenceFill::kSolid);

/// Brute-force helpers shared with tests.
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace rparallel
