#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rparallel/vec.hpp"

namespace rparallel {

using Index = std::uint32_t;

/// A closed object in R^2 or R^3 stored piecewise-linearly.
///
/// `boundary` holds (d-1)-simplices (segments in 2D, triangles in 3D) as a
/// flat index list of stride d. `interior` optionally holds a tessellation
/// of the enclosed region into d-simplices, stride d+1. Vertices that only
/// appear in the interior tessellation are allowed.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  SimplicialComplex(int dim, std::vector<Vec3> vertices, std::vector<Index> boundary,
                    std::vector<Index> interior = {});

  int dim() const { return dim_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Index>& boundary_indices() const { return boundary_; }
  const std::vector<Index>& interior_indices() const { return interior_; }

  std::size_t boundary_size() const { return dim_ == 0 ? 0 : boundary_.size() / dim_; }
  std::size_t interior_size() const { return interior_.size() / (dim_ + 1); }
  bool has_interior() const { return !interior_.empty(); }

  std::span<const Index> boundary_simplex(std::size_t i) const {
    return {boundary_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const Index> interior_simplex(std::size_t i) const {
    return {interior_.data() + i * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }

  friend bool operator==(const SimplicialComplex&, const SimplicialComplex&) = default;

 private:
  int dim_ = 3;
  std::vector<Vec3> vertices_;
  std::vector<Index> boundary_;
  std::vector<Index> interior_;
};

struct Violation {
  enum class Kind {
    kBadIndex,
    kOpenBoundary,
    kNonManifold,
    kInconsistentOrientation,
    kDegenerateSimplex,
    kInteriorMismatch,
    kEmpty,
  };
  Kind kind;
  std::string message;
};

const char* to_string(Violation::Kind kind);

/// Checks every structural invariant of a complex. Empty result means valid.
std::vector<Violation> validate(const SimplicialComplex& complex);

SimplicialComplex translate(const SimplicialComplex& complex, const Vec3& offset);
SimplicialComplex scale(const SimplicialComplex& complex, double factor);

struct MeasureTotals {
  double volume = 0.0;    // d-volume of the interior tessellation
  double boundary = 0.0;  // (d-1)-measure of the boundary
};

/// Throws ValidationError when the interior tessellation is missing.
MeasureTotals measure_totals(const SimplicialComplex& complex);

/// Boundary measure only; valid without an interior tessellation.
double boundary_measure(const SimplicialComplex& complex);

/// Faces that belong to exactly one d-simplex, oriented outward.
std::vector<Index> extract_boundary(int dim, std::span<const Vec3> vertices,
                                    std::span<const Index> interior);

/// Unsigned d-volume of interior simplex i.
double simplex_volume(const SimplicialComplex& complex, std::size_t i);
/// (d-1)-measure of boundary simplex i.
double facet_measure(const SimplicialComplex& complex, std::size_t i);

struct Box {
  Vec3 lower;
  Vec3 upper;
};

Box bounding_box(const SimplicialComplex& complex);
Vec3 centroid(const SimplicialComplex& complex);

}  // namespace rparallel
