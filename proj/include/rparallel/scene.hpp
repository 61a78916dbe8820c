#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rparallel/complex.hpp"
#include "rparallel/vec.hpp"

namespace rparallel {

/// Axis-aligned observation box.
struct Window {
  int dim = 3;
  Vec3 lower;
  Vec3 upper;

  Window() = default;
  Window(int dim, Vec3 lower, Vec3 upper);

  /// d-dimensional volume.
  double volume() const;
  bool contains(const Vec3& p) const;
  bool contains(const Box& box) const;
  bool contains(const Window& other) const;
  Window dilated(double r) const;
  Window translated(const Vec3& v) const;
  /// Largest r such that dilated(r) fits inside `outer`.
  double dilation_allowance(const Window& outer) const;

  friend bool operator==(const Window&, const Window&) = default;
};

/// Hyperplane {x : normal . x == offset} (a line in 2D).
struct Plane {
  Vec3 normal;
  double offset = 0.0;
  friend bool operator==(const Plane&, const Plane&) = default;
};

/// Ball of the given radius (a disk in 2D).
struct Sphere {
  Vec3 center;
  double radius = 1.0;
  friend bool operator==(const Sphere&, const Sphere&) = default;
};

/// Exact reference geometry with closed-form distance.
class AnalyticPrimitive {
 public:
  static AnalyticPrimitive plane(int dim, Vec3 unit_normal, double offset);
  static AnalyticPrimitive sphere(int dim, Vec3 center, double radius);

  int dim() const { return dim_; }
  const std::variant<Plane, Sphere>& shape() const { return shape_; }
  bool is_plane() const { return std::holds_alternative<Plane>(shape_); }
  bool is_sphere() const { return std::holds_alternative<Sphere>(shape_); }

  AnalyticPrimitive translated(const Vec3& v) const;
  AnalyticPrimitive scaled(double s) const;

  friend bool operator==(const AnalyticPrimitive&, const AnalyticPrimitive&) = default;

 private:
  AnalyticPrimitive(int dim, std::variant<Plane, Sphere> shape) : dim_(dim), shape_(shape) {}
  int dim_ = 3;
  std::variant<Plane, Sphere> shape_;
};

using MeshPtr = std::shared_ptr<const SimplicialComplex>;
using ReferenceShape = std::variant<MeshPtr, AnalyticPrimitive>;

/// Whether distance is measured to the whole set Y or only to its boundary.
enum class ReferenceFill { kSolid, kSurface };

struct ObservedGerm {
  std::string id;
  Vec3 location;
  MeshPtr shape;

  SimplicialComplex placed() const { return translate(*shape, location); }
};

struct ReferenceGerm {
  std::string id;
  Vec3 location;
  ReferenceShape shape;
  ReferenceFill fill = ReferenceFill::kSolid;

  /// location + shape, as a standalone reference object.
  ReferenceShape placed() const;
};

int dim_of(const ReferenceShape& shape);

/// Observed and reference germ-grain processes restricted to a window.
///
/// `extended_window` must contain `window`; observed material that can come
/// within r of a reference germ in `window` has to be recorded inside it.
class GermGrainScene {
 public:
  GermGrainScene(int dim, std::vector<ObservedGerm> observed, std::vector<ReferenceGerm> reference, Window window,
                 Window extended_window, std::optional<std::uint64_t> seed = std::nullopt);

  int dim() const { return dim_; }
  const std::vector<ObservedGerm>& observed() const { return observed_; }
  const std::vector<ReferenceGerm>& reference() const { return reference_; }
  const Window& window() const { return window_; }
  const Window& extended_window() const { return extended_window_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  /// Largest radius the extended window supports.
  double max_radius() const { return window_.dilation_allowance(extended_window_); }

  GermGrainScene translated(const Vec3& v) const;

 private:
  int dim_;
  std::vector<ObservedGerm> observed_;
  std::vector<ReferenceGerm> reference_;
  Window window_;
  Window extended_window_;
  std::optional<std::uint64_t> seed_;
};

/// Mesh validation plus window containment; one message per problem, each
/// naming the offending object id.
std::vector<std::string> check_scene(const GermGrainScene& scene);

}  // namespace rparallel
