#pragma once

#include <cstdint>
#include <string>

#include "rparallel/complex.hpp"
#include "rparallel/scene.hpp"

namespace rparallel {

// ---------------------------------------------------------------------------
// Mesh generators. All shapes are centered at the origin.

/// Sphere mesh from a subdivided icosahedron with one vertex at the south
/// pole (0, 0, -radius). The interior is split into `radial_layers` shells of
/// tetrahedra coned to the center.
SimplicialComplex icosphere(double radius, int subdivisions = 4, int radial_layers = 4);

/// Regular polygon with `segments` sides inscribed in a circle, one vertex at
/// (0, -radius). Triangulated in `radial_layers` rings around the center.
SimplicialComplex disk(double radius, std::size_t segments = 1024, int radial_layers = 4);

/// Axis-aligned cube (square in 2D) of the given side, `cells` cells per axis.
SimplicialComplex box(int dim, double side, int cells = 4);

/// Star-shaped solid from a closed surface that is star-shaped w.r.t. `center`.
SimplicialComplex star_solid(int dim, std::vector<Vec3> surface, std::vector<Index> facets, Vec3 center,
                             int radial_layers);

/// Random smooth star-shaped blob of mean radius `radius`.
SimplicialComplex blob(int dim, double radius, double amplitude, std::uint64_t seed, int subdivisions = 3,
                       int radial_layers = 4);

// ---------------------------------------------------------------------------
// Scenes

enum class SynthKind { kPlaneBall, kPlaneCube, kSphereProcess };
enum class Placement { kUniform, kClustered };

struct SynthSpec {
  SynthKind kind = SynthKind::kPlaneBall;
  int dim = 3;
  std::uint64_t seed = 1;

  // plane scenes
  double radius = 100.0;      // ball radius
  double cube_side = 200.0;
  double offset = 100.0;      // minimum distance between object and plane
  double window_side = 500.0;
  double r_max = 400.0;       // radius range the extended window must support

  // sphere process
  std::size_t reference_count = 20;
  std::size_t observed_count = 500;
  double reference_radius = 20.0;
  double observed_radius = 20.0;
  Placement placement = Placement::kUniform;
  double cluster_scale = 60.0;  // per-axis standard deviation of the offspring displacement

  // mesh resolution
  int subdivisions = 4;
  int radial_layers = 4;
  std::size_t polygon_segments = 1024;
  int cube_cells = 4;
};

void validate(const SynthSpec& spec);

/// Plane (line in 2D) through the origin with normal +z (+y in 2D), one
/// observed ball or cube at minimum distance `offset` above it. The window
/// is a cube of side `window_side` with one face on the plane, otherwise
/// centered on the object.
GermGrainScene gen_plane_scene(const SynthSpec& spec);

/// Reference balls (analytic, solid) uniform in the window; observed mesh
/// balls uniform in the extended window or displaced around reference germs.
GermGrainScene gen_sphere_process(const SynthSpec& spec);

GermGrainScene generate(const SynthSpec& spec);

}  // namespace rparallel
