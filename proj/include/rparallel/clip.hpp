#pragma once

#include <array>

#include "rparallel/vec.hpp"

namespace rparallel::clip {

// Marching-simplex kernels. `f` holds the values of an affine function at the
// simplex vertices; the sublevel set is {f <= r} (ties count as inside) and
// the level set is {f == r}.

/// Volume of {f <= r} inside the tetrahedron.
double tet_sublevel_volume(const std::array<Vec3, 4>& p, const std::array<double, 4>& f, double r);
/// Area of the level-set patch {f == r} inside the tetrahedron.
double tet_level_area(const std::array<Vec3, 4>& p, const std::array<double, 4>& f, double r);

/// Area of {f <= r} inside the triangle (any ambient dimension).
double tri_sublevel_area(const std::array<Vec3, 3>& p, const std::array<double, 3>& f, double r);
/// Length of the level-set segment {f == r} inside the triangle.
double tri_level_length(const std::array<Vec3, 3>& p, const std::array<double, 3>& f, double r);

/// Length of {f <= r} on the segment.
double seg_sublevel_length(const std::array<Vec3, 2>& p, const std::array<double, 2>& f, double r);
/// 1 if the level set crosses the segment, i.e. exactly one endpoint has f <= r.
int seg_level_crossings(const std::array<double, 2>& f, double r);

}  // namespace rparallel::clip
