#include "rparallel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "rparallel/error.hpp"

namespace rparallel {

namespace {

void orient_positive(int dim, const std::vector<Vec3>& v, Index* s) {
  double vol = dim == 3 ? signed_volume(v[s[0]], v[s[1]], v[s[2]], v[s[3]]) : signed_area2d(v[s[0]], v[s[1]], v[s[2]]);
  if (vol < 0.0) std::swap(s[0], s[1]);
}

// Splits the prism with bottom (v0, v1, v2) and top (v3, v4, v5) into three
// tetrahedra. Each quad face is cut along the diagonal through its smallest
// global index, so adjacent prisms agree on shared faces.
void split_prism(const std::array<Index, 6>& v, std::vector<Index>& tets) {
  static constexpr int kRotation[6][6] = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
                                          {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  int m = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  std::array<Index, 6> w{};
  for (int i = 0; i < 6; ++i) w[i] = v[kRotation[m][i]];
  if (std::min(w[1], w[5]) < std::min(w[2], w[4])) {
    tets.insert(tets.end(), {w[0], w[1], w[2], w[5], w[0], w[1], w[5], w[4], w[0], w[4], w[5], w[3]});
  } else {
    tets.insert(tets.end(), {w[0], w[1], w[2], w[4], w[0], w[4], w[2], w[5], w[0], w[4], w[5], w[3]});
  }
}

void require_layers(int radial_layers) {
  if (radial_layers < 1) throw ValidationError("radial_layers must be >= 1");
}

// Subdivided icosahedron on the unit sphere, triangles oriented outward.
void unit_icosphere(int subdivisions, std::vector<Vec3>& verts, std::vector<Index>& tris) {
  using std::numbers::pi;
  if (subdivisions < 0 || subdivisions > 8) throw ValidationError("icosphere subdivision must be in [0, 8]");
  const double z = 1.0 / std::sqrt(5.0);
  const double rho = 2.0 / std::sqrt(5.0);
  verts.clear();
  tris.clear();
  verts.push_back({0, 0, 1});
  verts.push_back({0, 0, -1});
  for (int i = 0; i < 5; ++i) verts.push_back({rho * std::cos(2 * pi * i / 5), rho * std::sin(2 * pi * i / 5), z});
  for (int i = 0; i < 5; ++i) {
    double a = 2 * pi * i / 5 + pi / 5;
    verts.push_back({rho * std::cos(a), rho * std::sin(a), -z});
  }
  auto up = [](int i) { return static_cast<Index>(2 + (i % 5)); };
  auto lo = [](int i) { return static_cast<Index>(7 + (i % 5)); };
  for (int i = 0; i < 5; ++i) {
    tris.insert(tris.end(), {0, up(i), up(i + 1)});
    tris.insert(tris.end(), {up(i), lo(i), up(i + 1)});
    tris.insert(tris.end(), {up(i + 1), lo(i), lo(i + 1)});
    tris.insert(tris.end(), {1, lo(i + 1), lo(i)});
  }
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<Index, Index>, Index> midpoint;
    auto mid = [&](Index a, Index b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Index id = static_cast<Index>(verts.size());
      verts.push_back(normalized(verts[a] + verts[b]));
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Index> next;
    next.reserve(tris.size() * 4);
    for (std::size_t t = 0; t < tris.size(); t += 3) {
      Index a = tris[t], b = tris[t + 1], c = tris[t + 2];
      Index ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.insert(next.end(), {a, ab, ca, ab, b, bc, ca, bc, c, ab, bc, ca});
    }
    tris = std::move(next);
  }
  for (std::size_t t = 0; t < tris.size(); t += 3) {
    const Vec3 &a = verts[tris[t]], &b = verts[tris[t + 1]], &c = verts[tris[t + 2]];
    if (dot(cross(b - a, c - a), a + b + c) < 0.0) std::swap(tris[t + 1], tris[t + 2]);
  }
}

}  // namespace

SimplicialComplex star_solid(int dim, std::vector<Vec3> surface, std::vector<Index> facets, Vec3 center,
                             int radial_layers) {
  require_layers(radial_layers);
  if (dim != 2 && dim != 3) throw DimensionError("star_solid needs dim 2 or 3");
  const std::size_t n = surface.size();
  const Index L = static_cast<Index>(radial_layers);
  // vertex 0 is the center; layer l in 1..L holds vertex v at 1 + (l-1) n + v
  auto at = [&](Index layer, Index v) { return static_cast<Index>(1 + (layer - 1) * n + v); };
  std::vector<Vec3> verts;
  verts.reserve(1 + n * L);
  verts.push_back(center);
  for (Index l = 1; l <= L; ++l) {
    for (std::size_t v = 0; v < n; ++v) {
      verts.push_back(l == L ? surface[v] : lerp(center, surface[v], static_cast<double>(l) / L));
    }
  }
  std::vector<Index> boundary, interior;
  const std::size_t stride = dim;
  for (std::size_t f = 0; f < facets.size(); f += stride) {
    if (dim == 3) {
      Index a = facets[f], b = facets[f + 1], c = facets[f + 2];
      boundary.insert(boundary.end(), {at(L, a), at(L, b), at(L, c)});
      interior.insert(interior.end(), {0, at(1, a), at(1, b), at(1, c)});
      for (Index l = 1; l < L; ++l) {
        split_prism({at(l, a), at(l, b), at(l, c), at(l + 1, a), at(l + 1, b), at(l + 1, c)}, interior);
      }
    } else {
      Index a = facets[f], b = facets[f + 1];
      boundary.insert(boundary.end(), {at(L, a), at(L, b)});
      interior.insert(interior.end(), {0, at(1, a), at(1, b)});
      for (Index l = 1; l < L; ++l) {
        Index q[4] = {at(l, a), at(l, b), at(l + 1, b), at(l + 1, a)};
        int m = static_cast<int>(std::min_element(q, q + 4) - q);
        Index p0 = q[m], p1 = q[(m + 1) % 4], p2 = q[(m + 2) % 4], p3 = q[(m + 3) % 4];
        interior.insert(interior.end(), {p0, p1, p2, p0, p2, p3});
      }
    }
  }
  for (std::size_t s = 0; s < interior.size(); s += dim + 1) orient_positive(dim, verts, &interior[s]);
  return SimplicialComplex(dim, std::move(verts), std::move(boundary), std::move(interior));
}

SimplicialComplex icosphere(double radius, int subdivisions, int radial_layers) {
  if (!(radius > 0.0)) throw ValidationError("icosphere radius must be positive");
  std::vector<Vec3> verts;
  std::vector<Index> tris;
  unit_icosphere(subdivisions, verts, tris);
  for (auto& v : verts) v *= radius;
  return star_solid(3, std::move(verts), std::move(tris), Vec3{}, radial_layers);
}

SimplicialComplex disk(double radius, std::size_t segments, int radial_layers) {
  using std::numbers::pi;
  if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
  if (segments < 3) throw ValidationError("disk needs at least 3 segments");
  std::vector<Vec3> verts(segments);
  std::vector<Index> segs;
  for (std::size_t k = 0; k < segments; ++k) {
    double a = -pi / 2 + 2 * pi * static_cast<double>(k) / static_cast<double>(segments);
    verts[k] = k == 0 ? Vec3{0.0, -radius, 0.0} : Vec3{radius * std::cos(a), radius * std::sin(a), 0.0};
    segs.insert(segs.end(), {static_cast<Index>(k), static_cast<Index>((k + 1) % segments)});
  }
  return star_solid(2, std::move(verts), std::move(segs), Vec3{}, radial_layers);
}

SimplicialComplex box(int dim, double side, int cells) {
  if (dim != 2 && dim != 3) throw DimensionError("box needs dim 2 or 3");
  if (!(side > 0.0) || cells < 1) throw ValidationError("box needs a positive side and >= 1 cell");
  const std::size_t n = static_cast<std::size_t>(cells) + 1;
  const std::size_t nz = dim == 3 ? n : 1;
  auto id = [&](std::size_t i, std::size_t j, std::size_t k) { return static_cast<Index>(i + n * (j + n * k)); };
  std::vector<Vec3> verts;
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        auto c = [&](std::size_t t) { return side * (static_cast<double>(t) / cells - 0.5); };
        verts.push_back({c(i), c(j), dim == 3 ? c(k) : 0.0});
      }
    }
  }
  static constexpr int kTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};
  static constexpr int kTris[2][3] = {{0, 1, 3}, {0, 2, 3}};
  std::vector<Index> interior;
  const std::size_t layers = dim == 3 ? n - 1 : 1;
  for (std::size_t k = 0; k < layers; ++k) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        auto corner = [&](int c) { return id(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)); };
        if (dim == 3) {
          for (const auto& t : kTets) interior.insert(interior.end(), {corner(t[0]), corner(t[1]), corner(t[2]), corner(t[3])});
        } else {
          for (const auto& t : kTris) interior.insert(interior.end(), {corner(t[0]), corner(t[1]), corner(t[2])});
        }
      }
    }
  }
  for (std::size_t s = 0; s < interior.size(); s += dim + 1) orient_positive(dim, verts, &interior[s]);
  auto boundary = extract_boundary(dim, verts, interior);
  return SimplicialComplex(dim, std::move(verts), std::move(boundary), std::move(interior));
}

SimplicialComplex blob(int dim, double radius, double amplitude, std::uint64_t seed, int subdivisions,
                       int radial_layers) {
  using std::numbers::pi;
  if (!(radius > 0.0) || amplitude < 0.0 || amplitude >= 0.5) {
    throw ValidationError("blob needs radius > 0 and amplitude in [0, 0.5)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // Smooth radial profile: a few Gaussian bumps on the unit sphere.
  struct Bump {
    Vec3 axis;
    double weight;
  };
  std::vector<Bump> bumps(6);
  for (auto& b : bumps) {
    Vec3 axis;
    do {
      axis = {unit(rng), unit(rng), dim == 3 ? unit(rng) : 0.0};
    } while (norm(axis) < 0.1 || norm(axis) > 1.0);
    b.axis = normalized(axis);
    b.weight = unit(rng);
  }
  auto profile = [&](const Vec3& u) {
    double f = 0.0;
    for (const auto& b : bumps) f += b.weight * std::exp(3.0 * (dot(u, b.axis) - 1.0));
    return radius * (1.0 + amplitude * std::clamp(f, -1.0, 1.0));
  };
  std::vector<Vec3> verts;
  std::vector<Index> facets;
  if (dim == 3) {
    unit_icosphere(subdivisions, verts, facets);
  } else {
    std::size_t segments = static_cast<std::size_t>(16) << std::max(0, subdivisions);
    for (std::size_t k = 0; k < segments; ++k) {
      double a = 2 * pi * static_cast<double>(k) / static_cast<double>(segments);
      verts.push_back({std::cos(a), std::sin(a), 0.0});
      facets.insert(facets.end(), {static_cast<Index>(k), static_cast<Index>((k + 1) % segments)});
    }
  }
  for (auto& v : verts) v = v * profile(v);
  return star_solid(dim, std::move(verts), std::move(facets), Vec3{}, radial_layers);
}

// ---------------------------------------------------------------------------
// Scenes

void validate(const SynthSpec& s) {
  if (s.dim != 2 && s.dim != 3) throw DimensionError("synth dimension must be 2 or 3");
  if (!(s.radius > 0.0) || !(s.cube_side > 0.0) || !(s.window_side > 0.0) || !(s.r_max > 0.0)) {
    throw ValidationError("synth sizes must be positive");
  }
  if (s.offset < 0.0) throw ValidationError("offset must be >= 0");
  if (s.kind == SynthKind::kSphereProcess) {
    if (s.reference_count < 1 || s.observed_count < 1) throw ValidationError("germ counts must be >= 1");
    if (!(s.reference_radius > 0.0) || !(s.observed_radius > 0.0)) throw ValidationError("grain radii must be positive");
    if (s.placement == Placement::kClustered && !(s.cluster_scale > 0.0)) {
      throw ValidationError("cluster scale must be positive");
    }
  }
  if (s.subdivisions < 0 || s.radial_layers < 1 || s.polygon_segments < 3 || s.cube_cells < 1) {
    throw ValidationError("invalid mesh resolution");
  }
}

GermGrainScene gen_plane_scene(const SynthSpec& spec) {
  validate(spec);
  const int d = spec.dim;
  const int up = d == 3 ? 2 : 1;
  Vec3 normal;
  normal[up] = 1.0;

  MeshPtr shape;
  double half_height = 0.0;
  if (spec.kind == SynthKind::kPlaneCube) {
    shape = std::make_shared<const SimplicialComplex>(box(d, spec.cube_side, spec.cube_cells));
    half_height = spec.cube_side / 2.0;
  } else {
    shape = std::make_shared<const SimplicialComplex>(
        d == 3 ? icosphere(spec.radius, spec.subdivisions, spec.radial_layers)
               : disk(spec.radius, spec.polygon_segments, spec.radial_layers));
    half_height = spec.radius;
  }
  Vec3 location;
  location[up] = spec.offset + half_height;

  Vec3 lower, upper;
  for (int a = 0; a < d; ++a) {
    lower[a] = -spec.window_side / 2.0;
    upper[a] = spec.window_side / 2.0;
  }
  lower[up] = 0.0;
  upper[up] = spec.window_side;
  Window window(d, lower, upper);
  Window extended = window.dilated(spec.r_max);

  Box bounds = bounding_box(*shape);
  bounds.lower += location;
  bounds.upper += location;
  if (!extended.contains(bounds)) throw ValidationError("observed object does not fit in the extended window");

  std::vector<ObservedGerm> observed{{spec.kind == SynthKind::kPlaneCube ? "cube" : "ball", location, shape}};
  std::vector<ReferenceGerm> reference{{"plane", Vec3{}, AnalyticPrimitive::plane(d, normal, 0.0)}};
  return GermGrainScene(d, std::move(observed), std::move(reference), window, extended, spec.seed);
}

GermGrainScene gen_sphere_process(const SynthSpec& spec) {
  validate(spec);
  const int d = spec.dim;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, spec.cluster_scale);

  Vec3 lower, upper;
  for (int a = 0; a < d; ++a) upper[a] = spec.window_side;
  Window window(d, lower, upper);
  // Observed material within r_max of any reference grain must be recorded.
  Window extended = window.dilated(spec.r_max + spec.reference_radius + 2.0 * spec.observed_radius);

  std::vector<ReferenceGerm> reference;
  for (std::size_t i = 0; i < spec.reference_count; ++i) {
    Vec3 p;
    for (int a = 0; a < d; ++a) p[a] = window.lower[a] + unit(rng) * (window.upper[a] - window.lower[a]);
    reference.push_back({"y" + std::to_string(i), p, AnalyticPrimitive::sphere(d, Vec3{}, spec.reference_radius)});
  }

  auto shape = std::make_shared<const SimplicialComplex>(
      d == 3 ? icosphere(spec.observed_radius, spec.subdivisions, spec.radial_layers)
             : disk(spec.observed_radius, spec.polygon_segments, spec.radial_layers));
  // Centers that keep the whole grain inside the extended window.
  const Window centers = extended.dilated(-spec.observed_radius);

  std::vector<ObservedGerm> observed;
  for (std::size_t i = 0; i < spec.observed_count; ++i) {
    Vec3 p;
    if (spec.placement == Placement::kUniform) {
      for (int a = 0; a < d; ++a) p[a] = centers.lower[a] + unit(rng) * (centers.upper[a] - centers.lower[a]);
    } else {
      auto parent = std::min<std::size_t>(static_cast<std::size_t>(unit(rng) * reference.size()), reference.size() - 1);
      int attempt = 0;
      do {
        if (++attempt > 1000) throw ValidationError("cannot place clustered germ inside the extended window");
        p = reference[parent].location;
        for (int a = 0; a < d; ++a) p[a] += gauss(rng);
      } while (!centers.contains(p));
    }
    observed.push_back({"x" + std::to_string(i), p, shape});
  }
  return GermGrainScene(d, std::move(observed), std::move(reference), window, extended, spec.seed);
}

GermGrainScene generate(const SynthSpec& spec) {
  return spec.kind == SynthKind::kSphereProcess ? gen_sphere_process(spec) : gen_plane_scene(spec);
}

}  // namespace rparallel
