#include "rparallel/complex.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <sstream>

#include "rparallel/error.hpp"

namespace rparallel {

SimplicialComplex::SimplicialComplex(int dim, std::vector<Vec3> vertices, std::vector<Index> boundary,
                                     std::vector<Index> interior)
    : dim_(dim), vertices_(std::move(vertices)), boundary_(std::move(boundary)), interior_(std::move(interior)) {
  if (dim_ != 2 && dim_ != 3) throw DimensionError("simplicial complex dimension must be 2 or 3");
  if (boundary_.size() % dim_ != 0) throw ValidationError("boundary index list length is not a multiple of d");
  if (interior_.size() % (dim_ + 1) != 0) {
    throw ValidationError("interior index list length is not a multiple of d+1");
  }
  if (dim_ == 2) {
    for (auto& v : vertices_) {
      if (v.z != 0.0) throw DimensionError("planar complex has a vertex with nonzero z");
    }
  }
}

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kBadIndex: return "bad-index";
    case Violation::Kind::kOpenBoundary: return "open-boundary";
    case Violation::Kind::kNonManifold: return "non-manifold";
    case Violation::Kind::kInconsistentOrientation: return "inconsistent-orientation";
    case Violation::Kind::kDegenerateSimplex: return "degenerate-simplex";
    case Violation::Kind::kInteriorMismatch: return "interior-mismatch";
    case Violation::Kind::kEmpty: return "empty";
  }
  return "unknown";
}

namespace {

double signed_simplex_volume(int dim, std::span<const Vec3> v, std::span<const Index> s) {
  if (dim == 2) return signed_area2d(v[s[0]], v[s[1]], v[s[2]]);
  return signed_volume(v[s[0]], v[s[1]], v[s[2]], v[s[3]]);
}

double longest_edge(std::span<const Vec3> v, std::span<const Index> s) {
  double longest = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = a + 1; b < s.size(); ++b) longest = std::max(longest, distance(v[s[a]], v[s[b]]));
  }
  return longest;
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

template <std::size_t N>
std::array<Index, N> sorted_tuple(std::span<const Index> s) {
  std::array<Index, N> t{};
  std::copy(s.begin(), s.end(), t.begin());
  std::sort(t.begin(), t.end());
  return t;
}

std::string join_indices(std::span<const Index> s) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
  out << ")";
  return out.str();
}

void check_boundary_3d(const SimplicialComplex& c, std::vector<Violation>& report) {
  // undirected edge -> (uses, net orientation)
  std::map<std::array<Index, 2>, std::pair<int, int>> edges;
  for (std::size_t t = 0; t < c.boundary_size(); ++t) {
    auto tri = c.boundary_simplex(t);
    for (int k = 0; k < 3; ++k) {
      Index a = tri[k], b = tri[(k + 1) % 3];
      auto& e = edges[{std::min(a, b), std::max(a, b)}];
      e.first += 1;
      e.second += a < b ? 1 : -1;
    }
  }
  std::vector<std::array<Index, 2>> open;
  for (const auto& [edge, use] : edges) {
    if (use.first == 1) {
      open.push_back(edge);
    } else if (use.first > 2) {
      report.push_back({Violation::Kind::kNonManifold,
                        "edge " + join_indices(edge) + " is shared by " + std::to_string(use.first) + " triangles"});
    } else if (use.second != 0) {
      report.push_back({Violation::Kind::kInconsistentOrientation,
                        "edge " + join_indices(edge) + " is traversed twice in the same direction"});
    }
  }
  if (open.empty()) return;
  // One violation per connected hole.
  UnionFind uf(c.vertices().size());
  for (const auto& e : open) uf.unite(e[0], e[1]);
  std::map<std::size_t, std::vector<std::array<Index, 2>>> holes;
  for (const auto& e : open) holes[uf.find(e[0])].push_back(e);
  for (const auto& [root, hole] : holes) {
    std::string msg = "open boundary loop with " + std::to_string(hole.size()) + " edge(s):";
    for (const auto& e : hole) msg += " " + join_indices(e);
    report.push_back({Violation::Kind::kOpenBoundary, msg});
  }
}

void check_boundary_2d(const SimplicialComplex& c, std::vector<Violation>& report) {
  std::vector<int> starts(c.vertices().size(), 0), ends(c.vertices().size(), 0);
  for (std::size_t s = 0; s < c.boundary_size(); ++s) {
    auto seg = c.boundary_simplex(s);
    starts[seg[0]] += 1;
    ends[seg[1]] += 1;
  }
  for (std::size_t v = 0; v < starts.size(); ++v) {
    int uses = starts[v] + ends[v];
    if (uses == 0) continue;
    if (uses == 1) {
      report.push_back({Violation::Kind::kOpenBoundary, "vertex " + std::to_string(v) + " ends an open chain"});
    } else if (uses > 2) {
      report.push_back({Violation::Kind::kNonManifold,
                        "vertex " + std::to_string(v) + " is shared by " + std::to_string(uses) + " segments"});
    } else if (starts[v] != 1) {
      report.push_back({Violation::Kind::kInconsistentOrientation,
                        "segments meeting at vertex " + std::to_string(v) + " have opposite orientation"});
    }
  }
}

template <std::size_t N>
void check_interior_faces(const SimplicialComplex& c, std::vector<Violation>& report) {
  const int d = c.dim();
  std::map<std::array<Index, N>, int> faces;
  std::vector<Index> face(d);
  for (std::size_t i = 0; i < c.interior_size(); ++i) {
    auto s = c.interior_simplex(i);
    for (int skip = 0; skip <= d; ++skip) {
      int k = 0;
      for (int j = 0; j <= d; ++j) {
        if (j != skip) face[k++] = s[j];
      }
      faces[sorted_tuple<N>(face)] += 1;
    }
  }
  std::map<std::array<Index, N>, int> boundary;
  for (std::size_t i = 0; i < c.boundary_size(); ++i) boundary[sorted_tuple<N>(c.boundary_simplex(i))] += 1;

  for (const auto& [f, count] : faces) {
    if (count > 2) {
      report.push_back({Violation::Kind::kNonManifold,
                        "interior face " + join_indices(f) + " is shared by " + std::to_string(count) + " simplices"});
    } else if (count == 1 && !boundary.contains(f)) {
      report.push_back({Violation::Kind::kInteriorMismatch,
                        "interior tessellation exposes face " + join_indices(f) + " that is not on the boundary"});
    }
  }
  for (const auto& [f, count] : boundary) {
    auto it = faces.find(f);
    if (it == faces.end() || it->second != 1) {
      report.push_back({Violation::Kind::kInteriorMismatch,
                        "boundary simplex " + join_indices(f) + " is not an exposed face of the tessellation"});
    }
    if (count > 1) {
      report.push_back({Violation::Kind::kNonManifold, "boundary simplex " + join_indices(f) + " is duplicated"});
    }
  }
}

}  // namespace

std::vector<Violation> validate(const SimplicialComplex& c) {
  std::vector<Violation> report;
  const auto& v = c.vertices();
  const int d = c.dim();
  if (v.empty() || c.boundary_size() == 0) {
    report.push_back({Violation::Kind::kEmpty, "complex has no vertices or no boundary simplices"});
    return report;
  }

  bool indices_ok = true;
  auto check_indices = [&](const char* what, std::size_t count, auto simplex) {
    for (std::size_t i = 0; i < count; ++i) {
      for (Index idx : simplex(i)) {
        if (idx >= v.size()) {
          report.push_back({Violation::Kind::kBadIndex, std::string(what) + " simplex " + std::to_string(i) +
                                                            " references missing vertex " + std::to_string(idx)});
          indices_ok = false;
        }
      }
    }
  };
  check_indices("boundary", c.boundary_size(), [&](std::size_t i) { return c.boundary_simplex(i); });
  check_indices("interior", c.interior_size(), [&](std::size_t i) { return c.interior_simplex(i); });
  if (!indices_ok) return report;

  for (std::size_t i = 0; i < c.boundary_size(); ++i) {
    auto s = c.boundary_simplex(i);
    double scale = longest_edge(v, s);
    double m = facet_measure(c, i);
    if (m <= 1e-12 * std::pow(scale, d - 1) || scale == 0.0) {
      report.push_back({Violation::Kind::kDegenerateSimplex,
                        "boundary simplex " + std::to_string(i) + " " + join_indices(s) + " has zero measure"});
    }
  }
  for (std::size_t i = 0; i < c.interior_size(); ++i) {
    auto s = c.interior_simplex(i);
    double scale = longest_edge(v, s);
    double m = std::abs(signed_simplex_volume(d, v, s));
    if (m <= 1e-12 * std::pow(scale, d) || scale == 0.0) {
      report.push_back({Violation::Kind::kDegenerateSimplex,
                        "interior simplex " + std::to_string(i) + " " + join_indices(s) + " has zero volume"});
    }
  }

  if (d == 3) {
    check_boundary_3d(c, report);
    if (c.has_interior()) check_interior_faces<3>(c, report);
  } else {
    check_boundary_2d(c, report);
    if (c.has_interior()) check_interior_faces<2>(c, report);
  }
  return report;
}

SimplicialComplex translate(const SimplicialComplex& c, const Vec3& offset) {
  if (c.dim() == 2 && offset.z != 0.0) throw DimensionError("translation of a planar complex must have z == 0");
  std::vector<Vec3> moved = c.vertices();
  for (auto& p : moved) p += offset;
  return SimplicialComplex(c.dim(), std::move(moved), c.boundary_indices(), c.interior_indices());
}

SimplicialComplex scale(const SimplicialComplex& c, double factor) {
  if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
  std::vector<Vec3> scaled = c.vertices();
  for (auto& p : scaled) p *= factor;
  return SimplicialComplex(c.dim(), std::move(scaled), c.boundary_indices(), c.interior_indices());
}

double simplex_volume(const SimplicialComplex& c, std::size_t i) {
  return std::abs(signed_simplex_volume(c.dim(), c.vertices(), c.interior_simplex(i)));
}

double facet_measure(const SimplicialComplex& c, std::size_t i) {
  const auto& v = c.vertices();
  auto s = c.boundary_simplex(i);
  if (c.dim() == 2) return distance(v[s[0]], v[s[1]]);
  return triangle_area(v[s[0]], v[s[1]], v[s[2]]);
}

double boundary_measure(const SimplicialComplex& c) {
  double total = 0.0;
  for (std::size_t i = 0; i < c.boundary_size(); ++i) total += facet_measure(c, i);
  return total;
}

MeasureTotals measure_totals(const SimplicialComplex& c) {
  if (!c.has_interior()) throw ValidationError("measure_totals needs an interior tessellation");
  MeasureTotals totals;
  for (std::size_t i = 0; i < c.interior_size(); ++i) totals.volume += simplex_volume(c, i);
  totals.boundary = boundary_measure(c);
  return totals;
}

std::vector<Index> extract_boundary(int dim, std::span<const Vec3> vertices, std::span<const Index> interior) {
  const std::size_t stride = dim + 1;
  // sorted face -> (count, oriented face)
  std::map<std::vector<Index>, std::pair<int, std::vector<Index>>> faces;
  for (std::size_t i = 0; i * stride < interior.size(); ++i) {
    auto s = interior.subspan(i * stride, stride);
    bool positive = signed_simplex_volume(dim, vertices, s) > 0.0;
    for (std::size_t skip = 0; skip < stride; ++skip) {
      std::vector<Index> face;
      for (std::size_t j = 0; j < stride; ++j) {
        if (j != skip) face.push_back(s[j]);
      }
      // Dropping vertex `skip` from a positively oriented simplex leaves an
      // outward face for even `skip` and an inward one for odd `skip`.
      bool flip = (skip % 2 == 0) != positive;
      if (flip) std::swap(face[0], face[1]);
      auto key = face;
      std::sort(key.begin(), key.end());
      auto& entry = faces[key];
      entry.first += 1;
      entry.second = face;
    }
  }
  std::vector<Index> boundary;
  for (const auto& [key, entry] : faces) {
    if (entry.first == 1) boundary.insert(boundary.end(), entry.second.begin(), entry.second.end());
  }
  return boundary;
}

Box bounding_box(const SimplicialComplex& c) {
  Box box{{1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300}};
  for (const auto& p : c.vertices()) {
    for (std::size_t a = 0; a < 3; ++a) {
      box.lower[a] = std::min(box.lower[a], p[a]);
      box.upper[a] = std::max(box.upper[a], p[a]);
    }
  }
  return box;
}

Vec3 centroid(const SimplicialComplex& c) {
  Vec3 sum;
  for (const auto& p : c.vertices()) sum += p;
  return sum * (1.0 / static_cast<double>(c.vertices().size()));
}

}  // namespace rparallel
