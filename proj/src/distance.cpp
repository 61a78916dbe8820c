#include "rparallel/distance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "rparallel/error.hpp"
#include "rparallel/parallel.hpp"

namespace rparallel {

// ---------------------------------------------------------------------------
// GridSpec

GridSpec::GridSpec(int dim_, Vec3 origin_, Vec3 spacing_, std::array<std::size_t, 3> counts_)
    : dim(dim_), origin(origin_), spacing(spacing_), counts(counts_) {
  if (dim != 2 && dim != 3) throw DimensionError("grid dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(spacing[a] > 0.0)) throw ValidationError("grid spacing must be positive");
    if (counts[a] < 2) throw ValidationError("grid needs at least two samples per axis");
  }
  if (dim == 2) {
    counts[2] = 1;
    origin.z = 0.0;
    spacing.z = 1.0;
  }
}

GridSpec GridSpec::aligned(const Window& window, const Window& extended, double h) {
  if (window.dim != extended.dim) throw DimensionError("window dimensions differ");
  if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
  const int d = window.dim;
  Vec3 origin, spacing{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> counts{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    double side = window.upper[a] - window.lower[a];
    double cells = std::max(1.0, std::ceil(side / h - 1e-9));
    double step = side / cells;
    double below = std::max(0.0, std::ceil((window.lower[a] - extended.lower[a]) / step - 1e-9));
    double above = std::max(0.0, std::ceil((extended.upper[a] - window.upper[a]) / step - 1e-9));
    origin[a] = window.lower[a] - below * step;
    spacing[a] = step;
    counts[a] = static_cast<std::size_t>(below + cells + above) + 1;
  }
  return GridSpec(d, origin, spacing, counts);
}

Vec3 GridSpec::node(std::size_t i, std::size_t j, std::size_t k) const {
  return {origin.x + static_cast<double>(i) * spacing.x, origin.y + static_cast<double>(j) * spacing.y,
          dim == 3 ? origin.z + static_cast<double>(k) * spacing.z : 0.0};
}

Vec3 GridSpec::upper() const { return node(counts[0] - 1, counts[1] - 1, counts[2] - 1); }

double GridSpec::min_spacing() const {
  double h = std::min(spacing.x, spacing.y);
  return dim == 3 ? std::min(h, spacing.z) : h;
}

double GridSpec::cell_diagonal() const {
  Vec3 s = spacing;
  if (dim == 2) s.z = 0.0;
  return norm(s);
}

bool GridSpec::covers(const Window& window) const {
  Vec3 top = upper();
  for (int a = 0; a < dim; ++a) {
    double tol = 1e-9 * spacing[a];
    if (origin[a] > window.lower[a] + tol || top[a] < window.upper[a] - tol) return false;
  }
  return true;
}

bool GridSpec::contains(const Vec3& p) const {
  Vec3 top = upper();
  for (int a = 0; a < dim; ++a) {
    double tol = 1e-9 * spacing[a];
    if (p[a] < origin[a] - tol || p[a] > top[a] + tol) return false;
  }
  return true;
}

double auto_spacing(double feature_scale, const Window& extended, std::size_t max_nodes) {
  if (!(feature_scale > 0.0)) throw ValidationError("feature scale must be positive");
  double h = feature_scale / 50.0;
  double budget_h = std::pow(extended.volume() / static_cast<double>(max_nodes), 1.0 / extended.dim);
  return std::max(h, budget_h);
}

// ---------------------------------------------------------------------------
// Point-simplex distances

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double len2 = norm2(ab);
  double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + ab * t);
}

// Closest point by Voronoi region of the triangle's features.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return distance(p, a);
  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return distance(p, b);
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return distance(p, a + ab * (d1 / (d1 - d3)));
  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return distance(p, c);
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return distance(p, a + ac * (d2 / (d2 - d6)));
  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return distance(p, b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))));
  }
  double denom = 1.0 / (va + vb + vc);
  return distance(p, a + ab * (vb * denom) + ac * (vc * denom));
}

// ---------------------------------------------------------------------------
// Bounding volume hierarchy over the boundary simplices of a mesh

namespace {

double box_distance2(const Box& box, const Vec3& p) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double e = std::max({box.lower[a] - p[a], 0.0, p[a] - box.upper[a]});
    d2 += e * e;
  }
  return d2;
}

double box_max_distance(const Box& box, const Vec3& p) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double e = std::max(std::abs(p[a] - box.lower[a]), std::abs(p[a] - box.upper[a]));
    d2 += e * e;
  }
  return std::sqrt(d2);
}

double box_box_distance(const Box& a, const Box& b) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    double e = std::max({a.lower[k] - b.upper[k], 0.0, b.lower[k] - a.upper[k]});
    d2 += e * e;
  }
  return std::sqrt(d2);
}

Box merge(const Box& a, const Box& b) {
  Box m;
  for (int k = 0; k < 3; ++k) {
    m.lower[k] = std::min(a.lower[k], b.lower[k]);
    m.upper[k] = std::max(a.upper[k], b.upper[k]);
  }
  return m;
}

}  // namespace

struct ReferenceDistance::MeshIndex {
  struct Node {
    Box box;
    std::uint32_t first = 0;  // leaf: first primitive; inner: left child
    std::uint32_t count = 0;  // leaf: primitive count; inner: 0
    std::uint32_t right = 0;
  };

  const SimplicialComplex* mesh = nullptr;
  std::vector<Box> prim_box;
  std::vector<std::uint32_t> order;
  std::vector<Node> nodes;
  Box bounds;

  explicit MeshIndex(const SimplicialComplex& m) : mesh(&m) {
    const auto& v = m.vertices();
    std::size_t n = m.boundary_size();
    prim_box.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = m.boundary_simplex(i);
      Box b{v[s[0]], v[s[0]]};
      for (Index idx : s) b = merge(b, Box{v[idx], v[idx]});
      prim_box[i] = b;
    }
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    nodes.reserve(2 * n / 4 + 2);
    build(0, static_cast<std::uint32_t>(n));
    bounds = nodes.front().box;
  }

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();
    Box box = prim_box[order[begin]];
    for (std::uint32_t i = begin + 1; i < end; ++i) box = merge(box, prim_box[order[i]]);
    nodes[id].box = box;
    if (end - begin <= 4) {
      nodes[id].first = begin;
      nodes[id].count = end - begin;
      return id;
    }
    int axis = 0;
    Vec3 ext = box.upper - box.lower;
    if (ext.y > ext[axis]) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    std::uint32_t mid = begin + (end - begin) / 2;
    auto center = [&](std::uint32_t p) { return prim_box[p].lower[axis] + prim_box[p].upper[axis]; };
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return center(a) < center(b) || (center(a) == center(b) && a < b); });
    std::uint32_t left = build(begin, mid);
    std::uint32_t right = build(mid, end);
    nodes[id].first = left;
    nodes[id].right = right;
    return id;
  }

  double primitive_distance(std::uint32_t prim, const Vec3& p) const {
    const auto& v = mesh->vertices();
    auto s = mesh->boundary_simplex(prim);
    if (mesh->dim() == 2) return point_segment_distance(p, v[s[0]], v[s[1]]);
    return point_triangle_distance(p, v[s[0]], v[s[1]], v[s[2]]);
  }

  double closest(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes[stack[--top]];
      if (box_distance2(node.box, p) >= best * best) continue;
      if (node.count > 0) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          best = std::min(best, primitive_distance(order[i], p));
        }
        continue;
      }
      double dl = box_distance2(nodes[node.first].box, p);
      double dr = box_distance2(nodes[node.right].box, p);
      // Visit the nearer child first.
      if (dl < dr) {
        stack[top++] = node.right;
        stack[top++] = node.first;
      } else {
        stack[top++] = node.first;
        stack[top++] = node.right;
      }
    }
    return best;
  }

  // Crossing-number test in 2D with the half-open rule, exact for vertices.
  bool inside_2d(const Vec3& p) const {
    const auto& v = mesh->vertices();
    bool inside = false;
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes[stack[--top]];
      if (node.box.lower.y > p.y || node.box.upper.y < p.y || node.box.upper.x < p.x) continue;
      if (node.count == 0) {
        stack[top++] = node.first;
        stack[top++] = node.right;
        continue;
      }
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        auto s = mesh->boundary_simplex(order[i]);
        const Vec3& a = v[s[0]];
        const Vec3& b = v[s[1]];
        if ((a.y > p.y) != (b.y > p.y)) {
          double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
          if (p.x < x) inside = !inside;
        }
      }
    }
    return inside;
  }

  // Ray parity along `dir`. Returns -1 when a hit is too close to an edge to trust.
  int ray_parity(const Vec3& p, const Vec3& dir) const {
    const auto& v = mesh->vertices();
    Vec3 inv{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    int hits = 0;
    std::uint32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes[stack[--top]];
      double tmin = 0.0, tmax = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        double t0 = (node.box.lower[a] - p[a]) * inv[a];
        double t1 = (node.box.upper[a] - p[a]) * inv[a];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
      }
      if (tmin > tmax) continue;
      if (node.count == 0) {
        stack[top++] = node.first;
        stack[top++] = node.right;
        continue;
      }
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        auto s = mesh->boundary_simplex(order[i]);
        const Vec3 &a = v[s[0]], &b = v[s[1]], &c = v[s[2]];
        Vec3 e1 = b - a, e2 = c - a;
        Vec3 q = cross(dir, e2);
        double det = dot(e1, q);
        double scale = norm(e1) * norm(e2);
        if (std::abs(det) <= 1e-12 * scale) continue;  // ray parallel to triangle
        double inv_det = 1.0 / det;
        Vec3 tv = p - a;
        double u = dot(tv, q) * inv_det;
        Vec3 r = cross(tv, e1);
        double w = dot(dir, r) * inv_det;
        double t = dot(e2, r) * inv_det;
        constexpr double eps = 1e-9;
        if (u < -eps || w < -eps || u + w > 1.0 + eps || t < 0.0) continue;
        if (u < eps || w < eps || u + w > 1.0 - eps) return -1;
        ++hits;
      }
    }
    return hits % 2;
  }

  bool inside_3d(const Vec3& p) const {
    static const Vec3 directions[] = {
        normalized(Vec3{0.5773, 0.5779, 0.5767}),
        normalized(Vec3{-0.3261, 0.8432, 0.4275}),
        normalized(Vec3{0.7184, -0.2917, -0.6314}),
        normalized(Vec3{-0.4471, -0.6123, 0.6520}),
    };
    for (const auto& dir : directions) {
      int parity = ray_parity(p, dir);
      if (parity >= 0) return parity == 1;
    }
    return false;
  }

  bool inside(const Vec3& p) const { return mesh->dim() == 2 ? inside_2d(p) : inside_3d(p); }
};

// ---------------------------------------------------------------------------
// ReferenceDistance

ReferenceDistance::ReferenceDistance(ReferenceShape reference, ReferenceFill fill)
    : dim_(dim_of(reference)), reference_(std::move(reference)), fill_(fill) {
  if (const auto* mesh = std::get_if<MeshPtr>(&reference_)) {
    if (!*mesh || (*mesh)->boundary_size() == 0) throw ValidationError("reference mesh is empty");
    mesh_ = std::make_unique<MeshIndex>(**mesh);
  }
}

ReferenceDistance::~ReferenceDistance() = default;
ReferenceDistance::ReferenceDistance(ReferenceDistance&&) noexcept = default;
ReferenceDistance& ReferenceDistance::operator=(ReferenceDistance&&) noexcept = default;

double ReferenceDistance::operator()(const Vec3& p) const {
  if (mesh_) {
    double d = mesh_->closest(p);
    if (fill_ == ReferenceFill::kSolid && d > 0.0 && mesh_->inside(p)) return 0.0;
    return d;
  }
  const auto& prim = std::get<AnalyticPrimitive>(reference_);
  if (const auto* plane = std::get_if<Plane>(&prim.shape())) return std::abs(dot(plane->normal, p) - plane->offset);
  const auto& sphere = std::get<Sphere>(prim.shape());
  double radial = distance(p, sphere.center) - sphere.radius;
  return fill_ == ReferenceFill::kSolid ? std::max(radial, 0.0) : std::abs(radial);
}

double ReferenceDistance::lower_bound(const Box& box) const {
  if (mesh_) return box_box_distance(mesh_->bounds, box);
  const auto& prim = std::get<AnalyticPrimitive>(reference_);
  if (const auto* plane = std::get_if<Plane>(&prim.shape())) {
    double lo = 1e300, hi = -1e300;
    for (int corner = 0; corner < 8; ++corner) {
      Vec3 c{corner & 1 ? box.upper.x : box.lower.x, corner & 2 ? box.upper.y : box.lower.y,
             corner & 4 ? box.upper.z : box.lower.z};
      double s = dot(plane->normal, c) - plane->offset;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
  }
  const auto& sphere = std::get<Sphere>(prim.shape());
  double outside = std::sqrt(box_distance2(box, sphere.center)) - sphere.radius;
  if (fill_ == ReferenceFill::kSolid) return std::max(outside, 0.0);
  return std::max({outside, sphere.radius - box_max_distance(box, sphere.center), 0.0});
}

// ---------------------------------------------------------------------------
// DistanceField

DistanceField::DistanceField(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.node_count()) throw ValidationError("distance field size does not match its grid");
}

double DistanceField::interpolate(const Vec3& p) const {
  const int d = spec_.dim;
  std::size_t base[3] = {0, 0, 0};
  double t[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    double u = (p[a] - spec_.origin[a]) / spec_.spacing[a];
    double last = static_cast<double>(spec_.counts[a] - 1);
    if (!(u >= -1e-9) || !(u <= last + 1e-9)) {
      std::ostringstream msg;
      msg << "point (" << p.x << ", " << p.y << ", " << p.z << ") lies outside the distance grid";
      throw OutOfDomainError(msg.str());
    }
    u = std::clamp(u, 0.0, last);
    double cell = std::min(std::floor(u), last - 1.0);
    base[a] = static_cast<std::size_t>(cell);
    t[a] = u - cell;
  }
  const auto& nx = spec_.counts[0];
  const auto& ny = spec_.counts[1];
  std::size_t i0 = base[0] + nx * (base[1] + ny * base[2]);
  std::size_t dx = 1, dy = nx;
  auto lerp1 = [](double a, double b, double s) { return a + (b - a) * s; };
  double c00 = lerp1(values_[i0], values_[i0 + dx], t[0]);
  double c10 = lerp1(values_[i0 + dy], values_[i0 + dy + dx], t[0]);
  double plane0 = lerp1(c00, c10, t[1]);
  if (d == 2) return plane0;
  std::size_t dz = nx * ny;
  double c01 = lerp1(values_[i0 + dz], values_[i0 + dz + dx], t[0]);
  double c11 = lerp1(values_[i0 + dz + dy], values_[i0 + dz + dy + dx], t[0]);
  double plane1 = lerp1(c01, c11, t[1]);
  return lerp1(plane0, plane1, t[2]);
}

namespace {

void write_f64_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double read_f64_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError("distance field dump is truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void DistanceField::dump(std::ostream& out) const {
  char header[512];
  std::snprintf(header, sizeof header,
                "RPDF1 dim %d origin %.17g %.17g %.17g spacing %.17g %.17g %.17g counts %zu %zu %zu\n", spec_.dim,
                spec_.origin.x, spec_.origin.y, spec_.origin.z, spec_.spacing.x, spec_.spacing.y, spec_.spacing.z,
                spec_.counts[0], spec_.counts[1], spec_.counts[2]);
  out << header;
  for (double v : values_) write_f64_le(out, v);
}

DistanceField DistanceField::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("distance field dump has no header");
  std::istringstream h(line);
  std::string magic, k_dim, k_origin, k_spacing, k_counts;
  GridSpec spec;
  int dim = 0;
  Vec3 origin, spacing;
  std::array<std::size_t, 3> counts{};
  h >> magic >> k_dim >> dim >> k_origin >> origin.x >> origin.y >> origin.z >> k_spacing >> spacing.x >> spacing.y >>
      spacing.z >> k_counts >> counts[0] >> counts[1] >> counts[2];
  if (!h || magic != "RPDF1" || k_dim != "dim" || k_origin != "origin" || k_spacing != "spacing" || k_counts != "counts") {
    throw ParseError("malformed distance field header: " + line);
  }
  spec = GridSpec(dim, origin, spacing, counts);
  std::vector<double> values(spec.node_count());
  for (auto& v : values) v = read_f64_le(in);
  return DistanceField(spec, std::move(values));
}

DistanceField build_distance_field(const ReferenceDistance& reference, const GridSpec& spec) {
  if (reference.dim() != spec.dim) throw DimensionError("reference and grid dimensions differ");
  if (spec.node_count() > 400'000'000) throw ValidationError("distance grid exceeds 4e8 nodes; use a coarser spacing");
  std::vector<double> values(spec.node_count());
  const std::size_t nx = spec.counts[0], ny = spec.counts[1], nz = spec.counts[2];
  parallel_for(ny * nz, [&](std::size_t row) {
    std::size_t j = row % ny, k = row / ny;
    for (std::size_t i = 0; i < nx; ++i) values[spec.index(i, j, k)] = reference(spec.node(i, j, k));
  });
  return DistanceField(spec, std::move(values));
}

DistanceField build_distance_field(const ReferenceShape& reference, const GridSpec& spec, ReferenceFill fill) {
  return build_distance_field(ReferenceDistance(reference, fill), spec);
}

}  // namespace rparallel
