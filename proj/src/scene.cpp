#include "rparallel/scene.hpp"

#include <algorithm>
#include <set>

#include "rparallel/error.hpp"

namespace rparallel {

Window::Window(int dim_, Vec3 lower_, Vec3 upper_) : dim(dim_), lower(lower_), upper(upper_) {
  if (dim != 2 && dim != 3) throw DimensionError("window dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(lower[a] < upper[a])) throw ValidationError("window lower corner must be below upper corner");
  }
  if (dim == 2) {
    lower.z = 0.0;
    upper.z = 0.0;
  }
}

double Window::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= upper[a] - lower[a];
  return v;
}

bool Window::contains(const Vec3& p) const {
  for (int a = 0; a < dim; ++a) {
    if (p[a] < lower[a] || p[a] > upper[a]) return false;
  }
  return true;
}

bool Window::contains(const Box& box) const { return contains(box.lower) && contains(box.upper); }

bool Window::contains(const Window& other) const { return contains(other.lower) && contains(other.upper); }

Window Window::dilated(double r) const {
  Vec3 lo = lower, hi = upper;
  for (int a = 0; a < dim; ++a) {
    lo[a] -= r;
    hi[a] += r;
  }
  return Window(dim, lo, hi);
}

Window Window::translated(const Vec3& v) const { return Window(dim, lower + v, upper + v); }

double Window::dilation_allowance(const Window& outer) const {
  double allowance = 1e300;
  for (int a = 0; a < dim; ++a) {
    allowance = std::min({allowance, lower[a] - outer.lower[a], outer.upper[a] - upper[a]});
  }
  return allowance;
}

AnalyticPrimitive AnalyticPrimitive::plane(int dim, Vec3 unit_normal, double offset) {
  if (dim != 2 && dim != 3) throw DimensionError("primitive dimension must be 2 or 3");
  if (dim == 2 && unit_normal.z != 0.0) throw DimensionError("planar line normal must have z == 0");
  if (std::abs(norm(unit_normal) - 1.0) > 1e-12) throw ValidationError("plane normal must have unit length");
  return AnalyticPrimitive(dim, Plane{unit_normal, offset});
}

AnalyticPrimitive AnalyticPrimitive::sphere(int dim, Vec3 center, double radius) {
  if (dim != 2 && dim != 3) throw DimensionError("primitive dimension must be 2 or 3");
  if (dim == 2 && center.z != 0.0) throw DimensionError("planar disk center must have z == 0");
  if (!(radius > 0.0)) throw ValidationError("sphere radius must be strictly positive");
  return AnalyticPrimitive(dim, Sphere{center, radius});
}

AnalyticPrimitive AnalyticPrimitive::translated(const Vec3& v) const {
  if (const auto* p = std::get_if<Plane>(&shape_)) return AnalyticPrimitive(dim_, Plane{p->normal, p->offset + dot(p->normal, v)});
  const auto& s = std::get<Sphere>(shape_);
  return AnalyticPrimitive(dim_, Sphere{s.center + v, s.radius});
}

AnalyticPrimitive AnalyticPrimitive::scaled(double f) const {
  if (const auto* p = std::get_if<Plane>(&shape_)) return AnalyticPrimitive(dim_, Plane{p->normal, p->offset * f});
  const auto& s = std::get<Sphere>(shape_);
  return AnalyticPrimitive(dim_, Sphere{s.center * f, s.radius * f});
}

ReferenceShape ReferenceGerm::placed() const {
  if (const auto* mesh = std::get_if<MeshPtr>(&shape)) {
    return std::make_shared<const SimplicialComplex>(translate(**mesh, location));
  }
  return std::get<AnalyticPrimitive>(shape).translated(location);
}

int dim_of(const ReferenceShape& shape) {
  if (const auto* mesh = std::get_if<MeshPtr>(&shape)) return (*mesh)->dim();
  return std::get<AnalyticPrimitive>(shape).dim();
}

GermGrainScene::GermGrainScene(int dim, std::vector<ObservedGerm> observed, std::vector<ReferenceGerm> reference,
                               Window window, Window extended_window, std::optional<std::uint64_t> seed)
    : dim_(dim),
      observed_(std::move(observed)),
      reference_(std::move(reference)),
      window_(window),
      extended_window_(extended_window),
      seed_(seed) {
  if (dim_ != 2 && dim_ != 3) throw DimensionError("scene dimension must be 2 or 3");
  if (window_.dim != dim_ || extended_window_.dim != dim_) throw DimensionError("window dimension differs from scene");
  if (!extended_window_.contains(window_)) throw ValidationError("extended window does not contain the window");
  for (const auto& g : observed_) {
    if (!g.shape) throw ValidationError("observed object '" + g.id + "' has no shape");
    if (g.shape->dim() != dim_) throw DimensionError("observed object '" + g.id + "' has the wrong dimension");
    if (dim_ == 2 && g.location.z != 0.0) throw DimensionError("observed object '" + g.id + "' has z != 0");
  }
  for (const auto& g : reference_) {
    if (const auto* mesh = std::get_if<MeshPtr>(&g.shape); mesh && !*mesh) {
      throw ValidationError("reference object '" + g.id + "' has no shape");
    }
    if (dim_of(g.shape) != dim_) throw DimensionError("reference object '" + g.id + "' has the wrong dimension");
    if (dim_ == 2 && g.location.z != 0.0) throw DimensionError("reference object '" + g.id + "' has z != 0");
  }
}

GermGrainScene GermGrainScene::translated(const Vec3& v) const {
  auto observed = observed_;
  auto reference = reference_;
  for (auto& g : observed) g.location += v;
  for (auto& g : reference) g.location += v;
  return GermGrainScene(dim_, std::move(observed), std::move(reference), window_.translated(v),
                        extended_window_.translated(v), seed_);
}

std::vector<std::string> check_scene(const GermGrainScene& scene) {
  std::vector<std::string> problems;
  std::set<const SimplicialComplex*> checked;
  auto check_mesh = [&](const std::string& id, const SimplicialComplex& mesh, bool need_interior) {
    if (!checked.insert(&mesh).second) return;
    for (const auto& v : validate(mesh)) problems.push_back("object '" + id + "': " + to_string(v.kind) + ": " + v.message);
    if (need_interior && !mesh.has_interior()) {
      problems.push_back("object '" + id + "': observed mesh has no interior tessellation");
    }
  };
  std::set<std::string> ids;
  for (const auto& g : scene.observed()) {
    if (!ids.insert(g.id).second) problems.push_back("object '" + g.id + "': duplicate id");
    check_mesh(g.id, *g.shape, true);
    Box box = bounding_box(*g.shape);
    box.lower += g.location;
    box.upper += g.location;
    if (!scene.extended_window().contains(box)) {
      problems.push_back("object '" + g.id + "': observed object extends outside the extended window");
    }
  }
  for (const auto& g : scene.reference()) {
    if (!ids.insert(g.id).second) problems.push_back("object '" + g.id + "': duplicate id");
    if (const auto* mesh = std::get_if<MeshPtr>(&g.shape)) check_mesh(g.id, **mesh, false);
  }
  return problems;
}

}  // namespace rparallel
