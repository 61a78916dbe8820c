#include "rparallel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rparallel/error.hpp"

namespace rparallel {

using std::numbers::pi;

TangentBallScene::TangentBallScene(int dim_, double radius_) : dim(dim_), radius(radius_) {
  if (dim != 2 && dim != 3) throw DimensionError("tangent ball scene must be 2D or 3D");
  if (!(radius > 0.0)) throw ValidationError("ball radius must be positive");
}

namespace {

// Central angle of the circular segment cut off at height r.
double segment_angle(double radius, double r) { return 2.0 * std::acos(std::clamp(1.0 - r / radius, -1.0, 1.0)); }

}  // namespace

double analytic_mu(const TangentBallScene& scene, double r, MeasurePair pair) {
  if (!(r >= 0.0)) throw ValidationError("radius must be >= 0");
  const double R = scene.radius;
  const bool cut = r < 2.0 * R;
  if (scene.dim == 3) {
    switch (pair.slot()) {
      case 0: return cut ? pi * r * r * (3.0 * R - r) / 3.0 : 4.0 * pi * R * R * R / 3.0;
      case 1: return cut ? pi * r * (2.0 * R - r) : 0.0;
      case 2: return cut ? 2.0 * pi * R * r : 4.0 * pi * R * R;
      default: return (r > 0.0 && cut) ? 2.0 * pi * std::sqrt(2.0 * R * r - r * r) : 0.0;
    }
  }
  const double theta = segment_angle(R, r);
  switch (pair.slot()) {
    case 0: return cut ? 0.5 * R * R * (theta - std::sin(theta)) : pi * R * R;
    case 1: return cut ? 2.0 * R * std::sin(theta / 2.0) : 0.0;
    case 2: return cut ? theta * R : 2.0 * pi * R;
    default:
      if (r == 0.0 || r == 2.0 * R) return 1.0;
      return cut ? 2.0 : 0.0;
  }
}

double analytic_nu(const TangentBallScene&, double r, MeasurePair) {
  if (!(r >= 0.0)) throw ValidationError("radius must be >= 0");
  return 0.0;
}

double analytic_mu00_derivative(const TangentBallScene& scene, double r) {
  if (!(r >= 0.0)) throw ValidationError("radius must be >= 0");
  const double R = scene.radius;
  if (r >= 2.0 * R) return 0.0;
  if (scene.dim == 3) {
    // d/dr [pi r^2 (3R - r) / 3] = pi (2 R r - r^2)
    return pi * (2.0 * R * r - r * r);
  }
  // d/dr [R^2/2 (theta - sin theta)] = R^2/2 (1 - cos theta) dtheta/dr,
  // dtheta/dr = 2 / (R sqrt(1 - (1 - r/R)^2)).
  const double theta = segment_angle(R, r);
  const double u = 1.0 - r / R;
  const double s = std::sqrt(1.0 - u * u);
  if (s == 0.0) return 0.0;
  return 0.5 * R * R * (1.0 - std::cos(theta)) * 2.0 / (R * s);
}

ConsistencyReport analytic_consistency_check(const TangentBallScene& scene, const std::vector<double>& radii) {
  ConsistencyReport report;
  report.radii = radii;
  for (double r : radii) {
    double lhs = analytic_mu00_derivative(scene, r);
    double rhs = analytic_mu(scene, r, MeasurePair{0, 1});
    report.derivative.push_back(lhs);
    report.mu01.push_back(rhs);
    double dev = std::abs(lhs - rhs);
    report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale > 0.0) report.max_rel_deviation = std::max(report.max_rel_deviation, dev / scale);
  }
  return report;
}

}  // namespace rparallel
