#pragma once

#include <vector>

#include "rparallel/measures.hpp"

namespace rparallel {

/// Ball of radius R whose center lies at distance R from a reference
/// hyperplane (a disk touching a line in 2D).
struct TangentBallScene {
  int dim = 3;
  double radius = 1.0;

  TangentBallScene(int dim, double radius);
};

/// Closed-form mu_{eps,eps'}(X, Y^r) for the tangent configuration.
/// At r == 2R the "otherwise" branch applies, except for the 2D point count,
/// which is 1 at r == 0 and r == 2R.
double analytic_mu(const TangentBallScene& scene, double r, MeasurePair pair);

/// The reference plane is unbounded, so every N is infinite and nu is 0.
double analytic_nu(const TangentBallScene& scene, double r, MeasurePair pair);

/// d/dr of the closed-form mu00, evaluated symbolically.
double analytic_mu00_derivative(const TangentBallScene& scene, double r);

struct ConsistencyReport {
  std::vector<double> radii;
  std::vector<double> derivative;  // d mu00 / dr
  std::vector<double> mu01;
  double max_abs_deviation = 0.0;
  double max_rel_deviation = 0.0;
};

/// Compares d mu00/dr with mu01 at every radius.
ConsistencyReport analytic_consistency_check(const TangentBallScene& scene, const std::vector<double>& radii);

}  // namespace rparallel
