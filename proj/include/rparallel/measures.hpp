#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rparallel/complex.hpp"
#include "rparallel/distance.hpp"
#include "rparallel/scene.hpp"

namespace rparallel {

/// Missing value, e.g. a ratio whose normalization is zero. Serialized as an empty CSV cell.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// (eps, eps'): whether the boundary operator is applied to X and to Y^r respectively.
class MeasurePair {
 public:
  constexpr MeasurePair(int eps, int eps_prime) : eps_(eps), eps_prime_(eps_prime) {
    if ((eps != 0 && eps != 1) || (eps_prime != 0 && eps_prime != 1)) throw std::invalid_argument("eps must be 0 or 1");
  }
  /// "00", "01", "10" or "11".
  static MeasurePair parse(const std::string& text);

  constexpr int eps() const { return eps_; }
  constexpr int eps_prime() const { return eps_prime_; }
  /// 0..3 in the order 00, 01, 10, 11.
  constexpr int slot() const { return 2 * eps_ + eps_prime_; }
  std::string label() const { return std::to_string(eps_) + std::to_string(eps_prime_); }

  friend constexpr bool operator==(const MeasurePair&, const MeasurePair&) = default;

 private:
  int eps_;
  int eps_prime_;
};

inline constexpr std::array<MeasurePair, 4> kAllPairs{MeasurePair{0, 0}, MeasurePair{0, 1}, MeasurePair{1, 0},
                                                      MeasurePair{1, 1}};

/// Strictly increasing, nonnegative radii.
class RadiusGrid {
 public:
  explicit RadiusGrid(std::vector<double> radii);
  /// r_max * k / steps for k = 1..steps (zero excluded).
  static RadiusGrid uniform(double r_max, std::size_t steps);

  const std::vector<double>& values() const { return radii_; }
  std::size_t size() const { return radii_.size(); }
  double operator[](std::size_t i) const { return radii_[i]; }
  double max() const { return radii_.back(); }

  friend bool operator==(const RadiusGrid&, const RadiusGrid&) = default;

 private:
  std::vector<double> radii_;
};

/// Sampled function r -> value.
struct MeasureCurve {
  std::string tag;  // e.g. "mu00", "N1", "nu10"
  RadiusGrid radii;
  std::vector<double> values;
};

/// Which simplices of X a classification or measure runs over.
enum class SimplexSet { kInterior, kBoundary };

struct SimplexPartition {
  std::vector<std::size_t> interior;
  std::vector<std::size_t> intersecting;
  std::vector<std::size_t> exterior;
};

/// Distance to Y at every vertex of X, interpolated from the field.
std::vector<double> vertex_distances(const SimplicialComplex& x, const DistanceField& field);
/// Exact distances at every vertex of X.
std::vector<double> vertex_distances(const SimplicialComplex& x, const ReferenceDistance& exact);

SimplexPartition classify_simplices(const SimplicialComplex& x, std::span<const double> vertex_distance, double r,
                                    SimplexSet set = SimplexSet::kInterior);
SimplexPartition classify_simplices(const SimplicialComplex& x, const DistanceField& field, double r,
                                    SimplexSet set = SimplexSet::kInterior);

/// mu_{eps,eps'}(X, Y^r) from precomputed vertex distances.
double mu(const SimplicialComplex& x, std::span<const double> vertex_distance, double r, MeasurePair pair);
double mu(const SimplicialComplex& x, const DistanceField& field, double r, MeasurePair pair);

MeasureCurve mu_curve(const SimplicialComplex& x, std::span<const double> vertex_distance, const RadiusGrid& radii,
                      MeasurePair pair);
MeasureCurve mu_curve(const SimplicialComplex& x, const DistanceField& field, const RadiusGrid& radii,
                      MeasurePair pair);

/// N_{eps'}(Y^r): size of the r-parallel set (eps' = 0) or of its boundary
/// (eps' = 1) inside W. W must lie on grid node planes.
double normalization(const DistanceField& field, const Window& window, double r, int eps_prime);
MeasureCurve n_curve(const DistanceField& field, const Window& window, const RadiusGrid& radii, int eps_prime);
/// Both N curves in one sweep; result[eps'] is N_{eps'}.
std::array<MeasureCurve, 2> n_curves(const DistanceField& field, const Window& window, const RadiusGrid& radii);

/// mu / N, or kMissing where N == 0.
double nu(const SimplicialComplex& x, const DistanceField& field, double r, MeasurePair pair, const Window& window);
MeasureCurve nu_curve(const SimplicialComplex& x, const DistanceField& field, const RadiusGrid& radii,
                      MeasurePair pair, const Window& window);
double ratio_or_missing(double numerator, double denominator);

/// Every mu, N and nu column for one observed object against one field.
struct MeasureTable {
  RadiusGrid radii;
  std::array<bool, 4> selected{true, true, true, true};
  std::array<std::vector<double>, 4> mu;  // indexed by MeasurePair::slot()
  std::array<std::vector<double>, 2> n;
  std::array<std::vector<double>, 4> nu;
};

MeasureTable measure_table(const SimplicialComplex& x, std::span<const double> vertex_distance,
                           const DistanceField& field, const Window& window, const RadiusGrid& radii,
                           std::array<bool, 4> selected = {true, true, true, true});

}  // namespace rparallel
