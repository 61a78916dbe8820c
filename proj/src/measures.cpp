#include "rparallel/measures.hpp"

#include <algorithm>
#include <cstdint>

#include "rparallel/clip.hpp"
#include "rparallel/error.hpp"
#include "rparallel/parallel.hpp"

namespace rparallel {

MeasurePair MeasurePair::parse(const std::string& text) {
  if (text.size() != 2 || (text[0] != '0' && text[0] != '1') || (text[1] != '0' && text[1] != '1')) {
    throw ValidationError("measure pair must be one of 00, 01, 10, 11 (got '" + text + "')");
  }
  return MeasurePair(text[0] - '0', text[1] - '0');
}

RadiusGrid::RadiusGrid(std::vector<double> radii) : radii_(std::move(radii)) {
  if (radii_.empty()) throw ValidationError("radius grid is empty");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!(radii_[i] >= 0.0) || !std::isfinite(radii_[i])) throw ValidationError("radii must be finite and >= 0");
    if (i > 0 && !(radii_[i] > radii_[i - 1])) throw ValidationError("radii must be strictly increasing");
  }
}

RadiusGrid RadiusGrid::uniform(double r_max, std::size_t steps) {
  if (!(r_max > 0.0)) throw ValidationError("r_max must be positive");
  if (steps < 1) throw ValidationError("radius grid needs at least one step");
  std::vector<double> radii(steps);
  for (std::size_t k = 0; k < steps; ++k) radii[k] = r_max * static_cast<double>(k + 1) / static_cast<double>(steps);
  return RadiusGrid(std::move(radii));
}

// ---------------------------------------------------------------------------
// Vertex distances and classification

std::vector<double> vertex_distances(const SimplicialComplex& x, const DistanceField& field) {
  if (x.dim() != field.spec().dim) throw DimensionError("observed object and distance field dimensions differ");
  std::vector<double> d(x.vertices().size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = field.interpolate(x.vertices()[i]);
  return d;
}

std::vector<double> vertex_distances(const SimplicialComplex& x, const ReferenceDistance& exact) {
  if (x.dim() != exact.dim()) throw DimensionError("observed object and reference dimensions differ");
  std::vector<double> d(x.vertices().size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = exact(x.vertices()[i]);
  return d;
}

namespace {

std::size_t simplex_count(const SimplicialComplex& x, SimplexSet set) {
  return set == SimplexSet::kInterior ? x.interior_size() : x.boundary_size();
}

std::span<const Index> simplex_at(const SimplicialComplex& x, SimplexSet set, std::size_t i) {
  return set == SimplexSet::kInterior ? x.interior_simplex(i) : x.boundary_simplex(i);
}

void check_distances(const SimplicialComplex& x, std::span<const double> d) {
  if (d.size() != x.vertices().size()) throw ValidationError("one distance per vertex of X is required");
}

// Per-simplex distance range and full measure, shared by every radius.
struct SimplexTable {
  std::vector<double> lo, hi, full;
};

SimplexTable tabulate(const SimplicialComplex& x, std::span<const double> d, SimplexSet set) {
  SimplexTable t;
  std::size_t n = simplex_count(x, set);
  t.lo.resize(n);
  t.hi.resize(n);
  t.full.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto s = simplex_at(x, set, i);
    double lo = d[s[0]], hi = d[s[0]];
    for (Index v : s) {
      lo = std::min(lo, d[v]);
      hi = std::max(hi, d[v]);
    }
    t.lo[i] = lo;
    t.hi[i] = hi;
    t.full[i] = set == SimplexSet::kInterior ? simplex_volume(x, i) : facet_measure(x, i);
  }
  return t;
}

class MeasureKernel {
 public:
  MeasureKernel(const SimplicialComplex& x, std::span<const double> d, MeasurePair pair) : x_(x), d_(d), pair_(pair) {
    check_distances(x, d);
    set_ = pair.eps() == 0 ? SimplexSet::kInterior : SimplexSet::kBoundary;
    if (set_ == SimplexSet::kInterior && !x.has_interior()) {
      throw ValidationError("measures with eps = 0 need an interior tessellation of X");
    }
    table_ = tabulate(x, d, set_);
  }

  double operator()(double r) const {
    if (!(r >= 0.0)) throw ValidationError("radius must be >= 0");
    const bool level = pair_.eps_prime() == 1;
    double total = 0.0;
    for (std::size_t i = 0; i < table_.full.size(); ++i) {
      if (table_.lo[i] > r) continue;
      if (table_.hi[i] <= r) {
        if (!level) total += table_.full[i];
        continue;
      }
      total += partial(i, r);
    }
    return total;
  }

 private:
  double partial(std::size_t i, double r) const {
    const auto& v = x_.vertices();
    auto s = simplex_at(x_, set_, i);
    const bool level = pair_.eps_prime() == 1;
    if (x_.dim() == 3) {
      if (set_ == SimplexSet::kInterior) {
        std::array<Vec3, 4> p{v[s[0]], v[s[1]], v[s[2]], v[s[3]]};
        std::array<double, 4> f{d_[s[0]], d_[s[1]], d_[s[2]], d_[s[3]]};
        return level ? clip::tet_level_area(p, f, r) : clip::tet_sublevel_volume(p, f, r);
      }
      std::array<Vec3, 3> p{v[s[0]], v[s[1]], v[s[2]]};
      std::array<double, 3> f{d_[s[0]], d_[s[1]], d_[s[2]]};
      return level ? clip::tri_level_length(p, f, r) : clip::tri_sublevel_area(p, f, r);
    }
    if (set_ == SimplexSet::kInterior) {
      std::array<Vec3, 3> p{v[s[0]], v[s[1]], v[s[2]]};
      std::array<double, 3> f{d_[s[0]], d_[s[1]], d_[s[2]]};
      return level ? clip::tri_level_length(p, f, r) : clip::tri_sublevel_area(p, f, r);
    }
    std::array<Vec3, 2> p{v[s[0]], v[s[1]]};
    std::array<double, 2> f{d_[s[0]], d_[s[1]]};
    return level ? static_cast<double>(clip::seg_level_crossings(f, r)) : clip::seg_sublevel_length(p, f, r);
  }

  const SimplicialComplex& x_;
  std::span<const double> d_;
  MeasurePair pair_;
  SimplexSet set_;
  SimplexTable table_;
};

}  // namespace

SimplexPartition classify_simplices(const SimplicialComplex& x, std::span<const double> d, double r, SimplexSet set) {
  check_distances(x, d);
  SimplexPartition part;
  for (std::size_t i = 0; i < simplex_count(x, set); ++i) {
    auto s = simplex_at(x, set, i);
    std::size_t below = 0;
    for (Index v : s) below += d[v] <= r ? 1 : 0;
    if (below == s.size()) {
      part.interior.push_back(i);
    } else if (below == 0) {
      part.exterior.push_back(i);
    } else {
      part.intersecting.push_back(i);
    }
  }
  return part;
}

SimplexPartition classify_simplices(const SimplicialComplex& x, const DistanceField& field, double r, SimplexSet set) {
  auto d = vertex_distances(x, field);
  return classify_simplices(x, d, r, set);
}

double mu(const SimplicialComplex& x, std::span<const double> d, double r, MeasurePair pair) {
  return MeasureKernel(x, d, pair)(r);
}

double mu(const SimplicialComplex& x, const DistanceField& field, double r, MeasurePair pair) {
  auto d = vertex_distances(x, field);
  return mu(x, d, r, pair);
}

MeasureCurve mu_curve(const SimplicialComplex& x, std::span<const double> d, const RadiusGrid& radii,
                      MeasurePair pair) {
  MeasureKernel kernel(x, d, pair);
  MeasureCurve curve{"mu" + pair.label(), radii, std::vector<double>(radii.size())};
  for (std::size_t k = 0; k < radii.size(); ++k) curve.values[k] = kernel(radii[k]);
  return curve;
}

MeasureCurve mu_curve(const SimplicialComplex& x, const DistanceField& field, const RadiusGrid& radii,
                      MeasurePair pair) {
  auto d = vertex_distances(x, field);
  return mu_curve(x, d, radii, pair);
}

// ---------------------------------------------------------------------------
// Normalization over the grid cells inside W

namespace {

struct CellRange {
  std::array<std::size_t, 3> begin{0, 0, 0};
  std::array<std::size_t, 3> end{1, 1, 1};  // exclusive cell index
};

CellRange window_cells(const GridSpec& spec, const Window& window) {
  if (window.dim != spec.dim) throw DimensionError("window and grid dimensions differ");
  CellRange range;
  for (int a = 0; a < spec.dim; ++a) {
    double lo = (window.lower[a] - spec.origin[a]) / spec.spacing[a];
    double hi = (window.upper[a] - spec.origin[a]) / spec.spacing[a];
    double lo_i = std::round(lo), hi_i = std::round(hi);
    if (std::abs(lo - lo_i) > 1e-6 || std::abs(hi - hi_i) > 1e-6) {
      throw ValidationError("window faces must lie on grid node planes (build the grid with GridSpec::aligned)");
    }
    if (lo_i < 0.0 || hi_i > static_cast<double>(spec.counts[a] - 1)) {
      throw OutOfDomainError("window extends beyond the distance grid");
    }
    range.begin[a] = static_cast<std::size_t>(lo_i);
    range.end[a] = static_cast<std::size_t>(hi_i);
  }
  return range;
}

// Freudenthal decomposition: one tetrahedron per axis permutation, all sharing
// the main diagonal, so neighbouring cells match face to face.
constexpr int kCubeTets[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};
constexpr int kSquareTris[2][3] = {{0, 1, 3}, {0, 2, 3}};

struct SlabSums {
  std::vector<std::int64_t> full_from;  // number of cells that become full at radius index k
  std::vector<double> volume;
  std::vector<double> area;
};

}  // namespace

std::array<MeasureCurve, 2> n_curves(const DistanceField& field, const Window& window, const RadiusGrid& radii) {
  const GridSpec& spec = field.spec();
  const CellRange cells = window_cells(spec, window);
  const int d = spec.dim;
  const std::size_t nr = radii.size();
  const auto& rv = radii.values();
  double cell_volume = spec.spacing.x * spec.spacing.y * (d == 3 ? spec.spacing.z : 1.0);

  const int outer = d == 3 ? 2 : 1;
  const std::size_t slabs = cells.end[outer] - cells.begin[outer];
  std::vector<SlabSums> sums(slabs);

  parallel_for(slabs, [&](std::size_t slab) {
    SlabSums& acc = sums[slab];
    acc.full_from.assign(nr + 1, 0);
    acc.volume.assign(nr, 0.0);
    acc.area.assign(nr, 0.0);
    std::size_t k = d == 3 ? cells.begin[2] + slab : 0;
    std::size_t j_begin = d == 3 ? cells.begin[1] : cells.begin[1] + slab;
    std::size_t j_end = d == 3 ? cells.end[1] : j_begin + 1;
    std::array<double, 8> value{};
    std::array<Vec3, 8> corner{};
    const int n_corners = d == 3 ? 8 : 4;
    for (std::size_t j = j_begin; j < j_end; ++j) {
      for (std::size_t i = cells.begin[0]; i < cells.end[0]; ++i) {
        double lo = 1e300, hi = -1e300;
        for (int c = 0; c < n_corners; ++c) {
          value[c] = field.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          lo = std::min(lo, value[c]);
          hi = std::max(hi, value[c]);
        }
        std::size_t first = std::lower_bound(rv.begin(), rv.end(), lo) - rv.begin();
        if (first == nr) continue;
        std::size_t full = std::lower_bound(rv.begin() + first, rv.end(), hi) - rv.begin();
        acc.full_from[full] += 1;
        if (first == full) continue;
        for (int c = 0; c < n_corners; ++c) corner[c] = spec.node(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
        for (std::size_t q = first; q < full; ++q) {
          double r = rv[q];
          if (d == 3) {
            for (const auto& t : kCubeTets) {
              std::array<Vec3, 4> p{corner[t[0]], corner[t[1]], corner[t[2]], corner[t[3]]};
              std::array<double, 4> f{value[t[0]], value[t[1]], value[t[2]], value[t[3]]};
              acc.volume[q] += clip::tet_sublevel_volume(p, f, r);
              acc.area[q] += clip::tet_level_area(p, f, r);
            }
          } else {
            for (const auto& t : kSquareTris) {
              std::array<Vec3, 3> p{corner[t[0]], corner[t[1]], corner[t[2]]};
              std::array<double, 3> f{value[t[0]], value[t[1]], value[t[2]]};
              acc.volume[q] += clip::tri_sublevel_area(p, f, r);
              acc.area[q] += clip::tri_level_length(p, f, r);
            }
          }
        }
      }
    }
  });

  std::array<MeasureCurve, 2> out{MeasureCurve{"N0", radii, std::vector<double>(nr)},
                                  MeasureCurve{"N1", radii, std::vector<double>(nr)}};
  std::int64_t full_cells = 0;
  std::vector<std::int64_t> starts(nr + 1, 0);
  for (const auto& s : sums) {
    for (std::size_t q = 0; q <= nr; ++q) starts[q] += s.full_from[q];
  }
  for (std::size_t q = 0; q < nr; ++q) {
    full_cells += starts[q];
    double partial_volume = 0.0, partial_area = 0.0;
    for (const auto& s : sums) {
      partial_volume += s.volume[q];
      partial_area += s.area[q];
    }
    out[0].values[q] = static_cast<double>(full_cells) * cell_volume + partial_volume;
    out[1].values[q] = partial_area;
  }
  return out;
}

MeasureCurve n_curve(const DistanceField& field, const Window& window, const RadiusGrid& radii, int eps_prime) {
  if (eps_prime != 0 && eps_prime != 1) throw ValidationError("eps' must be 0 or 1");
  return n_curves(field, window, radii)[eps_prime];
}

double normalization(const DistanceField& field, const Window& window, double r, int eps_prime) {
  return n_curve(field, window, RadiusGrid({r}), eps_prime).values[0];
}

double ratio_or_missing(double numerator, double denominator) {
  if (denominator == 0.0 || is_missing(denominator) || is_missing(numerator)) return kMissing;
  return numerator / denominator;
}

double nu(const SimplicialComplex& x, const DistanceField& field, double r, MeasurePair pair, const Window& window) {
  return ratio_or_missing(mu(x, field, r, pair), normalization(field, window, r, pair.eps_prime()));
}

MeasureCurve nu_curve(const SimplicialComplex& x, const DistanceField& field, const RadiusGrid& radii,
                      MeasurePair pair, const Window& window) {
  auto m = mu_curve(x, field, radii, pair);
  auto n = n_curve(field, window, radii, pair.eps_prime());
  MeasureCurve curve{"nu" + pair.label(), radii, std::vector<double>(radii.size())};
  for (std::size_t k = 0; k < radii.size(); ++k) curve.values[k] = ratio_or_missing(m.values[k], n.values[k]);
  return curve;
}

MeasureTable measure_table(const SimplicialComplex& x, std::span<const double> d, const DistanceField& field,
                           const Window& window, const RadiusGrid& radii, std::array<bool, 4> selected) {
  MeasureTable table{radii, selected, {}, {}, {}};
  auto n = n_curves(field, window, radii);
  table.n[0] = n[0].values;
  table.n[1] = n[1].values;
  for (const auto& pair : kAllPairs) {
    if (!selected[pair.slot()]) continue;
    table.mu[pair.slot()] = mu_curve(x, d, radii, pair).values;
    auto& nu_values = table.nu[pair.slot()];
    nu_values.resize(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
      nu_values[k] = ratio_or_missing(table.mu[pair.slot()][k], table.n[pair.eps_prime()][k]);
    }
  }
  return table;
}

}  // namespace rparallel
