#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rparallel/error.hpp"
#include "rparallel/measures.hpp"
#include "rparallel/oracle.hpp"
#include "rparallel/synth.hpp"

using namespace rparallel;

namespace {

const MeasurePair p00{0, 0}, p01{0, 1}, p10{1, 0}, p11{1, 1};

// Grid of spacing h over the bounding box of `x` plus a margin, aligned to `w` if given.
GridSpec grid_around(const SimplicialComplex& x, double margin, double h) {
  Box b = bounding_box(x);
  Vec3 m{margin, margin, x.dim() == 3 ? margin : 0.0};
  Window cover(x.dim(), b.lower - m, b.upper + m);
  return GridSpec::aligned(cover, cover, h);
}

// Ball of radius R tangent to the plane through the origin (normal = last axis).
struct Tangent {
  int dim;
  double R;
  SimplicialComplex x;
  ReferenceShape plane;
  Tangent(int d, double radius)
      : dim(d),
        R(radius),
        x(translate(d == 3 ? icosphere(radius) : disk(radius), d == 3 ? Vec3{0, 0, radius} : Vec3{0, radius, 0})),
        plane(AnalyticPrimitive::plane(d, d == 3 ? Vec3{0, 0, 1} : Vec3{0, 1, 0}, 0.0)) {}
};

// Cuboid [0,a] x [0,b] x [0,c] with a tetrahedralized interior.
SimplicialComplex cuboid(double a, double b, double c) {
  auto unit = box(3, 1.0, 2);
  std::vector<Vec3> v;
  for (const auto& p : unit.vertices()) v.push_back({(p.x + 0.5) * a, (p.y + 0.5) * b, (p.z + 0.5) * c});
  return SimplicialComplex(3, v, unit.boundary_indices(), unit.interior_indices());
}

}  // namespace

TEST_CASE("measure pairs and radius grids") {
  CHECK(MeasurePair::parse("01") == p01);
  CHECK(MeasurePair::parse("11").slot() == 3);
  CHECK(p10.label() == "10");
  CHECK_THROWS(MeasurePair::parse("2"));
  CHECK_THROWS(MeasurePair::parse("012"));
  auto g = RadiusGrid::uniform(400.0, 100);
  CHECK(g.size() == 100);
  CHECK(g[0] == 4.0);
  CHECK(g.max() == 400.0);
  CHECK_THROWS(RadiusGrid({1.0, 1.0}));
  CHECK_THROWS(RadiusGrid({-1.0, 1.0}));
  CHECK_THROWS(RadiusGrid({}));
  CHECK_THROWS(RadiusGrid::uniform(10.0, 0));
}

TEST_CASE("classification") {
  Tangent t(3, 100.0);
  auto field = build_distance_field(t.plane, grid_around(t.x, 10.0, 4.0));
  // r below every vertex distance: everything exterior.
  auto far = translate(t.x, Vec3{0, 0, 10});
  auto none = classify_simplices(far, field, 5.0);
  CHECK(none.exterior.size() == far.interior_size());
  CHECK(none.interior.empty());

  // X inside Y: all distances zero.
  auto solid = build_distance_field(ReferenceShape(AnalyticPrimitive::sphere(3, Vec3{0, 0, 100}, 150.0)),
                                    grid_around(t.x, 10.0, 4.0));
  for (double r : {0.0, 3.0}) {
    auto all = classify_simplices(t.x, solid, r, SimplexSet::kBoundary);
    CHECK(all.interior.size() == t.x.boundary_size());
  }

  // r = R: recompute the rule directly from vertex distances.
  auto d = vertex_distances(t.x, field);
  for (auto set : {SimplexSet::kInterior, SimplexSet::kBoundary}) {
    auto part = classify_simplices(t.x, d, 100.0, set);
    const std::size_t n = set == SimplexSet::kInterior ? t.x.interior_size() : t.x.boundary_size();
    std::size_t in = 0, mixed = 0, out = 0;
    for (std::size_t s = 0; s < n; ++s) {
      auto idx = set == SimplexSet::kInterior ? t.x.interior_simplex(s) : t.x.boundary_simplex(s);
      std::size_t below = 0;
      for (Index i : idx) below += d[i] <= 100.0 ? 1 : 0;
      (below == idx.size() ? in : below == 0 ? out : mixed) += 1;
    }
    CHECK(part.interior.size() == in);
    CHECK(part.intersecting.size() == mixed);
    CHECK(part.exterior.size() == out);
    CHECK(mixed > 0);
  }
}

TEST_CASE("3D tangent sphere against the closed forms") {
  Tangent t(3, 100.0);
  auto field = build_distance_field(t.plane, grid_around(t.x, 10.0, 2.0));
  TangentBallScene oracle(3, 100.0);
  auto d = vertex_distances(t.x, field);
  for (const auto& p : kAllPairs) {
    double tol = p == p11 ? 0.05 : 0.02;
    CHECK(std::abs(mu(t.x, d, 50.0, p) / analytic_mu(oracle, 50.0, p) - 1.0) <= tol);
  }
  CHECK(mu(t.x, d, 50.0, p00) == doctest::Approx(654498.5).epsilon(0.02));
  CHECK(mu(t.x, d, 50.0, p11) == doctest::Approx(544.14).epsilon(0.05));
  auto totals = measure_totals(t.x);
  for (double r : {200.0, 250.0}) {
    CHECK(mu(t.x, d, r, p00) == doctest::Approx(totals.volume).epsilon(1e-9));
    CHECK(mu(t.x, d, r, p10) == doctest::Approx(totals.boundary).epsilon(1e-9));
    CHECK(mu(t.x, d, r, p01) == 0.0);
    CHECK(mu(t.x, d, r, p11) == 0.0);
  }
}

TEST_CASE("2D tangent disk against the closed forms") {
  Tangent t(2, 100.0);
  auto field = build_distance_field(t.plane, grid_around(t.x, 10.0, 2.0));
  auto d = vertex_distances(t.x, field);
  CHECK(mu(t.x, d, 50.0, p00) == doctest::Approx(6141.8).epsilon(0.01));
  CHECK(mu(t.x, d, 50.0, p01) == doctest::Approx(173.2).epsilon(0.01));
  CHECK(mu(t.x, d, 50.0, p10) == doctest::Approx(209.4).epsilon(0.01));
  CHECK(mu(t.x, d, 50.0, p11) == 2.0);
}

TEST_CASE("disjoint at r = 0 and error paths") {
  Tangent t(3, 50.0);
  auto lifted = translate(t.x, Vec3{0, 0, 5});
  auto field = build_distance_field(t.plane, grid_around(lifted, 10.0, 5.0));
  for (const auto& p : kAllPairs) CHECK(mu(lifted, field, 0.0, p) == 0.0);

  SimplicialComplex hollow(3, lifted.vertices(), lifted.boundary_indices());
  CHECK_THROWS_AS(mu(hollow, field, 10.0, p00), ValidationError);
  CHECK_NOTHROW(mu(hollow, field, 10.0, p10));
  CHECK_THROWS_AS(mu(translate(lifted, Vec3{500, 0, 0}), field, 10.0, p00), OutOfDomainError);
  CHECK_THROWS(mu(lifted, field, -1.0, p00));
}

TEST_CASE("normalization for a plane and a ball") {
  Window w(3, Vec3{-250, -250, 0}, Vec3{250, 250, 500});
  auto grid = GridSpec::aligned(w, w.dilated(20.0), 10.0);
  auto field = build_distance_field(ReferenceShape(AnalyticPrimitive::plane(3, Vec3{0, 0, 1}, 0.0)), grid);
  CHECK(normalization(field, w, 200.0, 0) == doctest::Approx(5.0e7).epsilon(1e-12));
  CHECK(normalization(field, w, 200.0, 1) == doctest::Approx(2.5e5).epsilon(1e-12));
  CHECK(normalization(field, w, 0.0, 0) == 0.0);
  CHECK(normalization(field, w, 137.0, 0) == doctest::Approx(500.0 * 500.0 * 137.0).epsilon(1e-12));

  Window big(3, Vec3{-300, -300, -300}, Vec3{300, 300, 300});
  auto ball_field = build_distance_field(ReferenceShape(AnalyticPrimitive::sphere(3, Vec3{}, 100.0)),
                                         GridSpec::aligned(big, big, 2.0));
  CHECK(normalization(ball_field, big, 50.0, 0) == doctest::Approx(4.0 * M_PI * std::pow(150.0, 3) / 3.0).epsilon(0.005));
  CHECK(normalization(ball_field, big, 50.0, 1) == doctest::Approx(4.0 * M_PI * 150.0 * 150.0).epsilon(0.005));

  auto radii = RadiusGrid({10.0, 50.0, 120.0});
  auto both = n_curves(ball_field, big, radii);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    CHECK(both[0].values[k] == normalization(ball_field, big, radii[k], 0));
    CHECK(both[1].values[k] == normalization(ball_field, big, radii[k], 1));
  }
  Window off(3, Vec3{-251, -250, 0}, Vec3{250, 250, 500});
  CHECK_THROWS_AS(normalization(field, off, 10.0, 0), ValidationError);
  CHECK_THROWS_AS(normalization(field, w.dilated(100.0), 10.0, 0), OutOfDomainError);
}

TEST_CASE("nu") {
  Window w(3, Vec3{0, 0, 0}, Vec3{500, 500, 500});
  auto grid = GridSpec::aligned(w, w, 10.0);
  auto field = build_distance_field(ReferenceShape(AnalyticPrimitive::plane(3, Vec3{0, 0, 1}, 0.0)), grid);
  // X equals W intersected with Y^r.
  auto slab = cuboid(500.0, 500.0, 100.0);
  CHECK(nu(slab, field, 100.0, p00, w) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_missing(nu(slab, field, 0.0, p00, w)));
  CHECK(is_missing(ratio_or_missing(1.0, 0.0)));

  // Plane reference: N1 constant, N0 proportional to r.
  SynthSpec spec;
  auto scene = gen_plane_scene(spec);
  auto x = scene.observed()[0].placed();
  auto g2 = GridSpec::aligned(scene.window(), scene.window(), 5.0);
  auto f2 = build_distance_field(scene.reference()[0].placed(), g2);
  auto radii = RadiusGrid::uniform(400.0, 20);
  auto n1 = n_curve(f2, scene.window(), radii, 1);
  auto n0 = n_curve(f2, scene.window(), radii, 0);
  auto nu01 = nu_curve(x, f2, radii, p01, scene.window());
  auto mu01 = mu_curve(x, f2, radii, p01);
  auto nu00 = nu_curve(x, f2, radii, p00, scene.window());
  auto mu00 = mu_curve(x, f2, radii, p00);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    CHECK(n1.values[k] == doctest::Approx(2.5e5).epsilon(1e-12));
    CHECK(n0.values[k] == doctest::Approx(2.5e5 * radii[k]).epsilon(1e-12));
    CHECK(nu01.values[k] == doctest::Approx(mu01.values[k] / 2.5e5).epsilon(1e-12));
    CHECK(nu00.values[k] == doctest::Approx(mu00.values[k] / (2.5e5 * radii[k])).epsilon(1e-12));
  }
}

TEST_CASE("curves equal per-radius calls and are monotone") {
  Tangent t(3, 100.0);
  auto field = build_distance_field(t.plane, grid_around(t.x, 10.0, 4.0));
  auto radii = RadiusGrid::uniform(400.0, 100);
  for (const auto& p : kAllPairs) {
    auto curve = mu_curve(t.x, field, radii, p);
    CHECK(curve.tag == "mu" + p.label());
    for (std::size_t k = 0; k < radii.size(); k += 7) CHECK(curve.values[k] == mu(t.x, field, radii[k], p));
    CHECK(mu_curve(t.x, field, RadiusGrid({123.0}), p).values[0] == mu(t.x, field, 123.0, p));
    if (p == p00 || p == p10) {
      for (std::size_t k = 1; k < radii.size(); ++k) CHECK(curve.values[k] >= curve.values[k - 1] - 1e-9);
    }
  }
  auto mu00 = mu_curve(t.x, field, radii, p00);
  CHECK(mu00.values.back() == doctest::Approx(measure_totals(t.x).volume).epsilon(1e-9));
}

TEST_CASE("derivative identity on the computed curves") {
  Tangent t(3, 100.0);
  auto field = build_distance_field(t.plane, grid_around(t.x, 10.0, 2.0));
  auto radii = RadiusGrid::uniform(400.0, 100);
  auto mu00 = mu_curve(t.x, field, radii, p00).values;
  auto mu01 = mu_curve(t.x, field, radii, p01).values;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k + 1 < radii.size(); ++k) {
    double fd = (mu00[k + 1] - mu00[k - 1]) / (radii[k + 1] - radii[k - 1]);
    num += (fd - mu01[k]) * (fd - mu01[k]);
    den += mu01[k] * mu01[k];
  }
  CHECK(std::sqrt(num / den) <= 0.05);
}

TEST_CASE("translation equivariance") {
  auto x = blob(3, 40.0, 0.3, 17);
  ReferenceShape y = AnalyticPrimitive::sphere(3, Vec3{70, 10, -5}, 25.0);
  const Vec3 v{1234.5, -321.25, 77.0};
  auto grid = grid_around(x, 120.0, 4.0);
  GridSpec moved(3, grid.origin + v, grid.spacing, grid.counts);
  auto f0 = build_distance_field(y, grid);
  auto f1 = build_distance_field(std::get<AnalyticPrimitive>(y).translated(v), moved);
  auto x1 = translate(x, v);
  for (const auto& p : kAllPairs) {
    for (double r : {5.0, 20.0, 45.0, 80.0}) {
      double a = mu(x, f0, r, p), b = mu(x1, f1, r, p);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(std::abs(a), 1e-300));
    }
  }
}

TEST_CASE("scaling law") {
  auto x = blob(3, 40.0, 0.3, 23);
  const auto y = AnalyticPrimitive::sphere(3, Vec3{60, 0, 0}, 20.0);
  auto grid = grid_around(x, 120.0, 4.0);
  auto f = build_distance_field(ReferenceShape(y), grid);
  for (double s : {2.0, 1.5}) {
    GridSpec g(3, grid.origin * s, grid.spacing * s, grid.counts);
    auto fs = build_distance_field(ReferenceShape(y.scaled(s)), g);
    auto xs = scale(x, s);
    for (const auto& p : kAllPairs) {
      for (double r : {10.0, 30.0, 60.0}) {
        double expect = mu(x, f, r, p) * std::pow(s, 3 - p.eps() - p.eps_prime());
        CHECK(mu(xs, fs, r * s, p) == doctest::Approx(expect).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("mu00 agrees with voxel counting") {
  auto x = blob(3, 40.0, 0.3, 31);
  const ReferenceShape y = AnalyticPrimitive::sphere(3, Vec3{75, 0, 0}, 20.0);
  const double h = 2.0;
  auto field = build_distance_field(y, grid_around(x, 10.0, h));
  ReferenceDistance exact(y);
  ReferenceDistance inside(std::make_shared<const SimplicialComplex>(x));
  const double pitch = h / 2.0;
  Box b = bounding_box(x);
  std::vector<double> dist;  // exact distance at voxel centers inside X
  for (double z = b.lower.z + pitch / 2; z < b.upper.z; z += pitch) {
    for (double yy = b.lower.y + pitch / 2; yy < b.upper.y; yy += pitch) {
      for (double xx = b.lower.x + pitch / 2; xx < b.upper.x; xx += pitch) {
        Vec3 p{xx, yy, z};
        if (inside(p) == 0.0) dist.push_back(exact(p));
      }
    }
  }
  // Middle half of the range over which the cut grows from empty to all of X.
  auto vd = vertex_distances(x, exact);
  const double lo = *std::min_element(vd.begin(), vd.end()), hi = *std::max_element(vd.begin(), vd.end());
  for (double q : {0.25, 0.5, 0.75}) {
    const double r = lo + q * (hi - lo);
    double count = 0.0;
    for (double d : dist) count += d <= r ? 1.0 : 0.0;
    double voxels = count * pitch * pitch * pitch;
    CHECK(mu(x, field, r, p00) == doctest::Approx(voxels).epsilon(0.02));
  }
}

TEST_CASE("measure table") {
  Tangent t(2, 50.0);
  Window w(2, Vec3{-100, 0, 0}, Vec3{100, 200, 0});
  auto grid = GridSpec::aligned(w, w, 2.0);
  auto field = build_distance_field(t.plane, grid);
  auto d = vertex_distances(t.x, field);
  auto radii = RadiusGrid::uniform(150.0, 30);
  auto table = measure_table(t.x, d, field, w, radii, {true, false, true, false});
  CHECK(table.mu[0] == mu_curve(t.x, d, radii, p00).values);
  CHECK(table.mu[1].empty());
  CHECK(table.n[1] == n_curve(field, w, radii, 1).values);
  for (std::size_t k = 0; k < radii.size(); ++k) CHECK(table.nu[2][k] == table.mu[2][k] / table.n[0][k]);
}
