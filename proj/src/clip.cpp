#include "rparallel/clip.hpp"

#include <cmath>

namespace rparallel::clip {

namespace {

// Point where the level set crosses edge (i, j) with f[i] <= r < f[j].
inline Vec3 crossing(const Vec3& pi, const Vec3& pj, double fi, double fj, double r) {
  return lerp(pi, pj, (r - fi) / (fj - fi));
}

template <std::size_t N>
int split(const std::array<double, N>& f, double r, std::array<int, N>& in, std::array<int, N>& out) {
  int n_in = 0, n_out = 0;
  for (int i = 0; i < static_cast<int>(N); ++i) {
    if (f[i] <= r) {
      in[n_in++] = i;
    } else {
      out[n_out++] = i;
    }
  }
  return n_in;
}

}  // namespace

double tet_sublevel_volume(const std::array<Vec3, 4>& p, const std::array<double, 4>& f, double r) {
  std::array<int, 4> in{}, out{};
  int k = split(f, r, in, out);
  if (k == 0) return 0.0;
  double full = std::abs(signed_volume(p[0], p[1], p[2], p[3]));
  if (k == 4) return full;
  if (k == 1) {
    int a = in[0];
    double frac = 1.0;
    for (int j = 0; j < 3; ++j) frac *= (r - f[a]) / (f[out[j]] - f[a]);
    return full * frac;
  }
  if (k == 3) {
    int b = out[0];
    double frac = 1.0;
    for (int j = 0; j < 3; ++j) frac *= (f[b] - r) / (f[b] - f[in[j]]);
    return full * (1.0 - frac);
  }
  // Two vertices inside: a wedge with triangular ends (a, Pac, Pad) and (b, Pbc, Pbd).
  int a = in[0], b = in[1], c = out[0], d = out[1];
  Vec3 pac = crossing(p[a], p[c], f[a], f[c], r);
  Vec3 pad = crossing(p[a], p[d], f[a], f[d], r);
  Vec3 pbc = crossing(p[b], p[c], f[b], f[c], r);
  Vec3 pbd = crossing(p[b], p[d], f[b], f[d], r);
  return std::abs(signed_volume(p[a], pac, pad, pbd)) + std::abs(signed_volume(p[a], pac, pbd, pbc)) +
         std::abs(signed_volume(p[a], pbc, pbd, p[b]));
}

double tet_level_area(const std::array<Vec3, 4>& p, const std::array<double, 4>& f, double r) {
  std::array<int, 4> in{}, out{};
  int k = split(f, r, in, out);
  if (k == 0 || k == 4) return 0.0;
  if (k == 1) {
    int a = in[0];
    return triangle_area(crossing(p[a], p[out[0]], f[a], f[out[0]], r), crossing(p[a], p[out[1]], f[a], f[out[1]], r),
                         crossing(p[a], p[out[2]], f[a], f[out[2]], r));
  }
  if (k == 3) {
    int b = out[0];
    return triangle_area(crossing(p[in[0]], p[b], f[in[0]], f[b], r), crossing(p[in[1]], p[b], f[in[1]], f[b], r),
                         crossing(p[in[2]], p[b], f[in[2]], f[b], r));
  }
  int a = in[0], b = in[1], c = out[0], d = out[1];
  Vec3 pac = crossing(p[a], p[c], f[a], f[c], r);
  Vec3 pad = crossing(p[a], p[d], f[a], f[d], r);
  Vec3 pbc = crossing(p[b], p[c], f[b], f[c], r);
  Vec3 pbd = crossing(p[b], p[d], f[b], f[d], r);
  // Planar quad with cyclic order pac, pad, pbd, pbc.
  return triangle_area(pac, pad, pbd) + triangle_area(pac, pbd, pbc);
}

double tri_sublevel_area(const std::array<Vec3, 3>& p, const std::array<double, 3>& f, double r) {
  std::array<int, 3> in{}, out{};
  int k = split(f, r, in, out);
  if (k == 0) return 0.0;
  double full = triangle_area(p[0], p[1], p[2]);
  if (k == 3) return full;
  if (k == 1) {
    int a = in[0];
    return full * ((r - f[a]) / (f[out[0]] - f[a])) * ((r - f[a]) / (f[out[1]] - f[a]));
  }
  int c = out[0];
  return full * (1.0 - ((f[c] - r) / (f[c] - f[in[0]])) * ((f[c] - r) / (f[c] - f[in[1]])));
}

double tri_level_length(const std::array<Vec3, 3>& p, const std::array<double, 3>& f, double r) {
  std::array<int, 3> in{}, out{};
  int k = split(f, r, in, out);
  if (k == 0 || k == 3) return 0.0;
  if (k == 1) {
    int a = in[0];
    return distance(crossing(p[a], p[out[0]], f[a], f[out[0]], r), crossing(p[a], p[out[1]], f[a], f[out[1]], r));
  }
  int c = out[0];
  return distance(crossing(p[in[0]], p[c], f[in[0]], f[c], r), crossing(p[in[1]], p[c], f[in[1]], f[c], r));
}

double seg_sublevel_length(const std::array<Vec3, 2>& p, const std::array<double, 2>& f, double r) {
  bool in0 = f[0] <= r, in1 = f[1] <= r;
  if (!in0 && !in1) return 0.0;
  double full = distance(p[0], p[1]);
  if (in0 && in1) return full;
  int a = in0 ? 0 : 1;
  int b = 1 - a;
  return full * (r - f[a]) / (f[b] - f[a]);
}

int seg_level_crossings(const std::array<double, 2>& f, double r) { return (f[0] <= r) != (f[1] <= r) ? 1 : 0; }

}  // namespace rparallel::clip
