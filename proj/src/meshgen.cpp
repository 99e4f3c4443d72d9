#include "gmg/meshgen.hpp"

#include "gmg/delaunay.hpp"
#include "gmg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gmg {

double mu_for_angle(double theta_r) {
  if (theta_r < M_PI - 1e-12) throw std::invalid_argument("not reentrant");
  return M_PI / theta_r;
}

namespace {

struct Ring {
  double r;
  double h;  // target edge length at this radius
};

// Ring radii marching inward from r = 1 with dr = h(r), then a few geometric
// rings below the self-consistent cutoff so the corner is deeply resolved.
std::vector<Ring> pacman_rings(double h0, double mu, double h_cap) {
  auto h_of = [&](double r) {
    double h = h0 * std::pow(r, 1.0 - mu);
    return h_cap > 0.0 ? std::min(h, h_cap) : h;
  };
  std::vector<Ring> rings;
  double r = 1.0;
  rings.push_back({r, h_of(r)});
  const double r_floor = std::pow(h0, 1.0 / mu);
  while (true) {
    double rn = r - h_of(r);
    if (rn <= r_floor || rn <= 1e-12) break;
    rings.push_back({rn, h_of(rn)});
    r = rn;
  }
  if (mu < 0.999) {
    double stop = std::max(0.025 * h0, 1e-12);
    while (r * 0.5 > stop) {
      r *= 0.5;
      rings.push_back({r, r});
    }
  }
  std::reverse(rings.begin(), rings.end());
  return rings;
}

int ring_segments(const Ring& ring) {
  return std::max(2, static_cast<int>(std::lround(kPacmanAngle * ring.r / ring.h)));
}

long pacman_vertex_count(const std::vector<Ring>& rings) {
  long count = 1;
  for (const auto& ring : rings) count += ring_segments(ring) + 1;
  return count;
}

}  // namespace

SimplicialMesh generate_pacman(const GradingSpec& grading, int target_vertices) {
  if (target_vertices < 50) throw std::invalid_argument("pacman target too small");
  double mu = grading.mu;
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in (0, 1]");

  double h0 = grading.h_max > 0.0 ? grading.h_max
                                  : std::sqrt(kPacmanAngle / target_vertices);
  std::vector<Ring> rings;
  for (int iter = 0; iter < 60; ++iter) {
    rings = pacman_rings(h0, mu, grading.h_max);
    long count = pacman_vertex_count(rings);
    if (std::abs(count - target_vertices) <= 0.02 * target_vertices) break;
    h0 *= std::pow(static_cast<double>(count) / target_vertices, 0.45);
  }
  if (rings.empty()) throw std::runtime_error("pacman target infeasible");

  SimplicialMesh m;
  m.dim = 2;
  long nv = pacman_vertex_count(rings);
  m.vertices.resize(nv, 2);
  m.vertices.row(0) << 0.0, 0.0;
  std::vector<int> ring_start(rings.size());
  std::vector<int> ring_segs(rings.size());
  int next = 1;
  for (size_t k = 0; k < rings.size(); ++k) {
    ring_start[k] = next;
    int n = ring_segments(rings[k]);
    ring_segs[k] = n;
    for (int j = 0; j <= n; ++j) {
      double th = kPacmanAngle * j / n;
      m.vertices.row(next++) << rings[k].r * std::cos(th), rings[k].r * std::sin(th);
    }
  }

  std::vector<std::array<int, 3>> tris;
  // Fan around the corner vertex.
  for (int j = 0; j < ring_segs[0]; ++j)
    tris.push_back({0, ring_start[0] + j, ring_start[0] + j + 1});
  // Strips between consecutive rings, merged by angular position.
  for (size_t k = 0; k + 1 < rings.size(); ++k) {
    int ni = ring_segs[k], no = ring_segs[k + 1];
    int si = ring_start[k], so = ring_start[k + 1];
    int i = 0, j = 0;
    while (i < ni || j < no) {
      bool advance_inner;
      if (i == ni)
        advance_inner = false;
      else if (j == no)
        advance_inner = true;
      else
        advance_inner = (i + 1.0) / ni < (j + 1.0) / no;
      if (advance_inner) {
        tris.push_back({si + i, so + j, si + i + 1});
        ++i;
      } else {
        tris.push_back({si + i, so + j, so + j + 1});
        ++j;
      }
    }
  }
  lawson_legalize(m.vertices, tris);

  m.cells.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t)
    m.cells.row(static_cast<int>(t)) << tris[t][0], tris[t][1], tris[t][2];
  m.finalize();
  detect_features(m);
  return m;
}

namespace {

// Graded subdivision of [0, 1] into m intervals clustered at 0; the spacing
// ratio is capped so cell aspect ratios stay moderate.
std::vector<double> graded_axis(int m, double mu, double ratio_cap = 6.0) {
  std::vector<double> t(m + 1);
  for (int j = 0; j <= m; ++j) t[j] = std::pow(static_cast<double>(j) / m, 1.0 / mu);
  std::vector<double> s(m);
  double smax = 0.0;
  for (int j = 0; j < m; ++j) {
    s[j] = t[j + 1] - t[j];
    smax = std::max(smax, s[j]);
  }
  double floor = smax / ratio_cap;
  double total = 0.0;
  for (double& v : s) total += (v = std::max(v, floor));
  t[0] = 0.0;
  for (int j = 0; j < m; ++j) t[j + 1] = t[j] + s[j] / total;
  t[m] = 1.0;
  return t;
}

}  // namespace

SimplicialMesh generate_fichera(const GradingSpec& grading, int target_vertices) {
  if (target_vertices < 20) throw std::invalid_argument("fichera target too small");
  double mu = grading.mu;
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in (0, 1]");

  auto count_for = [](long m) { return (2 * m + 1) * (2 * m + 1) * (2 * m + 1) - m * m * m; };
  int m = 1;
  while (count_for(m + 1) <= target_vertices ||
         std::abs(count_for(m + 1) - target_vertices) < std::abs(count_for(m) - target_vertices))
    ++m;

  std::vector<double> axis(2 * m + 1);
  std::vector<double> u = mu < 0.999 ? graded_axis(m, mu) : [&] {
    std::vector<double> w(m + 1);
    for (int j = 0; j <= m; ++j) w[j] = static_cast<double>(j) / m;
    return w;
  }();
  for (int i = 0; i <= 2 * m; ++i) axis[i] = i < m ? -u[m - i] : u[i - m];

  const int n = 2 * m + 1;
  auto gid = [n](int i, int j, int k) { return (k * n + j) * n + i; };
  std::vector<int> vmap(n * n * n, -1);
  int nv = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        bool removed = axis[i] > 1e-12 && axis[j] > 1e-12 && axis[k] > 1e-12;
        if (!removed) vmap[gid(i, j, k)] = nv++;
      }

  SimplicialMesh mesh;
  mesh.dim = 3;
  mesh.vertices.resize(nv, 3);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        int v = vmap[gid(i, j, k)];
        if (v >= 0) mesh.vertices.row(v) << axis[i], axis[j], axis[k];
      }

  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::array<int, 4>> tets;
  for (int k = 0; k < 2 * m; ++k)
    for (int j = 0; j < 2 * m; ++j)
      for (int i = 0; i < 2 * m; ++i) {
        if (i >= m && j >= m && k >= m) continue;  // removed octant
        for (const auto& p : perms) {
          int step[3] = {0, 0, 0};
          std::array<int, 4> tet;
          tet[0] = vmap[gid(i, j, k)];
          for (int s = 0; s < 3; ++s) {
            step[p[s]] = 1;
            tet[s + 1] = vmap[gid(i + step[0], j + step[1], k + step[2])];
          }
          tets.push_back(tet);
        }
      }

  mesh.cells.resize(static_cast<int>(tets.size()), 4);
  for (size_t t = 0; t < tets.size(); ++t) {
    std::array<int, 4> tet = tets[t];
    Vector3d a = mesh.vertices.row(tet[0]).transpose();
    Vector3d b = mesh.vertices.row(tet[1]).transpose();
    Vector3d c = mesh.vertices.row(tet[2]).transpose();
    Vector3d d = mesh.vertices.row(tet[3]).transpose();
    if (orient3d(a, b, c, d) < 0.0) std::swap(tet[2], tet[3]);
    mesh.cells.row(static_cast<int>(t)) << tet[0], tet[1], tet[2], tet[3];
  }
  mesh.finalize();
  detect_features(mesh);
  return mesh;
}

}  // namespace gmg
