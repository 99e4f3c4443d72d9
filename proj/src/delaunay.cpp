#include "gmg/delaunay.hpp"

#include "gmg/geometry.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <stdexcept>

namespace gmg {

namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::map<Edge, std::vector<int>> edge_map(const std::vector<std::array<int, 3>>& tris) {
  std::map<Edge, std::vector<int>> m;
  for (size_t t = 0; t < tris.size(); ++t)
    for (int i = 0; i < 3; ++i)
      m[make_edge(tris[t][i], tris[t][(i + 1) % 3])].push_back(static_cast<int>(t));
  return m;
}

int third_vertex(const std::array<int, 3>& t, int a, int b) {
  for (int v : t)
    if (v != a && v != b) return v;
  return -1;
}

}  // namespace

int lawson_legalize(const Eigen::MatrixXd& coords, std::vector<std::array<int, 3>>& tris) {
  auto e2t = edge_map(tris);
  std::deque<Edge> queue;
  for (const auto& [e, ts] : e2t)
    if (ts.size() == 2) queue.push_back(e);

  auto pt = [&coords](int v) { return Vector2d(coords(v, 0), coords(v, 1)); };
  int flips = 0;
  const long cap = 50L * static_cast<long>(tris.size()) + 1000;
  long guard = 0;
  while (!queue.empty()) {
    if (++guard > cap) throw std::runtime_error("legalization did not terminate");
    Edge e = queue.front();
    queue.pop_front();
    auto it = e2t.find(e);
    if (it == e2t.end() || it->second.size() != 2) continue;
    int t1 = it->second[0], t2 = it->second[1];
    int a = e.first, b = e.second;
    int c = third_vertex(tris[t1], a, b);
    int d = third_vertex(tris[t2], a, b);
    if (c < 0 || d < 0 || c == d) continue;
    // Canonicalize so c lies left of a -> b; the sorted edge order carries no
    // orientation.
    if (orient2d(pt(a), pt(b), pt(c)) <= 0.0) {
      std::swap(c, d);
      std::swap(t1, t2);
    }
    if (!in_circumcircle(pt(a), pt(b), pt(c), pt(d))) continue;
    // Flip the diagonal only when the quad is strictly convex.
    if (orient2d(pt(a), pt(d), pt(c)) <= 0.0 || orient2d(pt(d), pt(b), pt(c)) <= 0.0)
      continue;
    tris[t1] = {a, d, c};
    tris[t2] = {d, b, c};
    ++flips;
    e2t.erase(it);
    auto reassign = [&](Edge f, int from, int to) {
      auto& ts = e2t[f];
      for (int& t : ts)
        if (t == from) t = to;
    };
    // Edges of the quad keep their triangles except where ownership moved.
    reassign(make_edge(a, d), t2, t1);
    reassign(make_edge(a, c), t2, t1);  // stays with t1; harmless if unchanged
    reassign(make_edge(d, b), t1, t2);
    reassign(make_edge(b, c), t1, t2);
    e2t[make_edge(c, d)] = {t1, t2};
    for (Edge f : {make_edge(a, d), make_edge(d, b), make_edge(b, c), make_edge(c, a)})
      queue.push_back(f);
  }
  return flips;
}

bool is_delaunay(const SimplicialMesh& mesh, double rel_eps) {
  std::vector<std::array<int, 3>> tris(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c)
    tris[c] = {mesh.cells(c, 0), mesh.cells(c, 1), mesh.cells(c, 2)};
  auto e2t = edge_map(tris);
  auto pt = [&mesh](int v) { return Vector2d(mesh.vertices(v, 0), mesh.vertices(v, 1)); };
  for (const auto& [e, ts] : e2t) {
    if (ts.size() != 2) continue;
    int c = third_vertex(tris[ts[0]], e.first, e.second);
    int d = third_vertex(tris[ts[1]], e.first, e.second);
    Vector2d a = pt(e.first), b = pt(e.second);
    double scale = std::max({(a - pt(d)).squaredNorm(), (b - pt(d)).squaredNorm(),
                             (pt(c) - pt(d)).squaredNorm()});
    double det = orient2d(a, b, pt(c)) > 0 ? incircle_det(a, b, pt(c), pt(d))
                                           : incircle_det(b, a, pt(c), pt(d));
    if (det > rel_eps * scale * scale) return false;
  }
  return true;
}

SimplicialMesh jittered_grid_delaunay(int n, unsigned seed) {
  if (n < 2) throw std::invalid_argument("grid too small");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jit(-0.3, 0.3);
  const double h = 1.0 / n;
  SimplicialMesh m;
  m.dim = 2;
  m.vertices.resize((n + 1) * (n + 1), 2);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      double x = i * h, y = j * h;
      if (i > 0 && i < n) x += jit(rng) * h;
      if (j > 0 && j < n) y += jit(rng) * h;
      m.vertices.row(vid(i, j)) << x, y;
    }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      tris.push_back({v00, v10, v11});
      tris.push_back({v00, v11, v01});
    }
  lawson_legalize(m.vertices, tris);
  m.cells.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t)
    m.cells.row(static_cast<int>(t)) << tris[t][0], tris[t][1], tris[t][2];
  m.finalize();
  detect_features(m);
  return m;
}

}  // namespace gmg
