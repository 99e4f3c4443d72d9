#include "gmg/remesh.hpp"

#include "gmg/delaunay.hpp"
#include "gmg/geometry.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace gmg {

namespace {

std::pair<int, int> make_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

MeshEditor::MeshEditor(const SimplicialMesh& mesh, RemeshConfig cfg)
    : dim_(mesh.dim),
      cfg_(cfg),
      coords_(mesh.vertices),
      markers_(mesh.boundary_markers),
      ridge_edges_(mesh.ridge_edges) {
  const int nc = mesh.num_cells();
  cells_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    cells_[c] = {mesh.cells(c, 0), mesh.cells(c, 1), mesh.cells(c, 2),
                 dim_ == 3 ? mesh.cells(c, 3) : -1};
  }
  cell_alive_.assign(nc, 1);
  v2c_.assign(mesh.num_vertices(), {});
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i <= dim_; ++i) v2c_[cells_[c][i]].insert(c);
  vertex_alive_.assign(mesh.num_vertices(), 1);
}

std::vector<int> MeshEditor::vertex_link(int v) const {
  std::set<int> link;
  for (int c : v2c_[v])
    for (int i = 0; i <= dim_; ++i)
      if (cells_[c][i] != v) link.insert(cells_[c][i]);
  return {link.begin(), link.end()};
}

bool MeshEditor::edge_on_boundary(int a, int b) const {
  // A facet containing the edge and incident to exactly one cell.
  std::map<std::array<int, 2>, int> facet_count;  // third vertices (2D: edge itself)
  if (dim_ == 2) {
    int count = 0;
    for (int c : v2c_[a])
      if (v2c_[b].count(c)) ++count;
    return count == 1;
  }
  for (int c : v2c_[a]) {
    if (!v2c_[b].count(c)) continue;
    for (int i = 0; i < 4; ++i) {
      int w = cells_[c][i];
      if (w == a || w == b) continue;
      ++facet_count[{std::min(w, w), w}];  // key on the third vertex
    }
  }
  for (const auto& [w, cnt] : facet_count)
    if (cnt == 1) return true;
  return false;
}

bool MeshEditor::edge_on_ridge(int a, int b) const {
  return ridge_edges_.count(make_edge(a, b)) > 0;
}

std::vector<int> MeshEditor::contraction_candidates(int v) const {
  int mv = markers_(v);
  std::vector<int> out;
  for (int n : vertex_link(v)) {
    if (mv == kInterior) {
      out.push_back(n);
    } else if (mv == kBoundary) {
      if (markers_(n) >= kBoundary && edge_on_boundary(v, n)) out.push_back(n);
    } else if (mv == kRidge) {
      if (markers_(n) >= kRidge && edge_on_ridge(v, n)) out.push_back(n);
    }
    // corners are never contracted away
  }
  return out;
}

bool MeshEditor::contract_vertex(int v, RemovalRecord* record) {
  const double ar_cap = dim_ == 3 ? cfg_.c_ar : cfg_.c_ar_2d;
  std::vector<int> link = vertex_link(v);
  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();

  for (int n : contraction_candidates(v)) {
    double worst = 0.0;
    bool feasible = true;
    for (int c : v2c_[v]) {
      if (v2c_[n].count(c)) continue;  // collapses away
      ++stats_.candidate_evals;
      Eigen::MatrixXd verts(dim_ + 1, dim_);
      std::array<int, 4> cv = cells_[c];
      bool dup_existing = false;
      std::array<int, 4> repl = cv;
      for (int i = 0; i <= dim_; ++i)
        if (repl[i] == v) repl[i] = n;
      for (int i = 0; i <= dim_; ++i) verts.row(i) = coords_.row(repl[i]);
      double measure = simplex_measure(verts);
      double h = simplex_longest_edge(verts);
      if (!(measure > 1e-12 * std::pow(h, dim_))) {
        feasible = false;
        break;
      }
      double ar = simplex_aspect_ratio(verts);
      if (!(ar < ar_cap)) {
        feasible = false;
        break;
      }
      // The replacement must not coincide with a cell already at n.
      std::array<int, 4> key = repl;
      std::sort(key.begin(), key.begin() + dim_ + 1);
      for (int cn : v2c_[n]) {
        std::array<int, 4> other = cells_[cn];
        std::sort(other.begin(), other.begin() + dim_ + 1);
        if (other == key) {
          dup_existing = true;
          break;
        }
      }
      if (dup_existing) {
        feasible = false;
        break;
      }
      worst = std::max(worst, ar);
    }
    if (feasible && worst < best_cost - 1e-15) {
      best_cost = worst;
      best = n;  // candidates are scanned in ascending index order
    }
  }
  if (best < 0) return false;

  if (record) {
    record->link = link;
    record->new_cells.clear();
  }
  std::vector<int> vcells(v2c_[v].begin(), v2c_[v].end());
  for (int c : vcells) {
    if (v2c_[best].count(c)) {
      cell_alive_[c] = 0;
      for (int i = 0; i <= dim_; ++i) v2c_[cells_[c][i]].erase(c);
      continue;
    }
    for (int i = 0; i <= dim_; ++i)
      if (cells_[c][i] == v) cells_[c][i] = best;
    v2c_[v].erase(c);
    v2c_[best].insert(c);
    if (record) record->new_cells.push_back(cells_[c]);
  }
  vertex_alive_[v] = 0;
  // Ridge edges incident to v migrate onto the survivor.
  std::vector<std::pair<int, int>> moved;
  for (auto it = ridge_edges_.begin(); it != ridge_edges_.end();) {
    if (it->first == v || it->second == v) {
      int other = it->first == v ? it->second : it->first;
      it = ridge_edges_.erase(it);
      if (other != best) moved.push_back(make_edge(best, other));
    } else {
      ++it;
    }
  }
  ridge_edges_.insert(moved.begin(), moved.end());
  return true;
}

bool MeshEditor::remove_interior_2d(int v, RemovalRecord* record) {
  if (markers_(v) != kInterior) return false;
  // Orient the link: each star triangle (v, a, b) ccw contributes a -> b.
  std::unordered_map<int, int> succ;
  for (int c : v2c_[v]) {
    const auto& t = cells_[c];
    int pos = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
    succ[t[(pos + 1) % 3]] = t[(pos + 2) % 3];
  }
  if (succ.empty()) return false;
  std::vector<int> poly;
  int start = succ.begin()->first, cur = start;
  for (size_t k = 0; k < succ.size(); ++k) {
    poly.push_back(cur);
    auto it = succ.find(cur);
    if (it == succ.end()) return false;
    cur = it->second;
  }
  if (cur != start || poly.size() != v2c_[v].size() || poly.size() < 3) return false;

  auto pt = [this](int w) { return Vector2d(coords_(w, 0), coords_(w, 1)); };
  std::vector<int> idx = poly;
  std::vector<std::array<int, 3>> new_tris;
  while (idx.size() > 3) {
    const size_t n = idx.size();
    int clip = -1;
    for (size_t i = 0; i < n && clip < 0; ++i) {
      int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
      Vector2d pa = pt(a), pb = pt(b), pc = pt(c);
      double area2 = orient2d(pa, pb, pc);
      double h = std::max({(pa - pb).norm(), (pb - pc).norm(), (pc - pa).norm()});
      if (!(area2 > 1e-12 * h * h)) continue;
      bool delaunay = true;
      for (size_t k = 0; k < n; ++k) {
        ++stats_.ear_tests;
        int w = idx[k];
        if (w == a || w == b || w == c) continue;
        if (in_circumcircle(pa, pb, pc, pt(w))) {
          delaunay = false;
          break;
        }
      }
      if (delaunay) clip = static_cast<int>(i);
    }
    if (clip < 0) {
      // Degenerate fallback: any strictly convex ear that contains no other
      // link vertex.
      for (size_t i = 0; i < n && clip < 0; ++i) {
        int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
        Vector2d pa = pt(a), pb = pt(b), pc = pt(c);
        double h = std::max({(pa - pb).norm(), (pb - pc).norm(), (pc - pa).norm()});
        if (!(orient2d(pa, pb, pc) > 1e-12 * h * h)) continue;
        bool empty = true;
        for (size_t k = 0; k < n && empty; ++k) {
          int w = idx[k];
          if (w == a || w == b || w == c) continue;
          Vector2d pw = pt(w);
          if (orient2d(pa, pb, pw) > 0 && orient2d(pb, pc, pw) > 0 &&
              orient2d(pc, pa, pw) > 0)
            empty = false;
        }
        if (empty) clip = static_cast<int>(i);
      }
      if (clip < 0) return false;
    }
    const size_t n2 = idx.size();
    int a = idx[(clip + n2 - 1) % n2], b = idx[clip], c = idx[(clip + 1) % n2];
    new_tris.push_back({a, b, c});
    idx.erase(idx.begin() + clip);
  }
  {
    Vector2d pa = pt(idx[0]), pb = pt(idx[1]), pc = pt(idx[2]);
    double h = std::max({(pa - pb).norm(), (pb - pc).norm(), (pc - pa).norm()});
    if (!(orient2d(pa, pb, pc) > 1e-12 * h * h)) return false;
  }
  new_tris.push_back({idx[0], idx[1], idx[2]});

  if (record) {
    record->link = poly;
    std::sort(record->link.begin(), record->link.end());
    record->new_cells.clear();
  }
  std::vector<int> star(v2c_[v].begin(), v2c_[v].end());
  for (int c : star) {
    cell_alive_[c] = 0;
    for (int i = 0; i < 3; ++i) v2c_[cells_[c][i]].erase(c);
  }
  for (const auto& t : new_tris) {
    int c = static_cast<int>(cells_.size());
    cells_.push_back({t[0], t[1], t[2], -1});
    cell_alive_.push_back(1);
    for (int i = 0; i < 3; ++i) v2c_[t[i]].insert(c);
    if (record) record->new_cells.push_back({t[0], t[1], t[2], -1});
  }
  vertex_alive_[v] = 0;
  return true;
}

bool MeshEditor::remove_vertex(int v, RemovalRecord* record) {
  if (!vertex_alive_[v]) return true;
  if (markers_(v) == kCorner) return false;
  if (dim_ == 2 && markers_(v) == kInterior) {
    if (remove_interior_2d(v, record)) return true;
    return contract_vertex(v, record);  // fallback with the 2D AR guard
  }
  return contract_vertex(v, record);
}

SimplicialMesh MeshEditor::extract(bool legalize_2d, std::vector<int>* old_of_new) const {
  std::vector<int> old_new(vertex_alive_.size(), -1);
  std::vector<int> survivors;
  for (size_t v = 0; v < vertex_alive_.size(); ++v)
    if (vertex_alive_[v]) {
      old_new[v] = static_cast<int>(survivors.size());
      survivors.push_back(static_cast<int>(v));
    }
  SimplicialMesh out;
  out.dim = dim_;
  out.vertices.resize(static_cast<int>(survivors.size()), dim_);
  out.boundary_markers.resize(static_cast<int>(survivors.size()));
  for (size_t i = 0; i < survivors.size(); ++i) {
    out.vertices.row(static_cast<int>(i)) = coords_.row(survivors[i]);
    out.boundary_markers(static_cast<int>(i)) = markers_(survivors[i]);
  }
  std::vector<std::array<int, 4>> live;
  for (size_t c = 0; c < cells_.size(); ++c)
    if (cell_alive_[c]) {
      std::array<int, 4> t = cells_[c];
      for (int i = 0; i <= dim_; ++i) t[i] = old_new[t[i]];
      live.push_back(t);
    }
  if (dim_ == 2 && legalize_2d) {
    std::vector<std::array<int, 3>> tris(live.size());
    for (size_t c = 0; c < live.size(); ++c) tris[c] = {live[c][0], live[c][1], live[c][2]};
    lawson_legalize(out.vertices, tris);
    for (size_t c = 0; c < live.size(); ++c) live[c] = {tris[c][0], tris[c][1], tris[c][2], -1};
  }
  out.cells.resize(static_cast<int>(live.size()), dim_ + 1);
  for (size_t c = 0; c < live.size(); ++c)
    for (int i = 0; i <= dim_; ++i) out.cells(static_cast<int>(c), i) = live[c][i];
  for (const auto& [a, b] : ridge_edges_)
    if (old_new[a] >= 0 && old_new[b] >= 0)
      out.ridge_edges.insert(make_edge(old_new[a], old_new[b]));
  out.finalize();
  if (old_of_new) *old_of_new = survivors;
  return out;
}

SimplicialMesh remesh(const SimplicialMesh& mesh, const std::vector<int>& keep,
                      const RemeshConfig& cfg, RemeshStats* stats,
                      std::vector<int>* old_of_new) {
  MeshEditor editor(mesh, cfg);
  std::vector<char> keep_flag(mesh.num_vertices(), 0);
  for (int v : keep) keep_flag[v] = 1;

  std::deque<int> queue;
  std::vector<int> attempts(mesh.num_vertices(), 0);
  std::vector<int> attempt_cap(mesh.num_vertices(), 0);
  std::vector<char> pending(mesh.num_vertices(), 0);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!keep_flag[v] && mesh.boundary_markers(v) != kCorner) {
      queue.push_back(v);
      pending[v] = 1;
      attempt_cap[v] = static_cast<int>(mesh.vertex_cells[v].size()) + 2;
    }

  std::set<int> retained;
  RemovalRecord record;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    pending[v] = 0;
    if (!editor.vertex_alive(v)) continue;
    ++attempts[v];
    if (editor.remove_vertex(v, &record)) {
      retained.erase(v);
      // A removal changes the link of its neighbors; retry retained ones.
      for (int w : record.link)
        if (retained.count(w) && !pending[w] && attempts[w] < attempt_cap[w]) {
          queue.push_back(w);
          pending[w] = 1;
        }
    } else {
      retained.insert(v);
    }
  }

  SimplicialMesh out = editor.extract(/*legalize_2d=*/mesh.dim == 2, old_of_new);
  if (stats) {
    *stats = editor.stats();
    stats->retained = static_cast<int>(retained.size());
    int survivors = out.num_vertices();
    stats->removed = mesh.num_vertices() - survivors;
  }
  return out;
}

SimplicialMesh remove_vertex_2d(const SimplicialMesh& mesh, int v) {
  if (mesh.dim != 2) throw std::invalid_argument("remove_vertex_2d needs a 2D mesh");
  MeshEditor editor(mesh);
  if (!editor.remove_interior_2d(v))
    throw std::runtime_error("vertex could not be removed");
  return editor.extract(/*legalize_2d=*/false);
}

std::optional<SimplicialMesh> remove_vertex_contract(const SimplicialMesh& mesh, int v,
                                                     const RemeshConfig& cfg) {
  MeshEditor editor(mesh, cfg);
  if (!editor.contract_vertex(v)) return std::nullopt;
  return editor.extract(/*legalize_2d=*/false);
}

}  // namespace gmg
