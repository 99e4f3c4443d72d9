#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gmg {

// Per-vertex boundary classification, ordered by precedence.
enum Marker : int { kInterior = 0, kBoundary = 1, kRidge = 2, kCorner = 3 };

struct BoundaryFacet {
  std::array<int, 3> verts;  // verts[2] == -1 in 2D
  int cell;                  // the unique incident cell
};

// A 2D or 3D simplicial complex with vertex coordinates, positively oriented
// cells, and derived adjacency. Immutable after finalize() except through the
// remeshing operations, which produce a fresh mesh.
struct SimplicialMesh {
  int dim = 2;
  Eigen::MatrixXd vertices;          // nv x dim
  Eigen::MatrixXi cells;             // nc x (dim+1)
  Eigen::VectorXi boundary_markers;  // nv, values from Marker

  // Derived by finalize().
  std::vector<std::vector<int>> vertex_cells;
  std::vector<std::vector<int>> cell_neighbors;  // cells sharing >= 1 vertex
  std::vector<std::pair<int, int>> edges;        // undirected, first < second
  std::set<std::pair<int, int>> ridge_edges;     // filled by detect_features (3D)

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_cells() const { return static_cast<int>(cells.rows()); }

  Eigen::VectorXd vertex(int v) const { return vertices.row(v).transpose(); }

  // (dim+1) x dim matrix of a cell's vertex coordinates.
  Eigen::MatrixXd cell_coords(int c) const;

  // Builds adjacency and validates invariants (index ranges, orientation).
  void finalize();

  std::vector<BoundaryFacet> boundary_facets() const;
};

struct QualityReport {
  double max_aspect_ratio = 0.0;
  int cell_count = 0;
  int vertex_count = 0;
  int worst_cell = -1;
};

double cell_measure(const SimplicialMesh& mesh, int cell);   // area / volume
double longest_edge(const SimplicialMesh& mesh, int cell);
double inradius(const SimplicialMesh& mesh, int cell);

// Longest edge over the incircle diameter (2D) / insphere radius (3D);
// sqrt(3) for the equilateral triangle, 2*sqrt(6) for the regular tetrahedron.
double aspect_ratio(const SimplicialMesh& mesh, int cell);

QualityReport quality_report(const SimplicialMesh& mesh);

// Sp(v): length of the shortest edge incident to v.
Eigen::VectorXd spacing_function(const SimplicialMesh& mesh);

// Classifies boundary vertices as corner / ridge / plain boundary and (in 3D)
// records ridge edges; throws on a non-manifold boundary.
void detect_features(SimplicialMesh& mesh, double curvature_threshold = M_PI / 3.0);

SimplicialMesh read_mesh(std::istream& in);
SimplicialMesh read_mesh_file(const std::string& path);
void write_mesh(const SimplicialMesh& mesh, std::ostream& out);
void write_mesh_file(const SimplicialMesh& mesh, const std::string& path);

}  // namespace gmg
