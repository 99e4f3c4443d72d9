#pragma once

#include "gmg/mesh.hpp"

#include <array>
#include <vector>

namespace gmg {

// Lawson flipping on a 2D triangle list (each triple counterclockwise) until
// every interior edge satisfies the in-circle criterion. Boundary edges are
// never flipped. Returns the number of flips performed.
int lawson_legalize(const Eigen::MatrixXd& coords, std::vector<std::array<int, 3>>& tris);

// True when every interior edge of a 2D mesh passes the local in-circle test.
bool is_delaunay(const SimplicialMesh& mesh, double rel_eps = 1e-9);

// Delaunay triangulation of a jittered (n+1) x (n+1) grid on the unit square.
// Deterministic for a fixed seed; handy as a randomized Delaunay test mesh.
SimplicialMesh jittered_grid_delaunay(int n, unsigned seed);

}  // namespace gmg
