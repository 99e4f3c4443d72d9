#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace gmg {

using Eigen::Vector2d;
using Eigen::Vector3d;

// Twice the signed area of triangle (a, b, c). Positive for counterclockwise.
inline double orient2d(const Vector2d& a, const Vector2d& b, const Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Six times the signed volume of tetrahedron (a, b, c, d).
inline double orient3d(const Vector3d& a, const Vector3d& b, const Vector3d& c,
                       const Vector3d& d) {
  Eigen::Matrix3d m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  m.col(2) = d - a;
  return m.determinant();
}

// In-circle determinant: positive when d lies strictly inside the circumcircle
// of the counterclockwise triangle (a, b, c).
inline double incircle_det(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                           const Vector2d& d) {
  Eigen::Matrix3d m;
  const Vector2d ad = a - d, bd = b - d, cd = c - d;
  m << ad.x(), ad.y(), ad.squaredNorm(),
       bd.x(), bd.y(), bd.squaredNorm(),
       cd.x(), cd.y(), cd.squaredNorm();
  return m.determinant();
}

// d strictly inside the circumcircle of ccw (a, b, c), with a relative slack so
// that cocircular configurations are not flipped back and forth.
inline bool in_circumcircle(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                            const Vector2d& d, double rel_eps = 1e-12) {
  double scale = std::max({(a - d).squaredNorm(), (b - d).squaredNorm(),
                           (c - d).squaredNorm()});
  return incircle_det(a, b, c, d) > rel_eps * scale * scale;
}

// Barycentric coordinates of p with respect to a simplex given as a
// (dim+1) x dim matrix of vertex rows.
inline Eigen::VectorXd barycentric(const Eigen::MatrixXd& verts,
                                   const Eigen::VectorXd& p) {
  const int dim = static_cast<int>(verts.cols());
  Eigen::MatrixXd a(dim, dim);
  for (int j = 0; j < dim; ++j)
    a.col(j) = (verts.row(j + 1) - verts.row(0)).transpose();
  Eigen::VectorXd rhs = p - verts.row(0).transpose();
  Eigen::VectorXd lam = a.fullPivLu().solve(rhs);
  Eigen::VectorXd bc(dim + 1);
  bc(0) = 1.0 - lam.sum();
  bc.tail(dim) = lam;
  return bc;
}

inline Eigen::VectorXd closest_point_segment(const Eigen::VectorXd& a,
                                             const Eigen::VectorXd& b,
                                             const Eigen::VectorXd& p) {
  Eigen::VectorXd ab = b - a;
  double denom = ab.squaredNorm();
  if (denom == 0.0) return a;
  double t = std::clamp(ab.dot(p - a) / denom, 0.0, 1.0);
  return a + t * ab;
}

inline Vector3d closest_point_triangle(const Vector3d& a, const Vector3d& b,
                                       const Vector3d& c, const Vector3d& p) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  Vector3d ab = b - a, ac = c - a, ap = p - a;
  double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  Vector3d bp = p - b;
  double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  Vector3d cp = p - c;
  double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Signed measure of a simplex given as a (dim+1) x dim matrix of vertex rows.
inline double simplex_measure(const Eigen::MatrixXd& verts) {
  const int dim = static_cast<int>(verts.cols());
  if (dim == 2)
    return 0.5 * orient2d(verts.row(0), verts.row(1), verts.row(2));
  return orient3d(verts.row(0), verts.row(1), verts.row(2), verts.row(3)) / 6.0;
}

inline double simplex_longest_edge(const Eigen::MatrixXd& verts) {
  double h = 0.0;
  for (int i = 0; i < verts.rows(); ++i)
    for (int j = i + 1; j < verts.rows(); ++j)
      h = std::max(h, (verts.row(i) - verts.row(j)).norm());
  return h;
}

// Longest edge over incircle diameter (2D) / insphere radius (3D).
double simplex_aspect_ratio(const Eigen::MatrixXd& verts);

// Closest point on a d-simplex (rows of verts) to p; works for triangles in
// the plane and tetrahedra in space.
Eigen::VectorXd closest_point_simplex(const Eigen::MatrixXd& verts,
                                      const Eigen::VectorXd& p);

// Closed-set overlap test between two simplices given as (dim+1) x dim vertex
// matrices; a shared single point counts as intersection.
bool simplex_overlap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace gmg
