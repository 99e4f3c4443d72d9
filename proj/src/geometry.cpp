#include "gmg/geometry.hpp"

#include <limits>
#include <vector>

namespace gmg {

double simplex_aspect_ratio(const Eigen::MatrixXd& verts) {
  const int dim = static_cast<int>(verts.cols());
  double h = simplex_longest_edge(verts);
  double measure = simplex_measure(verts);
  if (dim == 2) {
    double per = 0.0;
    for (int i = 0; i < 3; ++i)
      per += (verts.row(i) - verts.row((i + 1) % 3)).norm();
    return h * per / (4.0 * measure);  // h / (2 * inradius)
  }
  static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  double area = 0.0;
  for (const auto& f : faces) {
    Vector3d u = (verts.row(f[1]) - verts.row(f[0])).transpose();
    Vector3d v = (verts.row(f[2]) - verts.row(f[0])).transpose();
    area += 0.5 * u.cross(v).norm();
  }
  return h * area / (3.0 * measure);  // h / inradius
}

Eigen::VectorXd closest_point_simplex(const Eigen::MatrixXd& verts,
                                      const Eigen::VectorXd& p) {
  const int dim = static_cast<int>(verts.cols());
  if (dim == 2) {
    // Inside test, then clamp to the boundary edges.
    Eigen::VectorXd bc = barycentric(verts, p);
    if (bc.minCoeff() >= 0.0) return p;
    Eigen::VectorXd best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd q = closest_point_segment(verts.row(i).transpose(),
                                                verts.row((i + 1) % 3).transpose(), p);
      double d2 = (q - p).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = q;
      }
    }
    return best;
  }
  // Tetrahedron: if p is inside return it, else take the nearest of the four
  // triangular faces.
  Eigen::VectorXd bc = barycentric(verts, p);
  if (bc.minCoeff() >= 0.0) return p;
  static const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  Vector3d pp = p;
  Vector3d best = Vector3d::Zero();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& f : faces) {
    Vector3d q = closest_point_triangle(verts.row(f[0]).transpose(),
                                        verts.row(f[1]).transpose(),
                                        verts.row(f[2]).transpose(), pp);
    double d2 = (q - pp).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = q;
    }
  }
  return best;
}

namespace {

// Project both vertex sets on axis; true when the intervals are separated by
// more than a relative epsilon (so touching simplices still count as
// overlapping).
bool separated_on_axis(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::VectorXd& axis) {
  double norm2 = axis.squaredNorm();
  if (norm2 < 1e-30) return false;
  double amin = std::numeric_limits<double>::infinity(), amax = -amin;
  double bmin = amin, bmax = -amin;
  for (int i = 0; i < a.rows(); ++i) {
    double v = a.row(i).dot(axis);
    amin = std::min(amin, v);
    amax = std::max(amax, v);
  }
  for (int i = 0; i < b.rows(); ++i) {
    double v = b.row(i).dot(axis);
    bmin = std::min(bmin, v);
    bmax = std::max(bmax, v);
  }
  double scale = std::max({std::abs(amin), std::abs(amax), std::abs(bmin),
                           std::abs(bmax), 1e-300});
  double eps = 1e-12 * scale;
  return amax < bmin - eps || bmax < amin - eps;
}

}  // namespace

bool simplex_overlap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int dim = static_cast<int>(a.cols());
  if (dim == 2) {
    Eigen::VectorXd axis(2);
    for (const Eigen::MatrixXd* s : {&a, &b}) {
      for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd e = (s->row((i + 1) % 3) - s->row(i)).transpose();
        axis << -e(1), e(0);
        if (separated_on_axis(a, b, axis)) return false;
      }
    }
    return true;
  }
  static const int faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  Eigen::VectorXd axis(3);
  for (const Eigen::MatrixXd* s : {&a, &b}) {
    for (const auto& f : faces) {
      Vector3d u = (s->row(f[1]) - s->row(f[0])).transpose();
      Vector3d v = (s->row(f[2]) - s->row(f[0])).transpose();
      axis = u.cross(v);
      if (separated_on_axis(a, b, axis)) return false;
    }
  }
  static const int edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (const auto& ea : edges) {
    Vector3d u = (a.row(ea[1]) - a.row(ea[0])).transpose();
    for (const auto& eb : edges) {
      Vector3d v = (b.row(eb[1]) - b.row(eb[0])).transpose();
      axis = u.cross(v);
      if (separated_on_axis(a, b, axis)) return false;
    }
  }
  return true;
}

}  // namespace gmg
