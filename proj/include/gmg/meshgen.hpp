#pragma once

#include "gmg/mesh.hpp"

namespace gmg {

// Target length scale h(r) = h_max * r^(1-mu) toward the reentrant feature,
// clamped inside the envelope constants.
struct GradingSpec {
  double mu = 1.0;        // 0 < mu <= 1; mu = 1 is quasi-uniform
  double h_max = 0.0;     // resolved from the vertex target when <= 0
  double c_a = 0.5;
  double c_b = 4.0;
};

// Minimal admissible grading exponent factor for a reentrant angle.
double mu_for_angle(double theta_r);

inline constexpr double kPacmanAngle = 9.0 * M_PI / 5.0;  // unit circle, a tenth removed

// Graded triangulation of the Pacman domain; vertex count within +-25% of
// target. Deterministic. Boundary features are pre-detected.
SimplicialMesh generate_pacman(const GradingSpec& grading, int target_vertices);

// Tetrahedralization of the twice-unit cube with one octant removed, graded
// toward the three reentrant edges by stretched grid planes.
SimplicialMesh generate_fichera(const GradingSpec& grading, int target_vertices);

}  // namespace gmg
