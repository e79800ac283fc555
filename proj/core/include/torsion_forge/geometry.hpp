#pragma once

// Euclidean kernels on tetrahedra. Six-edge quantities always use the edge
// slot order (01, 02, 03, 12, 13, 23).

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "torsion_forge/simplicial.hpp"

namespace torsion_forge {

using Vec3 = Eigen::Vector3d;
using Lengths6 = std::array<double, 6>;
using Angles6 = std::array<double, 6>;
using Tet = std::array<Vec3, 4>;

struct Tolerances {
  double cm = 1e-10;    // relative Cayley-Menger degeneracy
  double vol = 1e-9;    // relative |6V| below which a tetrahedron is flat
  double flat = 1e-7;   // defect angle admissibility
  double match = 1e-7;  // developing-map continuation mismatch (relative)
  double rank = 1e-9;   // singular value threshold relative to sigma_max
  double complex = 1e-9;
  double minor = 1e-12;
  double fd_step = 1e-6;
};

/// Bordered 5x5 Cayley-Menger determinant. Equals 288 V^2.
double cayley_menger(const Lengths6& l);

/// det(p1 - p0, p2 - p0, p3 - p0): six times the oriented volume.
double signed_volume6(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);
inline double signed_volume6(const Tet& t) { return signed_volume6(t[0], t[1], t[2], t[3]); }

Lengths6 edge_lengths(const Tet& t);

/// Interior dihedral angles in (0, pi). Throws DegenerateTetrahedron.
Angles6 dihedral_angles(const Tet& t, const Tolerances& tol = {});
Angles6 dihedral_angles(const Lengths6& l, const Tolerances& tol = {});

/// J(s, s') = d(theta_s)/d(l_s'), from lengths only.
Eigen::Matrix<double, 6, 6> dihedral_jacobian(const Lengths6& l, const Tolerances& tol = {});

/// |6V| from lengths.
double volume6_from_lengths(const Lengths6& l);

/// Lengths of tetrahedron `t` read from per-edge-class lengths.
Lengths6 tet_lengths(const QuotientCells& cells, const std::vector<double>& edge_length, int t);

/// Per tetrahedron +1/-1.
using SignAssignment = std::vector<int>;

struct DefectVector {
  std::vector<double> omega;  // reduced to (-pi, pi]
  std::vector<double> Omega;  // omega / l
};

/// omega_a = -sum over incidences of sign_t * theta, reduced mod 2 pi.
DefectVector defect_angles(const Triangulation& tri, const QuotientCells& cells,
                           const std::vector<double>& edge_length, const SignAssignment& signs,
                           const Tolerances& tol = {});

/// Full matrix d(omega_a)/d(l_b). Every occurrence of the pair (a, b) in a
/// tetrahedron contributes, so repeated edges in one tetrahedron are
/// handled without special cases. Throws ZeroVolume.
Eigen::MatrixXd defect_jacobian(const Triangulation& tri, const QuotientCells& cells,
                                const std::vector<double>& edge_length,
                                const SignAssignment& signs, const Tolerances& tol = {});

/// One entry of defect_jacobian, touching only tetrahedra around `a`.
double domega_dl(const Triangulation& tri, const QuotientCells& cells,
                 const std::vector<double>& edge_length, const SignAssignment& signs, int a,
                 int b, const Tolerances& tol = {});

/// Coordinates per vertex class of a simply connected triangulation.
struct Development {
  std::vector<Vec3> vertex;
  Tet corners(const QuotientCells& cells, int t) const;
};

/// Builds the developing map from an admissible coloring. Tetrahedron 0 is
/// placed at `base` (its slots in order); its lengths must match the
/// coloring. Each neighbour is placed so that orientation[t] times the sign
/// of its 6V equals signs[t]. Throws InadmissibleColoring if continuation
/// disagrees with an earlier placement, DegenerateTetrahedron on flat tets.
Development develop(const Triangulation& tri, const std::vector<double>& edge_length,
                    const SignAssignment& signs, const Tet& base, const Tolerances& tol = {});

}  // namespace torsion_forge
