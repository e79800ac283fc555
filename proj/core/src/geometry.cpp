#include "torsion_forge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "torsion_forge/error.hpp"

namespace torsion_forge {

namespace {

using Mat4 = Eigen::Matrix4d;

// Slot pair (i, j) -> squared-half length index.
int slot_of(int i, int j) { return edge_slot(i, j); }

double max_length(const Lengths6& l) { return *std::max_element(l.begin(), l.end()); }

void require_positive(const Lengths6& l) {
  for (double x : l)
    if (!(x > 0.0) || !std::isfinite(x))
      throw Error(ErrorCode::DegenerateTetrahedron, "edge lengths must be positive and finite");
}

void require_nondegenerate(const Lengths6& l, const Tolerances& tol) {
  require_positive(l);
  const double scale = std::pow(max_length(l), 6);
  if (cayley_menger(l) <= tol.cm * scale)
    throw Error(ErrorCode::DegenerateTetrahedron, "Cayley-Menger determinant not positive");
}

// Gram matrix of the edge vectors from vertex 0, built from L = l^2 / 2.
Eigen::Matrix3d gram(const Lengths6& l) {
  std::array<double, 6> L{};
  for (int e = 0; e < 6; ++e) L[e] = 0.5 * l[e] * l[e];
  Eigen::Matrix3d G;
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      if (a == b)
        G(a - 1, b - 1) = 2.0 * L[slot_of(0, a)];
      else
        G(a - 1, b - 1) = L[slot_of(0, a)] + L[slot_of(0, b)] - L[slot_of(a, b)];
    }
  }
  return G;
}

// Rows of P^T H P are the face gradients of the barycentric coordinates.
Eigen::Matrix<double, 3, 4> lift() {
  Eigen::Matrix<double, 3, 4> P;
  P << -1, 1, 0, 0, -1, 0, 1, 0, -1, 0, 0, 1;
  return P;
}

// dG/dL_e for the Gram matrix above.
Eigen::Matrix3d gram_derivative(int e) {
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  const int u = kEdgeVertices[e][0], v = kEdgeVertices[e][1];
  if (u == 0) {
    const int a = v - 1;
    for (int b = 0; b < 3; ++b) {
      if (b == a) {
        d(a, a) = 2.0;
      } else {
        d(a, b) = 1.0;
        d(b, a) = 1.0;
      }
    }
  } else {
    d(u - 1, v - 1) = -1.0;
    d(v - 1, u - 1) = -1.0;
  }
  return d;
}

double cos_from(const Mat4& Ht, int e) {
  const int k = kEdgeVertices[opposite_edge(e)][0], m = kEdgeVertices[opposite_edge(e)][1];
  return -Ht(k, m) / std::sqrt(Ht(k, k) * Ht(m, m));
}

double clamp_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

double reduce_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(x, two_pi);  // in [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

}  // namespace

double cayley_menger(const Lengths6& l) {
  Eigen::Matrix<double, 5, 5> M = Eigen::Matrix<double, 5, 5>::Zero();
  for (int i = 1; i < 5; ++i) M(0, i) = M(i, 0) = 1.0;
  for (int e = 0; e < 6; ++e) {
    const int i = kEdgeVertices[e][0] + 1, j = kEdgeVertices[e][1] + 1;
    M(i, j) = M(j, i) = l[e] * l[e];
  }
  return M.determinant();
}

double signed_volume6(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  Eigen::Matrix3d m;
  m.row(0) = p1 - p0;
  m.row(1) = p2 - p0;
  m.row(2) = p3 - p0;
  return m.determinant();
}

Lengths6 edge_lengths(const Tet& t) {
  Lengths6 l{};
  for (int e = 0; e < 6; ++e) l[e] = (t[kEdgeVertices[e][1]] - t[kEdgeVertices[e][0]]).norm();
  return l;
}

Angles6 dihedral_angles(const Tet& t, const Tolerances& tol) {
  const Lengths6 l = edge_lengths(t);
  require_positive(l);
  if (std::abs(signed_volume6(t)) <= tol.vol * std::pow(max_length(l), 3))
    throw Error(ErrorCode::DegenerateTetrahedron, "flat tetrahedron");
  Angles6 out{};
  for (int e = 0; e < 6; ++e) {
    const int i = kEdgeVertices[e][0], j = kEdgeVertices[e][1];
    const int k = kEdgeVertices[opposite_edge(e)][0], m = kEdgeVertices[opposite_edge(e)][1];
    const Vec3 axis = (t[j] - t[i]).normalized();
    Vec3 u = t[k] - t[i], w = t[m] - t[i];
    u -= u.dot(axis) * axis;
    w -= w.dot(axis) * axis;
    out[e] = std::atan2(u.cross(w).norm(), u.dot(w));
  }
  return out;
}

Angles6 dihedral_angles(const Lengths6& l, const Tolerances& tol) {
  require_nondegenerate(l, tol);
  const auto P = lift();
  const Mat4 Ht = P.transpose() * gram(l).inverse() * P;
  Angles6 out{};
  for (int e = 0; e < 6; ++e) out[e] = clamp_acos(cos_from(Ht, e));
  return out;
}

double volume6_from_lengths(const Lengths6& l) { return std::sqrt(std::max(0.0, gram(l).determinant())); }

Eigen::Matrix<double, 6, 6> dihedral_jacobian(const Lengths6& l, const Tolerances& tol) {
  require_nondegenerate(l, tol);
  const auto P = lift();
  const Eigen::Matrix3d H = gram(l).inverse();
  const Mat4 Ht = P.transpose() * H * P;
  Eigen::Matrix<double, 6, 6> J;
  for (int b = 0; b < 6; ++b) {
    const Mat4 dHt = P.transpose() * (-H * gram_derivative(b) * H) * P;
    for (int e = 0; e < 6; ++e) {
      const int k = kEdgeVertices[opposite_edge(e)][0], m = kEdgeVertices[opposite_edge(e)][1];
      const double s = std::sqrt(Ht(k, k) * Ht(m, m));
      const double c = -Ht(k, m) / s;
      const double dc =
          -dHt(k, m) / s + 0.5 * Ht(k, m) / s * (dHt(k, k) / Ht(k, k) + dHt(m, m) / Ht(m, m));
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - c * c));
      // d theta / d L_b, then chain rule dL_b = l_b dl_b.
      J(e, b) = -dc / sin_theta * l[b];
    }
  }
  return J;
}

Lengths6 tet_lengths(const QuotientCells& cells, const std::vector<double>& edge_length, int t) {
  Lengths6 l{};
  for (int e = 0; e < 6; ++e) l[e] = edge_length.at(cells.edge_of[t][e]);
  return l;
}

DefectVector defect_angles(const Triangulation& tri, const QuotientCells& cells,
                           const std::vector<double>& edge_length, const SignAssignment& signs,
                           const Tolerances& tol) {
  std::vector<double> sum(cells.n1, 0.0);
  for (int t = 0; t < tri.tet_count(); ++t) {
    const Angles6 theta = dihedral_angles(tet_lengths(cells, edge_length, t), tol);
    for (int e = 0; e < 6; ++e) sum[cells.edge_of[t][e]] += signs.at(t) * theta[e];
  }
  DefectVector out;
  out.omega.resize(cells.n1);
  out.Omega.resize(cells.n1);
  for (int a = 0; a < cells.n1; ++a) {
    out.omega[a] = reduce_angle(-sum[a]);
    out.Omega[a] = out.omega[a] / edge_length[a];
  }
  return out;
}

namespace {

Eigen::Matrix<double, 6, 6> checked_jacobian(const Lengths6& l, const Tolerances& tol, int t) {
  require_positive(l);
  if (volume6_from_lengths(l) <= tol.vol * std::pow(max_length(l), 3))
    throw Error(ErrorCode::ZeroVolume, "tetrahedron " + std::to_string(t) + " has zero volume");
  return dihedral_jacobian(l, tol);
}

}  // namespace

Eigen::MatrixXd defect_jacobian(const Triangulation& tri, const QuotientCells& cells,
                                const std::vector<double>& edge_length,
                                const SignAssignment& signs, const Tolerances& tol) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(cells.n1, cells.n1);
  for (int t = 0; t < tri.tet_count(); ++t) {
    const auto J = checked_jacobian(tet_lengths(cells, edge_length, t), tol, t);
    for (int s = 0; s < 6; ++s)
      for (int r = 0; r < 6; ++r) D(cells.edge_of[t][s], cells.edge_of[t][r]) -= signs.at(t) * J(s, r);
  }
  return D;
}

double domega_dl(const Triangulation& tri, const QuotientCells& cells,
                 const std::vector<double>& edge_length, const SignAssignment& signs, int a, int b,
                 const Tolerances& tol) {
  std::vector<int> tets;
  for (const auto& inc : cells.edge_cycles.at(a)) tets.push_back(inc.tet);
  std::sort(tets.begin(), tets.end());
  tets.erase(std::unique(tets.begin(), tets.end()), tets.end());
  (void)tri;
  double sum = 0.0;
  for (int t : tets) {
    bool has_b = false;
    for (int e = 0; e < 6; ++e) has_b = has_b || cells.edge_of[t][e] == b;
    if (!has_b) continue;
    const auto J = checked_jacobian(tet_lengths(cells, edge_length, t), tol, t);
    for (int s = 0; s < 6; ++s) {
      if (cells.edge_of[t][s] != a) continue;
      for (int r = 0; r < 6; ++r)
        if (cells.edge_of[t][r] == b) sum -= signs.at(t) * J(s, r);
    }
  }
  return sum;
}

}  // namespace torsion_forge
