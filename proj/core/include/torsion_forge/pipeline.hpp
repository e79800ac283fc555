#pragma once

// The six-term geometric complex of a decorated triangulation and the
// invariant I = tau / prod(-V).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "torsion_forge/geometry.hpp"
#include "torsion_forge/simplicial.hpp"
#include "torsion_forge/torsion.hpp"

namespace torsion_forge {

/// Euclidean motion x -> rotation * x + translation.
struct Motion {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  Motion operator*(const Motion& other) const;
  Motion inverse() const;
  Motion power(int n) const;
  bool approx_identity(double tol = 1e-12) const;
};

enum class RepKind { Trivial, Abelian, Nonabelian };

std::string_view to_string(RepKind kind) noexcept;

/// A representation of Z_order, given by the image of the generator.
struct Representation {
  int order = 1;
  Motion generator;

  static Representation trivial(int order = 1);

  Motion image(int g) const;
  RepKind kind() const;
  /// Throws InvalidParams unless generator^order is the identity.
  void validate(double tol = 1e-12) const;
};

RepKind classify_images(std::span<const Motion> images);

using Twist = Eigen::Matrix<double, 6, 1>;  // (dx, dy, dz, dphi_x, dphi_y, dphi_z)

/// Adjoint action on twists (v, w), where (v, w) is the field v + x cross w.
Eigen::Matrix<double, 6, 6> adjoint(const Motion& g);

struct CentralizerAlgebra {
  std::vector<Twist> basis;
  std::vector<std::string> labels;

  int dim() const noexcept { return static_cast<int>(basis.size()); }
  /// max |Ad_g u - u| over the images and basis elements.
  double residual(std::span<const Motion> images) const;
};

/// Full basis for the trivial image; (rotation about, translation along)
/// the common axis for a nontrivial abelian image; empty otherwise.
CentralizerAlgebra centralizer_algebra(std::span<const Motion> images);
CentralizerAlgebra centralizer_algebra(const Representation& rep);

/// A triangulation with a holonomy decoration and an anchor position per
/// vertex class (used as the default placement).
struct LiftedTriangulation {
  Triangulation tri;
  HolonomyDecoration decoration;
  std::vector<Vec3> anchor;
};

/// Coordinates of the fundamental lift of each vertex class. A corner with
/// group element g sits at rep.image(g) applied to its vertex.
struct Realization {
  Representation rep;
  HolonomyDecoration decoration;
  std::vector<Vec3> vertex;
  std::uint64_t seed = 0;

  Vec3 corner(const QuotientCells& cells, int tet, int slot) const;
  Tet tet(const QuotientCells& cells, int t) const;
};

/// One length per edge class, read from any of its incidences.
std::vector<double> realized_lengths(const QuotientCells& cells, const Realization& real);

/// orientation[t] * 6V of each realized tetrahedron.
std::vector<double> oriented_volumes(const QuotientCells& cells, const Realization& real,
                                     const Orientation& orientation);

Eigen::MatrixXd assemble_f1(const Realization& real, const CentralizerAlgebra& alg);
Eigen::MatrixXd assemble_f2(const QuotientCells& cells, const Realization& real);
/// Entries (1 / (l_a l_b)) d(omega_a)/d(l_b); tetrahedron signs are the
/// signs of the oriented volumes. Throws InadmissibleColoring, ZeroVolume.
Eigen::MatrixXd assemble_f3(const Triangulation& tri, const QuotientCells& cells,
                            const Realization& real, const Orientation& orientation,
                            const Tolerances& tol = {}, double* max_defect = nullptr);

/// 0 -> e -> dx -> dL -> dOmega -> dx* -> e* -> 0 with maps
/// f1, f2, f3, -f2^T, f1^T (levels numbered from e* = 0).
RealComplex six_term_complex(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2,
                             const Eigen::MatrixXd& f3);

/// Selection with B(dOmega) = dL \ B2, B(dx*) = dx \ B1 and B(e*) = all, so
/// the torsion is (-1)^rank(f2) det2^2 / (det1^2 det3). Unset B1, B2 are
/// chosen by pivoted QR.
template <class Scalar>
BasisSelection symmetric_selection(const BasedComplex<Scalar>& c,
                                   const std::optional<std::vector<int>>& b1,
                                   const std::optional<std::vector<int>>& b2,
                                   const TorsionOptions& opt = {});

enum class Placement { Anchor, Random };

struct PipelineOptions {
  Placement placement = Placement::Random;
  int max_retries = 16;
  /// Random placements with min |6V| / l_max^3 below this are re-seeded; if
  /// every attempt is below, the best-conditioned one is returned.
  double volume_floor = 1e-2;
  Tolerances tol;
  TorsionOptions torsion;
  std::optional<std::vector<int>> b1;  // forced subsets of dx and dL
  std::optional<std::vector<int>> b2;
  std::optional<Orientation> orientation;  // default: orient_consistently
  /// Basis order of dL: position k holds edge class edge_order[k]. B2 refers
  /// to positions.
  std::optional<std::vector<int>> edge_order;
};

struct InvariantReport {
  static constexpr int kSchemaVersion = 1;

  double invariant = 0.0;
  double tau = 0.0;
  double det_f1 = 0.0;
  double det_f2 = 0.0;
  double det_f3 = 0.0;
  double prod_minus_v = 0.0;
  std::vector<int> dims;   // dim C_5 .. dim C_0
  std::vector<int> ranks;  // rank f1, f2, f3, f2^T, f1^T
  int n0 = 0, n1 = 0, n2 = 0, n3 = 0;
  int algebra_dim = 0;
  std::uint64_t seed = 0;
  int attempts = 0;
  std::vector<int> b1, b2;
  double min_abs_volume = 0.0;
  double volume_ratio = 0.0;  // min |6V| / l_max^3
  double max_defect = 0.0;
  double f3_asymmetry = 0.0;  // max |f3 - f3^T| / max(max |f3|, 1 / min |V|)
  std::vector<Vec3> vertices;

  std::string to_json() const;
};

/// Deterministic evaluation at a given realization. Throws on any
/// general-position or acyclicity failure.
InvariantReport evaluate(const LiftedTriangulation& lt, const Realization& real,
                         const PipelineOptions& opt = {});

/// Places the fundamental vertices (anchors, or anchors plus uniform
/// [-1,1]^3 noise), evaluates, and re-seeds up to max_retries times on
/// general-position failure. Throws GeneralPositionFailed or NotAcyclic.
InvariantReport invariant(const LiftedTriangulation& lt, const Representation& rep,
                          std::uint64_t seed, const PipelineOptions& opt = {});

// ---------------------------------------------------------------------------
// Moves on decorated triangulations

/// Applies a Pachner move, lifting the patch into the cover along
/// MoveResult::patch_tree. A vertex created by 1-4 gets element 0 and an
/// anchor near the barycenter of the anchored tetrahedron.
LiftedTriangulation lifted_move(const LiftedTriangulation& lt, const Representation& rep,
                                MoveKind kind, MoveSite site, std::uint64_t seed = 0);

struct AppliedMove {
  MoveKind kind;
  MoveSite site;
};

/// True if some of `probes` seeded random placements gives every tetrahedron
/// a volume above 1e-6 l_max^3.
bool generic_volumes(const LiftedTriangulation& lt, const Representation& rep, std::uint64_t seed,
                     int probes = 3);

/// Up to `count` random moves drawn from `kinds` (skipping kinds with no
/// valid site). Moves after which no placement is in general position, such
/// as a tetrahedron with all corners in one orbit, are redrawn.
LiftedTriangulation random_moves(const LiftedTriangulation& lt, const Representation& rep,
                                 std::span<const MoveKind> kinds, int count, std::uint64_t seed,
                                 std::vector<AppliedMove>* applied = nullptr);

/// Re-chooses the lift: every corner of tetrahedron t is shifted by
/// tet_shift[t], and every corner in vertex class v by vertex_shift[v]
/// (anchors are rotated back so that anchored corners keep their place).
LiftedTriangulation regauge(const LiftedTriangulation& lt, const Representation& rep,
                            const std::vector<int>& tet_shift, const std::vector<int>& vertex_shift);

std::string_view to_string(MoveKind kind) noexcept;
/// Parses "1-4", "4-1", "2-3", "3-2". Throws InvalidParams.
MoveKind parse_move_kind(std::string_view text);

}  // namespace torsion_forge
