#pragma once

// Lens spaces L(p, q): the p-tetrahedron bipyramid, the representations
// rho_k, closed forms, the 4p^2-tetrahedron cover of S^3 with its Z_p deck
// action, and the per-character (DFT block) invariants.

#include <complex>
#include <cstdint>
#include <vector>

#include "torsion_forge/pipeline.hpp"

namespace torsion_forge {

/// Throws InvalidParams unless p >= 2, 0 < q < p and gcd(p, q) = 1.
void validate_lens(int p, int q);
/// a with a q = 1 mod p.
int inverse_mod(int q, int p);

/// Bipyramid with tetrahedra t_i = (B_i, B_{i+1}, D_0, D_q). Corner elements
/// are (i, i+1, 0, q); anchors are default_placement(p, q, k).
LiftedTriangulation lens_triangulation(int p, int q, int k = 1);

/// Rotation about z sending (1, 0, 0) to (cos 2 pi k / p, -sin 2 pi k / p, 0).
/// Throws InvalidParams unless 1 <= k <= p - 1.
Representation rho_k(int p, int k);

/// B_0 = (1, 0, 0) and D_0 = (cos a, sin a, 1) with a = pi/2 + pi k (q - 1)/p,
/// indexed by vertex class.
std::vector<Vec3> default_placement(int p, int q, int k);

/// 6V of (B_i, B_{i+1}, D_0, D_q) in the closed form 4 sin sin cos.
double closed_form_volume(int p, int q, int k, int i);

/// Vertex and edge class ids of the bipyramid under their usual names.
struct LensLabels {
  int vertex_b = 0;
  int vertex_d = 0;
  int edge_b0b1 = 0;
  int edge_d0dq = 0;
  std::vector<int> edge_d0b;  // D_0 B_i for i = 0..p-1

  /// Edge classes in the order B_0B_1, D_0B_0, ..., D_0B_{p-1}, D_0D_q.
  std::vector<int> named_order() const;
};

LensLabels lens_labels(const Triangulation& tri, int p, int q);

/// Pipeline options that reproduce the hand computation: edges in named
/// order, B1 = {dz_B0, dx_D0}, B2 = {B_0B_1, D_0B_{q-1}, D_0B_{p-1}, D_0D_q},
/// and the orientation in which V_i = det(D_0 - D_q, D_0 - B_i, D_0 - B_{i+1}).
PipelineOptions lens_options(int p, int q, Placement placement);

/// Runs the pipeline on the bipyramid. With Placement::Anchor the documented
/// placement is used verbatim (and may be degenerate for some k).
InvariantReport lens_invariant(int p, int q, int k, std::uint64_t seed,
                               Placement placement = Placement::Random);

double closed_form_invariant(int p, int q, int k);
double closed_form_det_f1(int p, int q, int k);
double closed_form_det_f2(int p, int q, int k);

/// The bipyramid at the default placement with rho_k.
Realization lens_realization(int p, int q, int k);

/// f3 restricted to the edges D_0B_i against -S_q S_-1 R S_1 S_-q, where
/// S_i = 1 - E^i and R = diag(1 / V_i) with V_i the oriented 6-volumes.
struct LensFactorization {
  Eigen::MatrixXd f3_restricted;
  Eigen::MatrixXd factorized;
  std::vector<double> volumes;
  double residual = 0.0;
};

LensFactorization lens_f3_factorization(int p, int q, int k);

/// (1 - z^k)^-1 (1 - z^(k a))^-1 with z = exp(2 pi i / p), a = q^-1 mod p.
std::complex<double> reidemeister_torsion(int p, int q, int k);

// ---------------------------------------------------------------------------
// Cover of S^3

/// Vertex kinds of the cover; vertex (kind, i) is the i-th lift.
enum class CoverVertex { A = 0, B = 1, C = 2, D = 3 };

struct LensCover {
  int p = 0, q = 0;
  Triangulation tri;
  QuotientCells cells;
  /// Deck generator as permutations of cell classes and tetrahedra.
  std::vector<int> deck_vertex, deck_edge, deck_face, deck_tet;
  /// (kind, index) of every vertex class.
  std::vector<std::pair<CoverVertex, int>> vertex_label;
  /// Positions A = 0, B = e1, C = e2, D = e3.
  std::vector<Vec3> position;
  /// One tetrahedron per deck orbit.
  std::vector<int> fundamental_tets;

  int vertex(CoverVertex kind, int index) const;
  /// Edge class joining two vertex classes, or -1.
  int edge(int u, int v) const;
  /// Representative edge classes in the order A_0B_i, C_iD_0, A_0C_i, B_iD_0,
  /// A_0D_0, A_0D_q, B_0C_0, B_1C_0, translated by `deck` steps.
  std::vector<int> ordered_edges(int deck = 0) const;

 private:
  std::vector<std::vector<int>> edge_between_;
  friend LensCover lens_cover_triangulation(int p, int q);
};

/// Join of two 2p-cycles: circle one reads D_0, A_0, D_q, A_q, D_2q, ...,
/// circle two reads B_0, C_0, B_1, C_1, ...
LensCover lens_cover_triangulation(int p, int q);

/// The cover's quotient (4p tetrahedra) with its holonomy decoration and the
/// anchors A, B, C, D.
LiftedTriangulation subdivided_lens(const LensCover& cover);

/// Trivial-representation realization of the cover at its positions.
Realization cover_realization(const LensCover& cover);

// ---------------------------------------------------------------------------
// Per-character blocks

struct ModifiedBlock {
  int j = 0;
  ComplexComplex complex;  // six-term, e(3) levels empty for j != 0
  BasisSelection selection;
  std::vector<int> ranks;  // rank f1, f2, f3, f2^H, f1^H
  std::complex<double> det_f1, det_f2, det_f3;
  std::complex<double> tau;
  double invariant = 0.0;  // tau / prod(-V) over the fundamental family
};

struct ModifiedReport {
  int p = 0, q = 0;
  std::vector<ModifiedBlock> blocks;
  double prod_minus_v = 0.0;
  double product = 0.0;         // prod_j invariant_j
  double f1_leak = 0.0;         // max |f1^(j)| for j != 0
  double circulant_defect = 0.0;  // deviation from deck equivariance
};

/// The cover complex changed by Z (x) 1 and split into p blocks, each with
/// its torsion. Throws NotAcyclic, SingularMinor.
ModifiedReport modified_invariants(int p, int q);

/// -1/p^12 for j = 0, (4 sin(pi j/p) sin(pi q j/p))^6 otherwise.
double closed_form_modified(int p, int q, int j);

/// The documented B2 subsets (0-based) of the block complexes.
std::vector<int> modified_b2(int p, int j);

struct BlockFactorReport {
  int p = 0, q = 0, j = 0;
  double structure_residual = 0.0;  // f3^(j) vs the S/R/sigma block pattern
  double s_factor_residual = 0.0;   // S_j block vs its closed factorization
  double r_factor_residual = 0.0;
  std::complex<double> det_s, det_r;                   // on rows/cols 2..p-1 or 1..p-1
  std::complex<double> det_s_expected, det_r_expected;
  std::complex<double> det_f3, det_f3_expected;
  std::complex<double> det_f2, det_f2_expected;        // det f2 expected for j >= 1 only
  double pair_cancellation = 0.0;  // max |f3| over pairs sharing a face in the cover

  bool ok(double tol = 1e-9) const;
};

/// Throws StructureMismatch when a check fails by more than `tol`.
BlockFactorReport block_factor_check(int p, int q, int j, double tol = 1e-9);

/// The p x p cyclic shift with ones above the diagonal.
Eigen::MatrixXcd cyclic_shift(int p);
Eigen::MatrixXcd dft_matrix(int p);

struct Classification {
  int p = 0;
  std::vector<std::vector<int>> by_invariant;  // q grouped by invariant multisets
  std::vector<std::vector<int>> by_criterion;  // q' = +-q^(+-1) mod p
  bool consistent = false;
};

Classification classify(int p, double tol = 1e-9);

}  // namespace torsion_forge
