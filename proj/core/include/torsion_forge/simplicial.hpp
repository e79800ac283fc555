#pragma once

// Triangulations of closed 3-manifolds as face-paired tetrahedra.
//
// Tetrahedra need not be determined by their vertices: a tetrahedron may meet
// itself along faces, and one quotient edge may appear several times in one
// tetrahedron. All cells are therefore orbit classes of slots, never keyed by
// vertex sets.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace torsion_forge {

/// Permutation of the vertex slots {0,1,2,3}; p[i] is the image of slot i.
using Perm4 = std::array<int, 4>;

Perm4 identity_perm() noexcept;
Perm4 inverse(const Perm4& p) noexcept;
/// (a ∘ b)[i] = a[b[i]].
Perm4 compose(const Perm4& a, const Perm4& b) noexcept;
/// +1 for even permutations, -1 for odd ones.
int sign(const Perm4& p) noexcept;
bool is_permutation(const Perm4& p) noexcept;

/// Edge slots of a tetrahedron in the order (01, 02, 03, 12, 13, 23).
inline constexpr std::array<std::array<int, 2>, 6> kEdgeVertices{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Index of the edge slot joining vertex slots u != v.
int edge_slot(int u, int v) noexcept;
/// Edge slot opposite to the given one (disjoint vertex pair).
int opposite_edge(int e) noexcept;

struct FaceSlot {
  int tet = 0;
  int face = 0;
  auto operator<=>(const FaceSlot&) const = default;
};

/// One face pairing in input form: the three vertices of face `a.face`, in
/// ascending slot order, are sent to the slots `map` of tetrahedron `b.tet`.
struct Gluing {
  FaceSlot a;
  FaceSlot b;
  std::array<int, 3> map{};
  bool operator==(const Gluing&) const = default;
};

/// Neighbour across a face. `perm` maps slots of this tetrahedron onto slots
/// of the neighbour; perm[face] is the neighbour's face.
struct Adjacent {
  int tet = -1;
  Perm4 perm{};
  bool operator==(const Adjacent&) const = default;
};

using Adjacency = std::vector<std::array<Adjacent, 4>>;

class Triangulation {
 public:
  Triangulation() = default;

  /// Validates and wraps an adjacency table. Checks, in this order: the face
  /// pairing is a fixed-point-free involution, edge links close up, vertex
  /// links are spheres. Orientability is checked separately.
  static Triangulation from_adjacency(Adjacency adjacency);

  int tet_count() const noexcept { return static_cast<int>(adj_.size()); }
  const Adjacent& adjacent(int tet, int face) const { return adj_.at(tet).at(face); }
  const Adjacency& adjacency() const noexcept { return adj_; }

  /// Canonical gluing list: one entry per pair, listed from the smaller slot.
  std::vector<Gluing> gluings() const;

  bool operator==(const Triangulation&) const = default;

 private:
  explicit Triangulation(Adjacency adjacency) : adj_(std::move(adjacency)) {}
  Adjacency adj_;
};

Triangulation build_triangulation(int tet_count, std::span<const Gluing> gluings);

struct EdgeIncidence {
  int tet = 0;
  int edge = 0;  // edge slot 0..5
  int tail = 0;  // vertex slot matching the class's first endpoint
  bool operator==(const EdgeIncidence&) const = default;
};

struct QuotientCells {
  std::vector<std::array<int, 4>> vertex_of;  // [tet][vertex slot]
  std::vector<std::array<int, 6>> edge_of;    // [tet][edge slot]
  std::vector<std::array<int, 4>> face_of;    // [tet][face slot]
  /// Per edge class, its incidences in cyclic order around the edge.
  std::vector<std::vector<EdgeIncidence>> edge_cycles;
  /// Vertex classes at the tail and head of each edge class.
  std::vector<std::array<int, 2>> edge_ends;
  /// Number of tetrahedron corners per vertex class.
  std::vector<int> vertex_degree;

  int n0 = 0, n1 = 0, n2 = 0, n3 = 0;

  int euler_characteristic() const noexcept { return n0 - n1 + n2 - n3; }
};

/// Classes are numbered by first appearance scanning (tet, slot) ascending.
QuotientCells quotient_cells(const Triangulation& tri);

/// +1/-1 per tetrahedron: the parity of its vertex ordering relative to a
/// global orientation. Tetrahedron 0 of each component gets +1.
using Orientation = std::vector<int>;

Orientation orient_consistently(const Triangulation& tri);

/// Face pairings that are not orientation reversing under `orientation`.
std::vector<FaceSlot> orientation_violations(const Triangulation& tri,
                                             const Orientation& orientation);

/// Group elements of Z_order attached to tetrahedron corners. A corner with
/// element g is realized at rho(g) applied to the fundamental lift of its
/// vertex.
struct HolonomyDecoration {
  int order = 1;
  std::vector<std::array<int, 4>> element;

  static HolonomyDecoration trivial(int tet_count, int order = 1);
  bool operator==(const HolonomyDecoration&) const = default;
};

/// Group element h with element(t, v) = element(t', perm[v]) + h for all
/// corners v of the face (mod order). Throws InvalidDecoration if the
/// corners disagree.
int gluing_shift(const Triangulation& tri, const HolonomyDecoration& deco, int tet, int face);

/// Checks sizes, ranges and the per-gluing cocycle condition.
void validate_decoration(const Triangulation& tri, const HolonomyDecoration& deco);

// ---------------------------------------------------------------------------
// Pachner moves

enum class MoveKind { OneFour, FourOne, TwoThree, ThreeTwo };

/// Move site addressed by slot: for 1-4 the tetrahedron; for 2-3 a face of
/// `tet`; for 3-2 an edge slot of `tet`; for 4-1 a vertex slot of `tet`.
struct MoveSite {
  int tet = 0;
  int index = 0;
};

/// Where a corner of a post-move tetrahedron comes from. tet == -1 marks the
/// vertex created by a 1-4 move.
struct CornerSource {
  int tet = -1;
  int slot = -1;
  bool operator==(const CornerSource&) const = default;
};

struct MoveResult {
  Triangulation tri;
  /// For every tetrahedron of `tri`, the old corner each slot descends from.
  std::vector<std::array<CornerSource, 4>> sources;
  /// Old tetrahedra replaced by the move.
  std::vector<int> patch;
  /// Old faces interior to the patch forming a spanning tree of it, rooted
  /// at patch[0]. Used to lift the patch consistently into a cover.
  std::vector<FaceSlot> patch_tree;
};

MoveResult pachner_move(const Triangulation& tri, MoveKind kind, MoveSite site);

/// All sites where `kind` currently applies.
std::vector<MoveSite> move_sites(const Triangulation& tri, MoveKind kind);

/// Combinatorial isomorphism of connected triangulations (brute force over
/// the image of tetrahedron 0).
bool isomorphic(const Triangulation& a, const Triangulation& b);

}  // namespace torsion_forge
