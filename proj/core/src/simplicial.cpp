#include "torsion_forge/simplicial.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

#include "torsion_forge/error.hpp"

namespace torsion_forge {

Perm4 identity_perm() noexcept { return {0, 1, 2, 3}; }

Perm4 inverse(const Perm4& p) noexcept {
  Perm4 r{};
  for (int i = 0; i < 4; ++i) r[p[i]] = i;
  return r;
}

Perm4 compose(const Perm4& a, const Perm4& b) noexcept {
  return {a[b[0]], a[b[1]], a[b[2]], a[b[3]]};
}

int sign(const Perm4& p) noexcept {
  int inversions = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

bool is_permutation(const Perm4& p) noexcept {
  std::array<bool, 4> seen{};
  for (int x : p) {
    if (x < 0 || x > 3 || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

int edge_slot(int u, int v) noexcept {
  if (u > v) std::swap(u, v);
  for (int e = 0; e < 6; ++e)
    if (kEdgeVertices[e][0] == u && kEdgeVertices[e][1] == v) return e;
  return -1;
}

int opposite_edge(int e) noexcept { return 5 - e; }

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

/// Numbers union-find roots by first appearance of their members.
template <std::size_t K>
int number_classes(UnionFind& uf, int tets, std::vector<std::array<int, K>>& out) {
  out.assign(tets, {});
  std::vector<int> label(static_cast<std::size_t>(tets) * K, -1);
  int next = 0;
  for (int t = 0; t < tets; ++t) {
    for (int s = 0; s < static_cast<int>(K); ++s) {
      const int root = uf.find(t * static_cast<int>(K) + s);
      if (label[root] < 0) label[root] = next++;
      out[t][s] = label[root];
    }
  }
  return next;
}

void check_involution(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  for (int t = 0; t < n; ++t) {
    for (int f = 0; f < 4; ++f) {
      const Adjacent& a = adj[t][f];
      if (a.tet < 0) {
        throw Error(ErrorCode::OpenFace,
                    "face " + std::to_string(f) + " of tetrahedron " + std::to_string(t) +
                        " is not glued");
      }
    }
  }
  for (int t = 0; t < n; ++t) {
    for (int f = 0; f < 4; ++f) {
      const Adjacent& a = adj[t][f];
      const std::string where = "(" + std::to_string(t) + "," + std::to_string(f) + ")";
      if (a.tet >= n || !is_permutation(a.perm))
        throw Error(ErrorCode::NonInvolutiveGluing, "malformed gluing at " + where);
      if (a.tet == t && a.perm[f] == f)
        throw Error(ErrorCode::NonInvolutiveGluing, "face glued to itself at " + where);
      const Adjacent& back = adj[a.tet][a.perm[f]];
      if (back.tet != t || back.perm != inverse(a.perm))
        throw Error(ErrorCode::NonInvolutiveGluing, "gluing is not an involution at " + where);
    }
  }
}

}  // namespace

namespace detail {

QuotientCells compute_cells(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  QuotientCells cells;
  cells.n3 = n;

  UnionFind vuf(4 * n), fuf(4 * n), euf(6 * n);
  for (int t = 0; t < n; ++t) {
    for (int f = 0; f < 4; ++f) {
      const auto& [t2, perm] = adj[t][f];
      fuf.unite(4 * t + f, 4 * t2 + perm[f]);
      for (int v = 0; v < 4; ++v)
        if (v != f) vuf.unite(4 * t + v, 4 * t2 + perm[v]);
      for (int e = 0; e < 6; ++e) {
        const int u = kEdgeVertices[e][0], v = kEdgeVertices[e][1];
        if (u == f || v == f) continue;
        euf.unite(6 * t + e, 6 * t2 + edge_slot(perm[u], perm[v]));
      }
    }
  }
  cells.n0 = number_classes(vuf, n, cells.vertex_of);
  cells.n2 = number_classes(fuf, n, cells.face_of);
  cells.n1 = number_classes(euf, n, cells.edge_of);

  std::vector<int> class_size(cells.n1, 0);
  for (int t = 0; t < n; ++t)
    for (int e = 0; e < 6; ++e) ++class_size[cells.edge_of[t][e]];

  // Walk around every edge class. State: tetrahedron, oriented edge (u,v),
  // and the slot x whose opposite face we leave through.
  cells.edge_cycles.assign(cells.n1, {});
  cells.edge_ends.assign(cells.n1, {});
  std::vector<bool> started(cells.n1, false);
  std::vector<char> visited(static_cast<std::size_t>(6) * n, 0);
  for (int t0 = 0; t0 < n; ++t0) {
    for (int e0 = 0; e0 < 6; ++e0) {
      const int cls = cells.edge_of[t0][e0];
      if (started[cls]) continue;
      started[cls] = true;
      const int u0 = kEdgeVertices[e0][0], v0 = kEdgeVertices[e0][1];
      int x0 = -1, y0 = -1;
      for (int s = 0; s < 4; ++s) {
        if (s == u0 || s == v0) continue;
        (x0 < 0 ? x0 : y0) = s;
      }
      cells.edge_ends[cls] = {cells.vertex_of[t0][u0], cells.vertex_of[t0][v0]};
      auto& cycle = cells.edge_cycles[cls];
      int t = t0, u = u0, v = v0, x = x0, y = y0;
      while (true) {
        const int e = edge_slot(u, v);
        if (visited[6 * t + e]) {
          throw Error(ErrorCode::NonManifoldEdge,
                      "edge link of class " + std::to_string(cls) + " revisits tetrahedron " +
                          std::to_string(t));
        }
        visited[6 * t + e] = 1;
        cycle.push_back({t, e, u});
        const auto& [t2, perm] = adj[t][x];
        const int nu = perm[u], nv = perm[v], nx = perm[y], ny = perm[x];
        t = t2, u = nu, v = nv, x = nx, y = ny;
        if (t == t0 && edge_slot(u, v) == e0) {
          if (u != u0 || x != x0) {
            throw Error(ErrorCode::NonManifoldEdge,
                        "edge class " + std::to_string(cls) + " is identified with itself reversed");
          }
          break;
        }
      }
      if (static_cast<int>(cycle.size()) != class_size[cls]) {
        throw Error(ErrorCode::NonManifoldEdge,
                    "edge link of class " + std::to_string(cls) + " is not a single circle");
      }
    }
  }

  cells.vertex_degree.assign(cells.n0, 0);
  for (int t = 0; t < n; ++t)
    for (int v = 0; v < 4; ++v) ++cells.vertex_degree[cells.vertex_of[t][v]];
  std::vector<int> ends(cells.n0, 0);
  for (const auto& ee : cells.edge_ends) {
    ++ends[ee[0]];
    ++ends[ee[1]];
  }
  for (int v = 0; v < cells.n0; ++v) {
    // Link of v: vertex_degree triangles, 3/2 of that many edges, `ends` vertices.
    if (2 * ends[v] - cells.vertex_degree[v] != 4) {
      throw Error(ErrorCode::NonManifoldVertex,
                  "link of vertex class " + std::to_string(v) + " is not a sphere");
    }
  }
  return cells;
}

}  // namespace detail

Triangulation Triangulation::from_adjacency(Adjacency adjacency) {
  if (adjacency.empty()) throw Error(ErrorCode::InvalidParams, "triangulation has no tetrahedra");
  check_involution(adjacency);
  (void)detail::compute_cells(adjacency);
  return Triangulation(std::move(adjacency));
}

std::vector<Gluing> Triangulation::gluings() const {
  std::vector<Gluing> out;
  for (int t = 0; t < tet_count(); ++t) {
    for (int f = 0; f < 4; ++f) {
      const Adjacent& a = adj_[t][f];
      const FaceSlot here{t, f}, there{a.tet, a.perm[f]};
      if (there < here) continue;
      Gluing g{here, there, {}};
      int k = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f) g.map[k++] = a.perm[v];
      out.push_back(g);
    }
  }
  return out;
}

Triangulation build_triangulation(int tet_count, std::span<const Gluing> gluings) {
  if (tet_count <= 0) throw Error(ErrorCode::InvalidParams, "tet_count must be positive");
  Adjacency adj(tet_count);
  auto in_range = [&](const FaceSlot& s) {
    return s.tet >= 0 && s.tet < tet_count && s.face >= 0 && s.face < 4;
  };
  auto assign = [&](const FaceSlot& s, const Adjacent& a) {
    if (adj[s.tet][s.face].tet >= 0) {
      throw Error(ErrorCode::NonInvolutiveGluing,
                  "face (" + std::to_string(s.tet) + "," + std::to_string(s.face) +
                      ") appears in more than one gluing");
    }
    adj[s.tet][s.face] = a;
  };
  for (const Gluing& g : gluings) {
    if (!in_range(g.a) || !in_range(g.b))
      throw Error(ErrorCode::NonInvolutiveGluing, "gluing references a nonexistent face");
    if (g.a == g.b) throw Error(ErrorCode::NonInvolutiveGluing, "face glued to itself");
    Perm4 perm{};
    perm[g.a.face] = g.b.face;
    int k = 0;
    for (int v = 0; v < 4; ++v)
      if (v != g.a.face) perm[v] = g.map[k++];
    if (!is_permutation(perm))
      throw Error(ErrorCode::NonInvolutiveGluing, "gluing map is not a bijection of faces");
    assign(g.a, {g.b.tet, perm});
    assign(g.b, {g.a.tet, inverse(perm)});
  }
  return Triangulation::from_adjacency(std::move(adj));
}

QuotientCells quotient_cells(const Triangulation& tri) {
  return detail::compute_cells(tri.adjacency());
}

Orientation orient_consistently(const Triangulation& tri) {
  const int n = tri.tet_count();
  Orientation orient(n, 0);
  for (int root = 0; root < n; ++root) {
    if (orient[root] != 0) continue;
    orient[root] = 1;
    std::queue<int> queue;
    queue.push(root);
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop();
      for (int f = 0; f < 4; ++f) {
        const Adjacent& a = tri.adjacent(t, f);
        const int want = -sign(a.perm) * orient[t];
        if (orient[a.tet] == 0) {
          orient[a.tet] = want;
          queue.push(a.tet);
        } else if (orient[a.tet] != want) {
          throw Error(ErrorCode::NonOrientable,
                      "orientation conflict across face (" + std::to_string(t) + "," +
                          std::to_string(f) + ")");
        }
      }
    }
  }
  return orient;
}

std::vector<FaceSlot> orientation_violations(const Triangulation& tri,
                                             const Orientation& orientation) {
  std::vector<FaceSlot> bad;
  for (int t = 0; t < tri.tet_count(); ++t) {
    for (int f = 0; f < 4; ++f) {
      const Adjacent& a = tri.adjacent(t, f);
      if (sign(a.perm) * orientation.at(t) * orientation.at(a.tet) != -1) bad.push_back({t, f});
    }
  }
  return bad;
}

HolonomyDecoration HolonomyDecoration::trivial(int tet_count, int order) {
  HolonomyDecoration d;
  d.order = order;
  d.element.assign(tet_count, {0, 0, 0, 0});
  return d;
}

namespace {
int mod(int a, int m) { return ((a % m) + m) % m; }
}  // namespace

int gluing_shift(const Triangulation& tri, const HolonomyDecoration& deco, int tet, int face) {
  const Adjacent& a = tri.adjacent(tet, face);
  int shift = -1;
  for (int v = 0; v < 4; ++v) {
    if (v == face) continue;
    const int h = mod(deco.element[tet][v] - deco.element[a.tet][a.perm[v]], deco.order);
    if (shift < 0) {
      shift = h;
    } else if (shift != h) {
      throw Error(ErrorCode::InvalidDecoration,
                  "corners of face (" + std::to_string(tet) + "," + std::to_string(face) +
                      ") disagree on the gluing shift");
    }
  }
  return shift;
}

void validate_decoration(const Triangulation& tri, const HolonomyDecoration& deco) {
  if (deco.order < 1) throw Error(ErrorCode::InvalidDecoration, "group order must be positive");
  if (static_cast<int>(deco.element.size()) != tri.tet_count())
    throw Error(ErrorCode::InvalidDecoration, "decoration size does not match tetrahedra");
  for (const auto& row : deco.element)
    for (int g : row)
      if (g < 0 || g >= deco.order)
        throw Error(ErrorCode::InvalidDecoration, "group element out of range");
  for (int t = 0; t < tri.tet_count(); ++t)
    for (int f = 0; f < 4; ++f) (void)gluing_shift(tri, deco, t, f);
}

}  // namespace torsion_forge
