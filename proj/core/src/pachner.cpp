#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <string>

#include "torsion_forge/error.hpp"
#include "torsion_forge/simplicial.hpp"

namespace torsion_forge {

namespace detail {
QuotientCells compute_cells(const Adjacency& adj);
}

namespace {

struct NewTet {
  std::array<CornerSource, 4> corners;
};

/// A face of a new tetrahedron that replaces an old face on the patch
/// boundary. `new_to_old` maps the new tetrahedron's slots onto the old one.
struct BoundaryLink {
  int new_tet;
  int new_face;
  FaceSlot old;
  Perm4 new_to_old;
};

/// Gluing between two new tetrahedra; `a_to_b` maps slots of a onto b.
struct InternalLink {
  int a;
  int face;
  int b;
  Perm4 a_to_b;
};

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::SiteMismatch, what); }

/// Replaces `patch` by `fresh` and rebuilds the gluing table. Outside
/// tetrahedra keep their relative order; new ones are appended.
MoveResult retriangulate(const Triangulation& old, std::vector<int> patch,
                         std::vector<FaceSlot> patch_tree, const std::vector<NewTet>& fresh,
                         const std::vector<BoundaryLink>& boundary,
                         const std::vector<InternalLink>& internal) {
  const int n_old = old.tet_count();
  std::vector<int> new_index(n_old, -1);
  std::vector<bool> in_patch(n_old, false);
  for (int t : patch) in_patch[t] = true;
  int next = 0;
  for (int t = 0; t < n_old; ++t)
    if (!in_patch[t]) new_index[t] = next++;
  const int first_new = next;
  const int n_new = first_new + static_cast<int>(fresh.size());

  std::map<FaceSlot, const BoundaryLink*> by_old;
  for (const auto& link : boundary) by_old[link.old] = &link;

  Adjacency adj(n_new);
  for (auto& row : adj)
    for (auto& a : row) a.tet = -1;

  for (int t = 0; t < n_old; ++t) {
    if (in_patch[t]) continue;
    for (int f = 0; f < 4; ++f) {
      const Adjacent& a = old.adjacent(t, f);
      if (!in_patch[a.tet]) {
        adj[new_index[t]][f] = {new_index[a.tet], a.perm};
        continue;
      }
      auto it = by_old.find({a.tet, a.perm[f]});
      if (it == by_old.end()) mismatch("patch boundary face has no replacement");
      const BoundaryLink& link = *it->second;
      adj[new_index[t]][f] = {first_new + link.new_tet, compose(inverse(link.new_to_old), a.perm)};
    }
  }
  for (const auto& link : boundary) {
    const Adjacent& a = old.adjacent(link.old.tet, link.old.face);
    Adjacent out;
    if (!in_patch[a.tet]) {
      out = {new_index[a.tet], compose(a.perm, link.new_to_old)};
    } else {
      auto it = by_old.find({a.tet, a.perm[link.old.face]});
      if (it == by_old.end()) mismatch("patch face glued into the patch interior");
      const BoundaryLink& other = *it->second;
      out = {first_new + other.new_tet,
             compose(inverse(other.new_to_old), compose(a.perm, link.new_to_old))};
    }
    auto& slot = adj[first_new + link.new_tet][link.new_face];
    if (slot.tet >= 0) mismatch("new face assigned twice");
    slot = out;
  }
  for (const auto& link : internal) {
    auto& fwd = adj[first_new + link.a][link.face];
    auto& back = adj[first_new + link.b][link.a_to_b[link.face]];
    if (fwd.tet >= 0 || back.tet >= 0) mismatch("new face assigned twice");
    fwd = {first_new + link.b, link.a_to_b};
    back = {first_new + link.a, inverse(link.a_to_b)};
  }

  MoveResult result;
  try {
    result.tri = Triangulation::from_adjacency(std::move(adj));
  } catch (const Error& e) {
    mismatch(std::string("move produces an invalid triangulation: ") + e.what());
  }
  result.sources.resize(n_new);
  for (int t = 0; t < n_old; ++t) {
    if (in_patch[t]) continue;
    for (int s = 0; s < 4; ++s) result.sources[new_index[t]][s] = {t, s};
  }
  for (std::size_t i = 0; i < fresh.size(); ++i) result.sources[first_new + i] = fresh[i].corners;
  result.patch = std::move(patch);
  result.patch_tree = std::move(patch_tree);
  return result;
}

MoveResult one_four(const Triangulation& tri, int t) {
  std::vector<NewTet> fresh(4);
  std::vector<BoundaryLink> boundary;
  std::vector<InternalLink> internal;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) fresh[i].corners[k] = (k == i) ? CornerSource{} : CornerSource{t, k};
    boundary.push_back({i, i, {t, i}, identity_perm()});
    for (int j = i + 1; j < 4; ++j) {
      Perm4 swap = identity_perm();
      std::swap(swap[i], swap[j]);
      internal.push_back({i, j, j, swap});
    }
  }
  return retriangulate(tri, {t}, {}, fresh, boundary, internal);
}

MoveResult two_three(const Triangulation& tri, int t, int f) {
  const Adjacent& nb = tri.adjacent(t, f);
  if (nb.tet == t) mismatch("2-3 needs two distinct tetrahedra");
  const int t2 = nb.tet;
  const Perm4& s = nb.perm;
  std::array<int, 3> x{};
  for (int v = 0, k = 0; v < 4; ++v)
    if (v != f) x[k++] = v;

  std::vector<NewTet> fresh(3);
  std::vector<BoundaryLink> boundary;
  std::vector<InternalLink> internal;
  for (int i = 0; i < 3; ++i) {
    const int a = x[(i + 1) % 3], b = x[(i + 2) % 3], omit = x[i];
    // New tetrahedron i = (a, b, d, e) with d = slot f of t, e = apex of t2.
    fresh[i].corners = {CornerSource{t, a}, {t, b}, {t, f}, {t2, s[f]}};
    boundary.push_back({i, 3, {t, omit}, {a, b, f, omit}});
    boundary.push_back({i, 2, {t2, s[omit]}, {s[a], s[b], s[omit], s[f]}});
    Perm4 swap01{1, 0, 2, 3};
    internal.push_back({i, 0, (i + 1) % 3, swap01});
  }
  return retriangulate(tri, {t, t2}, {{t, f}}, fresh, boundary, internal);
}

MoveResult three_two(const Triangulation& tri, int t0, int e0) {
  const int u0 = kEdgeVertices[e0][0], v0 = kEdgeVertices[e0][1];
  int a0 = -1, b0 = -1;
  for (int s = 0; s < 4; ++s) {
    if (s == u0 || s == v0) continue;
    (a0 < 0 ? a0 : b0) = s;
  }
  // t0 = (u v a b); t1 across the face (u v a) = (u v a c); t2 across (u v c) = (u v c b).
  const Adjacent& n1 = tri.adjacent(t0, b0);
  const int t1 = n1.tet;
  const int u1 = n1.perm[u0], v1 = n1.perm[v0], a1 = n1.perm[a0], c1 = n1.perm[b0];
  const Adjacent& n2 = tri.adjacent(t1, a1);
  const int t2 = n2.tet;
  const int u2 = n2.perm[u1], v2 = n2.perm[v1], c2 = n2.perm[c1], b2 = n2.perm[a1];
  const Adjacent& n3 = tri.adjacent(t2, c2);
  if (t0 == t1 || t1 == t2 || t0 == t2) mismatch("3-2 needs three distinct tetrahedra");
  if (n3.tet != t0 || n3.perm[u2] != u0 || n3.perm[v2] != v0 || n3.perm[b2] != b0 ||
      n3.perm[c2] != a0)
    mismatch("3-2 needs an edge of degree three");

  // New tetrahedra (a c b u) and (a c b v).
  std::vector<NewTet> fresh(2);
  fresh[0].corners = {CornerSource{t0, a0}, {t1, c1}, {t0, b0}, {t0, u0}};
  fresh[1].corners = {CornerSource{t0, a0}, {t1, c1}, {t0, b0}, {t0, v0}};
  std::vector<BoundaryLink> boundary;
  for (int k = 0; k < 2; ++k) {
    // k = 0 keeps u and looks at faces opposite v, k = 1 the reverse.
    const int keep0 = k == 0 ? u0 : v0, drop0 = k == 0 ? v0 : u0;
    const int keep1 = k == 0 ? u1 : v1, drop1 = k == 0 ? v1 : u1;
    const int keep2 = k == 0 ? u2 : v2, drop2 = k == 0 ? v2 : u2;
    // face opposite a: (c b keep) lives in t2
    boundary.push_back({k, 0, {t2, drop2}, {drop2, c2, b2, keep2}});
    // face opposite c: (a b keep) lives in t0
    boundary.push_back({k, 1, {t0, drop0}, {a0, drop0, b0, keep0}});
    // face opposite b: (a c keep) lives in t1
    boundary.push_back({k, 2, {t1, drop1}, {a1, c1, drop1, keep1}});
  }
  std::vector<InternalLink> internal{{0, 3, 1, identity_perm()}};
  return retriangulate(tri, {t0, t1, t2}, {{t0, b0}, {t1, a1}}, fresh, boundary, internal);
}

MoveResult four_one(const Triangulation& tri, int t0, int s0) {
  const QuotientCells cells = detail::compute_cells(tri.adjacency());
  if (cells.vertex_degree[cells.vertex_of[t0][s0]] != 4) mismatch("4-1 needs a vertex of degree four");
  std::array<int, 3> x{};
  for (int v = 0, k = 0; v < 4; ++v)
    if (v != s0) x[k++] = v;
  // Neighbour across the face of t0 opposite x[i] (which contains the vertex).
  std::array<int, 3> nt{};
  std::array<Perm4, 3> np{};
  for (int i = 0; i < 3; ++i) {
    const Adjacent& a = tri.adjacent(t0, x[i]);
    nt[i] = a.tet;
    np[i] = a.perm;
  }
  std::vector<int> patch{t0, nt[0], nt[1], nt[2]};
  {
    auto sorted = patch;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      mismatch("4-1 needs four distinct tetrahedra");
  }
  // The three outer tetrahedra must be glued pairwise along faces through the vertex.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      // In nt[i], the face through v, w and x[k] (k != i, j) is opposite x[j]'s image.
      const Adjacent& a = tri.adjacent(nt[i], np[i][x[j]]);
      if (a.tet != nt[j]) mismatch("vertex star is not a 4-tetrahedron ball");
      const Perm4 expect = compose(np[j], inverse(np[i]));
      for (int v = 0; v < 4; ++v) {
        if (v == x[j]) continue;
        // Vertex slots of t0 other than x[j], mapped through nt[i] then glued.
        if (a.perm[np[i][v]] != expect[np[i][v]] && v != x[i]) mismatch("vertex star gluing mismatch");
      }
      if (a.perm[np[i][x[i]]] != np[j][x[j]]) mismatch("apex mismatch in vertex star");
    }
  }
  std::vector<NewTet> fresh(1);
  fresh[0].corners = {CornerSource{t0, x[0]}, {t0, x[1]}, {t0, x[2]}, {nt[0], np[0][x[0]]}};
  std::vector<BoundaryLink> boundary;
  boundary.push_back({0, 3, {t0, s0}, {x[0], x[1], x[2], s0}});
  for (int i = 0; i < 3; ++i) {
    Perm4 m{};
    for (int k = 0; k < 3; ++k) m[k] = (k == i) ? np[i][s0] : np[i][x[k]];
    m[3] = np[i][x[i]];
    boundary.push_back({0, i, {nt[i], np[i][s0]}, m});
  }
  return retriangulate(tri, patch, {{t0, x[0]}, {t0, x[1]}, {t0, x[2]}}, fresh, boundary, {});
}

}  // namespace

MoveResult pachner_move(const Triangulation& tri, MoveKind kind, MoveSite site) {
  if (site.tet < 0 || site.tet >= tri.tet_count()) mismatch("site tetrahedron out of range");
  switch (kind) {
    case MoveKind::OneFour:
      return one_four(tri, site.tet);
    case MoveKind::TwoThree:
      if (site.index < 0 || site.index > 3) mismatch("face slot out of range");
      return two_three(tri, site.tet, site.index);
    case MoveKind::ThreeTwo:
      if (site.index < 0 || site.index > 5) mismatch("edge slot out of range");
      return three_two(tri, site.tet, site.index);
    case MoveKind::FourOne:
      if (site.index < 0 || site.index > 3) mismatch("vertex slot out of range");
      return four_one(tri, site.tet, site.index);
  }
  mismatch("unknown move");
}

std::vector<MoveSite> move_sites(const Triangulation& tri, MoveKind kind) {
  std::vector<MoveSite> sites;
  const int n = tri.tet_count();
  switch (kind) {
    case MoveKind::OneFour:
      for (int t = 0; t < n; ++t) sites.push_back({t, 0});
      return sites;
    case MoveKind::TwoThree: {
      for (int t = 0; t < n; ++t) {
        for (int f = 0; f < 4; ++f) {
          const Adjacent& a = tri.adjacent(t, f);
          if (FaceSlot{a.tet, a.perm[f]} < FaceSlot{t, f} || a.tet == t) continue;
          sites.push_back({t, f});
        }
      }
      break;
    }
    case MoveKind::ThreeTwo: {
      const QuotientCells cells = quotient_cells(tri);
      for (const auto& cycle : cells.edge_cycles) {
        if (cycle.size() != 3) continue;
        if (cycle[0].tet == cycle[1].tet || cycle[1].tet == cycle[2].tet ||
            cycle[0].tet == cycle[2].tet)
          continue;
        sites.push_back({cycle[0].tet, cycle[0].edge});
      }
      break;
    }
    case MoveKind::FourOne: {
      const QuotientCells cells = quotient_cells(tri);
      std::vector<bool> seen(cells.n0, false);
      for (int t = 0; t < n; ++t) {
        for (int s = 0; s < 4; ++s) {
          const int v = cells.vertex_of[t][s];
          if (seen[v] || cells.vertex_degree[v] != 4) continue;
          seen[v] = true;
          sites.push_back({t, s});
        }
      }
      break;
    }
  }
  // Only keep sites where the move actually succeeds.
  std::vector<MoveSite> valid;
  for (const auto& s : sites) {
    try {
      (void)pachner_move(tri, kind, s);
      valid.push_back(s);
    } catch (const Error&) {
    }
  }
  return valid;
}

bool isomorphic(const Triangulation& a, const Triangulation& b) {
  const int n = a.tet_count();
  if (n != b.tet_count()) return false;
  if (n == 0) return true;
  std::array<Perm4, 24> perms{};
  {
    Perm4 p = identity_perm();
    int k = 0;
    do perms[k++] = p;
    while (std::next_permutation(p.begin(), p.end()));
  }
  for (int start = 0; start < n; ++start) {
    for (const Perm4& p0 : perms) {
      std::vector<int> image(n, -1);
      std::vector<Perm4> how(n);
      std::vector<bool> used(n, false);
      image[0] = start;
      how[0] = p0;
      used[start] = true;
      std::queue<int> queue;
      queue.push(0);
      bool ok = true;
      while (ok && !queue.empty()) {
        const int t = queue.front();
        queue.pop();
        for (int f = 0; f < 4 && ok; ++f) {
          const Adjacent& na = a.adjacent(t, f);
          const Adjacent& nb = b.adjacent(image[t], how[t][f]);
          const Perm4 want = compose(nb.perm, compose(how[t], inverse(na.perm)));
          if (image[na.tet] < 0) {
            if (used[nb.tet]) {
              ok = false;
              break;
            }
            image[na.tet] = nb.tet;
            how[na.tet] = want;
            used[nb.tet] = true;
            queue.push(na.tet);
          } else if (image[na.tet] != nb.tet || how[na.tet] != want) {
            ok = false;
          }
        }
      }
      if (ok && std::all_of(image.begin(), image.end(), [](int x) { return x >= 0; })) return true;
    }
  }
  return false;
}

}  // namespace torsion_forge
