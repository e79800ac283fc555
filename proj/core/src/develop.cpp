#include <cmath>
#include <optional>
#include <queue>
#include <string>

#include "torsion_forge/error.hpp"
#include "torsion_forge/geometry.hpp"

namespace torsion_forge {

namespace {

// Apex at distances (da, db, dc) from a, b, c; `side` picks the half-space.
std::optional<Vec3> trilaterate(const Vec3& a, const Vec3& b, const Vec3& c, double da, double db,
                                double dc, int side) {
  const double d = (b - a).norm();
  const Vec3 ex = (b - a) / d;
  const double i = ex.dot(c - a);
  Vec3 ey = c - a - i * ex;
  const double j = ey.norm();
  if (j <= 0.0) return std::nullopt;
  ey /= j;
  const Vec3 ez = ex.cross(ey);
  const double x = (da * da - db * db + d * d) / (2 * d);
  const double y = (da * da - dc * dc + i * i + j * j) / (2 * j) - i * x / j;
  const double z2 = da * da - x * x - y * y;
  if (z2 < 0.0) return std::nullopt;
  return a + x * ex + y * ey + side * std::sqrt(z2) * ez;
}

}  // namespace

Tet Development::corners(const QuotientCells& cells, int t) const {
  Tet out;
  for (int s = 0; s < 4; ++s) out[s] = vertex.at(cells.vertex_of[t][s]);
  return out;
}

Development develop(const Triangulation& tri, const std::vector<double>& edge_length,
                    const SignAssignment& signs, const Tet& base, const Tolerances& tol) {
  const QuotientCells cells = quotient_cells(tri);
  const Orientation orient = orient_consistently(tri);
  if (static_cast<int>(edge_length.size()) != cells.n1 ||
      static_cast<int>(signs.size()) != tri.tet_count())
    throw Error(ErrorCode::InvalidParams, "coloring size does not match the triangulation");

  double scale = 0.0;
  for (double l : edge_length) scale = std::max(scale, l);
  for (int t = 0; t < tri.tet_count(); ++t) {
    if (cayley_menger(tet_lengths(cells, edge_length, t)) <= tol.cm * std::pow(scale, 6))
      throw Error(ErrorCode::DegenerateTetrahedron,
                  "tetrahedron " + std::to_string(t) + " is not realizable");
  }

  const double v0 = signed_volume6(base);
  if (std::abs(v0) <= tol.vol * std::pow(scale, 3))
    throw Error(ErrorCode::DegenerateTetrahedron, "base embedding is flat");
  // Global parity so that the base tetrahedron agrees with its sign.
  const int parity = signs[0] * orient[0] * (v0 > 0 ? 1 : -1);
  auto wanted_side = [&](int t) { return parity * orient[t] * signs[t]; };

  Development dev;
  dev.vertex.assign(cells.n0, Vec3::Constant(std::nan("")));
  std::vector<bool> known(cells.n0, false);
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InadmissibleColoring, what);
  };
  auto place = [&](int v, const Vec3& x) {
    if (known[v]) {
      check((dev.vertex[v] - x).norm() <= tol.match * scale,
            "developing map does not close up at vertex " + std::to_string(v));
      return;
    }
    dev.vertex[v] = x;
    known[v] = true;
  };
  const Lengths6 base_lengths = edge_lengths(base);
  const Lengths6 want0 = tet_lengths(cells, edge_length, 0);
  for (int e = 0; e < 6; ++e)
    check(std::abs(base_lengths[e] - want0[e]) <= tol.match * scale,
          "base embedding does not match the coloring");
  for (int s = 0; s < 4; ++s) place(cells.vertex_of[0][s], base[s]);

  std::vector<bool> done(tri.tet_count(), false);
  std::queue<int> queue;
  done[0] = true;
  queue.push(0);
  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop();
    for (int f = 0; f < 4; ++f) {
      const Adjacent& nb = tri.adjacent(t, f);
      const int u = nb.tet;
      if (done[u]) continue;
      const int apex = nb.perm[f];
      std::array<int, 3> face{};
      for (int s = 0, k = 0; s < 4; ++s)
        if (s != apex) face[k++] = s;
      const Lengths6 l = tet_lengths(cells, edge_length, u);
      auto pt = [&](int s) { return dev.vertex[cells.vertex_of[u][s]]; };
      Vec3 chosen;
      bool found = false;
      for (int side : {1, -1}) {
        auto x = trilaterate(pt(face[0]), pt(face[1]), pt(face[2]), l[edge_slot(apex, face[0])],
                             l[edge_slot(apex, face[1])], l[edge_slot(apex, face[2])], side);
        if (!x) continue;
        Tet c;
        for (int s = 0; s < 4; ++s) c[s] = s == apex ? *x : pt(s);
        const double v = signed_volume6(c);
        if ((v > 0 ? 1 : -1) == wanted_side(u)) {
          chosen = *x;
          found = true;
          break;
        }
      }
      check(found, "no placement of tetrahedron " + std::to_string(u) + " with the required sign");
      place(cells.vertex_of[u][apex], chosen);
      done[u] = true;
      queue.push(u);
    }
  }

  // Every tetrahedron must reproduce its lengths and sign.
  for (int t = 0; t < tri.tet_count(); ++t) {
    const Tet c = dev.corners(cells, t);
    const Lengths6 got = edge_lengths(c), want = tet_lengths(cells, edge_length, t);
    for (int e = 0; e < 6; ++e)
      check(std::abs(got[e] - want[e]) <= tol.match * scale,
            "edge length mismatch in tetrahedron " + std::to_string(t));
    check((signed_volume6(c) > 0 ? 1 : -1) == wanted_side(t),
          "sign mismatch in tetrahedron " + std::to_string(t));
  }
  return dev;
}

}  // namespace torsion_forge
