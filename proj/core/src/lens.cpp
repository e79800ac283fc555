#include "torsion_forge/lens.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "torsion_forge/error.hpp"

namespace torsion_forge {

namespace {

constexpr double kPi = 3.14159265358979323846;

int mod(int a, int p) { return ((a % p) + p) % p; }

const Perm4 kSwap01{1, 0, 2, 3};
const Perm4 kSwap23{0, 1, 3, 2};

}  // namespace

void validate_lens(int p, int q) {
  if (p < 2) throw Error(ErrorCode::InvalidParams, "p must be at least 2");
  if (q <= 0 || q >= p) throw Error(ErrorCode::InvalidParams, "q must satisfy 0 < q < p");
  if (std::gcd(p, q) != 1) throw Error(ErrorCode::InvalidParams, "p and q must be coprime");
}

int inverse_mod(int q, int p) {
  for (int a = 1; a < p; ++a)
    if (mod(a * q, p) == 1) return a;
  if (p == 1) return 0;
  throw Error(ErrorCode::InvalidParams, "q is not invertible mod p");
}

LiftedTriangulation lens_triangulation(int p, int q, int k) {
  validate_lens(p, q);
  Adjacency adj(p);
  HolonomyDecoration deco;
  deco.order = p;
  deco.element.resize(p);
  for (int i = 0; i < p; ++i) {
    adj[i][0] = {mod(i + 1, p), kSwap01};
    adj[i][1] = {mod(i - 1, p), kSwap01};
    adj[i][2] = {mod(i - q, p), kSwap23};
    adj[i][3] = {mod(i + q, p), kSwap23};
    deco.element[i] = {i, mod(i + 1, p), 0, q};
  }
  LiftedTriangulation lt;
  lt.tri = Triangulation::from_adjacency(std::move(adj));
  validate_decoration(lt.tri, deco);
  lt.decoration = std::move(deco);
  lt.anchor = default_placement(p, q, k);
  return lt;
}

Representation rho_k(int p, int k) {
  if (p < 2) throw Error(ErrorCode::InvalidParams, "p must be at least 2");
  if (k < 1 || k > p - 1) throw Error(ErrorCode::InvalidParams, "k must satisfy 1 <= k <= p - 1");
  const double a = 2 * kPi * k / p;
  Representation rep;
  rep.order = p;
  rep.generator.rotation << std::cos(a), std::sin(a), 0, -std::sin(a), std::cos(a), 0, 0, 0, 1;
  return rep;
}

std::vector<Vec3> default_placement(int p, int q, int k) {
  validate_lens(p, q);
  const double a = kPi / 2 + kPi * k * (q - 1) / p;
  // t_0 = (B_0, B_1, D_0, D_q): class 0 is B, class 1 is D
  return {Vec3(1, 0, 0), Vec3(std::cos(a), std::sin(a), 1)};
}

double closed_form_volume(int p, int q, int k, int i) {
  return 4 * std::sin(kPi * k / p) * std::sin(kPi * k * q / p) *
         std::cos(2 * kPi * k * i / p);
}

std::vector<int> LensLabels::named_order() const {
  std::vector<int> order{edge_b0b1};
  order.insert(order.end(), edge_d0b.begin(), edge_d0b.end());
  order.push_back(edge_d0dq);
  return order;
}

LensLabels lens_labels(const Triangulation& tri, int p, int q) {
  validate_lens(p, q);
  if (tri.tet_count() != p) throw Error(ErrorCode::InvalidParams, "not a lens bipyramid");
  const QuotientCells cells = quotient_cells(tri);
  LensLabels lab;
  lab.vertex_b = cells.vertex_of[0][0];
  lab.vertex_d = cells.vertex_of[0][2];
  lab.edge_b0b1 = cells.edge_of[0][edge_slot(0, 1)];
  lab.edge_d0dq = cells.edge_of[0][edge_slot(2, 3)];
  for (int i = 0; i < p; ++i) lab.edge_d0b.push_back(cells.edge_of[i][edge_slot(0, 2)]);
  return lab;
}

PipelineOptions lens_options(int p, int q, Placement placement) {
  const LensLabels lab = lens_labels(lens_triangulation(p, q).tri, p, q);
  PipelineOptions opt;
  opt.placement = placement;
  opt.edge_order = lab.named_order();
  opt.orientation = Orientation(p, -1);
  if (placement == Placement::Anchor) {
    std::vector<int> b1{3 * lab.vertex_b + 2, 3 * lab.vertex_d};
    std::sort(b1.begin(), b1.end());
    opt.b1 = b1;
    std::vector<int> b2{0, q, p, p + 1};
    std::sort(b2.begin(), b2.end());
    b2.erase(std::unique(b2.begin(), b2.end()), b2.end());
    opt.b2 = b2;
  }
  return opt;
}

Realization lens_realization(int p, int q, int k) {
  const LiftedTriangulation lt = lens_triangulation(p, q, k);
  Realization real;
  real.rep = rho_k(p, k);
  real.decoration = lt.decoration;
  real.vertex = lt.anchor;
  return real;
}

InvariantReport lens_invariant(int p, int q, int k, std::uint64_t seed, Placement placement) {
  const LiftedTriangulation lt = lens_triangulation(p, q, k);
  const Representation rep = rho_k(p, k);
  return invariant(lt, rep, seed, lens_options(p, q, placement));
}

double closed_form_invariant(int p, int q, int k) {
  validate_lens(p, q);
  const double s = 4 * std::sin(kPi * k / p) * std::sin(kPi * k * q / p);
  return -std::pow(s, 4) / (static_cast<double>(p) * p);
}

double closed_form_det_f1(int p, int q, int k) {
  validate_lens(p, q);
  return -std::cos(kPi * k * (q - 1) / p);
}

double closed_form_det_f2(int p, int q, int k) {
  validate_lens(p, q);
  const double s1 = std::sin(kPi * k / p), sq = std::sin(kPi * k * q / p);
  return -32 * s1 * s1 * sq * sq * sq * std::cos(kPi * k * (q - 1) / p) *
         std::sin(kPi * k * (2 * q - 3) / p);
}

std::complex<double> reidemeister_torsion(int p, int q, int k) {
  validate_lens(p, q);
  const int a = inverse_mod(q, p);
  const auto z = [p](int m) { return std::polar(1.0, 2 * kPi * mod(m, p) / p); };
  return 1.0 / ((1.0 - z(k)) * (1.0 - z(k * a)));
}

Eigen::MatrixXcd cyclic_shift(int p) {
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(p, p);
  for (int i = 0; i < p; ++i) e(i, (i + 1) % p) = 1.0;
  return e;
}

Eigen::MatrixXcd dft_matrix(int p) {
  Eigen::MatrixXcd z(p, p);
  for (int h = 0; h < p; ++h)
    for (int j = 0; j < p; ++j) z(h, j) = std::polar(1.0 / std::sqrt(double(p)), 2 * kPi * mod(h * j, p) / p);
  return z;
}

LensFactorization lens_f3_factorization(int p, int q, int k) {
  const LiftedTriangulation lt = lens_triangulation(p, q, k);
  const Realization real = lens_realization(p, q, k);
  const QuotientCells cells = quotient_cells(lt.tri);
  const LensLabels lab = lens_labels(lt.tri, p, q);
  const Orientation orientation(p, -1);
  const Eigen::MatrixXd f3 = assemble_f3(lt.tri, cells, real, orientation);

  LensFactorization out;
  out.volumes = oriented_volumes(cells, real, orientation);
  out.f3_restricted.resize(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) out.f3_restricted(a, b) = f3(lab.edge_d0b[a], lab.edge_d0b[b]);

  const Eigen::MatrixXd e = cyclic_shift(p).real();
  const auto power = [&](int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
    for (int r = 0; r < mod(n, p); ++r) m = m * e;
    return m;
  };
  const auto s = [&](int i) { return Eigen::MatrixXd(Eigen::MatrixXd::Identity(p, p) - power(i)); };
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) r(i, i) = 1.0 / out.volumes[i];
  out.factorized = -(s(q) * s(-1) * r * s(1) * s(-q));
  out.residual = (out.factorized - out.f3_restricted).cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Cover

int LensCover::vertex(CoverVertex kind, int index) const {
  const int k = static_cast<int>(kind);
  for (int v = 0; v < static_cast<int>(vertex_label.size()); ++v)
    if (static_cast<int>(vertex_label[v].first) == k && vertex_label[v].second == mod(index, p)) return v;
  throw Error(ErrorCode::InvalidParams, "no such cover vertex");
}

int LensCover::edge(int u, int v) const { return edge_between_.at(u).at(v); }

std::vector<int> LensCover::ordered_edges(int deck) const {
  using V = CoverVertex;
  const auto e = [&](V a, int i, V b, int j) {
    const int id = edge(vertex(a, i + deck), vertex(b, j + deck));
    if (id < 0) throw Error(ErrorCode::StructureMismatch, "missing cover edge");
    return id;
  };
  std::vector<int> out;
  for (int i = 0; i < p; ++i) out.push_back(e(V::A, 0, V::B, i));
  for (int i = 0; i < p; ++i) out.push_back(e(V::C, i, V::D, 0));
  for (int i = 0; i < p; ++i) out.push_back(e(V::A, 0, V::C, i));
  for (int i = 0; i < p; ++i) out.push_back(e(V::B, i, V::D, 0));
  out.push_back(e(V::A, 0, V::D, 0));
  out.push_back(e(V::A, 0, V::D, q));
  out.push_back(e(V::B, 0, V::C, 0));
  out.push_back(e(V::B, 1, V::C, 0));
  return out;
}

LensCover lens_cover_triangulation(int p, int q) {
  validate_lens(p, q);
  const int n = 2 * p;
  const auto tet = [n](int a, int b) { return mod(a, n) * n + mod(b, n); };
  Adjacency adj(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto& row = adj[tet(a, b)];
      row[0] = {tet(a + 1, b), kSwap01};
      row[1] = {tet(a - 1, b), kSwap01};
      row[2] = {tet(a, b + 1), kSwap23};
      row[3] = {tet(a, b - 1), kSwap23};
    }

  LensCover cover;
  cover.p = p;
  cover.q = q;
  cover.tri = Triangulation::from_adjacency(std::move(adj));
  cover.cells = quotient_cells(cover.tri);
  const QuotientCells& cells = cover.cells;

  // Positions on the two circles and their names.
  const auto label_of = [p, q](int circle, int pos) -> std::pair<CoverVertex, int> {
    const int m = pos / 2;
    if (circle == 0)
      return {pos % 2 == 0 ? CoverVertex::D : CoverVertex::A, mod(m * q, p)};
    return {pos % 2 == 0 ? CoverVertex::B : CoverVertex::C, m};
  };
  cover.vertex_label.assign(cells.n0, {CoverVertex::A, -1});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto& v = cells.vertex_of[tet(a, b)];
      cover.vertex_label[v[0]] = label_of(0, a);
      cover.vertex_label[v[1]] = label_of(0, mod(a + 1, n));
      cover.vertex_label[v[2]] = label_of(1, b);
      cover.vertex_label[v[3]] = label_of(1, mod(b + 1, n));
    }
  const Vec3 where[4] = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  for (const auto& [kind, i] : cover.vertex_label) cover.position.push_back(where[static_cast<int>(kind)]);

  // Deck generator: circle one moves by 2 q^-1, circle two by 2.
  const int shift = 2 * inverse_mod(q, p);
  cover.deck_tet.resize(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) cover.deck_tet[tet(a, b)] = tet(a + shift, b + 2);
  cover.deck_vertex.assign(cells.n0, -1);
  cover.deck_edge.assign(cells.n1, -1);
  cover.deck_face.assign(cells.n2, -1);
  const auto assign = [](std::vector<int>& map, int from, int to) {
    if (map[from] >= 0 && map[from] != to)
      throw Error(ErrorCode::StructureMismatch, "deck action is not simplicial");
    map[from] = to;
  };
  for (int t = 0; t < n * n; ++t) {
    const int s = cover.deck_tet[t];
    for (int v = 0; v < 4; ++v) assign(cover.deck_vertex, cells.vertex_of[t][v], cells.vertex_of[s][v]);
    for (int e = 0; e < 6; ++e) assign(cover.deck_edge, cells.edge_of[t][e], cells.edge_of[s][e]);
    for (int f = 0; f < 4; ++f) assign(cover.deck_face, cells.face_of[t][f], cells.face_of[s][f]);
  }
  for (int v = 0; v < cells.n0; ++v) {
    const auto [kind, i] = cover.vertex_label[v];
    const auto [kind2, i2] = cover.vertex_label[cover.deck_vertex[v]];
    if (kind2 != kind || i2 != mod(i + 1, p))
      throw Error(ErrorCode::StructureMismatch, "deck action does not shift lift indices");
  }

  cover.edge_between_.assign(cells.n0, std::vector<int>(cells.n0, -1));
  for (int e = 0; e < cells.n1; ++e) {
    const auto [u, v] = cells.edge_ends[e];
    cover.edge_between_[u][v] = e;
    cover.edge_between_[v][u] = e;
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < n; ++b) cover.fundamental_tets.push_back(tet(a, b));
  return cover;
}

LiftedTriangulation subdivided_lens(const LensCover& cover) {
  const int p = cover.p;
  const int n3 = static_cast<int>(cover.fundamental_tets.size());
  std::vector<std::pair<int, int>> owner(cover.tri.tet_count(), {-1, 0});
  for (int r = 0; r < n3; ++r) {
    int t = cover.fundamental_tets[r];
    for (int m = 0; m < p; ++m) {
      if (owner[t].first >= 0) throw Error(ErrorCode::StructureMismatch, "fundamental family overlaps");
      owner[t] = {r, m};
      t = cover.deck_tet[t];
    }
  }
  Adjacency adj(n3);
  HolonomyDecoration deco;
  deco.order = p;
  deco.element.resize(n3);
  for (int r = 0; r < n3; ++r) {
    const int t = cover.fundamental_tets[r];
    for (int f = 0; f < 4; ++f) {
      const Adjacent& nb = cover.tri.adjacent(t, f);
      adj[r][f] = {owner[nb.tet].first, nb.perm};
    }
    for (int s = 0; s < 4; ++s) deco.element[r][s] = cover.vertex_label[cover.cells.vertex_of[t][s]].second;
  }
  LiftedTriangulation lt;
  lt.tri = Triangulation::from_adjacency(std::move(adj));
  validate_decoration(lt.tri, deco);
  lt.decoration = std::move(deco);
  const QuotientCells cells = quotient_cells(lt.tri);
  lt.anchor.assign(cells.n0, Vec3::Zero());
  for (int r = 0; r < n3; ++r)
    for (int s = 0; s < 4; ++s)
      lt.anchor[cells.vertex_of[r][s]] = cover.position[cover.cells.vertex_of[cover.fundamental_tets[r]][s]];
  return lt;
}

Realization cover_realization(const LensCover& cover) {
  Realization real;
  real.rep = Representation::trivial(1);
  real.decoration = HolonomyDecoration::trivial(cover.tri.tet_count(), 1);
  real.vertex = cover.position;
  return real;
}

// ---------------------------------------------------------------------------
// Classification

Classification classify(int p, double tol) {
  if (p < 2) throw Error(ErrorCode::InvalidParams, "p must be at least 2");
  Classification out;
  out.p = p;
  std::vector<int> qs;
  for (int q = 1; q < p; ++q)
    if (std::gcd(p, q) == 1) qs.push_back(q);

  std::vector<std::vector<double>> multiset;
  for (int q : qs) {
    std::vector<double> m;
    for (int k = 1; k < p; ++k) m.push_back(closed_form_invariant(p, q, k));
    std::sort(m.begin(), m.end());
    multiset.push_back(std::move(m));
  }
  const auto same = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < multiset[a].size(); ++i)
      if (std::abs(multiset[a][i] - multiset[b][i]) > tol * std::max(1.0, std::abs(multiset[a][i])))
        return false;
    return true;
  };
  const auto related = [&](int q1, int q2) {
    const int inv = inverse_mod(q1, p);
    return q2 == q1 || q2 == mod(-q1, p) || q2 == inv || q2 == mod(-inv, p);
  };
  const auto group = [&](auto&& eq) {
    std::vector<std::vector<int>> groups;
    std::vector<bool> used(qs.size(), false);
    for (std::size_t a = 0; a < qs.size(); ++a) {
      if (used[a]) continue;
      std::vector<int> g;
      for (std::size_t b = a; b < qs.size(); ++b)
        if (!used[b] && eq(a, b)) {
          used[b] = true;
          g.push_back(qs[b]);
        }
      groups.push_back(std::move(g));
    }
    return groups;
  };
  out.by_invariant = group(same);
  out.by_criterion = group([&](std::size_t a, std::size_t b) { return related(qs[a], qs[b]); });
  out.consistent = out.by_invariant == out.by_criterion;
  return out;
}

}  // namespace torsion_forge
