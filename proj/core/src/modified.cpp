// Character blocks of the lens cover complex.
//
// Cover cells are indexed by (c, d): c a representative (vertex kind or edge
// in the ordered list), d a deck power. Deck equivariance makes every map
// block-circulant, G(d)_{cc'} = f[(c, 0), (c', d)], and the unitary change
// Z (x) 1 turns it into block j = sum_d zeta^(j d) G(d).

#include <algorithm>
#include <cmath>
#include <set>

#include "torsion_forge/error.hpp"
#include "torsion_forge/lens.hpp"

namespace torsion_forge {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Cx = std::complex<double>;

int mod(int a, int p) { return ((a % p) + p) % p; }

Cx zeta(int p, int m) { return std::polar(1.0, 2 * kPi * mod(m, p) / p); }

struct CoverComplex {
  LensCover cover;
  Eigen::MatrixXd f1, f2, f3;
  std::vector<double> volume;
  std::vector<std::vector<int>> edges;   // [deck][c]
  std::vector<std::vector<int>> vertex;  // [deck][kind]
  double circulant_defect = 0.0;

  int p() const { return cover.p; }
  int n_edges() const { return 4 * p() + 4; }

  Eigen::MatrixXcd block_f2(int j) const {
    const int n = n_edges();
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, 12);
    for (int d = 0; d < p(); ++d) {
      const Cx w = zeta(p(), j * d);
      for (int c = 0; c < n; ++c)
        for (int x = 0; x < 4; ++x)
          for (int k = 0; k < 3; ++k) b(c, 3 * x + k) += w * f2(edges[0][c], 3 * vertex[d][x] + k);
    }
    return b;
  }

  Eigen::MatrixXcd block_f3(int j) const {
    const int n = n_edges();
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
    for (int d = 0; d < p(); ++d) {
      const Cx w = zeta(p(), j * d);
      for (int c = 0; c < n; ++c)
        for (int c2 = 0; c2 < n; ++c2) b(c, c2) += w * f3(edges[0][c], edges[d][c2]);
    }
    return b;
  }

  /// Z^H applied to the rows of f1; only j = 0 survives.
  Eigen::MatrixXcd block_f1(int j) const {
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(12, f1.cols());
    for (int d = 0; d < p(); ++d) {
      const Cx w = std::conj(zeta(p(), j * d)) / std::sqrt(double(p()));
      for (int x = 0; x < 4; ++x)
        for (int k = 0; k < 3; ++k) b.row(3 * x + k) += w * f1.row(3 * vertex[d][x] + k);
    }
    return b;
  }
};

CoverComplex build_cover_complex(int p, int q) {
  CoverComplex cc;
  cc.cover = lens_cover_triangulation(p, q);
  const LensCover& cover = cc.cover;
  const Realization real = cover_realization(cover);
  const Orientation orientation = orient_consistently(cover.tri);
  cc.f1 = assemble_f1(real, centralizer_algebra(real.rep));
  cc.f2 = assemble_f2(cover.cells, real);
  cc.f3 = assemble_f3(cover.tri, cover.cells, real, orientation);
  cc.volume = oriented_volumes(cover.cells, real, orientation);

  std::set<int> seen;
  for (int d = 0; d < p; ++d) {
    cc.edges.push_back(cover.ordered_edges(d));
    seen.insert(cc.edges.back().begin(), cc.edges.back().end());
    std::vector<int> v;
    for (int x = 0; x < 4; ++x) v.push_back(cover.vertex(static_cast<CoverVertex>(x), d));
    cc.vertex.push_back(std::move(v));
  }
  if (static_cast<int>(seen.size()) != cover.cells.n1)
    throw Error(ErrorCode::StructureMismatch, "ordered edges do not enumerate the cover edges");

  // Deck equivariance of f2 and f3.
  const int n = cc.n_edges();
  double worst = 0.0;
  for (int d1 = 0; d1 < p; ++d1)
    for (int d2 = 0; d2 < p; ++d2) {
      const int d = mod(d2 - d1, p);
      for (int c = 0; c < n; ++c) {
        for (int c2 = 0; c2 < n; ++c2)
          worst = std::max(worst, std::abs(cc.f3(cc.edges[d1][c], cc.edges[d2][c2]) -
                                           cc.f3(cc.edges[0][c], cc.edges[d][c2])));
        for (int x = 0; x < 4; ++x)
          for (int k = 0; k < 3; ++k)
            worst = std::max(worst, std::abs(cc.f2(cc.edges[d1][c], 3 * cc.vertex[d2][x] + k) -
                                             cc.f2(cc.edges[0][c], 3 * cc.vertex[d][x] + k)));
      }
    }
  cc.circulant_defect = worst;
  return cc;
}

ComplexComplex block_complex(const CoverComplex& cc, int j) {
  const Eigen::MatrixXcd f1 = j == 0 ? cc.block_f1(0) : Eigen::MatrixXcd(12, 0);
  const Eigen::MatrixXcd f2 = cc.block_f2(j);
  const Eigen::MatrixXcd f3 = cc.block_f3(j);
  const int e = static_cast<int>(f1.cols()), l = cc.n_edges();
  ComplexComplex c;
  c.dims = {e, 12, l, l, 12, e};
  c.maps = {f1.adjoint(), -f2.adjoint(), f3, f2, f1};
  return c;
}

Eigen::MatrixXcd shift_power(int p, int n) {
  const Eigen::MatrixXcd e = cyclic_shift(p);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(p, p);
  for (int r = 0; r < mod(n, p); ++r) m = m * e;
  return m;
}

Cx det_of(const Eigen::MatrixXcd& m) { return m.size() == 0 ? Cx(1) : m.fullPivLu().determinant(); }

bool close(Cx a, Cx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<int> modified_b2(int p, int j) {
  if (j == 0) return {0, p, 2 * p, 3 * p, 4 * p, 4 * p + 2};
  return {0, 1, p, p + 1, 2 * p, 2 * p + 1, 3 * p, 3 * p + 1, 4 * p, 4 * p + 1, 4 * p + 2, 4 * p + 3};
}

double closed_form_modified(int p, int q, int j) {
  validate_lens(p, q);
  if (j < 0 || j >= p) throw Error(ErrorCode::InvalidParams, "j must satisfy 0 <= j < p");
  if (j == 0) return -std::pow(static_cast<double>(p), -12);
  return std::pow(4 * std::sin(kPi * j / p) * std::sin(kPi * q * j / p), 6);
}

ModifiedReport modified_invariants(int p, int q) {
  validate_lens(p, q);
  const CoverComplex cc = build_cover_complex(p, q);
  ModifiedReport out;
  out.p = p;
  out.q = q;
  out.circulant_defect = cc.circulant_defect;
  out.prod_minus_v = 1.0;
  for (int t : cc.cover.fundamental_tets) out.prod_minus_v *= -cc.volume[t];
  out.product = 1.0;
  for (int j = 0; j < p; ++j) {
    if (j > 0) out.f1_leak = std::max(out.f1_leak, cc.block_f1(j).cwiseAbs().maxCoeff());
    ModifiedBlock b;
    b.j = j;
    b.complex = block_complex(cc, j);
    const RankReport ranks = verify_acyclic(b.complex);
    b.ranks.assign(ranks.ranks.rbegin(), ranks.ranks.rend());
    b.selection = symmetric_selection(b.complex, std::nullopt, modified_b2(p, j));
    const std::vector<Cx> dets = minor_determinants(b.complex, b.selection);
    b.det_f1 = dets[4];
    b.det_f2 = dets[3];
    b.det_f3 = dets[2];
    b.tau = torsion(b.complex, b.selection);
    b.invariant = b.tau.real() / out.prod_minus_v;
    out.product *= b.invariant;
    out.blocks.push_back(std::move(b));
  }
  return out;
}

bool BlockFactorReport::ok(double tol) const {
  bool good = structure_residual <= tol && s_factor_residual <= tol && r_factor_residual <= tol &&
              pair_cancellation <= tol && close(det_s, det_s_expected, tol) &&
              close(det_r, det_r_expected, tol) && close(det_f3, det_f3_expected, tol);
  if (j > 0) good = good && close(det_f2, det_f2_expected, tol);
  return good;
}

BlockFactorReport block_factor_check(int p, int q, int j, double tol) {
  validate_lens(p, q);
  if (j < 0 || j >= p) throw Error(ErrorCode::InvalidParams, "j must satisfy 0 <= j < p");
  const CoverComplex cc = build_cover_complex(p, q);
  BlockFactorReport r;
  r.p = p;
  r.q = q;
  r.j = j;

  const Eigen::MatrixXcd f3 = cc.block_f3(j);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(p, p);
  const Cx zq = zeta(p, q * j);
  const Eigen::MatrixXcd s = (id - zq * shift_power(p, -q)) * (id - shift_power(p, -1));
  const Eigen::MatrixXcd rr = (id - zq * shift_power(p, -q)) * (id - shift_power(p, 1));

  r.s_factor_residual = (f3.block(0, p, p, p) - s).cwiseAbs().maxCoeff();
  r.s_factor_residual = std::max(r.s_factor_residual, (f3.block(p, 0, p, p) - s.adjoint()).cwiseAbs().maxCoeff());
  r.r_factor_residual = (f3.block(2 * p, 3 * p, p, p) - rr).cwiseAbs().maxCoeff();
  r.r_factor_residual =
      std::max(r.r_factor_residual, (f3.block(3 * p, 2 * p, p, p) - rr.adjoint()).cwiseAbs().maxCoeff());

  // Everything outside the S and R blocks: zero except the sigma pattern.
  const Cx sigma = j == 0 ? Cx(p) : Cx(0);
  Eigen::MatrixXcd expected = f3;
  expected.block(0, p, p, p).setZero();
  expected.block(p, 0, p, p).setZero();
  expected.block(2 * p, 3 * p, p, p).setZero();
  expected.block(3 * p, 2 * p, p, p).setZero();
  Eigen::MatrixXcd pattern = Eigen::MatrixXcd::Zero(4 * p + 4, 4 * p + 4);
  Eigen::Matrix4cd sig;
  sig << 0, 0, sigma, -sigma, 0, 0, -sigma, sigma, sigma, -sigma, 0, 0, -sigma, sigma, 0, 0;
  pattern.block<4, 4>(4 * p, 4 * p) = sig;
  r.structure_residual = (expected - pattern).cwiseAbs().maxCoeff();

  // Minors on the complement of B2.
  const int first = j == 0 ? 1 : 2;
  const int m = p - first;
  r.det_s = det_of(f3.block(first, p + first, m, m));
  r.det_r = det_of(f3.block(2 * p + first, 3 * p + first, m, m));
  r.det_s_expected = j == 0 ? Cx(p) : (zeta(p, j) - 1.0) / (zq - 1.0);
  r.det_r_expected = j == 0 ? Cx(p) : (zeta(p, -j) - 1.0) / (zq - 1.0);

  const ComplexComplex c = block_complex(cc, j);
  const BasisSelection sel = symmetric_selection(c, std::nullopt, modified_b2(p, j));
  const std::vector<Cx> dets = minor_determinants(c, sel);
  r.det_f3 = dets[2];
  r.det_f2 = dets[3];
  if (j == 0) {
    r.det_f3_expected = -std::pow(static_cast<double>(p), 6);
    r.det_f2_expected = -dets[4] / std::pow(static_cast<double>(p), 3);
  } else {
    const double a = std::sin(kPi * j / p), b = std::sin(kPi * q * j / p);
    r.det_f3_expected = std::pow(a / b, 4);
    r.det_f2_expected = std::pow(zeta(p, j) - 1.0, 5) * (zq - 1.0);
  }

  // Pairs of edges on a common face cancel in the cover.
  const QuotientCells& cells = cc.cover.cells;
  for (int t = 0; t < cells.n3; ++t)
    for (int f = 0; f < 4; ++f) {
      std::vector<int> es;
      for (int e = 0; e < 6; ++e)
        if (kEdgeVertices[e][0] != f && kEdgeVertices[e][1] != f) es.push_back(cells.edge_of[t][e]);
      for (int a : es)
        for (int b : es) r.pair_cancellation = std::max(r.pair_cancellation, std::abs(cc.f3(a, b)));
    }

  if (!r.ok(tol))
    throw Error(ErrorCode::StructureMismatch,
                "block " + std::to_string(j) + " of L(" + std::to_string(p) + "," + std::to_string(q) +
                    ") does not have the expected structure");
  return r;
}

}  // namespace torsion_forge
