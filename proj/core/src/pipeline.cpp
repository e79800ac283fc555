#include "torsion_forge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

#include "torsion_forge/error.hpp"

namespace torsion_forge {

namespace {

int mod(int a, int m) { return ((a % m) + m) % m; }

Eigen::Matrix3d cross_matrix(const Vec3& x) {
  Eigen::Matrix3d m;
  m << 0, -x.z(), x.y(), x.z(), 0, -x.x(), -x.y(), x.x(), 0;
  return m;
}

// Portable uniform draw in [-1, 1) from a standardized engine.
double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t attempt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (attempt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Motion Motion::operator*(const Motion& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

Motion Motion::inverse() const {
  const Eigen::Matrix3d rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

Motion Motion::power(int n) const {
  Motion base = n < 0 ? inverse() : *this;
  Motion out;
  for (int k = 0; k < std::abs(n); ++k) out = out * base;
  return out;
}

bool Motion::approx_identity(double tol) const {
  return (rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         translation.cwiseAbs().maxCoeff() <= tol;
}

std::string_view to_string(RepKind kind) noexcept {
  switch (kind) {
    case RepKind::Trivial:
      return "trivial";
    case RepKind::Abelian:
      return "abelian";
    case RepKind::Nonabelian:
      return "nonabelian";
  }
  return "?";
}

Representation Representation::trivial(int order) { return {order, Motion{}}; }

Motion Representation::image(int g) const { return generator.power(mod(g, order)); }

RepKind Representation::kind() const { return generator.approx_identity(1e-12) ? RepKind::Trivial : RepKind::Abelian; }

void Representation::validate(double tol) const {
  if (order < 1) throw Error(ErrorCode::InvalidParams, "group order must be positive");
  const Eigen::Matrix3d& r = generator.rotation;
  if ((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10 ||
      r.determinant() < 0)
    throw Error(ErrorCode::InvalidParams, "generator rotation is not in SO(3)");
  if (!generator.power(order).approx_identity(tol))
    throw Error(ErrorCode::InvalidParams, "generator order does not divide the group order");
}

Eigen::Matrix<double, 6, 6> adjoint(const Motion& g) {
  Eigen::Matrix<double, 6, 6> ad = Eigen::Matrix<double, 6, 6>::Zero();
  ad.block<3, 3>(0, 0) = g.rotation;
  ad.block<3, 3>(0, 3) = -cross_matrix(g.translation) * g.rotation;
  ad.block<3, 3>(3, 3) = g.rotation;
  return ad;
}

double CentralizerAlgebra::residual(std::span<const Motion> images) const {
  double worst = 0.0;
  for (const Motion& g : images) {
    const auto ad = adjoint(g);
    for (const Twist& u : basis) worst = std::max(worst, (ad * u - u).cwiseAbs().maxCoeff());
  }
  return worst;
}

RepKind classify_images(std::span<const Motion> images) {
  std::vector<Motion> nontrivial;
  for (const Motion& g : images)
    if (!g.approx_identity(1e-12)) nontrivial.push_back(g);
  if (nontrivial.empty()) return RepKind::Trivial;
  for (const Motion& a : nontrivial)
    for (const Motion& b : nontrivial)
      if (!((a * b) * (b * a).inverse()).approx_identity(1e-10)) return RepKind::Nonabelian;
  return RepKind::Abelian;
}

CentralizerAlgebra centralizer_algebra(std::span<const Motion> images) {
  CentralizerAlgebra alg;
  std::vector<Motion> nontrivial;
  for (const Motion& g : images)
    if (!g.approx_identity(1e-12)) nontrivial.push_back(g);
  if (nontrivial.empty()) {
    const char* names[6] = {"dx", "dy", "dz", "dphi_x", "dphi_y", "dphi_z"};
    for (int k = 0; k < 6; ++k) {
      alg.basis.push_back(Twist::Unit(k));
      alg.labels.emplace_back(names[k]);
    }
    return alg;
  }
  Eigen::MatrixXd stacked(6 * nontrivial.size(), 6);
  for (std::size_t k = 0; k < nontrivial.size(); ++k)
    stacked.block<6, 6>(6 * k, 0) = adjoint(nontrivial[k]) - Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int null_dim = 0;
  for (Eigen::Index k = 0; k < 6; ++k)
    if (k >= s.size() || s(k) <= 1e-9 * std::max(1.0, s(0))) ++null_dim;
  const Eigen::MatrixXd N = svd.matrixV().rightCols(null_dim);
  if (null_dim == 0) return alg;
  if (null_dim == 2) {
    // Screw pair about the rotation axis of the first nontrivial image.
    Eigen::JacobiSVD<Eigen::Matrix3d> axis_svd(nontrivial[0].rotation - Eigen::Matrix3d::Identity(),
                                               Eigen::ComputeFullV);
    Vec3 n = axis_svd.matrixV().col(2).normalized();
    Eigen::Index big;
    n.cwiseAbs().maxCoeff(&big);
    if (n(big) < 0) n = -n;
    const Eigen::Matrix<double, 3, 2> Nw = N.bottomRows(3);
    const Eigen::Vector2d c = Nw.colPivHouseholderQr().solve(n);
    Vec3 v0 = N.topRows(3) * c;
    v0 -= v0.dot(n) * n;
    Twist rot, trans;
    rot << v0, n;
    trans << n, Vec3::Zero();
    alg.basis = {rot, trans};
    const bool z_axis = std::abs(n.z() - 1.0) < 1e-12;
    alg.labels = {z_axis ? "dphi_z" : "dphi_axis", z_axis ? "dz" : "d_axis"};
    if (alg.residual(nontrivial) < 1e-9) return alg;
    alg.basis.clear();
    alg.labels.clear();
  }
  for (int k = 0; k < null_dim; ++k) {
    alg.basis.push_back(N.col(k));
    alg.labels.push_back("u" + std::to_string(k));
  }
  return alg;
}

CentralizerAlgebra centralizer_algebra(const Representation& rep) {
  const Motion g = rep.generator;
  return centralizer_algebra(std::span<const Motion>(&g, 1));
}

Vec3 Realization::corner(const QuotientCells& cells, int t, int s) const {
  return rep.image(decoration.element[t][s]).apply(vertex.at(cells.vertex_of[t][s]));
}

Tet Realization::tet(const QuotientCells& cells, int t) const {
  Tet out;
  for (int s = 0; s < 4; ++s) out[s] = corner(cells, t, s);
  return out;
}

std::vector<double> realized_lengths(const QuotientCells& cells, const Realization& real) {
  std::vector<double> out(cells.n1);
  for (int a = 0; a < cells.n1; ++a) {
    const EdgeIncidence& inc = cells.edge_cycles[a].front();
    const int i = kEdgeVertices[inc.edge][0], j = kEdgeVertices[inc.edge][1];
    out[a] = (real.corner(cells, inc.tet, j) - real.corner(cells, inc.tet, i)).norm();
  }
  return out;
}

std::vector<double> oriented_volumes(const QuotientCells& cells, const Realization& real,
                                     const Orientation& orientation) {
  std::vector<double> out(cells.n3);
  for (int t = 0; t < cells.n3; ++t) out[t] = orientation.at(t) * signed_volume6(real.tet(cells, t));
  return out;
}

Eigen::MatrixXd assemble_f1(const Realization& real, const CentralizerAlgebra& alg) {
  const int n0 = static_cast<int>(real.vertex.size());
  Eigen::MatrixXd f1(3 * n0, alg.dim());
  for (int v = 0; v < n0; ++v) {
    const Eigen::Matrix3d X = cross_matrix(real.vertex[v]);
    for (int k = 0; k < alg.dim(); ++k)
      f1.block<3, 1>(3 * v, k) = alg.basis[k].head<3>() + X * alg.basis[k].tail<3>();
  }
  return f1;
}

Eigen::MatrixXd assemble_f2(const QuotientCells& cells, const Realization& real) {
  Eigen::MatrixXd f2 = Eigen::MatrixXd::Zero(cells.n1, 3 * cells.n0);
  for (int a = 0; a < cells.n1; ++a) {
    const EdgeIncidence& inc = cells.edge_cycles[a].front();
    const int i = kEdgeVertices[inc.edge][0], j = kEdgeVertices[inc.edge][1];
    const Vec3 A = real.corner(cells, inc.tet, i), B = real.corner(cells, inc.tet, j);
    const Vec3 d = B - A;
    const int u = cells.vertex_of[inc.tet][i], w = cells.vertex_of[inc.tet][j];
    const Eigen::Matrix3d Ru = real.rep.image(real.decoration.element[inc.tet][i]).rotation;
    const Eigen::Matrix3d Rw = real.rep.image(real.decoration.element[inc.tet][j]).rotation;
    f2.block<1, 3>(a, 3 * w) += (Rw.transpose() * d).transpose();
    f2.block<1, 3>(a, 3 * u) -= (Ru.transpose() * d).transpose();
  }
  return f2;
}

Eigen::MatrixXd assemble_f3(const Triangulation& tri, const QuotientCells& cells,
                            const Realization& real, const Orientation& orientation,
                            const Tolerances& tol, double* max_defect) {
  const std::vector<double> l = realized_lengths(cells, real);
  const std::vector<double> vol = oriented_volumes(cells, real, orientation);
  double scale = *std::max_element(l.begin(), l.end());
  SignAssignment signs(cells.n3);
  for (int t = 0; t < cells.n3; ++t) {
    if (std::abs(vol[t]) <= tol.vol * scale * scale * scale)
      throw Error(ErrorCode::ZeroVolume, "tetrahedron " + std::to_string(t) + " is flat");
    signs[t] = vol[t] > 0 ? 1 : -1;
  }
  const DefectVector defect = defect_angles(tri, cells, l, signs, tol);
  double worst = 0.0;
  for (double w : defect.omega) worst = std::max(worst, std::abs(w));
  if (max_defect) *max_defect = worst;
  if (worst > tol.flat)
    throw Error(ErrorCode::InadmissibleColoring, "realization has a nonzero defect angle");
  Eigen::MatrixXd f3 = defect_jacobian(tri, cells, l, signs, tol);
  for (int a = 0; a < cells.n1; ++a)
    for (int b = 0; b < cells.n1; ++b) f3(a, b) /= l[a] * l[b];
  return f3;
}

RealComplex six_term_complex(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2,
                             const Eigen::MatrixXd& f3) {
  RealComplex c;
  const int e = static_cast<int>(f1.cols()), x = static_cast<int>(f1.rows()),
            l = static_cast<int>(f2.rows());
  c.dims = {e, x, l, l, x, e};
  c.maps = {f1.transpose(), -f2.transpose(), f3, f2, f1};
  return c;
}

namespace {

std::vector<int> complement_of(const std::vector<int>& s, int dim) {
  std::vector<bool> in(dim, false);
  for (int x : s) in[x] = true;
  std::vector<int> out;
  for (int k = 0; k < dim; ++k)
    if (!in[k]) out.push_back(k);
  return out;
}

}  // namespace

template <class Scalar>
BasisSelection symmetric_selection(const BasedComplex<Scalar>& c,
                                   const std::optional<std::vector<int>>& b1,
                                   const std::optional<std::vector<int>>& b2,
                                   const TorsionOptions& opt) {
  if (c.length() != 5) throw Error(ErrorCode::SelectionFailed, "expected a six-term complex");
  std::vector<std::optional<std::vector<int>>> forced(5);
  forced[4] = b1;
  forced[3] = b2;
  std::vector<int> top1, top2;
  if (b1 && b2) {
    top1 = *b1;
    top2 = *b2;
  } else {
    const BasisSelection first = select_bases(c, forced, opt);
    top1 = first.subsets[4];
    top2 = first.subsets[3];
  }
  std::vector<int> all(c.dims[0]);
  for (int k = 0; k < c.dims[0]; ++k) all[k] = k;
  forced = {all, complement_of(top1, c.dims[4]), complement_of(top2, c.dims[3]), top2, top1};
  return select_bases(c, forced, opt);
}

template BasisSelection symmetric_selection<double>(const BasedComplex<double>&,
                                                    const std::optional<std::vector<int>>&,
                                                    const std::optional<std::vector<int>>&,
                                                    const TorsionOptions&);
template BasisSelection symmetric_selection<std::complex<double>>(
    const BasedComplex<std::complex<double>>&, const std::optional<std::vector<int>>&,
    const std::optional<std::vector<int>>&, const TorsionOptions&);

InvariantReport evaluate(const LiftedTriangulation& lt, const Realization& real,
                         const PipelineOptions& opt) {
  const QuotientCells cells = quotient_cells(lt.tri);
  validate_decoration(lt.tri, real.decoration);
  if (real.rep.order != real.decoration.order)
    throw Error(ErrorCode::InvalidParams, "representation and decoration orders differ");
  if (static_cast<int>(real.vertex.size()) != cells.n0)
    throw Error(ErrorCode::InvalidParams, "realization needs one point per vertex class");
  const Orientation orientation = opt.orientation ? *opt.orientation : orient_consistently(lt.tri);
  if (!orientation_violations(lt.tri, orientation).empty())
    throw Error(ErrorCode::NonOrientable, "given orientation is not consistent");

  InvariantReport rep;
  rep.n0 = cells.n0;
  rep.n1 = cells.n1;
  rep.n2 = cells.n2;
  rep.n3 = cells.n3;
  rep.seed = real.seed;
  rep.vertices = real.vertex;

  const CentralizerAlgebra alg = centralizer_algebra(real.rep);
  rep.algebra_dim = alg.dim();
  const Eigen::MatrixXd f1 = assemble_f1(real, alg);
  Eigen::MatrixXd f2 = assemble_f2(cells, real);
  Eigen::MatrixXd f3 = assemble_f3(lt.tri, cells, real, orientation, opt.tol, &rep.max_defect);
  if (opt.edge_order) {
    const std::vector<int>& order = *opt.edge_order;
    std::vector<int> seen(cells.n1, 0);
    for (int e : order)
      if (e >= 0 && e < cells.n1) ++seen[e];
    if (static_cast<int>(order.size()) != cells.n1 ||
        std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; }))
      throw Error(ErrorCode::InvalidParams, "edge_order is not a permutation of the edge classes");
    Eigen::MatrixXd g2(f2.rows(), f2.cols()), g3(f3.rows(), f3.cols());
    for (int a = 0; a < cells.n1; ++a) {
      g2.row(a) = f2.row(order[a]);
      for (int b = 0; b < cells.n1; ++b) g3(a, b) = f3(order[a], order[b]);
    }
    f2 = std::move(g2);
    f3 = std::move(g3);
  }
  const double skew = f3.size() ? (f3 - f3.transpose()).cwiseAbs().maxCoeff() : 0.0;
  const double f3_max = f3.size() ? f3.cwiseAbs().maxCoeff() : 0.0;

  const RealComplex c = six_term_complex(f1, f2, f3);
  const RankReport ranks = verify_acyclic(c, opt.torsion);
  const BasisSelection sel = symmetric_selection(c, opt.b1, opt.b2, opt.torsion);
  const std::vector<double> dets = minor_determinants(c, sel, opt.torsion);
  rep.tau = torsion(c, sel, opt.torsion);
  rep.det_f1 = dets[4];
  rep.det_f2 = dets[3];
  rep.det_f3 = dets[2];
  rep.dims.assign(c.dims.rbegin(), c.dims.rend());
  rep.ranks.assign(ranks.ranks.rbegin(), ranks.ranks.rend());
  rep.b1 = sel.subsets[4];
  rep.b2 = sel.subsets[3];

  const std::vector<double> vol = oriented_volumes(cells, real, orientation);
  rep.prod_minus_v = 1.0;
  rep.min_abs_volume = std::numeric_limits<double>::infinity();
  for (double v : vol) {
    rep.prod_minus_v *= -v;
    rep.min_abs_volume = std::min(rep.min_abs_volume, std::abs(v));
  }
  const std::vector<double> lengths = realized_lengths(cells, real);
  const double lmax = *std::max_element(lengths.begin(), lengths.end());
  rep.volume_ratio = rep.min_abs_volume / (lmax * lmax * lmax);
  // f3 entries carry units of 1 / volume; measuring the skew part against
  // that scale keeps the residual independent of the placement's size and
  // meaningful when f3 vanishes.
  rep.f3_asymmetry = skew / std::max(f3_max, 1.0 / rep.min_abs_volume);
  rep.invariant = rep.tau / rep.prod_minus_v;
  return rep;
}

InvariantReport invariant(const LiftedTriangulation& lt, const Representation& rep,
                          std::uint64_t seed, const PipelineOptions& opt) {
  rep.validate();
  const QuotientCells cells = quotient_cells(lt.tri);
  std::vector<Vec3> anchor = lt.anchor;
  if (anchor.empty()) anchor.assign(cells.n0, Vec3::Zero());
  if (static_cast<int>(anchor.size()) != cells.n0)
    throw Error(ErrorCode::InvalidParams, "anchor count does not match vertex classes");

  const int attempts = opt.placement == Placement::Anchor ? 1 : std::max(1, opt.max_retries);
  bool all_acyclicity = true;
  std::string last;
  std::optional<InvariantReport> best;
  for (int a = 0; a < attempts; ++a) {
    Realization real{rep, lt.decoration, anchor, a == 0 ? seed : mix_seed(seed, a)};
    if (opt.placement == Placement::Random) {
      std::mt19937_64 rng(real.seed);
      for (Vec3& x : real.vertex)
        for (int k = 0; k < 3; ++k) x(k) += symmetric_unit(rng);
    }
    try {
      InvariantReport report = evaluate(lt, real, opt);
      report.attempts = a + 1;
      if (opt.placement == Placement::Anchor || report.volume_ratio >= opt.volume_floor) return report;
      if (!best || report.volume_ratio > best->volume_ratio) best = std::move(report);
    } catch (const Error& e) {
      if (is_validation_error(e.code())) throw;
      if (e.code() != ErrorCode::NotAcyclic) all_acyclicity = false;
      last = e.what();
    }
  }
  if (best) {
    best->attempts = attempts;
    return *best;
  }
  if (all_acyclicity) throw Error(ErrorCode::NotAcyclic, last);
  throw Error(ErrorCode::GeneralPositionFailed,
              "no general-position placement after " + std::to_string(attempts) +
                  " attempts (last: " + last + ")");
}

std::string InvariantReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["invariant"] = invariant;
  j["tau"] = tau;
  j["det_f1"] = det_f1;
  j["det_f2"] = det_f2;
  j["det_f3"] = det_f3;
  j["prod_minus_v"] = prod_minus_v;
  j["dims"] = dims;
  j["ranks"] = ranks;
  j["cells"] = {n0, n1, n2, n3};
  j["algebra_dim"] = algebra_dim;
  j["seed"] = seed;
  j["attempts"] = attempts;
  j["b1"] = b1;
  j["b2"] = b2;
  j["diagnostics"] = {{"min_abs_volume", min_abs_volume},
                      {"volume_ratio", volume_ratio},
                      {"max_defect", max_defect},
                      {"f3_asymmetry", f3_asymmetry}};
  nlohmann::json verts = nlohmann::json::array();
  for (const Vec3& v : vertices) verts.push_back({v.x(), v.y(), v.z()});
  j["vertices"] = std::move(verts);
  return j.dump(2);
}

// ---------------------------------------------------------------------------

std::string_view to_string(MoveKind kind) noexcept {
  switch (kind) {
    case MoveKind::OneFour:
      return "1-4";
    case MoveKind::FourOne:
      return "4-1";
    case MoveKind::TwoThree:
      return "2-3";
    case MoveKind::ThreeTwo:
      return "3-2";
  }
  return "?";
}

MoveKind parse_move_kind(std::string_view text) {
  for (MoveKind k : {MoveKind::OneFour, MoveKind::FourOne, MoveKind::TwoThree, MoveKind::ThreeTwo})
    if (text == to_string(k)) return k;
  throw Error(ErrorCode::InvalidParams, "unknown move '" + std::string(text) + "'");
}

LiftedTriangulation lifted_move(const LiftedTriangulation& lt, const Representation& rep,
                                MoveKind kind, MoveSite site, std::uint64_t seed) {
  const MoveResult move = pachner_move(lt.tri, kind, site);
  const int p = lt.decoration.order;
  const QuotientCells old_cells = quotient_cells(lt.tri);

  // Shift of each patch tetrahedron so the patch is one connected piece of the cover.
  std::vector<int> shift(lt.tri.tet_count(), 0);
  std::vector<bool> known(lt.tri.tet_count(), false);
  if (!move.patch.empty()) known[move.patch.front()] = true;
  for (bool progress = true; progress;) {
    progress = false;
    for (const FaceSlot& f : move.patch_tree) {
      const Adjacent& a = lt.tri.adjacent(f.tet, f.face);
      const int h = gluing_shift(lt.tri, lt.decoration, f.tet, f.face);
      if (known[f.tet] && !known[a.tet]) {
        shift[a.tet] = mod(shift[f.tet] + h, p);
        known[a.tet] = progress = true;
      } else if (!known[f.tet] && known[a.tet]) {
        shift[f.tet] = mod(shift[a.tet] - h, p);
        known[f.tet] = progress = true;
      }
    }
  }

  LiftedTriangulation out;
  out.tri = move.tri;
  out.decoration.order = p;
  out.decoration.element.resize(move.tri.tet_count());
  for (int t = 0; t < move.tri.tet_count(); ++t) {
    for (int s = 0; s < 4; ++s) {
      const CornerSource& src = move.sources[t][s];
      out.decoration.element[t][s] =
          src.tet < 0 ? 0 : mod(lt.decoration.element[src.tet][src.slot] + shift[src.tet], p);
    }
  }
  validate_decoration(out.tri, out.decoration);

  const QuotientCells cells = quotient_cells(out.tri);
  out.anchor.assign(cells.n0, Vec3::Zero());
  std::vector<Vec3> old_anchor = lt.anchor;
  if (old_anchor.empty()) old_anchor.assign(old_cells.n0, Vec3::Zero());
  for (int t = 0; t < move.tri.tet_count(); ++t) {
    for (int s = 0; s < 4; ++s) {
      const CornerSource& src = move.sources[t][s];
      const int v = cells.vertex_of[t][s];
      if (src.tet >= 0) {
        out.anchor[v] = old_anchor[old_cells.vertex_of[src.tet][src.slot]];
        continue;
      }
      // New vertex: barycenter of the anchored old tetrahedron plus small noise.
      const int old_t = move.patch.front();
      Tet c;
      for (int k = 0; k < 4; ++k)
        c[k] = rep.image(lt.decoration.element[old_t][k]).apply(old_anchor[old_cells.vertex_of[old_t][k]]);
      const Lengths6 l = edge_lengths(c);
      const double min_edge = *std::min_element(l.begin(), l.end());
      std::mt19937_64 rng(seed);
      Vec3 noise(symmetric_unit(rng), symmetric_unit(rng), symmetric_unit(rng));
      noise *= 0.1 * min_edge / std::sqrt(3.0);
      out.anchor[v] = (c[0] + c[1] + c[2] + c[3]) / 4.0 + noise;
    }
  }
  return out;
}

bool generic_volumes(const LiftedTriangulation& lt, const Representation& rep, std::uint64_t seed,
                     int probes) {
  const QuotientCells cells = quotient_cells(lt.tri);
  std::vector<Vec3> anchor = lt.anchor;
  if (anchor.empty()) anchor.assign(cells.n0, Vec3::Zero());
  const Orientation orientation(cells.n3, 1);
  for (int a = 0; a < probes; ++a) {
    Realization real{rep, lt.decoration, anchor, mix_seed(seed, a)};
    std::mt19937_64 rng(real.seed);
    for (Vec3& x : real.vertex)
      for (int k = 0; k < 3; ++k) x(k) += symmetric_unit(rng);
    const std::vector<double> l = realized_lengths(cells, real);
    const double scale = *std::max_element(l.begin(), l.end());
    const std::vector<double> vol = oriented_volumes(cells, real, orientation);
    if (std::all_of(vol.begin(), vol.end(),
                    [&](double v) { return std::abs(v) > 1e-6 * scale * scale * scale; }))
      return true;
  }
  return false;
}

LiftedTriangulation random_moves(const LiftedTriangulation& lt, const Representation& rep,
                                 std::span<const MoveKind> kinds, int count, std::uint64_t seed,
                                 std::vector<AppliedMove>* applied) {
  constexpr int kTries = 32;
  std::mt19937_64 rng(seed);
  LiftedTriangulation cur = lt;
  for (int step = 0; step < count; ++step) {
    bool moved = false;
    for (int attempt = 0; attempt < kTries && !moved; ++attempt) {
      std::vector<MoveKind> order(kinds.begin(), kinds.end());
      std::shuffle(order.begin(), order.end(), rng);
      for (MoveKind kind : order) {
        const std::vector<MoveSite> sites = move_sites(cur.tri, kind);
        if (sites.empty()) continue;
        const MoveSite site = sites[rng() % sites.size()];
        LiftedTriangulation next = lifted_move(cur, rep, kind, site, rng());
        // Tetrahedra whose corners lie in one orbit stay flat for every placement.
        if (!generic_volumes(next, rep, rng(), 3)) break;
        cur = std::move(next);
        if (applied) applied->push_back({kind, site});
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return cur;
}

LiftedTriangulation regauge(const LiftedTriangulation& lt, const Representation& rep,
                            const std::vector<int>& tet_shift, const std::vector<int>& vertex_shift) {
  const QuotientCells cells = quotient_cells(lt.tri);
  const int p = lt.decoration.order;
  if (static_cast<int>(tet_shift.size()) != cells.n3 || static_cast<int>(vertex_shift.size()) != cells.n0)
    throw Error(ErrorCode::InvalidParams, "shift sizes do not match the triangulation");
  LiftedTriangulation out = lt;
  for (int t = 0; t < cells.n3; ++t)
    for (int s = 0; s < 4; ++s)
      out.decoration.element[t][s] =
          mod(lt.decoration.element[t][s] + tet_shift[t] + vertex_shift[cells.vertex_of[t][s]], p);
  if (out.anchor.empty()) out.anchor.assign(cells.n0, Vec3::Zero());
  for (int v = 0; v < cells.n0; ++v) out.anchor[v] = rep.image(-vertex_shift[v]).apply(out.anchor[v]);
  validate_decoration(out.tri, out.decoration);
  return out;
}

}  // namespace torsion_forge
