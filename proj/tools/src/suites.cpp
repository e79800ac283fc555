#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <torsion_forge/error.hpp>
#include <torsion_forge/geometry.hpp>
#include <torsion_forge/lens.hpp>

namespace tf_cli {

using namespace torsion_forge;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Check make(std::string name, double residual, double tol, std::string detail = {}) {
  return {std::move(name), residual < tol, residual, std::move(detail)};
}

}  // namespace

std::vector<Check> verify_pachner(const LensArgs& a, const std::vector<MoveKind>& kinds, int sequences,
                                  int length) {
  const LiftedTriangulation lt = lens_triangulation(a.p, a.q, a.k);
  const Representation rep = rho_k(a.p, a.k);
  const double base = invariant(lt, rep, a.seed).invariant;
  double drift = 0.0;
  int applied_total = 0;
  for (int s = 0; s < sequences; ++s) {
    std::vector<AppliedMove> applied;
    const LiftedTriangulation moved = random_moves(lt, rep, kinds, length, a.seed * 1000 + s, &applied);
    applied_total += static_cast<int>(applied.size());
    drift = std::max(drift, rel(invariant(moved, rep, a.seed + s + 1).invariant, base));
  }
  return {make("pachner drift", drift, 1e-6,
               std::to_string(sequences) + " sequences, " + std::to_string(applied_total) + " moves"),
          make("closed form", rel(base, closed_form_invariant(a.p, a.q, a.k)), 1e-6)};
}

std::vector<Check> verify_schlaefli(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double analytic = 0.0, fd = 0.0;
  int done = 0;
  while (done < trials) {
    Tet t;
    for (Vec3& x : t) x = Vec3(u(rng), u(rng), u(rng));
    const Lengths6 l = edge_lengths(t);
    const double lmax = *std::max_element(l.begin(), l.end());
    if (std::abs(signed_volume6(t)) < 0.05 * lmax * lmax * lmax) continue;
    ++done;
    const auto J = dihedral_jacobian(l);
    for (int b = 0; b < 6; ++b) {
      double sa = 0.0, sf = 0.0;
      const double h = 1e-6 * l[b];
      Lengths6 lp = l, lm = l;
      lp[b] += h;
      lm[b] -= h;
      const Angles6 tp = dihedral_angles(lp), tm = dihedral_angles(lm);
      for (int e = 0; e < 6; ++e) {
        sa += l[e] * J(e, b);
        sf += l[e] * (tp[e] - tm[e]) / (2 * h);
      }
      analytic = std::max(analytic, std::abs(sa));
      fd = std::max(fd, std::abs(sf));
    }
  }
  return {make("schlaefli analytic", analytic, 1e-8, std::to_string(trials) + " tetrahedra"),
          make("schlaefli finite difference", fd, 1e-8)};
}

std::vector<Check> verify_modified(int p, int q) {
  std::vector<Check> out;
  const ModifiedReport rep = modified_invariants(p, q);
  double worst = 0.0;
  for (const ModifiedBlock& b : rep.blocks) worst = std::max(worst, rel(b.invariant, closed_form_modified(p, q, b.j)));
  out.push_back(make("block invariants", worst, 1e-6, std::to_string(p) + " blocks"));
  out.push_back(make("product", rel(rep.product, -1.0), 1e-6, "product = " + std::to_string(rep.product)));
  out.push_back(make("f1 blocks vanish for j != 0", rep.f1_leak, 1e-10));
  out.push_back(make("deck equivariance", rep.circulant_defect, 1e-10));

  double structure = 0.0;
  std::string failed;
  for (int j = 0; j < p; ++j) {
    try {
      const BlockFactorReport r = block_factor_check(p, q, j);
      structure = std::max({structure, r.structure_residual, r.s_factor_residual, r.r_factor_residual,
                            r.pair_cancellation});
    } catch (const Error& e) {
      structure = std::max(structure, 1.0);
      failed += " j=" + std::to_string(j);
    }
  }
  out.push_back(make("block structure", structure, 1e-9, failed.empty() ? "" : "failed:" + failed));

  const LensCover cover = lens_cover_triangulation(p, q);
  const LiftedTriangulation lt{cover.tri, HolonomyDecoration::trivial(cover.tri.tet_count()), cover.position};
  PipelineOptions opt;
  opt.placement = Placement::Anchor;
  const InvariantReport full = invariant(lt, Representation::trivial(), 0, opt);
  std::complex<double> prod = 1.0;
  for (const ModifiedBlock& b : rep.blocks) prod *= b.tau;
  out.push_back(make("cover torsion = product of blocks", std::abs(prod - full.tau) / std::abs(full.tau), 1e-6,
                     "I(S^3) = " + std::to_string(full.invariant)));
  return out;
}

std::vector<Check> verify_symmetry(const LensArgs& a) {
  const InvariantReport r = lens_invariant(a.p, a.q, a.k, a.seed);
  return {make("f3 symmetry", r.f3_asymmetry, 1e-10)};
}

std::vector<Check> verify_acyclicity(const LensArgs& a) {
  std::vector<Check> out;
  const auto describe = [](const InvariantReport& r) {
    std::string s = "ranks";
    for (int x : r.ranks) s += " " + std::to_string(x);
    return s;
  };
  const InvariantReport lens = lens_invariant(a.p, a.q, a.k, a.seed);
  out.push_back({"bipyramid complex", true, 0.0, describe(lens)});
  const LensCover cover = lens_cover_triangulation(a.p, a.q);
  const InvariantReport sub = invariant(subdivided_lens(cover), rho_k(a.p, a.k), a.seed);
  out.push_back({"subdivided complex", true, 0.0, describe(sub)});
  const ModifiedReport mod = modified_invariants(a.p, a.q);
  out.push_back({"block complexes", true, 0.0, std::to_string(mod.blocks.size()) + " blocks"});
  return out;
}

std::vector<Check> verify_placement(const LensArgs& a, int seeds) {
  const LiftedTriangulation lt = lens_triangulation(a.p, a.q, a.k);
  const Representation rep = rho_k(a.p, a.k);
  const double base = invariant(lt, rep, a.seed).invariant;
  double spread = 0.0, gauge = 0.0;
  std::mt19937_64 rng(a.seed);
  const QuotientCells cells = quotient_cells(lt.tri);
  for (int s = 1; s <= seeds; ++s) {
    spread = std::max(spread, rel(invariant(lt, rep, a.seed + s).invariant, base));
    std::vector<int> ts(cells.n3), vs(cells.n0);
    for (int& x : ts) x = static_cast<int>(rng() % a.p);
    for (int& x : vs) x = static_cast<int>(rng() % a.p);
    gauge = std::max(gauge, rel(invariant(regauge(lt, rep, ts, vs), rep, a.seed + s).invariant, base));
  }
  return {make("seed independence", spread, 1e-6, std::to_string(seeds) + " seeds"),
          make("lift independence", gauge, 1e-6)};
}

}  // namespace tf_cli
