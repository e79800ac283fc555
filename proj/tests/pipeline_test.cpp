#include <doctest.h>

#include <json.hpp>
#include <torsion_forge/error.hpp>
#include <torsion_forge/lens.hpp>

#include "support.hpp"

using namespace torsion_forge;
using tf_test::rel;

TEST_CASE("centralizer algebra") {
  CHECK(centralizer_algebra(Representation::trivial()).dim() == 6);

  const Representation r4 = rho_k(4, 1);
  const CentralizerAlgebra alg = centralizer_algebra(r4);
  REQUIRE(alg.dim() == 2);
  std::vector<Motion> images;
  for (int g = 0; g < 4; ++g) images.push_back(r4.image(g));
  CHECK(alg.residual(images) < 1e-10);
  // Spans dz and dphi_z.
  for (const Twist& u : alg.basis) {
    CHECK(std::abs(u(0)) + std::abs(u(1)) + std::abs(u(3)) + std::abs(u(4)) < 1e-12);
  }
  Eigen::Matrix2d span;
  span << alg.basis[0](2), alg.basis[1](2), alg.basis[0](5), alg.basis[1](5);
  CHECK(std::abs(span.determinant()) > 1e-6);

  Motion rx, rz;
  rx.rotation = Eigen::AngleAxisd(tf_test::kPi / 2, Vec3::UnitX()).toRotationMatrix();
  rz.rotation = Eigen::AngleAxisd(tf_test::kPi / 2, Vec3::UnitZ()).toRotationMatrix();
  const std::vector<Motion> nonabelian = {rx, rz};
  CHECK(centralizer_algebra(nonabelian).dim() == 0);
  CHECK(classify_images(nonabelian) == RepKind::Nonabelian);
}

TEST_CASE("f1 at the origin and f2 f1 = 0") {
  Realization real;
  real.rep = Representation::trivial();
  real.decoration = HolonomyDecoration::trivial(1);
  real.vertex = {Vec3::Zero(), Vec3(1, 2, 3)};
  const Eigen::MatrixXd f1 = assemble_f1(real, centralizer_algebra(real.rep));
  const CentralizerAlgebra alg = centralizer_algebra(real.rep);
  for (int c = 0; c < alg.dim(); ++c) {
    const Twist& u = alg.basis[c];
    CHECK((f1.block(0, c, 3, 1) - u.head<3>()).norm() < 1e-15);  // origin sees only translation
  }

  for (auto [p, q, k] : {std::array{5, 2, 1}, {7, 3, 2}}) {
    const LiftedTriangulation lt = lens_triangulation(p, q, k);
    const QuotientCells cells = quotient_cells(lt.tri);
    const Realization r = lens_realization(p, q, k);
    const Eigen::MatrixXd a = assemble_f2(cells, r) * assemble_f1(r, centralizer_algebra(r.rep));
    CHECK(a.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("f2 against finite differences on L(5,2)") {
  const LiftedTriangulation lt = lens_triangulation(5, 2, 1);
  const QuotientCells cells = quotient_cells(lt.tri);
  Realization real = lens_realization(5, 2, 1);
  real.vertex[0] += Vec3(0.1, 0.2, -0.1);
  const Eigen::MatrixXd f2 = assemble_f2(cells, real);
  const auto big_l = [&](const Realization& r) {
    std::vector<double> l = realized_lengths(cells, r);
    for (double& x : l) x = 0.5 * x * x;
    return l;
  };
  double worst = 0.0;
  for (int v = 0; v < cells.n0; ++v)
    for (int c = 0; c < 3; ++c) {
      Realization rp = real, rm = real;
      const double h = 1e-6;
      rp.vertex[v](c) += h;
      rm.vertex[v](c) -= h;
      const auto lp = big_l(rp), lm = big_l(rm);
      for (int e = 0; e < cells.n1; ++e) worst = std::max(worst, std::abs(f2(e, 3 * v + c) - (lp[e] - lm[e]) / (2 * h)));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("documented minors at the documented placement") {
  for (auto [p, q, k] : {std::array{5, 1, 1}, {7, 2, 1}, {8, 3, 3}, {11, 4, 2}}) {
    const tf_test::ForcedMinors m = tf_test::forced_minors(p, q, k);
    CHECK(m.det_f1 == doctest::Approx(tf_test::det_f1_formula(p, q, k)).epsilon(1e-9));
    CHECK(m.det_f2 == doctest::Approx(tf_test::det_f2_formula(p, q, k)).epsilon(1e-9));
    if (p == 8) continue;  // a flat tetrahedron at this placement stops the full pipeline
    const InvariantReport r = lens_invariant(p, q, k, 0, Placement::Anchor);
    CHECK(r.det_f1 == doctest::Approx(m.det_f1).epsilon(1e-9));
    CHECK(r.det_f2 == doctest::Approx(m.det_f2).epsilon(1e-9));
  }
  CHECK(tf_test::forced_minors(5, 1, 1).det_f1 == doctest::Approx(-1.0));
}

TEST_CASE("lens invariants") {
  const InvariantReport r51 = lens_invariant(5, 1, 1, 1);
  CHECK(r51.invariant == doctest::Approx(-0.14589803).epsilon(1e-7));
  CHECK(rel(r51.invariant, tf_test::invariant_formula(5, 1, 1)) < 1e-6);
  CHECK(r51.invariant == doctest::Approx(r51.tau / r51.prod_minus_v).epsilon(1e-12));
  CHECK(r51.tau == doctest::Approx((r51.ranks[3] % 2 ? -1 : 1) * r51.det_f2 * r51.det_f2 / (r51.det_f1 * r51.det_f1 * r51.det_f3)).epsilon(1e-12));
  CHECK(r51.ranks == std::vector<int>{2, 4, 3, 4, 2});

  const InvariantReport r72 = lens_invariant(7, 2, 1, 1);
  CHECK(r72.invariant == doctest::Approx(-0.0691815041).epsilon(1e-8));

  for (std::uint64_t seed : {2u, 17u, 99u}) CHECK(rel(lens_invariant(7, 2, 1, seed).invariant, r72.invariant) < 1e-6);

  const InvariantReport anchor = lens_invariant(5, 1, 1, 0, Placement::Anchor);
  CHECK(rel(anchor.invariant, tf_test::invariant_formula(5, 1, 1)) < 1e-9);
}

TEST_CASE("re-choosing lifts leaves the invariant alone") {
  const LiftedTriangulation lt = lens_triangulation(7, 3, 2);
  const Representation rep = rho_k(7, 2);
  const double base = invariant(lt, rep, 4).invariant;
  const QuotientCells cells = quotient_cells(lt.tri);
  for (int s = 1; s < 6; ++s) {
    std::vector<int> ts(cells.n3), vs(cells.n0);
    for (int t = 0; t < cells.n3; ++t) ts[t] = (s * t + 1) % 7;
    for (int v = 0; v < cells.n0; ++v) vs[v] = (s + v) % 7;
    const LiftedTriangulation g = regauge(lt, rep, ts, vs);
    validate_decoration(g.tri, g.decoration);
    CHECK(rel(invariant(g, rep, 4 + s).invariant, base) < 1e-6);
  }
}

TEST_CASE("sphere and the projective space") {
  // S^3 as the cover of L(3,1) with the trivial representation.
  const LensCover cover = lens_cover_triangulation(3, 1);
  const LiftedTriangulation lt{cover.tri, HolonomyDecoration::trivial(cover.tri.tet_count()), cover.position};
  PipelineOptions opt;
  opt.placement = Placement::Anchor;
  CHECK(invariant(lt, Representation::trivial(), 0, opt).invariant == doctest::Approx(-1.0).epsilon(1e-9));

  // L(2,1) has f3 = 0 and still gives the closed form.
  CHECK(lens_invariant(2, 1, 1, 1).invariant == doctest::Approx(tf_test::invariant_formula(2, 1, 1)).epsilon(1e-9));
  CHECK(tf_test::invariant_formula(2, 1, 1) == doctest::Approx(-64.0));
}

TEST_CASE("report json") {
  const InvariantReport r = lens_invariant(5, 2, 1, 3);
  const nlohmann::json j = nlohmann::json::parse(r.to_json());
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("invariant").get<double>() == doctest::Approx(r.invariant));
  CHECK(j.at("ranks").get<std::vector<int>>() == r.ranks);
  CHECK(r.to_json() == lens_invariant(5, 2, 1, 3).to_json());
}

TEST_CASE("representation errors") {
  CHECK_THROWS_AS(rho_k(5, 5), Error);
  CHECK_THROWS_AS(lens_invariant(4, 2, 1, 1), Error);
  try {
    lens_invariant(4, 2, 1, 1);
  } catch (const Error& e) {
    CHECK(is_validation_error(e.code()));
  }
}
