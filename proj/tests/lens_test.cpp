#include <doctest.h>

#include <torsion_forge/error.hpp>
#include <torsion_forge/lens.hpp>

#include "support.hpp"

using namespace torsion_forge;
using tf_test::kPi;
using tf_test::rel;

TEST_CASE("lens parameters") {
  CHECK_THROWS_AS(lens_triangulation(4, 2), Error);
  CHECK_THROWS_AS(lens_triangulation(1, 1), Error);
  CHECK_THROWS_AS(lens_triangulation(5, 5), Error);
  const LiftedTriangulation l21 = lens_triangulation(2, 1);
  CHECK(l21.tri.tet_count() == 2);
  validate_decoration(l21.tri, l21.decoration);
  CHECK(orientation_violations(l21.tri, orient_consistently(l21.tri)).empty());
  CHECK(inverse_mod(2, 7) == 4);
  CHECK(inverse_mod(3, 8) == 3);
}

TEST_CASE("rho_k") {
  const Representation r = rho_k(4, 1);
  const Eigen::Matrix3d expect = (Eigen::Matrix3d() << 0, 1, 0, -1, 0, 0, 0, 0, 1).finished();
  CHECK((r.generator.rotation - expect).norm() < 1e-15);
  for (auto [p, k] : {std::pair{5, 2}, {12, 7}, {9, 1}}) CHECK(rho_k(p, k).generator.power(p).approx_identity(1e-12));
  CHECK_THROWS_AS(rho_k(5, 5), Error);
  CHECK_THROWS_AS(rho_k(5, 0), Error);

  const std::vector<Vec3> pl = default_placement(7, 1, 3);
  const LensLabels lab = lens_labels(lens_triangulation(7, 1).tri, 7, 1);
  CHECK((pl[lab.vertex_d] - Vec3(0, 1, 1)).norm() < 1e-15);
}

TEST_CASE("closed forms") {
  CHECK(closed_form_invariant(5, 1, 1) == doctest::Approx(-0.14589803).epsilon(1e-7));
  CHECK(closed_form_invariant(7, 2, 1) == doctest::Approx(-0.0691815041).epsilon(1e-9));
  for (const auto& [p, q, k] : tf_test::lens_tuples(2, 12)) {
    CHECK(rel(closed_form_invariant(p, q, k), tf_test::invariant_formula(p, q, k)) < 1e-13);
    CHECK(rel(closed_form_invariant(p, q, p - k), closed_form_invariant(p, q, k)) < 1e-12);
  }
}

TEST_CASE("reidemeister torsion") {
  CHECK(std::abs(reidemeister_torsion(2, 1, 1) - 0.25) < 1e-15);
  for (const auto& [p, q, k] : tf_test::lens_tuples(2, 12)) {
    const int a = inverse_mod(q, p);
    const std::complex<double> direct =
        1.0 / ((1.0 - tf_test::zeta(p, k)) * (1.0 - tf_test::zeta(p, k * a)));
    CHECK(std::abs(reidemeister_torsion(p, q, k) - direct) < 1e-12 * std::abs(direct));
    const double mag = std::abs(reidemeister_torsion(p, q, (k * q) % p));
    CHECK(1.0 / mag == doctest::Approx(std::abs(4 * std::sin(kPi * k / p) * std::sin(kPi * k * q / p))).epsilon(1e-12));
    CHECK(rel(closed_form_invariant(p, q, k) * -(p * p), std::pow(mag, -4)) < 1e-10);
  }
}

TEST_CASE("f3 restricted to the D0 B_i edges") {
  for (auto [p, q, k] : {std::array{5, 1, 1}, {7, 2, 1}, {9, 4, 2}, {11, 3, 5}, {10, 3, 1}}) {
    const LensFactorization f = lens_f3_factorization(p, q, k);
    // Diagonal from the volumes of the four tetrahedra around D_0 B_i. For
    // q = 1 or p - 1 the edge also meets its own translate in one
    // tetrahedron, which adds a skew term.
    for (int i = 0; i < p && q != 1 && q != p - 1; ++i) {
      const auto v = [&](int j) { return f.volumes[((j % p) + p) % p]; };
      const double d = -1 / v(i - 1) - 1 / v(i) - 1 / v(i + q - 1) - 1 / v(i + q);
      CHECK(f.f3_restricted(i, i) == doctest::Approx(d).epsilon(1e-10));
    }
    // The product S_q S_-1 R S_1 S_-q comes out with the opposite sign.
    CHECK(f.residual < 1e-10);
    CHECK((f.f3_restricted - f.factorized).norm() < 1e-10 * f.factorized.norm());
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) e(i, (i + 1) % p) = 1;
    const auto s = [&](int n) {
      Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(p, p);
      for (int i = 0; i < ((n % p) + p) % p; ++i) pw *= e;
      return Eigen::MatrixXd(Eigen::MatrixXd::Identity(p, p) - pw);
    };
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) r(i, i) = 1 / f.volumes[i];
    const Eigen::MatrixXd prod = s(q) * s(-1) * r * s(1) * s(-q);
    CHECK((f.f3_restricted + prod).cwiseAbs().maxCoeff() < 1e-10 * prod.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("f3 is symmetric") {
  for (auto [p, q, k] : {std::array{5, 2, 1}, {8, 3, 3}, {12, 5, 1}})
    CHECK(lens_invariant(p, q, k, 1).f3_asymmetry < 1e-10);
}

TEST_CASE("classification") {
  const Classification c7 = classify(7);
  CHECK(c7.consistent);
  CHECK(c7.by_invariant == std::vector<std::vector<int>>{{1, 6}, {2, 3, 4, 5}});
  CHECK(c7.by_invariant == tf_test::criterion_classes(7));

  const Classification c5 = classify(5);
  CHECK(c5.by_invariant.size() == 2);
  CHECK(classify(2).by_invariant == std::vector<std::vector<int>>{{1}});

  for (int p : {5, 7, 8, 9, 10, 11, 12}) {
    const auto by_formula = tf_test::group_by_multiset(
        p,
        [p](int q) {
          std::vector<double> v;
          for (int k = 1; k < p; ++k) v.push_back(tf_test::invariant_formula(p, q, k));
          return v;
        },
        1e-9);
    CHECK(by_formula == tf_test::criterion_classes(p));
    CHECK(classify(p).by_invariant == by_formula);
  }
}

TEST_CASE("cover and its quotient") {
  for (auto [p, q] : {std::pair{3, 1}, {5, 2}}) {
    const LensCover cover = lens_cover_triangulation(p, q);
    CHECK(cover.fundamental_tets.size() == static_cast<std::size_t>(4 * p));
    const LiftedTriangulation sub = subdivided_lens(cover);
    CHECK(sub.tri.tet_count() == 4 * p);
    validate_decoration(sub.tri, sub.decoration);
    const QuotientCells c = quotient_cells(sub.tri);
    CHECK(c.n0 == 4);
    CHECK(c.n1 == 4 * p + 4);
    for (int k = 1; k < p; ++k)
      CHECK(rel(invariant(sub, rho_k(p, k), 1).invariant, tf_test::invariant_formula(p, q, k)) < 1e-6);
  }
}
