#include <doctest.h>

#include <random>

#include <torsion_forge/error.hpp>
#include <torsion_forge/geometry.hpp>
#include <torsion_forge/lens.hpp>

#include "support.hpp"

using namespace torsion_forge;
using tf_test::kPi;

namespace {

Tet random_tet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Tet t;
    for (Vec3& x : t) x = Vec3(u(rng), u(rng), u(rng));
    const Lengths6 l = edge_lengths(t);
    const double lmax = *std::max_element(l.begin(), l.end());
    if (std::abs(signed_volume6(t)) > 0.05 * lmax * lmax * lmax) return t;
  }
}

// Interior dihedral angle at edge (i, j) from coordinates: the angle between
// the two faces containing it, measured through their outward normals.
double angle_from_coords(const Tet& t, int i, int j) {
  int k = -1, l = -1;
  for (int s = 0; s < 4; ++s)
    if (s != i && s != j) (k < 0 ? k : l) = s;
  const Vec3 e = (t[j] - t[i]).normalized();
  Vec3 a = t[k] - t[i], b = t[l] - t[i];
  a -= a.dot(e) * e;
  b -= b.dot(e) * e;
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
}

constexpr int kSlot[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

}  // namespace

TEST_CASE("cayley-menger") {
  CHECK(cayley_menger({1, 1, 1, 1, 1, 1}) == doctest::Approx(4.0));
  const double r2 = std::sqrt(2.0);
  CHECK(std::abs(cayley_menger({1, r2, 1, 1, r2, 1})) < 1e-12);
  CHECK(cayley_menger({1, 1, 1, 1, 1, 2.5}) < 0);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Tet t = random_tet(rng);
    const double v6 = signed_volume6(t);
    CHECK(cayley_menger(edge_lengths(t)) == doctest::Approx(8.0 * v6 * v6).epsilon(1e-10));
    CHECK(volume6_from_lengths(edge_lengths(t)) == doctest::Approx(std::abs(v6)).epsilon(1e-10));
  }
}

TEST_CASE("signed volume") {
  const Vec3 o(0, 0, 0), x(1, 0, 0), y(0, 1, 0), z(0, 0, 1);
  CHECK(signed_volume6(o, x, y, z) == doctest::Approx(1.0));
  CHECK(signed_volume6(x, o, y, z) == doctest::Approx(-1.0));

  // Lens placement: B_i = R^i B_0 and D_q = R^q D_0 with R the rotation by
  // -2 pi k / p about z.
  for (auto [p, q, k] : {std::array{5, 1, 1}, {7, 2, 3}, {9, 4, 2}}) {
    const double a = kPi / 2 + kPi * k * (q - 1) / p;
    const auto rot = [&](const Vec3& v, int n) {
      const double th = -2 * kPi * k * n / p;
      return Vec3(std::cos(th) * v.x() - std::sin(th) * v.y(), std::sin(th) * v.x() + std::cos(th) * v.y(), v.z());
    };
    const Vec3 b0(1, 0, 0), d0(std::cos(a), std::sin(a), 1), dq = rot(d0, q);
    double sum = 0.0;
    for (int i = 0; i < p; ++i) {
      const Vec3 bi = rot(b0, i), bj = rot(b0, i + 1);
      const Eigen::Matrix3d m = (Eigen::Matrix3d() << (d0 - dq).transpose(), (d0 - bi).transpose(),
                                 (d0 - bj).transpose())
                                    .finished();
      const double v = m.determinant();
      sum += v;
      CHECK(closed_form_volume(p, q, k, i) == doctest::Approx(v).epsilon(1e-12));
    }
    CHECK(std::abs(sum) < 1e-12);
    const std::vector<Vec3> pl = default_placement(p, q, k);
    const LensLabels lab = lens_labels(lens_triangulation(p, q, k).tri, p, q);
    CHECK((pl[lab.vertex_d] - d0).norm() < 1e-14);
    CHECK((pl[lab.vertex_b] - b0).norm() < 1e-14);
  }
  CHECK(closed_form_volume(5, 1, 1, 0) == doctest::Approx(1.3819660).epsilon(1e-7));
}

TEST_CASE("dihedral angles") {
  const Angles6 reg = dihedral_angles(Lengths6{1, 1, 1, 1, 1, 1});
  for (double th : reg) CHECK(th == doctest::Approx(std::acos(1.0 / 3.0)).epsilon(1e-14));
  CHECK(reg[0] == doctest::Approx(1.2309594).epsilon(1e-7));

  std::mt19937_64 rng(11);
  for (int n = 0; n < 50; ++n) {
    const Tet t = random_tet(rng);
    const Angles6 from_l = dihedral_angles(edge_lengths(t));
    const Angles6 from_x = dihedral_angles(t);
    for (int e = 0; e < 6; ++e) {
      CHECK(std::abs(from_l[e] - from_x[e]) < 1e-12);
      CHECK(std::abs(from_x[e] - angle_from_coords(t, kSlot[e][0], kSlot[e][1])) < 1e-12);
    }
  }

  const double r2 = std::sqrt(2.0);
  CHECK_THROWS_AS(dihedral_angles(Lengths6{1, r2, 1, 1, r2, 1}), Error);
}

TEST_CASE("dihedral jacobian and the skew-edge formula") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 30; ++n) {
    const Tet t = random_tet(rng);
    const Lengths6 l = edge_lengths(t);
    const auto J = dihedral_jacobian(l);
    const double v6 = std::abs(signed_volume6(t));
    for (int b = 0; b < 6; ++b) {
      Lengths6 lp = l, lm = l;
      const double h = 1e-6 * l[b];
      lp[b] += h;
      lm[b] -= h;
      const Angles6 ap = dihedral_angles(lp), am = dihedral_angles(lm);
      for (int e = 0; e < 6; ++e) CHECK(std::abs(J(e, b) - (ap[e] - am[e]) / (2 * h)) < 1e-6);
      // d theta_e / d l_opposite = l_e l_opp / 6V
      CHECK(J(opposite_edge(b), b) == doctest::Approx(l[b] * l[opposite_edge(b)] / v6).epsilon(1e-9));
    }
  }
}

TEST_CASE("schlaefli identity") {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 100; ++n) {
    const Lengths6 l = edge_lengths(random_tet(rng));
    const auto J = dihedral_jacobian(l);
    for (int b = 0; b < 6; ++b) {
      double s = 0.0;
      for (int e = 0; e < 6; ++e) s += l[e] * J(e, b);
      CHECK(std::abs(s) < 1e-8);
    }
  }
}

TEST_CASE("defect angles of realized lens spaces") {
  for (auto [p, q, k] : {std::array{5, 1, 1}, {7, 2, 1}, {8, 3, 3}}) {
    const LiftedTriangulation lt = lens_triangulation(p, q, k);
    const QuotientCells cells = quotient_cells(lt.tri);
    Realization real = lens_realization(p, q, k);
    real.vertex[0] += Vec3(0.1, -0.2, 0.05);  // keep off the anchor degeneracies
    const Orientation o = orient_consistently(lt.tri);
    const std::vector<double> l = realized_lengths(cells, real);
    const std::vector<double> v = oriented_volumes(cells, real, o);
    SignAssignment s(v.size());
    for (std::size_t t = 0; t < v.size(); ++t) s[t] = v[t] > 0 ? 1 : -1;
    for (double w : defect_angles(lt.tri, cells, l, s).omega) CHECK(std::abs(w) < 1e-9);

    std::vector<double> bumped = l;
    bumped[0] += 1e-3;
    double worst = 0.0;
    for (double w : defect_angles(lt.tri, cells, bumped, s).omega) worst = std::max(worst, std::abs(w));
    CHECK(worst > 1e-6);
  }
}

TEST_CASE("f3 against finite differences on L(7,2)") {
  const LiftedTriangulation lt = lens_triangulation(7, 2, 1);
  const QuotientCells cells = quotient_cells(lt.tri);
  Realization real = lens_realization(7, 2, 1);
  real.vertex[1] += Vec3(-0.3, 0.2, 0.1);
  const Orientation o = orient_consistently(lt.tri);
  const Eigen::MatrixXd f3 = assemble_f3(lt.tri, cells, real, o);
  const Eigen::MatrixXd fd = tf_test::f3_finite_difference(lt.tri, cells, real, o);
  CHECK((f3 - fd).cwiseAbs().maxCoeff() / f3.cwiseAbs().maxCoeff() < 1e-5);
  CHECK((f3 - f3.transpose()).cwiseAbs().maxCoeff() < 1e-10);

  const std::vector<double> l = realized_lengths(cells, real);
  const std::vector<double> v = oriented_volumes(cells, real, o);
  SignAssignment s(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) s[t] = v[t] > 0 ? 1 : -1;
  for (int a = 0; a < cells.n1; ++a)
    for (int b = 0; b < cells.n1; ++b)
      CHECK(domega_dl(lt.tri, cells, l, s, a, b) / (l[a] * l[b]) == doctest::Approx(f3(a, b)).epsilon(1e-10));
}

TEST_CASE("developing map") {
  const LensCover cover = lens_cover_triangulation(3, 1);
  const Realization real = cover_realization(cover);
  const Orientation o = orient_consistently(cover.tri);
  const std::vector<double> l = realized_lengths(cover.cells, real);
  const std::vector<double> v = oriented_volumes(cover.cells, real, o);
  SignAssignment s(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) s[t] = v[t] > 0 ? 1 : -1;

  const Tet base = real.tet(cover.cells, 0);
  const Development dev = develop(cover.tri, l, s, base);
  for (std::size_t i = 0; i < dev.vertex.size(); ++i) CHECK((dev.vertex[i] - real.vertex[i]).norm() < 1e-9);

  // Rotated base: every vertex rotated the same way.
  const Eigen::Matrix3d h = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  Tet rotated;
  for (int i = 0; i < 4; ++i) rotated[i] = h * base[i];
  const Development dr = develop(cover.tri, l, s, rotated);
  for (std::size_t i = 0; i < dr.vertex.size(); ++i) CHECK((dr.vertex[i] - h * dev.vertex[i]).norm() < 1e-9);

  // A neighbour of matching sign lands on the other side of the shared face.
  const Adjacent& adj = cover.tri.adjacent(0, 0);
  const Tet t0 = dev.corners(cover.cells, 0), t1 = dev.corners(cover.cells, adj.tet);
  const Vec3 n = (t0[2] - t0[1]).cross(t0[3] - t0[1]);
  const double side0 = n.dot(t0[0] - t0[1]);
  const double side1 = n.dot(t1[adj.perm[0]] - t0[1]);
  if (s[0] == s[adj.tet]) CHECK(side0 * side1 < 0);
  else CHECK(side0 * side1 > 0);

  std::vector<double> broken = l;
  broken[5] *= 1.01;
  CHECK_THROWS_AS(develop(cover.tri, broken, s, base), Error);
}
