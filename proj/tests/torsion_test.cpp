#include <doctest.h>

#include <random>

#include <torsion_forge/error.hpp>
#include <torsion_forge/lens.hpp>
#include <torsion_forge/torsion.hpp>

#include "support.hpp"

using namespace torsion_forge;

namespace {

RealComplex lens_complex(int p, int q, int k) {
  const LiftedTriangulation lt = lens_triangulation(p, q, k);
  const QuotientCells cells = quotient_cells(lt.tri);
  Realization real = lens_realization(p, q, k);
  real.vertex[0] += Vec3(0.2, 0.1, -0.3);
  real.vertex[1] += Vec3(-0.1, 0.25, 0.15);
  return six_term_complex(assemble_f1(real, centralizer_algebra(real.rep)), assemble_f2(cells, real),
                          assemble_f3(lt.tri, cells, real, orient_consistently(lt.tri)));
}

}  // namespace

TEST_CASE("one-map complex") {
  RealComplex c;
  c.dims = {1, 1};
  c.maps = {Eigen::MatrixXd::Constant(1, 1, 2.0)};
  const BasisSelection sel = select_bases(c);
  CHECK(sel.subsets[0] == std::vector<int>{0});
  CHECK(torsion(c, sel) == doctest::Approx(0.5));

  RealComplex zero;
  zero.dims = {2, 2};
  zero.maps = {Eigen::MatrixXd::Zero(2, 2)};
  CHECK_THROWS_AS(verify_acyclic(zero), Error);

  RealComplex bij;
  bij.dims = {3, 3};
  bij.maps = {(Eigen::MatrixXd(3, 3) << 2, 1, 0, 0, 1, 4, 1, 0, 1).finished()};
  CHECK(select_bases(bij).subsets[0] == std::vector<int>{0, 1, 2});
  CHECK(torsion(bij, select_bases(bij)) == doctest::Approx(1.0 / bij.maps[0].determinant()));
}

TEST_CASE("basis change rescales torsion by det A") {
  // 0 -> R^2 -> R^3 -> R^1 -> 0 with f_0 f_1 = 0.
  RealComplex c;
  c.dims = {1, 3, 2};
  c.maps = {(Eigen::MatrixXd(1, 3) << 1, 1, 1).finished(),
            (Eigen::MatrixXd(3, 2) << 1, 0, -1, 1, 0, -1).finished()};
  verify_acyclic(c);
  const BasisSelection sel = select_bases(c);
  const double t0 = torsion(c, sel);

  const Eigen::MatrixXd a = (Eigen::MatrixXd(2, 2) << 2, 1, 1, 3).finished();
  RealComplex top = c;
  top.maps[1] = c.maps[1] * a;  // new basis of C_2 is A applied to the old one
  const double t_top = torsion(top, select_bases(top));
  CHECK(std::abs(t_top) == doctest::Approx(std::abs(t0) * std::abs(a.determinant())));

  const Eigen::MatrixXd b = (Eigen::MatrixXd(3, 3) << 1, 2, 0, 0, 1, 0, 3, 0, 2).finished();
  RealComplex mid = c;
  mid.maps[1] = b.inverse() * c.maps[1];
  mid.maps[0] = c.maps[0] * b;
  const double t_mid = torsion(mid, select_bases(mid));
  CHECK(std::abs(t_mid) == doctest::Approx(std::abs(t0) / std::abs(b.determinant())));
}

TEST_CASE("lens complex ranks") {
  const RealComplex c = lens_complex(7, 2, 1);
  const RankReport r = verify_acyclic(c);
  // maps are f1^T, -f2^T, f3, f2, f1 from the bottom
  CHECK(r.ranks == std::vector<int>{2, 4, 7 - 2, 4, 2});
}

TEST_CASE("torsion magnitude under random selections") {
  for (auto [p, q, k] : {std::array{5, 2, 1}, {7, 3, 2}}) {
    const RealComplex c = lens_complex(p, q, k);
    const double ref = std::abs(torsion(c, select_bases(c)));
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const BasisSelection sel = random_selection(c, seed);
      worst = std::max(worst, tf_test::rel(std::abs(torsion(c, sel)), ref));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("forced lens bases are accepted") {
  for (auto [p, q] : {std::pair{5, 1}, {7, 2}, {9, 4}}) {
    const InvariantReport r = lens_invariant(p, q, 1, 0, Placement::Anchor);
    const PipelineOptions opt = lens_options(p, q, Placement::Anchor);
    CHECK(r.b2 == *opt.b2);
    CHECK(r.b1 == *opt.b1);
  }
}

TEST_CASE("numeric rank on a rank-deficient cover map") {
  // Regression: a divide-and-conquer SVD reported a spurious 2e-5 singular
  // value here and the rank came out one too high.
  const LensCover cover = lens_cover_triangulation(5, 2);
  const Realization real = cover_realization(cover);
  const Eigen::MatrixXd f3 = assemble_f3(cover.tri, cover.cells, real, orient_consistently(cover.tri));
  CHECK(numeric_rank<double>(f3) == 66);
}

TEST_CASE("complex scalars") {
  ComplexComplex c;
  c.dims = {1, 1};
  c.maps = {Eigen::MatrixXcd::Constant(1, 1, std::complex<double>(0, 2))};
  CHECK(std::abs(torsion(c, select_bases(c)) - std::complex<double>(0, -0.5)) < 1e-15);
}
