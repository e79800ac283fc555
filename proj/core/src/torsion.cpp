#include "torsion_forge/torsion.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "torsion_forge/error.hpp"

namespace torsion_forge {

namespace {

template <class Scalar>
using Mat = typename BasedComplex<Scalar>::Matrix;

// JacobiSVD throughout: the divide-and-conquer SVD of Eigen 3.4.0 can return
// spurious singular values around 1e-5 on rank-deficient matrices.
template <class Scalar>
double sigma_max(const Mat<Scalar>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat<Scalar>> svd(m);
  return svd.singularValues()(0);
}

template <class Scalar>
void check_shapes(const BasedComplex<Scalar>& c) {
  const int n = c.length();
  if (n < 1 || static_cast<int>(c.maps.size()) != n)
    throw Error(ErrorCode::NotAComplex, "complex needs n >= 1 maps for n + 1 spaces");
  for (int i = 0; i < n; ++i) {
    if (c.maps[i].rows() != c.dims[i] || c.maps[i].cols() != c.dims[i + 1])
      throw Error(ErrorCode::NotAComplex, "f_" + std::to_string(i) + " has the wrong shape");
  }
}

std::vector<int> complement(const std::vector<int>& subset, int dim) {
  std::vector<bool> in(dim, false);
  for (int x : subset) in[x] = true;
  std::vector<int> out;
  for (int k = 0; k < dim; ++k)
    if (!in[k]) out.push_back(k);
  return out;
}

template <class Scalar>
Mat<Scalar> restrict(const Mat<Scalar>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Mat<Scalar> out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t k = 0; k < cols.size(); ++k) out(r, k) = m(rows[r], cols[k]);
  return out;
}

template <class Scalar>
std::vector<int> all_rows(const Mat<Scalar>& m) {
  std::vector<int> r(m.rows());
  std::iota(r.begin(), r.end(), 0);
  return r;
}

// sigma_min of the minor must stay above rank_tol * sigma_max of f_i.
template <class Scalar>
bool minor_ok(const Mat<Scalar>& minor, double scale, double tol) {
  if (minor.size() == 0) return true;
  Eigen::JacobiSVD<Mat<Scalar>> svd(minor);
  return svd.singularValues()(minor.rows() - 1) > tol * scale;
}

template <class Scalar>
void validate_subset(const std::vector<int>& s, int dim, int rank, int level) {
  const std::string where = " at level " + std::to_string(level);
  if (static_cast<int>(s.size()) != rank)
    throw Error(ErrorCode::SelectionFailed, "subset size differs from the rank" + where);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] < 0 || s[k] >= dim) throw Error(ErrorCode::SelectionFailed, "index out of range" + where);
    if (k > 0 && s[k] <= s[k - 1])
      throw Error(ErrorCode::SelectionFailed, "subset must be strictly ascending" + where);
  }
}

}  // namespace

template <class Scalar>
int numeric_rank(const typename BasedComplex<Scalar>::Matrix& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat<Scalar>> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rank_tol * s(0)) ++r;
  return r;
}

template <class Scalar>
RankReport verify_acyclic(const BasedComplex<Scalar>& c, const TorsionOptions& opt) {
  check_shapes(c);
  const int n = c.length();
  // A map whose largest singular value is negligible against the whole
  // complex is treated as zero (L(2,1) has f3 = 0 up to rounding).
  std::vector<double> sig(n);
  double global = 0.0;
  for (int i = 0; i < n; ++i) global = std::max(global, sig[i] = sigma_max<Scalar>(c.maps[i]));
  const double floor = opt.rank_tol * global;
  std::vector<bool> zero(n);
  for (int i = 0; i < n; ++i) zero[i] = sig[i] <= floor;
  for (int i = 1; i < n; ++i) {
    if (zero[i - 1] || zero[i]) continue;
    const Mat<Scalar> prod = c.maps[i - 1] * c.maps[i];
    const double bound = opt.complex_tol * sig[i - 1] * sig[i];
    if (prod.size() > 0 && sigma_max<Scalar>(prod) > bound)
      throw Error(ErrorCode::NotAComplex,
                  "f_" + std::to_string(i - 1) + " f_" + std::to_string(i) + " is not zero");
  }
  RankReport report;
  for (int i = 0; i < n; ++i)
    report.ranks.push_back(zero[i] ? 0 : numeric_rank<Scalar>(c.maps[i], opt.rank_tol));
  for (int i = 0; i <= n; ++i) {
    const int in = i < n ? report.ranks[i] : 0;
    const int out = i > 0 ? report.ranks[i - 1] : 0;
    const int gap = c.dims[i] - in - out;
    if (gap != 0)
      throw Error(ErrorCode::NotAcyclic, "homology at level " + std::to_string(i) +
                                             " has dimension " + std::to_string(gap));
  }
  return report;
}

template <class Scalar>
BasisSelection select_bases(const BasedComplex<Scalar>& c,
                            const std::vector<std::optional<std::vector<int>>>& forced,
                            const TorsionOptions& opt) {
  const RankReport ranks = verify_acyclic(c, opt);
  const int n = c.length();
  BasisSelection sel;
  sel.subsets.assign(n + 1, {});
  for (int i = n - 1; i >= 0; --i) {
    const std::vector<int> cols = complement(sel.subsets[i + 1], c.dims[i + 1]);
    const Mat<Scalar> A = restrict<Scalar>(c.maps[i], all_rows<Scalar>(c.maps[i]), cols);
    const int r = ranks.ranks[i];
    std::vector<int> rows;
    if (i < static_cast<int>(forced.size()) && forced[i]) {
      rows = *forced[i];
      validate_subset<Scalar>(rows, c.dims[i], r, i);
    } else if (r > 0) {
      Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(A.adjoint());
      const auto& perm = qr.colsPermutation().indices();
      rows.assign(perm.data(), perm.data() + r);
      std::sort(rows.begin(), rows.end());
    }
    if (!minor_ok<Scalar>(restrict<Scalar>(c.maps[i], rows, cols), sigma_max<Scalar>(c.maps[i]), opt.rank_tol))
      throw Error(ErrorCode::SelectionFailed, "minor of f_" + std::to_string(i) + " is singular");
    sel.subsets[i] = std::move(rows);
  }
  return sel;
}

template <class Scalar>
BasisSelection random_selection(const BasedComplex<Scalar>& c, std::uint64_t seed,
                                const TorsionOptions& opt) {
  const RankReport ranks = verify_acyclic(c, opt);
  const int n = c.length();
  std::mt19937_64 rng(seed);
  BasisSelection sel;
  sel.subsets.assign(n + 1, {});
  for (int i = n - 1; i >= 0; --i) {
    const std::vector<int> cols = complement(sel.subsets[i + 1], c.dims[i + 1]);
    const Mat<Scalar> A = restrict<Scalar>(c.maps[i], all_rows<Scalar>(c.maps[i]), cols);
    const int r = ranks.ranks[i];
    std::vector<int> order = all_rows<Scalar>(c.maps[i]);
    std::shuffle(order.begin(), order.end(), rng);
    double max_norm = 0.0;
    for (Eigen::Index k = 0; k < A.rows(); ++k) max_norm = std::max(max_norm, A.row(k).norm());
    std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> basis;
    std::vector<int> rows;
    for (int k : order) {
      if (static_cast<int>(rows.size()) == r) break;
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = A.row(k).adjoint();
      const double norm = v.norm();
      if (norm <= opt.rank_tol * max_norm) continue;
      for (const auto& q : basis) v -= q * q.dot(v);
      if (v.norm() <= 1e-3 * norm) continue;
      basis.push_back(v / v.norm());
      rows.push_back(k);
    }
    if (static_cast<int>(rows.size()) != r)
      throw Error(ErrorCode::SelectionFailed, "random selection could not reach the rank");
    std::sort(rows.begin(), rows.end());
    sel.subsets[i] = std::move(rows);
  }
  return sel;
}

template <class Scalar>
typename BasedComplex<Scalar>::Matrix minor_matrix(const BasedComplex<Scalar>& c,
                                                   const BasisSelection& sel, int level) {
  const std::vector<int> cols = complement(sel.subsets.at(level + 1), c.dims[level + 1]);
  return restrict<Scalar>(c.maps.at(level), sel.subsets.at(level), cols);
}

template <class Scalar>
std::vector<Scalar> minor_determinants(const BasedComplex<Scalar>& c, const BasisSelection& sel,
                                       const TorsionOptions& opt) {
  check_shapes(c);
  const int n = c.length();
  if (static_cast<int>(sel.subsets.size()) != n + 1)
    throw Error(ErrorCode::SingularMinor, "selection does not match the complex length");
  std::vector<Scalar> dets;
  for (int i = 0; i < n; ++i) {
    const Mat<Scalar> m = minor_matrix(c, sel, i);
    if (m.rows() != m.cols())
      throw Error(ErrorCode::SingularMinor, "minor of f_" + std::to_string(i) + " is not square");
    if (!minor_ok<Scalar>(m, sigma_max<Scalar>(c.maps[i]), opt.minor_tol))
      throw Error(ErrorCode::SingularMinor, "minor of f_" + std::to_string(i) + " is singular");
    dets.push_back(m.size() == 0 ? Scalar(1) : Scalar(m.fullPivLu().determinant()));
  }
  return dets;
}

template <class Scalar>
Scalar torsion(const BasedComplex<Scalar>& c, const BasisSelection& sel, const TorsionOptions& opt) {
  const std::vector<Scalar> dets = minor_determinants(c, sel, opt);
  Scalar tau(1);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (i % 2 == 0)
      tau /= dets[i];
    else
      tau *= dets[i];
  }
  return tau;
}

#define TORSION_FORGE_INSTANTIATE(S)                                                              \
  template int numeric_rank<S>(const BasedComplex<S>::Matrix&, double);                          \
  template RankReport verify_acyclic<S>(const BasedComplex<S>&, const TorsionOptions&);          \
  template BasisSelection select_bases<S>(const BasedComplex<S>&,                                \
                                          const std::vector<std::optional<std::vector<int>>>&,    \
                                          const TorsionOptions&);                                 \
  template BasisSelection random_selection<S>(const BasedComplex<S>&, std::uint64_t,             \
                                              const TorsionOptions&);                             \
  template BasedComplex<S>::Matrix minor_matrix<S>(const BasedComplex<S>&, const BasisSelection&, \
                                                   int);                                          \
  template std::vector<S> minor_determinants<S>(const BasedComplex<S>&, const BasisSelection&,   \
                                                const TorsionOptions&);                           \
  template S torsion<S>(const BasedComplex<S>&, const BasisSelection&, const TorsionOptions&);

TORSION_FORGE_INSTANTIATE(double)
TORSION_FORGE_INSTANTIATE(std::complex<double>)

#undef TORSION_FORGE_INSTANTIATE

}  // namespace torsion_forge
