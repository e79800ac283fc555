#pragma once

// Oracles shared by the unit tests and the acceptance binary. Closed forms
// are written out here again rather than calling the library's versions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <torsion_forge/lens.hpp>

namespace tf_test {

namespace tf = torsion_forge;

inline constexpr double kPi = 3.14159265358979323846;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::vector<std::array<int, 3>> lens_tuples(int p_min, int p_max) {
  std::vector<std::array<int, 3>> out;
  for (int p = p_min; p <= p_max; ++p)
    for (int q = 1; q < p; ++q)
      if (std::gcd(p, q) == 1)
        for (int k = 1; k < p; ++k) out.push_back({p, q, k});
  return out;
}

inline double invariant_formula(int p, int q, int k) {
  const double s = 4 * std::sin(kPi * k / p) * std::sin(kPi * k * q / p);
  return -std::pow(s, 4) / (p * p);
}

inline double det_f1_formula(int p, int q, int k) { return -std::cos(kPi * k * (q - 1) / p); }

inline double det_f2_formula(int p, int q, int k) {
  const double a = kPi * k / p;
  return -32 * std::pow(std::sin(a), 2) * std::pow(std::sin(a * q), 3) * std::cos(a * (q - 1)) *
         std::sin(a * (2 * q - 3));
}

inline double modified_formula(int p, int q, int j) {
  if (j == 0) return -1.0 / std::pow(p, 12);
  return std::pow(4 * std::sin(kPi * j / p) * std::sin(kPi * q * j / p), 6);
}

inline std::complex<double> zeta(int p, int n) { return std::polar(1.0, 2 * kPi * n / p); }

/// q-classes under q' = +-q^(+-1) mod p, by brute force.
inline std::vector<std::vector<int>> criterion_classes(int p) {
  std::vector<int> qs;
  for (int q = 1; q < p; ++q)
    if (std::gcd(p, q) == 1) qs.push_back(q);
  const auto related = [p](int a, int b) {
    for (int c = 1; c < p; ++c)
      if ((a * c) % p == 1 && (b == c || b == p - c)) return true;
    return b == a || b == p - a;
  };
  std::vector<std::vector<int>> out;
  std::vector<bool> used(p, false);
  for (int q : qs) {
    if (used[q]) continue;
    std::vector<int> cls;
    for (int r : qs)
      if (!used[r] && related(q, r)) {
        cls.push_back(r);
        used[r] = true;
      }
    out.push_back(cls);
  }
  return out;
}

/// Groups q by the sorted multiset of values(q), comparing entries to tol.
template <class F>
std::vector<std::vector<int>> group_by_multiset(int p, F values, double tol) {
  std::vector<std::pair<int, std::vector<double>>> sig;
  for (int q = 1; q < p; ++q) {
    if (std::gcd(p, q) != 1) continue;
    std::vector<double> v = values(q);
    std::sort(v.begin(), v.end());
    sig.emplace_back(q, v);
  }
  const auto same = [tol](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > tol * std::max(1.0, std::abs(b[i]))) return false;
    return true;
  };
  std::vector<std::vector<int>> out;
  std::vector<bool> used(sig.size(), false);
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (used[i]) continue;
    std::vector<int> cls;
    for (std::size_t j = i; j < sig.size(); ++j)
      if (!used[j] && same(sig[i].second, sig[j].second)) {
        cls.push_back(sig[j].first);
        used[j] = true;
      }
    out.push_back(cls);
  }
  return out;
}

/// Cell counts by union-find over the face pairings, independent of
/// quotient_cells.
struct Counts {
  int n0 = 0, n1 = 0, n2 = 0, n3 = 0;
};

inline Counts union_find_counts(const tf::Triangulation& tri) {
  const int n = tri.tet_count();
  std::vector<int> parent;
  const auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const auto classes = [&](int per_tet, auto image) {
    parent.resize(n * per_tet);
    std::iota(parent.begin(), parent.end(), 0);
    for (int t = 0; t < n; ++t)
      for (int f = 0; f < 4; ++f) {
        const tf::Adjacent& adj = tri.adjacent(t, f);
        for (int s = 0; s < per_tet; ++s) {
          const int img = image(adj.perm, s, f);
          if (img < 0) continue;
          parent[find(t * per_tet + s)] = find(adj.tet * per_tet + img);
        }
      }
    std::set<int> roots;
    for (int i = 0; i < n * per_tet; ++i) roots.insert(find(i));
    return static_cast<int>(roots.size());
  };
  static constexpr int kEdge[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  const auto edge_index = [](int a, int b) {
    if (a > b) std::swap(a, b);
    for (int e = 0; e < 6; ++e)
      if (kEdge[e][0] == a && kEdge[e][1] == b) return e;
    return -1;
  };
  Counts c;
  c.n3 = n;
  c.n0 = classes(4, [](const tf::Perm4& pm, int s, int f) { return s == f ? -1 : pm[s]; });
  c.n1 = classes(6, [&](const tf::Perm4& pm, int s, int f) {
    if (kEdge[s][0] == f || kEdge[s][1] == f) return -1;
    return edge_index(pm[kEdge[s][0]], pm[kEdge[s][1]]);
  });
  c.n2 = 2 * n;  // closed: every face is paired exactly once
  return c;
}

/// Forced minors det f1[B1, :] and det f2[B2, dx \ B1] at the documented
/// placement, read straight from the assembled matrices.
struct ForcedMinors {
  double det_f1 = 0.0;
  double det_f2 = 0.0;
  double scale_f2 = 1.0;  // product of the norms of the full f2 rows used by the minor
};

inline ForcedMinors forced_minors(int p, int q, int k) {
  const tf::Realization real = tf::lens_realization(p, q, k);
  const tf::LiftedTriangulation lt = tf::lens_triangulation(p, q, k);
  const tf::QuotientCells cells = tf::quotient_cells(lt.tri);
  const tf::PipelineOptions opt = tf::lens_options(p, q, tf::Placement::Anchor);
  const Eigen::MatrixXd f1 = tf::assemble_f1(real, tf::centralizer_algebra(real.rep));
  const Eigen::MatrixXd f2 = tf::assemble_f2(cells, real);
  const std::vector<int>& b1 = *opt.b1;
  const std::vector<int>& b2 = *opt.b2;
  const std::vector<int>& order = *opt.edge_order;

  ForcedMinors out;
  Eigen::MatrixXd m1(b1.size(), f1.cols());
  for (std::size_t r = 0; r < b1.size(); ++r) m1.row(r) = f1.row(b1[r]);
  out.det_f1 = m1.determinant();

  std::vector<int> cols;
  for (int c = 0; c < f2.cols(); ++c)
    if (std::find(b1.begin(), b1.end(), c) == b1.end()) cols.push_back(c);
  Eigen::MatrixXd m2(b2.size(), cols.size());
  for (std::size_t r = 0; r < b2.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) m2(r, c) = f2(order[b2[r]], cols[c]);
  out.det_f2 = m2.determinant();
  for (int r : b2) out.scale_f2 *= f2.row(order[r]).norm();
  return out;
}

/// Five-point finite difference of the defect angles, scaled like f3:
/// entry (a, b) is (1 / (l_a l_b)) d(omega_a)/d(l_b).
inline Eigen::MatrixXd f3_finite_difference(const tf::Triangulation& tri, const tf::QuotientCells& cells,
                                            const tf::Realization& real, const tf::Orientation& orient,
                                            double step = 1e-5) {
  const std::vector<double> l = tf::realized_lengths(cells, real);
  const std::vector<double> v = tf::oriented_volumes(cells, real, orient);
  tf::SignAssignment signs(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) signs[t] = v[t] > 0 ? 1 : -1;
  const int n = cells.n1;
  const auto omega = [&](int b, double h) {
    std::vector<double> x = l;
    x[b] += h;
    return tf::defect_angles(tri, cells, x, signs).omega;
  };
  const auto wrap = [](double d) { return d - 2 * kPi * std::round(d / (2 * kPi)); };
  Eigen::MatrixXd out(n, n);
  for (int b = 0; b < n; ++b) {
    const double h = step * l[b];
    const auto w1 = omega(b, h), w2 = omega(b, 2 * h), m1 = omega(b, -h), m2 = omega(b, -2 * h);
    for (int a = 0; a < n; ++a) {
      const double d = 8 * wrap(w1[a] - m1[a]) - wrap(w2[a] - m2[a]);
      out(a, b) = d / (12 * h) / (l[a] * l[b]);
    }
  }
  return out;
}

}  // namespace tf_test
