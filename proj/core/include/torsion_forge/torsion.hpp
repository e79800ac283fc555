#pragma once

// Based chain complexes 0 -> C_n -> ... -> C_0 -> 0 with f_i : C_{i+1} -> C_i
// stored as dim C_i x dim C_{i+1} matrices, and their torsion.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace torsion_forge {

template <class Scalar>
struct BasedComplex {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::vector<int> dims;     // dims[i] = dim C_i, i = 0..n
  std::vector<Matrix> maps;  // maps[i] = f_i, i = 0..n-1
  /// Optional basis labels per level, used in reports only.
  std::vector<std::vector<std::string>> labels;

  int length() const noexcept { return static_cast<int>(dims.size()) - 1; }
};

using RealComplex = BasedComplex<double>;
using ComplexComplex = BasedComplex<std::complex<double>>;

/// B_i subset of C_i (ascending indices) with |B_i| = rank f_i. The minor of
/// f_i keeps rows B_i and columns C_{i+1} \ B_{i+1}.
struct BasisSelection {
  std::vector<std::vector<int>> subsets;
};

struct RankReport {
  std::vector<int> ranks;  // ranks[i] = rank f_i
};

struct TorsionOptions {
  double rank_tol = 1e-9;     // singular values > rank_tol * sigma_max count
  double complex_tol = 1e-9;  // |f_{i-1} f_i| relative to |f_{i-1}| |f_i|
  double minor_tol = 1e-12;   // sigma_min / sigma_max of a chosen minor
};

template <class Scalar>
int numeric_rank(const typename BasedComplex<Scalar>::Matrix& m, double rank_tol = 1e-9);

/// Throws NotAComplex or NotAcyclic (naming the level and the rank gap).
template <class Scalar>
RankReport verify_acyclic(const BasedComplex<Scalar>& c, const TorsionOptions& opt = {});

/// Deterministic selection by column-pivoted QR, top level first. Entries of
/// `forced` that are set are used verbatim. Throws SelectionFailed.
template <class Scalar>
BasisSelection select_bases(const BasedComplex<Scalar>& c,
                            const std::vector<std::optional<std::vector<int>>>& forced = {},
                            const TorsionOptions& opt = {});

/// Random valid selection: greedy over shuffled rows.
template <class Scalar>
BasisSelection random_selection(const BasedComplex<Scalar>& c, std::uint64_t seed,
                                const TorsionOptions& opt = {});

/// The minor of f_i for `sel`.
template <class Scalar>
typename BasedComplex<Scalar>::Matrix minor_matrix(const BasedComplex<Scalar>& c,
                                                   const BasisSelection& sel, int level);

/// det of each minor; throws SingularMinor.
template <class Scalar>
std::vector<Scalar> minor_determinants(const BasedComplex<Scalar>& c, const BasisSelection& sel,
                                       const TorsionOptions& opt = {});

/// prod_i det(minor f_i)^((-1)^(i+1)).
template <class Scalar>
Scalar torsion(const BasedComplex<Scalar>& c, const BasisSelection& sel,
               const TorsionOptions& opt = {});

}  // namespace torsion_forge
