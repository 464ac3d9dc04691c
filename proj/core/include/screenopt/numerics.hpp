#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace screenopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numerics {

/// Relative tolerance on pivoted-QR diagonals used for every rank decision.
inline constexpr double kRankTolerance = 1e-8;

/// Threshold below which the 2x2 SMW denominator is treated as singular.
inline constexpr double kSingularDenominator = 1e-10;

/// Orthogonal projector onto the column space of `m`, well defined for
/// rank-deficient input. A matrix with zero columns projects onto {0}.
Matrix projector(const Matrix& m);

/// Number of pivoted-QR diagonal magnitudes above rel_tol * largest.
std::size_t numerical_rank(const Matrix& m, double rel_tol = kRankTolerance);

/// Orthonormal basis for the column space of `m` (n x rank).
Matrix column_basis(const Matrix& m, double rel_tol = kRankTolerance);

/// Symmetric eigendecomposition with ascending eigenvalues.
struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // column i pairs with values[i]
  double positive_threshold = 0.0;

  /// Sum of the `count` smallest eigenvalues above positive_threshold. If
  /// fewer positive eigenvalues exist, all of them are summed.
  double sum_smallest_positive(std::size_t count) const;
  std::size_t positive_count() const;
};

/// Decomposes (S + S')/2. Eigenvalues <= rel_tol * max|lambda| are reported
/// but excluded from the "positive" selection helpers.
SymEigen sym_eigen(const Matrix& s, double rel_tol = kRankTolerance);

/// Sherman-Morrison-Woodbury update of V = (X1'X1)^-1 when `replicates`
/// identical rows equal to x_old are all replaced by x_new. Returns nullopt
/// when the exchange makes X1 rank deficient.
std::optional<Matrix> smw_update(const Matrix& v, const Vector& x_old, const Vector& x_new,
                                 int replicates);

/// (V^-1 + U'U)^-1 via Woodbury, where U holds appended rows. nullopt if the
/// inner capacitance matrix is singular.
std::optional<Matrix> woodbury_add_rows(const Matrix& v, const Matrix& rows);

/// Inverse of a symmetric positive definite matrix, nullopt when singular
/// (relative to kRankTolerance).
std::optional<Matrix> inverse_spd(const Matrix& s);

/// Inverse of X'X for a full column rank X, nullopt otherwise.
std::optional<Matrix> gram_inverse(const Matrix& x);

}  // namespace numerics
}  // namespace screenopt
