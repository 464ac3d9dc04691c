#include "screenopt/numerics.hpp"

#include "screenopt/errors.hpp"

#include <algorithm>
#include <cmath>

namespace screenopt::numerics {
namespace {

std::size_t rank_from_qr(const Eigen::ColPivHouseholderQR<Matrix>& qr, double rel_tol) {
  const Matrix& r = qr.matrixR();
  const Eigen::Index diag = std::min(r.rows(), r.cols());
  if (diag == 0) return 0;
  // Pivoting sorts |r_ii| non-increasingly, so the first entry is the largest.
  const double largest = std::abs(r(0, 0));
  if (largest == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < diag; ++i) {
    if (std::abs(r(i, i)) > rel_tol * largest) ++rank;
  }
  return rank;
}

}  // namespace

Matrix column_basis(const Matrix& m, double rel_tol) {
  if (m.rows() == 0) throw DimensionMismatch("column_basis: matrix has no rows");
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  const auto rank = static_cast<Eigen::Index>(rank_from_qr(qr, rel_tol));
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), rank);
  return q;
}

Matrix projector(const Matrix& m) {
  if (m.rows() == 0) throw DimensionMismatch("projector: matrix has no rows");
  if (!m.allFinite()) throw InvalidInput("projector: non-finite entries");
  const Matrix q = column_basis(m);
  return q * q.transpose();
}

std::size_t numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) throw DimensionMismatch("numerical_rank: empty matrix");
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  return rank_from_qr(qr, rel_tol);
}

std::size_t SymEigen::positive_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return v > positive_threshold; }));
}

double SymEigen::sum_smallest_positive(std::size_t count) const {
  double sum = 0.0;
  std::size_t used = 0;
  for (Eigen::Index i = 0; i < values.size() && used < count; ++i) {
    if (values[i] > positive_threshold) {
      sum += values[i];
      ++used;
    }
  }
  return sum;
}

SymEigen sym_eigen(const Matrix& s, double rel_tol) {
  if (s.rows() != s.cols()) throw DimensionMismatch("sym_eigen: matrix is not square");
  SymEigen out;
  if (s.rows() == 0) return out;
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("sym_eigen: decomposition failed");
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  const double largest = out.values.cwiseAbs().maxCoeff();
  out.positive_threshold = rel_tol * largest;
  return out;
}

std::optional<Matrix> smw_update(const Matrix& v, const Vector& x_old, const Vector& x_new,
                                 int replicates) {
  if (v.rows() != v.cols() || x_old.size() != v.rows() || x_new.size() != v.rows()) {
    throw DimensionMismatch("smw_update: V and row vectors disagree in size");
  }
  if (replicates < 1) throw InvalidInput("smw_update: replicates must be >= 1");
  const double r = replicates;
  const Vector a = v * x_new;
  const Vector b = v * x_old;
  const double v_new = x_new.dot(a);
  const double v_old = x_old.dot(b);
  const double v_cross = x_old.dot(a);
  const double det = (1.0 + r * v_new) * (1.0 - r * v_old) + r * r * v_cross * v_cross;
  if (std::abs(det) < kSingularDenominator) return std::nullopt;
  // (I + F2'VF1)^-1 in closed form.
  const double m00 = (1.0 - r * v_old) / det;
  const double m01 = (r * v_cross) / det;
  const double m10 = (-r * v_cross) / det;
  const double m11 = (1.0 + r * v_new) / det;
  // V F1 = sqrt(r) [a, -b], F2' V = sqrt(r) [a'; b'].
  const Vector left0 = a;
  const Vector left1 = -b;
  const Vector c0 = m00 * left0 + m10 * left1;
  const Vector c1 = m01 * left0 + m11 * left1;
  Matrix out = v - r * (c0 * a.transpose() + c1 * b.transpose());
  return out;
}

std::optional<Matrix> woodbury_add_rows(const Matrix& v, const Matrix& rows) {
  if (rows.cols() != v.rows()) throw DimensionMismatch("woodbury_add_rows: column mismatch");
  if (rows.rows() == 0) return v;
  const Matrix vu = v * rows.transpose();
  Matrix cap = Matrix::Identity(rows.rows(), rows.rows()) + rows * vu;
  Eigen::FullPivLU<Matrix> lu(cap);
  if (!lu.isInvertible()) return std::nullopt;
  return Matrix(v - vu * lu.solve(vu.transpose()));
}

std::optional<Matrix> inverse_spd(const Matrix& s) {
  if (s.rows() != s.cols()) throw DimensionMismatch("inverse_spd: matrix is not square");
  if (s.rows() == 0) return Matrix(0, 0);
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::LDLT<Matrix> ldlt(sym);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Vector d = ldlt.vectorD();
  const double largest = d.cwiseAbs().maxCoeff();
  if (largest <= 0.0 || d.minCoeff() <= kRankTolerance * kRankTolerance * largest) {
    return std::nullopt;
  }
  return Matrix(ldlt.solve(Matrix::Identity(s.rows(), s.cols())));
}

std::optional<Matrix> gram_inverse(const Matrix& x) {
  if (x.cols() == 0) return Matrix(0, 0);
  if (numerical_rank(x) < static_cast<std::size_t>(x.cols())) return std::nullopt;
  return inverse_spd(x.transpose() * x);
}

}  // namespace screenopt::numerics
