#ifndef TARMOS_LINALG_HPP
#define TARMOS_LINALG_HPP

#include <cstddef>
#include <vector>

namespace tarmos {

// Dense row-major matrix, sized for regression problems (n up to ~1e5 rows,
// a few dozen columns).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Householder QR with column pivoting.  A P = Q R, with reflectors stored
// in the lower trapezoid.  Rank is decided by the relative pivot threshold
// passed to the constructor (|R_jj| >= tol * |R_00|).
class QrDecomposition {
 public:
  explicit QrDecomposition(const Matrix& a, double rank_tol = 1e-10);

  std::size_t rank() const { return rank_; }
  bool full_rank() const { return rank_ == cols_; }

  // Original index of the first column judged linearly dependent.
  // Only meaningful when !full_rank().
  std::size_t deficient_column() const;

  // Least-squares solution of min ||A x - y||_2.  Requires full rank.
  std::vector<double> solve(const std::vector<double>& y) const;

  // Residual sum of squares for the least-squares solution: the squared
  // norm of the trailing components of Q^T y.
  double residual_ss(const std::vector<double>& y) const;

  // (A^T A)^{-1} reconstructed through the pivoted R factor.
  Matrix xtx_inverse() const;

 private:
  std::vector<double> apply_qt(const std::vector<double>& y) const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t rank_ = 0;
  Matrix qr_;                       // R in upper triangle, reflectors below
  std::vector<double> tau_;         // reflector scales
  std::vector<std::size_t> perm_;   // perm_[j] = original column at pivot j
};

// Cholesky factor L (lower) of a symmetric positive-definite matrix.
// Throws NumericError if the matrix is not positive definite.
Matrix cholesky(const Matrix& a);

// Solves A x = b for symmetric positive-definite A via Cholesky.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b);

// Inverse of a symmetric positive-definite matrix via Cholesky.
Matrix invert_spd(const Matrix& a);

// y = L z for lower-triangular L (used for correlated normal draws).
std::vector<double> lower_triangular_times(const Matrix& l, const std::vector<double>& z);

}  // namespace tarmos

#endif
