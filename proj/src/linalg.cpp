#include "tarmos/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tarmos/errors.hpp"

namespace tarmos {

QrDecomposition::QrDecomposition(const Matrix& a, double rank_tol)
    : rows_(a.rows()), cols_(a.cols()), qr_(a), tau_(a.cols(), 0.0), perm_(a.cols()) {
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const std::size_t kmax = std::min(rows_, cols_);

  for (std::size_t k = 0; k < kmax; ++k) {
    // Pivot: bring the column with the largest remaining norm to position k.
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < rows_; ++i) s += qr_(i, j) * qr_(i, j);
      if (s > best_norm) {
        best_norm = s;
        best = j;
      }
    }
    if (best != k) {
      for (std::size_t i = 0; i < rows_; ++i) std::swap(qr_(i, k), qr_(i, best));
      std::swap(perm_[k], perm_[best]);
    }

    double normx = std::sqrt(best_norm);
    if (normx == 0.0) {
      tau_[k] = 0.0;
      continue;
    }
    double alpha = qr_(k, k);
    double beta = alpha >= 0.0 ? -normx : normx;
    tau_[k] = (beta - alpha) / beta;
    double scale = alpha - beta;
    for (std::size_t i = k + 1; i < rows_; ++i) qr_(i, k) /= scale;
    qr_(k, k) = beta;

    for (std::size_t j = k + 1; j < cols_; ++j) {
      double w = qr_(k, j);
      for (std::size_t i = k + 1; i < rows_; ++i) w += qr_(i, k) * qr_(i, j);
      w *= tau_[k];
      qr_(k, j) -= w;
      for (std::size_t i = k + 1; i < rows_; ++i) qr_(i, j) -= w * qr_(i, k);
    }
  }

  double r00 = kmax > 0 ? std::abs(qr_(0, 0)) : 0.0;
  rank_ = 0;
  for (std::size_t k = 0; k < kmax; ++k) {
    if (std::abs(qr_(k, k)) >= rank_tol * r00 && std::abs(qr_(k, k)) > 0.0) {
      ++rank_;
    } else {
      break;
    }
  }
}

std::size_t QrDecomposition::deficient_column() const {
  return rank_ < cols_ ? perm_[rank_] : cols_;
}

std::vector<double> QrDecomposition::apply_qt(const std::vector<double>& y) const {
  std::vector<double> z = y;
  const std::size_t kmax = std::min(rows_, cols_);
  for (std::size_t k = 0; k < kmax; ++k) {
    if (tau_[k] == 0.0) continue;
    double w = z[k];
    for (std::size_t i = k + 1; i < rows_; ++i) w += qr_(i, k) * z[i];
    w *= tau_[k];
    z[k] -= w;
    for (std::size_t i = k + 1; i < rows_; ++i) z[i] -= w * qr_(i, k);
  }
  return z;
}

std::vector<double> QrDecomposition::solve(const std::vector<double>& y) const {
  if (y.size() != rows_) throw NumericError("qr solve: rhs length mismatch");
  if (!full_rank()) throw NumericError("qr solve: matrix is rank deficient");
  std::vector<double> z = apply_qt(y);
  std::vector<double> x(cols_, 0.0);
  for (std::size_t k = cols_; k-- > 0;) {
    double s = z[k];
    for (std::size_t j = k + 1; j < cols_; ++j) s -= qr_(k, j) * x[j];
    x[k] = s / qr_(k, k);
  }
  // Undo the column permutation.
  std::vector<double> out(cols_, 0.0);
  for (std::size_t k = 0; k < cols_; ++k) out[perm_[k]] = x[k];
  return out;
}

double QrDecomposition::residual_ss(const std::vector<double>& y) const {
  std::vector<double> z = apply_qt(y);
  double rss = 0.0;
  for (std::size_t i = cols_; i < rows_; ++i) rss += z[i] * z[i];
  return rss;
}

Matrix QrDecomposition::xtx_inverse() const {
  if (!full_rank()) throw NumericError("xtx_inverse: matrix is rank deficient");
  const std::size_t p = cols_;
  // Invert the upper-triangular R.
  Matrix rinv(p, p, 0.0);
  for (std::size_t j = p; j-- > 0;) {
    rinv(j, j) = 1.0 / qr_(j, j);
    for (std::size_t i = j; i-- > 0;) {
      double s = 0.0;
      for (std::size_t k = i + 1; k <= j; ++k) s += qr_(i, k) * rinv(k, j);
      rinv(i, j) = -s / qr_(i, i);
    }
  }
  // (R'R)^{-1} = Rinv Rinv', then undo the permutation on both sides.
  Matrix out(p, p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = std::max(i, j); k < p; ++k) s += rinv(i, k) * rinv(j, k);
      out(perm_[i], perm_[j]) = s;
      out(perm_[j], perm_[i]) = s;
    }
  }
  return out;
}

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw NumericError("cholesky: matrix not square");
  const std::size_t n = a.rows();
  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw NumericError("cholesky: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b) {
  Matrix l = cholesky(a);
  const std::size_t n = a.rows();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

Matrix invert_spd(const Matrix& a) {
  Matrix l = cholesky(a);
  const std::size_t n = a.rows();
  // Columns of the inverse from unit right-hand sides.
  Matrix out(n, n, 0.0);
  std::vector<double> y(n), x(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
      y[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
      x[i] = s / l(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) out(i, c) = x[i];
  }
  return out;
}

std::vector<double> lower_triangular_times(const Matrix& l, const std::vector<double>& z) {
  const std::size_t n = l.rows();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * z[j];
    out[i] = s;
  }
  return out;
}

}  // namespace tarmos
