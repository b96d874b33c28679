#pragma once

// Small dense real matrices and the spectral quantities the certificate needs:
// induced 2-norm, eigenvalues / spectral radius, Schur test and power norms.
// Sizes are tiny (d <= 16), so everything is plain O(n^3) with no blocking.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ncs {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;

  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("Mat: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                                  std::to_string(data_.size()));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("Mat: non-finite entry");
    }
  }

  // Row-list literal: Mat{{1, 2}, {3, 4}}.
  Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("Mat: ragged row list");
      for (double v : r) {
        if (!std::isfinite(v)) throw std::invalid_argument("Mat: non-finite entry");
        data_.push_back(v);
      }
    }
  }

  static Mat identity(std::size_t n) {
    Mat I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  static Mat diagonal(std::span<const double> d) {
    Mat D(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
    return D;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }
  std::span<const double> entries() const { return data_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Mat transpose() const {
    Mat T(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
  }

  Mat& operator+=(const Mat& o) {
    require_same_shape(o, "+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    require_same_shape(o, "-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Mat& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator-(Mat a) { return a *= -1.0; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) {
      throw std::invalid_argument("Mat: cannot multiply " + a.shape_str() + " by " + b.shape_str());
    }
    Mat c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vec operator*(const Mat& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw std::invalid_argument("Mat: vector length mismatch");
    Vec y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend bool operator==(const Mat&, const Mat&) = default;

  std::string shape_str() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const Mat& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw std::invalid_argument(std::string("Mat: shape mismatch in '") + op + "': " + shape_str() + " vs " +
                                  o.shape_str());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

namespace detail {

inline void require_square(const Mat& A, const char* who) {
  if (A.empty()) throw std::invalid_argument(std::string(who) + ": empty matrix");
  if (!A.is_square()) throw std::invalid_argument(std::string(who) + ": matrix is " + A.shape_str() + ", not square");
}

}  // namespace detail

// Singular values in descending order, by one-sided (Hestenes) Jacobi
// orthogonalisation of the columns of A (or of A^T when A is wide).
inline std::vector<double> singular_values(const Mat& A) {
  if (A.empty()) throw std::invalid_argument("singular_values: empty matrix");
  Mat U = A.rows() >= A.cols() ? A : A.transpose();
  const std::size_t m = U.rows();
  const std::size_t n = U.cols();
  constexpr double tol = 1e-15;

  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += U(i, p) * U(i, p);
          beta += U(i, q) * U(i, q);
          gamma += U(i, p) * U(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double up = U(i, p);
          const double uq = U(i, q);
          U(i, p) = c * up - s * uq;
          U(i, q) = s * up + c * uq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += U(i, j) * U(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

// Induced 2-norm (largest singular value).
inline double spectral_norm(const Mat& A) { return singular_values(A).front(); }

// All eigenvalues of a square matrix. Hessenberg reduction by Givens
// rotations, then Wilkinson-shifted complex QR with deflation.
inline std::vector<std::complex<double>> eigenvalues(const Mat& A) {
  detail::require_square(A, "eigenvalues");
  using cd = std::complex<double>;
  const std::size_t n = A.rows();
  std::vector<cd> H(n * n);
  auto h = [&](std::size_t i, std::size_t j) -> cd& { return H[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = A(i, j);

  // Rotation G = [[c, s], [-conj(s), c]] with real c, applied as G*H on
  // rows (i, j) and H*G^H on columns (i, j).
  auto rotate_rows = [&](std::size_t i, std::size_t j, double c, cd s, std::size_t c0, std::size_t c1) {
    for (std::size_t col = c0; col < c1; ++col) {
      const cd a = h(i, col), b = h(j, col);
      h(i, col) = c * a + s * b;
      h(j, col) = -std::conj(s) * a + c * b;
    }
  };
  auto rotate_cols = [&](std::size_t i, std::size_t j, double c, cd s, std::size_t r0, std::size_t r1) {
    for (std::size_t row = r0; row < r1; ++row) {
      const cd a = h(row, i), b = h(row, j);
      h(row, i) = c * a + std::conj(s) * b;
      h(row, j) = -s * a + c * b;
    }
  };
  // Returns (c, s) such that G*[a; b] = [r; 0].
  auto givens = [](cd a, cd b) -> std::pair<double, cd> {
    const double na = std::abs(a), nb = std::abs(b);
    if (nb == 0.0) return {1.0, cd(0.0)};
    if (na == 0.0) return {0.0, std::conj(b) / nb};
    const double r = std::hypot(na, nb);
    const cd phase = a / na;
    return {na / r, phase * std::conj(b) / r};
  };

  for (std::size_t col = 0; col + 2 < n; ++col) {
    for (std::size_t row = n - 1; row > col + 1; --row) {
      auto [c, s] = givens(h(row - 1, col), h(row, col));
      rotate_rows(row - 1, row, c, s, 0, n);
      rotate_cols(row - 1, row, c, s, 0, n);
      h(row, col) = 0.0;
    }
  }

  std::vector<cd> eig;
  eig.reserve(n);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::size_t hi = n - 1;
  int iter = 0;
  const int max_iter = 200 * static_cast<int>(n);
  while (true) {
    if (hi == 0) {
      eig.push_back(h(0, 0));
      break;
    }
    std::size_t lo = hi;
    while (lo > 0) {
      const double scale = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (std::abs(h(lo, lo - 1)) <= eps * (scale == 0.0 ? 1.0 : scale)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig.push_back(h(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (++iter > max_iter) throw std::runtime_error("eigenvalues: QR iteration did not converge");

    // Wilkinson shift from the trailing 2x2 block, exceptional shift now and then.
    const cd a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
    cd mu;
    if (iter % 11 == 10) {
      mu = d + cd(std::abs(h(hi, hi - 1)) * 0.75, 0.0);
    } else {
      const cd tr_half = (a + d) * 0.5;
      const cd disc = std::sqrt((a - d) * (a - d) * 0.25 + b * c);
      const cd l1 = tr_half + disc, l2 = tr_half - disc;
      mu = std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
    }

    // One explicit shifted QR step on the active window [lo, hi].
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    std::vector<std::pair<double, cd>> rots;
    rots.reserve(hi - lo);
    for (std::size_t j = lo; j < hi; ++j) {
      auto g = givens(h(j, j), h(j + 1, j));
      rotate_rows(j, j + 1, g.first, g.second, lo, hi + 1);
      h(j + 1, j) = 0.0;
      rots.push_back(g);
    }
    for (std::size_t j = lo; j < hi; ++j) {
      const auto& g = rots[j - lo];
      rotate_cols(j, j + 1, g.first, g.second, lo, std::min(j + 2, hi) + 1);
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  return eig;
}

// Largest eigenvalue modulus.
inline double spectral_radius(const Mat& A) {
  double r = 0.0;
  for (const auto& l : eigenvalues(A)) r = std::max(r, std::abs(l));
  return r;
}

// Strict: radius exactly 1 is not Schur.
inline bool is_schur(const Mat& A) { return spectral_radius(A) < 1.0; }

// A^p by repeated multiplication, A^0 = I.
inline Mat mat_power(const Mat& A, unsigned p) {
  detail::require_square(A, "mat_power");
  Mat P = Mat::identity(A.rows());
  for (unsigned i = 0; i < p; ++i) P = P * A;
  return P;
}

inline double mat_power_norm(const Mat& A, unsigned p) { return spectral_norm(mat_power(A, p)); }

}  // namespace ncs
