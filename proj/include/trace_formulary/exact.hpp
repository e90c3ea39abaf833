#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "trace_formulary/error.hpp"

namespace trace_formulary::exact {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const BigInt& v) { return v.str(); }

/// "num/den", or just "num" for integers.
inline std::string to_string(const Rational& v) {
  const BigInt num = boost::multiprecision::numerator(v);
  const BigInt den = boost::multiprecision::denominator(v);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

inline int sign(const BigInt& v) { return v.sign(); }
inline int sign(const Rational& v) { return v.sign(); }

/// Dense row-major matrix over an exact ring.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      require(r.size() == cols_, ErrorKind::InvalidInput, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  T trace() const {
    require(square(), ErrorKind::InvalidInput, "trace of a non-square matrix");
    T s(0);
    for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
  }

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = U((*this)(i, j));
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    require(a.cols_ == b.rows_, ErrorKind::InvalidInput, "matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, ErrorKind::InvalidInput, "matrix difference shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }

  friend Matrix operator-(const Matrix& a) {
    Matrix c = a;
    for (auto& v : c.data_) v = -v;
    return c;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<BigInt>;
using RatMatrix = Matrix<Rational>;

template <typename T>
Matrix<T> power(const Matrix<T>& a, unsigned long k) {
  require(a.square(), ErrorKind::InvalidInput, "power of a non-square matrix");
  Matrix<T> result = Matrix<T>::identity(a.rows());
  Matrix<T> base = a;
  while (k) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

/// Fraction-free Gaussian elimination (Bareiss); every intermediate division is exact.
inline BigInt determinant(const IntMatrix& a) {
  require(a.square(), ErrorKind::InvalidInput, "determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  BigInt prev = 1;
  int sgn = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && m(r, k) == 0) ++r;
      if (r == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(r, j));
      sgn = -sgn;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sgn * m(n - 1, n - 1);
}

inline Rational determinant(const RatMatrix& a) {
  require(a.square(), ErrorKind::InvalidInput, "determinant of a non-square matrix");
  const std::size_t n = a.rows();
  RatMatrix m = a;
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t r = k;
    while (r < n && m(r, k) == 0) ++r;
    if (r == n) return 0;
    if (r != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(r, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      const Rational f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/// Gauss-Jordan inverse over Q. Throws Singular.
inline RatMatrix inverse(const RatMatrix& a) {
  require(a.square(), ErrorKind::InvalidInput, "inverse of a non-square matrix");
  const std::size_t n = a.rows();
  RatMatrix m = a;
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t r = k;
    while (r < n && m(r, k) == 0) ++r;
    require(r < n, ErrorKind::Singular, "matrix is singular over the rationals");
    if (r != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(k, j), m(r, j));
        std::swap(inv(k, j), inv(r, j));
      }
    const Rational pivot = m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) /= pivot;
      inv(k, j) /= pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      const Rational f = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

inline RatMatrix to_rational(const IntMatrix& a) { return a.cast<Rational>(); }

/// A^k for any integer k; negative powers go through the rational inverse.
inline RatMatrix signed_power(const RatMatrix& a, long k) {
  if (k >= 0) return power(a, static_cast<unsigned long>(k));
  return power(inverse(a), static_cast<unsigned long>(-k));
}

/// k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// k-th exterior power in the basis of lexicographically ordered wedge
/// monomials: entry (I, J) is the minor det A[I, J]. Lambda^0 = [1].
template <typename T>
Matrix<T> exterior_power(const Matrix<T>& a, std::size_t k) {
  require(a.square(), ErrorKind::InvalidInput, "exterior power of a non-square matrix");
  const auto sets = subsets(a.rows(), k);
  Matrix<T> out(sets.size(), sets.size());
  for (std::size_t r = 0; r < sets.size(); ++r)
    for (std::size_t c = 0; c < sets.size(); ++c) {
      Matrix<T> minor(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) minor(i, j) = a(sets[r][i], sets[c][j]);
      out(r, c) = determinant(minor);
    }
  return out;
}

/// Integer polynomial, coefficients in increasing degree.
using Poly = std::vector<BigInt>;

inline void normalize(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

inline std::size_t degree(const Poly& p) { return p.empty() ? 0 : p.size() - 1; }

/// det(x I - A) = sum_k (-1)^k tr(Lambda^k A) x^(d-k).
inline Poly charpoly(const IntMatrix& a) {
  const std::size_t d = a.rows();
  Poly p(d + 1);
  for (std::size_t k = 0; k <= d; ++k) {
    const BigInt t = exterior_power(a, k).trace();
    p[d - k] = (k % 2) ? BigInt(-t) : t;
  }
  return p;
}

/// Exact division of integer polynomials by a monic divisor.
inline Poly divide_monic(Poly num, const Poly& den) {
  require(!den.empty() && den.back() == 1, ErrorKind::InvalidInput, "divisor must be monic");
  normalize(num);
  if (num.size() < den.size()) return {0};
  Poly q(num.size() - den.size() + 1);
  for (std::size_t i = q.size(); i-- > 0;) {
    q[i] = num[i + den.size() - 1];
    for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= q[i] * den[j];
  }
  normalize(num);
  require(num.size() == 1 && num[0] == 0, ErrorKind::InvalidInput, "polynomial division is not exact");
  return q;
}

inline long euler_phi(long n) {
  long result = n;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

/// Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d.
inline Poly cyclotomic(long n) {
  require(n >= 1, ErrorKind::InvalidInput, "cyclotomic index must be positive");
  Poly p(n + 1, 0);
  p[0] = -1;
  p[n] = 1;
  for (long d = 1; d < n; ++d)
    if (n % d == 0) p = divide_monic(p, cyclotomic(d));
  return p;
}

/// Resultant as the determinant of the Sylvester matrix.
inline BigInt resultant(Poly f, Poly g) {
  normalize(f);
  normalize(g);
  const std::size_t m = degree(f), n = degree(g);
  if (m + n == 0) return 1;
  IntMatrix s(m + n, m + n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i <= m; ++i) s(r, r + i) = f[m - i];
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i <= n; ++i) s(n + r, r + i) = g[n - i];
  return determinant(s);
}

}  // namespace trace_formulary::exact
