#pragma once

// Independent reference computations used to freeze expected values. Nothing
// here calls into the library's numerical paths.

#include <cmath>
#include <cstdint>
#include <functional>

namespace oracles {

/// Composite Simpson rule with an even number of intervals.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, long intervals) {
  if (intervals % 2) ++intervals;
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (long i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return sum * h / 3;
}

}  // namespace oracles

#include <algorithm>
#include <numeric>
#include <vector>

namespace oracles {

/// Determinant by the Leibniz permutation expansion (small matrices only).
inline long long leibniz_det(const std::vector<std::vector<long long>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long long total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    long long term = inversions % 2 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) term *= a[i][perm[i]];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// |det M| as the product of invariant factors from a Smith normal form
/// computed by gcd row/column elimination.
inline long long smith_index(std::vector<std::vector<long long>> m) {
  const std::size_t n = m.size();
  long long product = 1;
  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // move the smallest nonzero entry of the trailing block to (t, t)
      std::size_t bi = n, bj = n;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (m[i][j] != 0 && (bi == n || std::llabs(m[i][j]) < std::llabs(m[bi][bj]))) bi = i, bj = j;
      if (bi == n) return 0;
      std::swap(m[t], m[bi]);
      for (auto& row : m) std::swap(row[t], row[bj]);
      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        const long long q = m[i][t] / m[t][t];
        for (std::size_t j = t; j < n; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        const long long q = m[t][j] / m[t][t];
        for (std::size_t i = t; i < n; ++i) m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
    product *= std::llabs(m[t][t]);
  }
  return product;
}

/// Legendre symbol by brute-force squaring.
inline int legendre_brute(long a, long p) {
  a = ((a % p) + p) % p;
  if (a == 0) return 0;
  for (long x = 1; x < p; ++x)
    if ((x * x) % p == a) return 1;
  return -1;
}

/// #E(F_p) for y^2 = x^3 + A x + B by enumerating all (x, y), plus infinity.
inline long count_points_fp(long p, long A, long B) {
  long count = 1;
  for (long x = 0; x < p; ++x)
    for (long y = 0; y < p; ++y)
      if ((y * y - (x * x % p * x + A * x + B)) % p == 0) ++count;
  return count;
}

/// #E(F_25) for y^2 = x^3 + A x + B over F_5[s] with s^2 = 2.
inline long count_points_f25(long A, long B) {
  struct E {
    long a, b;
  };
  auto mul = [](E u, E v) { return E{((u.a * v.a + 2 * u.b * v.b) % 5 + 5) % 5, ((u.a * v.b + u.b * v.a) % 5 + 5) % 5}; };
  auto add = [](E u, E v) { return E{(u.a + v.a) % 5, (u.b + v.b) % 5}; };
  long count = 1;
  for (long xa = 0; xa < 5; ++xa)
    for (long xb = 0; xb < 5; ++xb)
      for (long ya = 0; ya < 5; ++ya)
        for (long yb = 0; yb < 5; ++yb) {
          const E x{xa, xb}, y{ya, yb};
          const E rhs = add(add(mul(mul(x, x), x), mul(E{A % 5, 0}, x)), E{B % 5, 0});
          const E lhs = mul(y, y);
          if (lhs.a == rhs.a && lhs.b == rhs.b) ++count;
        }
  return count;
}

/// Catalan's constant by the alternating series with averaged partial sums.
inline double catalan_series() {
  double s = 0, prev = 0;
  const long n = 2000000;
  for (long k = 0; k <= n; ++k) {
    prev = s;
    s += (k % 2 ? -1.0 : 1.0) / ((2.0 * k + 1) * (2.0 * k + 1));
  }
  return 0.5 * (s + prev);
}

/// Riemann-Siegel Z(t) with the first correction term; accurate to ~1e-3 for
/// t >= 10, enough to locate sign changes.
inline double riemann_siegel_z(double t) {
  const double pi = 3.14159265358979323846;
  const double theta = t / 2 * std::log(t / (2 * pi)) - t / 2 - pi / 8 + 1 / (48 * t) + 7 / (5760 * t * t * t);
  const double a = std::sqrt(t / (2 * pi));
  const long N = static_cast<long>(std::floor(a));
  double z = 0;
  for (long n = 1; n <= N; ++n) z += std::cos(theta - t * std::log(double(n))) / std::sqrt(double(n));
  z *= 2;
  const double p = a - N;
  const double c0 = std::cos(2 * pi * (p * p - p - 1.0 / 16)) / std::cos(2 * pi * p);
  z += ((N - 1) % 2 ? -1.0 : 1.0) * std::pow(2 * pi / t, 0.25) * c0;
  return z;
}

/// Sign changes of riemann_siegel_z on [lo, hi] with the given grid.
inline int riemann_siegel_sign_changes(double lo, double hi, double step) {
  int count = 0;
  double prev = riemann_siegel_z(lo);
  for (double t = lo + step; t <= hi; t += step) {
    const double z = riemann_siegel_z(t);
    if ((z < 0) != (prev < 0)) ++count;
    prev = z;
  }
  return count;
}

/// min over 1 <= m <= q of ||m alpha|| by direct enumeration in long double.
inline long double brute_min_distance(long double alpha, long q) {
  long double best = 1;
  for (long m = 1; m <= q; ++m) {
    const long double x = m * alpha;
    best = std::min(best, std::fabs(x - std::nearbyint(x)));
  }
  return best;
}

}  // namespace oracles
