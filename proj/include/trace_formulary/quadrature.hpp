#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <algorithm>
#include <vector>

#include "trace_formulary/error.hpp"

namespace trace_formulary::quadrature {

/// Gauss-Legendre rule on [-1, 1].
template <std::size_t N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};
};

template <std::size_t N>
GaussLegendreRule<N> make_gauss_legendre() {
  GaussLegendreRule<N> rule;
  constexpr long double pi = 3.141592653589793238462643383279502884L;
  for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
    long double x = std::cos(pi * (static_cast<long double>(i) + 0.75L) / (static_cast<long double>(N) + 0.5L));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = x;
      for (std::size_t k = 2; k <= N; ++k) {
        const long double p2 = ((2.0L * k - 1) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_N(x), p0 = P_{N-1}(x)
      dp = N * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const long double w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = static_cast<double>(-x);
    rule.nodes[N - 1 - i] = static_cast<double>(x);
    rule.weights[i] = rule.weights[N - 1 - i] = static_cast<double>(w);
  }
  return rule;
}

inline const GaussLegendreRule<20>& default_rule() {
  static const GaussLegendreRule<20> rule = make_gauss_legendre<20>();
  return rule;
}

struct Options {
  double relative_tolerance = 1e-12;
  double absolute_floor = 1e-15;
  std::size_t max_panels = 20000;
  std::size_t initial_panels = 4;
  // Relative evaluation noise of the integrand beyond eps, e.g. eps * |phase|
  // for oscillatory factors. Raises the round-off floor accordingly.
  double evaluation_noise = 0;
};

template <typename T>
struct Result {
  T value{};
  double error_estimate = 0;
  std::size_t panels = 0;
};

namespace detail {

template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <typename T, typename F>
std::pair<T, double> panel_rule(const F& f, double lo, double hi) {
  const auto& rule = default_rule();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  T sum{};
  double abs_sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const T v = f(mid + half * rule.nodes[i]);
    sum += rule.weights[i] * v;
    abs_sum += rule.weights[i] * magnitude(v);
  }
  return {sum * half, abs_sum * std::fabs(half)};
}

template <typename T>
struct Panel {
  double lo, hi;
  T whole;       // one-panel rule
  T left, right; // rule on each half
  double left_abs, right_abs;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Legendre integration with interval bisection.
/// Each panel is estimated by the 20-point rule on the panel and on its two
/// halves; the halves are kept and their difference from the whole is the
/// panel's error estimate. The worst panel is bisected until the summed
/// estimate meets max(absolute_floor, relative_tolerance * |value|) or the
/// round-off floor 50 (eps + evaluation_noise) * integral(|f|). The reported
/// estimate adds (50 eps + 2 evaluation_noise) * integral(|f|) to the panel sum. Throws NonConvergent at the panel limit.
template <typename T, typename F>
Result<T> integrate(const F& f, double lo, double hi, const Options& opts = {}) {
  Result<T> out;
  if (!(hi > lo)) return out;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double kRoundoffFactor = 50;
  const double extra_noise = std::max(0.0, opts.evaluation_noise);
  const double noise = kRoundoffFactor * (eps + extra_noise);

  auto make_panel = [&](double a, double b, T whole) {
    const double m = 0.5 * (a + b);
    auto [l, la] = detail::panel_rule<T>(f, a, m);
    auto [r, ra] = detail::panel_rule<T>(f, m, b);
    detail::Panel<T> p{a, b, whole, l, r, la, ra, 0};
    p.error = detail::magnitude(whole - (l + r));
    return p;
  };

  std::vector<detail::Panel<T>> heap;
  // Running sums drive the stopping rule only; the reported value is re-summed
  // in left-to-right panel order at the end.
  T running{};
  double running_err = 0;
  double running_abs = 0;
  const std::size_t initial = std::max<std::size_t>(1, opts.initial_panels);
  for (std::size_t i = 0; i < initial; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(initial);
    const double b = (i + 1 == initial) ? hi : lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(initial);
    auto p = make_panel(a, b, detail::panel_rule<T>(f, a, b).first);
    running += p.left + p.right;
    running_err += p.error;
    running_abs += p.left_abs + p.right_abs;
    heap.push_back(p);
  }
  std::make_heap(heap.begin(), heap.end());
  while (true) {
    const double target = std::max({opts.absolute_floor, opts.relative_tolerance * detail::magnitude(running),
                                    noise * running_abs});
    if (running_err <= target) break;
    if (heap.size() >= opts.max_panels)
      fail(ErrorKind::NonConvergent, "adaptive quadrature reached the subdivision limit");
    std::pop_heap(heap.begin(), heap.end());
    const auto worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto a = make_panel(worst.lo, mid, worst.left);
    auto b = make_panel(mid, worst.hi, worst.right);
    running += (a.left + a.right + b.left + b.right) - (worst.left + worst.right);
    running_err += a.error + b.error - worst.error;
    running_abs += (a.left_abs + a.right_abs + b.left_abs + b.right_abs) - (worst.left_abs + worst.right_abs);
    heap.push_back(a);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(b);
    std::push_heap(heap.begin(), heap.end());
  }
  std::sort(heap.begin(), heap.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
  T total{};
  double err = 0, abs_total = 0;
  for (const auto& p : heap) {
    total += p.left + p.right;
    err += p.error;
    abs_total += p.left_abs + p.right_abs;
  }
  out.value = total;
  out.error_estimate = err + (kRoundoffFactor * eps + 2 * extra_noise) * abs_total;
  out.panels = heap.size();
  return out;
}

}  // namespace trace_formulary::quadrature
