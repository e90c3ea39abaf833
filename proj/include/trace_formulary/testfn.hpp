#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "trace_formulary/config.hpp"
#include "trace_formulary/error.hpp"
#include "trace_formulary/parallel.hpp"
#include "trace_formulary/quadrature.hpp"

namespace trace_formulary {

using Complex = std::complex<double>;

enum class TestFunctionKind { Bump, CosineTaper, PolynomialBump };

/// Compactly supported real test function a * psi((t - c) / w) with profile
///   Bump:           exp(-1 / (1 - u^2))        (C-infinity)
///   CosineTaper:    (1 + cos(pi u)) / 2        (C^1)
///   PolynomialBump: (1 - u^2)^order            (C^(order-1))
/// on |u| < 1 and exactly 0 elsewhere.
struct TestFunction {
  TestFunctionKind kind = TestFunctionKind::Bump;
  double center = 0;
  double halfwidth = 1;
  double amplitude = 1;
  int order = 4;  // PolynomialBump only

  static TestFunction bump(double center, double halfwidth, double amplitude = 1) {
    return make(TestFunctionKind::Bump, center, halfwidth, amplitude);
  }
  static TestFunction cosine_taper(double center, double halfwidth, double amplitude = 1) {
    return make(TestFunctionKind::CosineTaper, center, halfwidth, amplitude);
  }
  static TestFunction polynomial_bump(int order, double center, double halfwidth, double amplitude = 1) {
    require(order >= 1 && order <= 32, ErrorKind::InvalidInput, "polynomial bump order must be in 1..32");
    auto f = make(TestFunctionKind::PolynomialBump, center, halfwidth, amplitude);
    f.order = order;
    return f;
  }

  double support_lo() const { return center - halfwidth; }
  double support_hi() const { return center + halfwidth; }
  bool support_contains_zero() const { return support_lo() <= 0 && 0 <= support_hi(); }
  bool support_positive() const { return support_lo() > 0; }
  bool support_negative() const { return support_hi() < 0; }

  /// Largest m for which d^m/dt^m (e^{st} phi) is integrable and all lower
  /// derivatives vanish at the support ends, i.e. |Phi(s)| <= B_m / |Im s|^m holds.
  int decay_order() const {
    switch (kind) {
      case TestFunctionKind::Bump: return 12;
      case TestFunctionKind::CosineTaper: return 2;
      case TestFunctionKind::PolynomialBump: return std::min(order, 12);
    }
    return 0;
  }

 private:
  static TestFunction make(TestFunctionKind kind, double center, double halfwidth, double amplitude) {
    require(std::isfinite(center) && std::isfinite(amplitude), ErrorKind::InvalidInput, "test function parameters must be finite");
    require(std::isfinite(halfwidth) && halfwidth > 0, ErrorKind::InvalidInput, "test function halfwidth must be positive");
    TestFunction f;
    f.kind = kind;
    f.center = center;
    f.halfwidth = halfwidth;
    f.amplitude = amplitude;
    return f;
  }
};

namespace detail {

inline constexpr int kMaxBumpDerivative = 12;

/// psi^(m)(u) = P_m(u) (1 - u^2)^(-2m) psi(u) for psi(u) = exp(-1/(1-u^2)), with
/// P_{m+1} = P_m' (1-u^2)^2 + 4 m u (1-u^2) P_m - 2 u P_m and P_0 = 1.
/// Coefficients stay below 2^53 through m = 12, so doubles hold them exactly.
inline const std::array<std::vector<double>, kMaxBumpDerivative + 1>& bump_derivative_polynomials() {
  static const auto table = [] {
    std::array<std::vector<std::int64_t>, kMaxBumpDerivative + 1> ints;
    ints[0] = {1};
    for (int m = 0; m < kMaxBumpDerivative; ++m) {
      const auto& p = ints[m];
      std::vector<std::int64_t> next(p.size() + 3, 0);
      for (std::size_t k = 1; k < p.size(); ++k) {
        // P' (1 - 2u^2 + u^4)
        const std::int64_t d = static_cast<std::int64_t>(k) * p[k];
        next[k - 1] += d;
        next[k + 1] -= 2 * d;
        next[k + 3] += d;
      }
      for (std::size_t k = 0; k < p.size(); ++k) {
        // 4m u (1 - u^2) P - 2u P
        next[k + 1] += (4 * m - 2) * p[k];
        next[k + 3] -= 4 * m * p[k];
      }
      while (next.size() > 1 && next.back() == 0) next.pop_back();
      ints[m + 1] = next;
    }
    std::array<std::vector<double>, kMaxBumpDerivative + 1> out;
    for (int m = 0; m <= kMaxBumpDerivative; ++m) out[m].assign(ints[m].begin(), ints[m].end());
    return out;
  }();
  return table;
}

inline double horner(const std::vector<double>& coeffs, double u) {
  long double acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return static_cast<double>(acc);
}

/// j-th derivative of the unit profile in u.
inline double profile_derivative(const TestFunction& f, int j, double u) {
  if (!(std::fabs(u) < 1)) return 0;
  const double one_minus = (1 - u) * (1 + u);
  switch (f.kind) {
    case TestFunctionKind::Bump: {
      if (j > kMaxBumpDerivative)
        fail(ErrorKind::Unsupported, "bump derivatives are tabulated through order 12");
      const double log_scale = -1 / one_minus - 2.0 * j * std::log(one_minus);
      return horner(bump_derivative_polynomials()[j], u) * std::exp(log_scale);
    }
    case TestFunctionKind::CosineTaper: {
      if (j == 0) return 0.5 * (1 + std::cos(std::numbers::pi * u));
      return 0.5 * std::pow(std::numbers::pi, j) * std::cos(std::numbers::pi * u + 0.5 * j * std::numbers::pi);
    }
    case TestFunctionKind::PolynomialBump: {
      // (1 - u^2)^n = sum_k C(n,k) (-1)^k u^(2k); differentiate termwise.
      const int n = f.order;
      double sum = 0;
      double binom = 1;
      for (int k = 0; k <= n; ++k) {
        const int power = 2 * k;
        if (power >= j) {
          double falling = 1;
          for (int r = 0; r < j; ++r) falling *= (power - r);
          sum += ((k % 2) ? -binom : binom) * falling * std::pow(u, power - j);
        }
        binom = binom * (n - k) / (k + 1);
      }
      return sum;
    }
  }
  return 0;
}

inline std::size_t oscillation_panels(const TestFunction& f, double frequency) {
  const double cycles = std::fabs(frequency) * 2 * f.halfwidth / (2 * std::numbers::pi);
  return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2 * cycles)));
}

}  // namespace detail

/// phi(t); exactly 0 for |t - c| >= w.
inline double eval(const TestFunction& f, double t) {
  const double u = (t - f.center) / f.halfwidth;
  if (!(std::fabs(u) < 1)) return 0;
  return f.amplitude * detail::profile_derivative(f, 0, u);
}

/// d^j phi / dt^j, from the closed-form derivative of the profile.
inline double derivative(const TestFunction& f, int j, double t) {
  require(j >= 0, ErrorKind::InvalidInput, "derivative order must be non-negative");
  const double u = (t - f.center) / f.halfwidth;
  if (!(std::fabs(u) < 1)) return 0;
  return f.amplitude * std::pow(f.halfwidth, -j) * detail::profile_derivative(f, j, u);
}

struct TransformValue {
  Complex s;
  Complex value;
  double quad_error_estimate = 0;
};

/// Phi(s) = integral of e^{ts} phi(t) dt over the support.
inline TransformValue transform(const TestFunction& f, Complex s, const quadrature::Options& base = {}) {
  quadrature::Options opts = base;
  opts.initial_panels = std::max(opts.initial_panels, detail::oscillation_panels(f, s.imag()));
  const double reach = std::max(std::fabs(f.support_lo()), std::fabs(f.support_hi()));
  opts.evaluation_noise = std::max(opts.evaluation_noise, std::numeric_limits<double>::epsilon() * std::abs(s) * reach);
  auto integrand = [&](double t) -> Complex { return std::exp(t * s) * eval(f, t); };
  const auto r = quadrature::integrate<Complex>(integrand, f.support_lo(), f.support_hi(), opts);
  return {s, r.value, r.error_estimate};
}

/// Integral of |d^m/dt^m (e^{sigma t} phi(t))| dt, an upper bound B_m with
/// |Phi(sigma + i gamma)| <= B_m / |gamma|^m. The quadrature error estimate is
/// added so the returned number stays an upper bound.
inline double derivative_l1_norm(const TestFunction& f, int m, double sigma) {
  require(m >= 0 && m <= 12, ErrorKind::InvalidInput, "derivative order must be in 0..12");
  require(m <= f.decay_order(), ErrorKind::Unsupported, "test function is not smooth enough for order " + std::to_string(m));
  std::vector<double> binom(m + 1, 1);
  for (int j = 1; j <= m; ++j) binom[j] = binom[j - 1] * (m - j + 1) / j;
  auto integrand = [&](double t) {
    double acc = 0;
    for (int j = 0; j <= m; ++j) acc += binom[j] * std::pow(sigma, m - j) * derivative(f, j, t);
    return std::fabs(acc * std::exp(sigma * t));
  };
  // High-order profile polynomials carry ~1e-9 relative evaluation noise near
  // the support ends; a bound only needs a few digits.
  quadrature::Options opts;
  opts.relative_tolerance = 1e-7;
  opts.initial_panels = 8;
  const auto r = quadrature::integrate<double>(integrand, f.support_lo(), f.support_hi(), opts);
  return r.value + r.error_estimate;
}

/// B_0 .. B_{decay_order} at a fixed real part sigma.
struct DecayBounds {
  double sigma = 0;
  std::vector<double> bounds;

  static DecayBounds compute(const TestFunction& f, double sigma) {
    DecayBounds d;
    d.sigma = sigma;
    for (int m = 0; m <= f.decay_order(); ++m) d.bounds.push_back(derivative_l1_norm(f, m, sigma));
    return d;
  }

  /// min over m of B_m / |gamma|^m.
  double at(double gamma) const {
    double best = bounds.empty() ? INFINITY : bounds[0];
    for (std::size_t m = 1; m < bounds.size(); ++m) best = std::min(best, bounds[m] / std::pow(std::fabs(gamma), static_cast<double>(m)));
    return best;
  }
};

/// Sum of Phi(base + i j period) over all j in Z, truncated at |j| <= levels with
/// the remainder bounded through the decay bounds.
struct TowerSum {
  Complex value;
  double quad_error = 0;
  double tail_bound = 0;
  long levels = 0;
};

inline TowerSum tower_sum(const TestFunction& f, Complex base, double period, double tail_tolerance,
                          const DecayBounds* bounds = nullptr) {
  require(period > 0, ErrorKind::InvalidInput, "tower period must be positive");
  DecayBounds local;
  if (bounds == nullptr || bounds->sigma != base.real()) {
    local = DecayBounds::compute(f, base.real());
    bounds = &local;
  }
  // Shift the base into |Im| <= period/2 so that |Im(base + i j P)| >= (|j| - 1/2) P.
  const double shift = std::round(base.imag() / period);
  base -= Complex(0, shift * period);
  // Two-sided remainder sum_{|j|>J} B_m ((|j|-1/2)P)^{-m} <= 2 B_m P^{-m} (J - 1/2)^{1-m} / (m - 1).
  auto tail = [&](long J) {
    double best = INFINITY;
    for (std::size_t m = 2; m < bounds->bounds.size(); ++m) {
      const double md = static_cast<double>(m);
      best = std::min(best, 2 * bounds->bounds[m] * std::pow(period, -md) * std::pow(J - 0.5, 1 - md) / (md - 1));
    }
    return best;
  };
  long J = 1;
  while (tail(J) > tail_tolerance) {
    require(J < 1'000'000, ErrorKind::NonConvergent, "tower truncation exceeds 10^6 levels");
    J = std::max(J + 1, static_cast<long>(J * 1.25));
  }
  TowerSum out;
  out.levels = J;
  out.tail_bound = tail(J);
  // Symmetric accumulation order: j = 0, then (-1, 1), (-2, 2), ...
  const auto t0 = transform(f, base);
  out.value = t0.value;
  out.quad_error = t0.quad_error_estimate;
  const auto levels = ordered_parallel_map(static_cast<std::size_t>(J), [&](std::size_t i) {
    const double shift_j = static_cast<double>(i + 1) * period;
    const auto lo = transform(f, base - Complex(0, shift_j));
    const auto hi = transform(f, base + Complex(0, shift_j));
    return std::pair<Complex, double>{lo.value + hi.value, lo.quad_error_estimate + hi.quad_error_estimate};
  });
  for (const auto& [v, e] : levels) {
    out.value += v;
    out.quad_error += e;
  }
  return out;
}

/// Same shape with amplitude chosen so that Phi(0) = integral of phi = 1.
inline TestFunction with_unit_mass(TestFunction f) {
  f.amplitude = 1;
  const auto mass = transform(f, Complex(0, 0)).value.real();
  require(mass != 0, ErrorKind::InvalidInput, "test function has zero mass");
  f.amplitude = 1 / mass;
  return f;
}

inline std::string to_string(TestFunctionKind k) {
  switch (k) {
    case TestFunctionKind::Bump: return "bump";
    case TestFunctionKind::CosineTaper: return "cosine-taper";
    case TestFunctionKind::PolynomialBump: return "polynomial-bump";
  }
  return "?";
}

inline TestFunctionKind parse_test_function_kind(const std::string& s) {
  if (s == "bump") return TestFunctionKind::Bump;
  if (s == "cosine-taper" || s == "cosine") return TestFunctionKind::CosineTaper;
  if (s == "polynomial-bump" || s == "poly") return TestFunctionKind::PolynomialBump;
  fail(ErrorKind::InvalidInput, "unknown test function kind '" + s + "'");
}

/// Writes the `[phi]`-style section body: kind, center, halfwidth, amplitude (and order).
inline void write_config(const TestFunction& f, ConfigDocument& doc, const std::string& section = "phi") {
  doc.set(section, "kind", to_string(f.kind));
  doc.set(section, "center", format_decimal(f.center));
  doc.set(section, "halfwidth", format_decimal(f.halfwidth));
  doc.set(section, "amplitude", format_decimal(f.amplitude));
  if (f.kind == TestFunctionKind::PolynomialBump) doc.set(section, "order", std::to_string(f.order));
}

inline TestFunction read_config(const ConfigDocument& doc, const std::string& section = "phi") {
  auto need = [&](const std::string& key) {
    auto v = doc.get(section, key);
    require(v.has_value(), ErrorKind::InvalidInput, "config section [" + section + "] lacks '" + key + "'");
    return *v;
  };
  const auto kind = parse_test_function_kind(need("kind"));
  const double c = parse_double(need("center"), section + ".center");
  const double w = parse_double(need("halfwidth"), section + ".halfwidth");
  const double a = doc.get(section, "amplitude") ? parse_double(*doc.get(section, "amplitude"), section + ".amplitude") : 1.0;
  switch (kind) {
    case TestFunctionKind::Bump: return TestFunction::bump(c, w, a);
    case TestFunctionKind::CosineTaper: return TestFunction::cosine_taper(c, w, a);
    case TestFunctionKind::PolynomialBump:
      return TestFunction::polynomial_bump(static_cast<int>(parse_long(need("order"), section + ".order")), c, w, a);
  }
  fail(ErrorKind::InvalidInput, "unreachable");
}

/// Shorthand `kind:center,halfwidth[,amplitude]`, e.g. `bump:2,1`; polynomial
/// bumps carry their order in the kind, e.g. `poly4:2,1`.
inline TestFunction parse_test_function(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, ErrorKind::InvalidInput, "test function '" + text + "' must look like kind:center,halfwidth[,amplitude]");
  std::string kind = text.substr(0, colon);
  const auto fields = split(text.substr(colon + 1), ',');
  require(fields.size() == 2 || fields.size() == 3, ErrorKind::InvalidInput, "test function '" + text + "' needs center,halfwidth[,amplitude]");
  const double c = parse_double(fields[0], "center");
  const double w = parse_double(fields[1], "halfwidth");
  const double a = fields.size() == 3 ? parse_double(fields[2], "amplitude") : 1.0;
  if (kind.rfind("poly", 0) == 0 && kind.size() > 4 && kind != "polynomial-bump") {
    return TestFunction::polynomial_bump(static_cast<int>(parse_long(kind.substr(4), "polynomial order")), c, w, a);
  }
  switch (parse_test_function_kind(kind)) {
    case TestFunctionKind::Bump: return TestFunction::bump(c, w, a);
    case TestFunctionKind::CosineTaper: return TestFunction::cosine_taper(c, w, a);
    case TestFunctionKind::PolynomialBump: return TestFunction::polynomial_bump(4, c, w, a);
  }
  fail(ErrorKind::InvalidInput, "unreachable");
}

}  // namespace trace_formulary
