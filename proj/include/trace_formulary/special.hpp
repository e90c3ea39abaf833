#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "trace_formulary/error.hpp"

namespace trace_formulary {

using Complex = std::complex<double>;

}  // namespace trace_formulary

namespace trace_formulary::special {

/// B_2, B_4, ..., B_14.
inline constexpr std::array<double, 7> kBernoulliEven = {
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6,
};

/// B_{2k} / (2k)! for k = 1..7.
inline constexpr std::array<double, 7> kBernoulliOverFactorial = [] {
  std::array<double, 7> out{};
  double fact = 1;
  for (int k = 1; k <= 7; ++k) {
    fact *= (2.0 * k - 1) * (2.0 * k);
    out[k - 1] = kBernoulliEven[k - 1] / fact;
  }
  return out;
}();

/// log Gamma(z) on Re z > 0, continuous in z (not the principal log of Gamma).
/// Stirling series through z^-15 after shifting |z| >= 15 with the recurrence.
inline Complex log_gamma(Complex z) {
  require(z.real() > 0, ErrorKind::InvalidInput, "log_gamma is implemented for Re z > 0");
  Complex shift = 0;
  while (std::abs(z) < 15) {
    shift += std::log(z);
    z += 1.0;
  }
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  Complex series = 0;
  Complex pow = inv;
  for (int k = 1; k <= 7; ++k) {
    series += kBernoulliEven[k - 1] / ((2.0 * k) * (2.0 * k - 1)) * pow;
    pow *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * std::numbers::pi) + series - shift;
}

/// (e^z - 1) / z, accurate near z = 0.
inline Complex expm1_over(Complex z) {
  if (std::abs(z) > 0.25) return (std::exp(z) - 1.0) / z;
  Complex term = 1, sum = 1;
  for (int n = 2; n < 30; ++n) {
    term *= z / static_cast<double>(n);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace trace_formulary::special
