#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "trace_formulary/arith.hpp"
#include "trace_formulary/config.hpp"
#include "trace_formulary/error.hpp"
#include "trace_formulary/parallel.hpp"
#include "trace_formulary/special.hpp"

namespace trace_formulary {

struct LValue {
  Complex value;
  double error_bound = 0;
};

namespace detail {

/// sum_{k=1}^{6} B_2k/(2k)! (s)_{2k-1} x^{-s-2k+1}, and the size of the k = 7 term
/// inflated by |s+13|/(Re s+13), the usual Euler-Maclaurin remainder bound.
inline std::pair<Complex, double> em_corrections(Complex s, double x) {
  const Complex x_s = std::exp(-s * std::log(x));  // x^{-s}
  Complex rising = s;                               // (s)_{2k-1}
  Complex xpow = x_s / x;                           // x^{-s-2k+1}
  Complex sum = 0;
  for (int k = 1; k <= 6; ++k) {
    sum += special::kBernoulliOverFactorial[k - 1] * rising * xpow;
    rising *= (s + (2.0 * k - 1)) * (s + 2.0 * k);
    xpow /= x * x;
  }
  const double next = std::abs(special::kBernoulliOverFactorial[6] * rising * xpow);
  const double inflate = std::abs(s + 13.0) / (s.real() + 13.0);
  return {sum, next * inflate};
}

/// Rounding in sum n^-s: each term carries relative error ~ eps (2 + |s| log n).
inline double summation_roundoff(Complex s, double n_max, double magnitude) {
  return std::numeric_limits<double>::epsilon() * (2 + std::abs(s) * std::log(n_max)) * magnitude;
}

inline std::size_t default_terms(Complex s) {
  return static_cast<std::size_t>(std::max(50.0, std::ceil(3 * std::abs(s))));
}

}  // namespace detail

/// Riemann zeta by Euler-Maclaurin with N = terms:
///   sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2 + Bernoulli corrections through B_12.
inline LValue zeta_em(Complex s, std::size_t terms) {
  require(s != Complex(1, 0), ErrorKind::PoleAtOne, "zeta has a pole at s = 1");
  require(s.real() > -1, ErrorKind::InvalidInput, "zeta_em needs Re s > -1");
  require(terms >= 10, ErrorKind::InvalidInput, "zeta_em needs at least 10 terms");
  const double N = static_cast<double>(terms);
  Complex sum = 0;
  double magnitude = 0;
  for (std::size_t n = terms - 1; n >= 1; --n) {
    const Complex term = std::exp(-s * std::log(static_cast<double>(n)));
    sum += term;
    magnitude += std::abs(term);
  }
  const Complex N_s = std::exp(-s * std::log(N));
  sum += N * N_s / (s - 1.0) + 0.5 * N_s;
  const auto [corr, bound] = detail::em_corrections(s, N);
  sum += corr;
  return {sum, bound + detail::summation_roundoff(s, N, magnitude)};
}

inline LValue zeta(Complex s) { return zeta_em(s, detail::default_terms(s)); }

/// L(s, chi_D) for a fundamental discriminant D; D = 1 is zeta. The tail past
/// n = Mq splits by residue class into Hurwitz tails q^-s H(s, M + a/q), each by
/// Euler-Maclaurin. Their x^{1-s}/(s-1) parts cancel across a full period, so
/// (x^{1-s} - 1)/(s-1) is used instead and s = 1 needs no special case.
inline LValue dirichlet_l(Complex s, long D) {
  require(is_fundamental_discriminant(D), ErrorKind::NotFundamental, std::to_string(D) + " is not a fundamental discriminant");
  require(std::labs(D) <= 1000, ErrorKind::InvalidInput, "|D| must be at most 1000");
  if (D == 1) return zeta(s);
  require(s.real() > -1, ErrorKind::InvalidInput, "dirichlet_l needs Re s > -1");
  const long q = std::labs(D);
  const long M = static_cast<long>(std::max(50.0, std::ceil(3 * std::abs(s))));
  std::vector<int> chi(q + 1);
  for (long a = 1; a <= q; ++a) chi[a] = kronecker(D, a);

  Complex direct = 0;
  double magnitude = 0;
  for (long n = M * q; n >= 1; --n) {
    const int c = chi[(n - 1) % q + 1];
    if (!c) continue;
    const Complex term = std::exp(-s * std::log(static_cast<double>(n)));
    direct += static_cast<double>(c) * term;
    magnitude += std::abs(term);
  }
  Complex tail = 0;
  double bound = 0;
  for (long a = 1; a <= q; ++a) {
    if (!chi[a]) continue;
    const double x = static_cast<double>(M) + static_cast<double>(a) / static_cast<double>(q);
    const double lx = std::log(x);
    const Complex main = -lx * special::expm1_over((1.0 - s) * lx);
    const Complex half = 0.5 * std::exp(-s * lx);
    const auto [corr, b] = detail::em_corrections(s, x);
    tail += static_cast<double>(chi[a]) * (main + half + corr);
    bound += b;
  }
  const Complex q_s = std::exp(-s * std::log(static_cast<double>(q)));
  const Complex value = direct + q_s * tail;
  return {value, std::abs(q_s) * bound + detail::summation_roundoff(s, static_cast<double>(M * q), magnitude)};
}

// ---------------------------------------------------------------------------
// Labels

/// One factor of a (Dedekind) zeta function: D = 1 is zeta, otherwise L(s, chi_D).
struct LFactor {
  long D = 1;

  long conductor() const { return std::labs(D); }
  std::string label() const { return D == 1 ? "zeta" : "dirichlet:" + std::to_string(D); }
  LValue at(Complex s) const { return D == 1 ? zeta(s) : dirichlet_l(s, D); }
};

inline LFactor parse_factor(const std::string& text) {
  const std::string t = ConfigDocument::trim(text);
  if (t == "zeta") return {1};
  if (t.rfind("dirichlet:", 0) == 0) {
    const long D = parse_long(t.substr(10), "discriminant");
    require(D != 1 && is_fundamental_discriminant(D), ErrorKind::NotFundamental, t + ": not a fundamental discriminant");
    return {D};
  }
  fail(ErrorKind::InvalidInput, "unknown L-function label '" + t + "' (use zeta or dirichlet:D)");
}

/// "zeta", "dirichlet:-4", or a product "zeta*dirichlet:-4".
inline std::vector<LFactor> parse_label(const std::string& label) {
  std::vector<LFactor> out;
  for (const auto& part : split(label, '*')) out.push_back(parse_factor(part));
  return out;
}

inline std::string make_label(const std::vector<LFactor>& factors) {
  std::string out;
  for (const auto& f : factors) out += (out.empty() ? "" : "*") + f.label();
  return out;
}

/// theta with Z(t) = e^{i theta(t)} L(1/2 + it) real:
///   Im log Gamma((1/2 + a + it)/2) + (t/2) log(q/pi),  a = 1 for odd characters.
inline double hardy_theta(const LFactor& f, double t) {
  const double a = f.D < 0 ? 1 : 0;
  const double q = static_cast<double>(f.conductor());
  return special::log_gamma(Complex((0.5 + a) / 2, t / 2)).imag() + 0.5 * t * std::log(q / std::numbers::pi);
}

inline double hardy_z(const LFactor& f, double t) {
  const Complex v = f.at(Complex(0.5, t)).value;
  return (std::exp(Complex(0, hardy_theta(f, t))) * v).real();
}

/// Riemann-von Mangoldt main term (T/2pi) log(qT/2pi e) + 7/8 for zeta,
/// and (T/2pi) log(qT/2pi e) - chi(-1)/8 for L(s, chi_D).
inline double zero_count_main_term(const LFactor& f, double T) {
  if (T <= 0) return 0;
  const double q = static_cast<double>(f.conductor());
  const double base = T / (2 * std::numbers::pi) * std::log(q * T / (2 * std::numbers::pi * std::numbers::e));
  if (f.D == 1) return base + 7.0 / 8;
  return base - (f.D < 0 ? -1.0 : 1.0) / 8;
}

// ---------------------------------------------------------------------------
// Zero lists

struct ZeroList {
  std::string label;
  std::vector<LFactor> factors;
  std::vector<double> ordinates;
  std::vector<std::string> ordinate_text;  // decimal text as read or written
  double height = 0;
  std::string height_text;
  std::string source;
  bool validated = false;

  std::size_t size() const { return ordinates.size(); }
};

namespace detail {

inline void check_zero_list(const ZeroList& z) {
  require(z.height > 0 && std::isfinite(z.height), ErrorKind::InvalidInput, "zero list height must be positive");
  for (std::size_t i = 0; i < z.ordinates.size(); ++i) {
    const double g = z.ordinates[i];
    require(g > 0 && g <= z.height, ErrorKind::InvalidInput, "ordinate " + z.ordinate_text[i] + " outside (0, height]");
    require(i == 0 || g > z.ordinates[i - 1], ErrorKind::InvalidInput, "ordinates must be strictly increasing at " + z.ordinate_text[i]);
  }
}

}  // namespace detail

inline ZeroList make_zero_list(const std::string& label, std::vector<double> ordinates, double height, std::string source) {
  ZeroList z;
  z.label = label;
  z.factors = parse_label(label);
  z.label = make_label(z.factors);
  z.ordinates = std::move(ordinates);
  for (double g : z.ordinates) z.ordinate_text.push_back(format_decimal(g));
  z.height = height;
  z.height_text = format_decimal(height);
  z.source = std::move(source);
  detail::check_zero_list(z);
  return z;
}

/// Plain text: header "label <name> height <T>", then one ordinate per line; '#' starts a comment line.
inline ZeroList parse_zero_text(const std::string& text, const std::string& source) {
  ZeroList z;
  z.source = source;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = ConfigDocument::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!have_header) {
      std::istringstream h(t);
      std::string kw1, name, kw2, T;
      h >> kw1 >> name >> kw2 >> T;
      require(kw1 == "label" && kw2 == "height" && !T.empty(), ErrorKind::InvalidInput,
              source + ":" + std::to_string(lineno) + ": expected header 'label <name> height <T>'");
      z.factors = parse_label(name);
      z.label = make_label(z.factors);
      z.height_text = T;
      z.height = parse_double(T, source + " height");
      have_header = true;
      continue;
    }
    z.ordinate_text.push_back(t);
    z.ordinates.push_back(parse_double(t, source + ":" + std::to_string(lineno)));
  }
  require(have_header, ErrorKind::InvalidInput, source + ": missing 'label <name> height <T>' header");
  detail::check_zero_list(z);
  return z;
}

inline ZeroList read_zero_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::InvalidInput, "cannot open zero file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_zero_text(ss.str(), path);
}

inline std::string to_text(const ZeroList& z) {
  std::string out = "label " + z.label + " height " + z.height_text + "\n";
  out += "# " + std::to_string(z.size()) + " ordinates, source " + z.source + "\n";
  for (const auto& t : z.ordinate_text) out += t + "\n";
  return out;
}

/// Union of zero lists for a product of L-functions, cut at the smaller height.
inline ZeroList merge(const ZeroList& a, const ZeroList& b) {
  ZeroList z;
  z.factors = a.factors;
  z.factors.insert(z.factors.end(), b.factors.begin(), b.factors.end());
  z.label = make_label(z.factors);
  const bool a_lower = a.height <= b.height;
  z.height = a_lower ? a.height : b.height;
  z.height_text = a_lower ? a.height_text : b.height_text;
  z.source = a.source + "+" + b.source;
  z.validated = a.validated && b.validated;
  std::size_t i = 0, j = 0;
  auto take = [&](const ZeroList& src, std::size_t k) {
    if (src.ordinates[k] <= z.height) {
      z.ordinates.push_back(src.ordinates[k]);
      z.ordinate_text.push_back(src.ordinate_text[k]);
    }
  };
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a.ordinates[i] < b.ordinates[j])) take(a, i++);
    else take(b, j++);
  }
  detail::check_zero_list(z);
  return z;
}

// ---------------------------------------------------------------------------
// Scanning and validation

namespace detail {

inline double bisect_zero(const LFactor& f, double lo, double hi, double zlo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double zm = hardy_z(f, mid);
    if (zm == 0) return mid;
    if ((zm < 0) == (zlo < 0)) {
      lo = mid;
      zlo = zm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> scan_factor(const LFactor& f, double T, double step) {
  const std::size_t cells = static_cast<std::size_t>(std::ceil(T / step));
  const double h = T / static_cast<double>(cells);
  const auto grid = ordered_parallel_map(cells + 1, [&](std::size_t i) { return hardy_z(f, h * static_cast<double>(i)); });
  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i < cells; ++i)
    if ((grid[i] < 0) != (grid[i + 1] < 0)) changes.push_back(i);
  constexpr int kProbe = 8;
  return ordered_parallel_map(changes.size(), [&](std::size_t c) {
    const std::size_t i = changes[c];
    const double lo = h * static_cast<double>(i), hi = h * static_cast<double>(i + 1);
    // Probe the cell for further sign changes hidden inside it.
    int flips = 0;
    double prev = grid[i];
    for (int k = 1; k <= kProbe; ++k) {
      const double v = k == kProbe ? grid[i + 1] : hardy_z(f, lo + (hi - lo) * k / kProbe);
      if ((v < 0) != (prev < 0)) ++flips;
      prev = v;
    }
    if (flips > 1)
      fail(ErrorKind::StepTooCoarse, f.label() + ": " + std::to_string(flips) + " sign changes in [" + format_decimal(lo) + ", " +
                                          format_decimal(hi) + "]; reduce the scan step");
    return bisect_zero(f, lo, hi, grid[i], 1e-9);
  });
}

}  // namespace detail

/// Sign changes of Hardy's Z on a grid of spacing <= step over (0, T], each
/// refined by bisection to width 1e-9. Product labels scan every factor.
inline ZeroList scan_zeros(const std::string& label, double T, double step) {
  require(T > 0 && T <= 300, ErrorKind::InvalidInput, "scan height must be in (0, 300]");
  require(step > 0 && step < T, ErrorKind::InvalidInput, "scan step must be positive and below T");
  const auto factors = parse_label(label);
  std::vector<double> all;
  for (const auto& f : factors) {
    const auto z = detail::scan_factor(f, T, step);
    all.insert(all.end(), z.begin(), z.end());
  }
  std::sort(all.begin(), all.end());
  return make_zero_list(label, std::move(all), T, "scanned");
}

struct ZeroValidationReport {
  bool pass = false;
  std::size_t count = 0;
  double expected_count = 0;  // Riemann-von Mangoldt main term summed over factors
  bool count_ok = false;      // |count - expected| <= 2
  double max_magnitude = 0;
  std::string warning;
  ZeroList zeros;  // copy with the validated flag set
};

/// |L(1/2 + i gamma)| < tol for every ordinate, L the product over the label's
/// factors. Throws ValidationFailed at the first offending ordinate. A count
/// that strays from the main term by more than 2 is reported as a warning.
inline ZeroValidationReport validate_zeros(const ZeroList& z, double tol) {
  require(tol > 0, ErrorKind::InvalidInput, "validation tolerance must be positive");
  const auto mags = ordered_parallel_map(z.size(), [&](std::size_t i) {
    double m = 1;
    for (const auto& f : z.factors) m *= std::abs(f.at(Complex(0.5, z.ordinates[i])).value);
    return m;
  });
  ZeroValidationReport r;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(mags[i] < tol))
      throw ValidationFailed(z.ordinates[i], mags[i],
                             z.label + ": |L(1/2 + i*" + z.ordinate_text[i] + ")| = " + format_decimal(mags[i]) + " is not below " +
                                 format_decimal(tol));
    r.max_magnitude = std::max(r.max_magnitude, mags[i]);
  }
  r.count = z.size();
  for (const auto& f : z.factors) r.expected_count += zero_count_main_term(f, z.height);
  r.count_ok = std::fabs(static_cast<double>(r.count) - r.expected_count) <= 2;
  if (!r.count_ok)
    r.warning = "count " + std::to_string(r.count) + " differs from the main term " + format_decimal(r.expected_count) + " by more than 2";
  r.pass = true;
  r.zeros = z;
  r.zeros.validated = true;
  return r;
}

// ---------------------------------------------------------------------------
// Elliptic zero towers

/// Zeros of 1 - a_p p^-s + p^{1-2s}: s = 1/2 + i(+-theta + 2 pi j)/log p with
/// alpha = sqrt(p) e^{i theta} a Frobenius eigenvalue.
struct EllipticZeroTower {
  std::uint64_t p = 0;
  long a_p = 0;
  double theta = 0;
  std::array<double, 2> base_ordinates{};
  double period = 0;
  double log_p = 0;
};

inline EllipticZeroTower elliptic_tower(const EllipticCurveData& E) {
  const long long a = E.a_p;
  require(a * a < 4 * static_cast<long long>(E.p), ErrorKind::SupersingularOrReal,
          "a_p^2 >= 4p: Frobenius eigenvalues are real");
  EllipticZeroTower t;
  t.p = E.p;
  t.a_p = E.a_p;
  t.log_p = std::log(static_cast<double>(E.p));
  t.theta = std::acos(static_cast<double>(a) / (2 * std::sqrt(static_cast<double>(E.p))));
  t.base_ordinates = {t.theta / t.log_p, -t.theta / t.log_p};
  t.period = 2 * std::numbers::pi / t.log_p;
  return t;
}

/// Tower from raw (p, a_p) data, without a curve.
inline EllipticZeroTower elliptic_tower(std::uint64_t p, long a_p) {
  EllipticCurveData e;
  e.p = p;
  e.a_p = a_p;
  return elliptic_tower(e);
}

}  // namespace trace_formulary
