#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "trace_formulary/arith.hpp"
#include "trace_formulary/error.hpp"
#include "trace_formulary/lfunc.hpp"
#include "trace_formulary/parallel.hpp"
#include "trace_formulary/testfn.hpp"

namespace trace_formulary {

struct Component {
  std::string label;
  double value = 0;
};

struct BudgetItem {
  std::string label;
  double value = 0;
};

/// One prime-power hit log Np * w * phi(k log Np), w = 1 (k >= 1) or Np^k (k <= -1).
struct PrimeTerm {
  std::uint64_t norm = 0;
  std::uint64_t rational_prime = 0;
  long k = 0;
  double log_norm = 0;
  double weight = 1;
  double phi = 0;
  double contribution = 0;
  std::string splitting;
};

/// One side of an explicit formula: value = sum of components, error_budget = sum of budget items.
struct SideReport {
  double value = 0;
  std::vector<Component> components;
  std::vector<BudgetItem> budget;
  double error_budget = 0;

  // zero side
  std::size_t zeros_used = 0;
  int tail_order = 0;
  double imaginary_residual = 0;
  // prime side
  std::vector<PrimeTerm> terms;
  double enumeration_bound = 0;

  void add(const std::string& label, double v) { components.push_back({label, v}); }
  void charge(const std::string& label, double e) { budget.push_back({label, e}); }
  void finalize() {
    value = 0;
    for (const auto& c : components) value += c.value;
    error_budget = 0;
    for (const auto& b : budget) error_budget += b.value;
  }
};

namespace detail {

inline void require_support_off_zero(const TestFunction& phi) {
  require(!phi.support_contains_zero(), ErrorKind::SupportContainsZero,
          "test function support [" + format_decimal(phi.support_lo()) + ", " + format_decimal(phi.support_hi()) +
              "] contains 0; only supports inside (0, inf) or (-inf, 0) are handled");
}

/// integral_{T0}^inf (1/2pi) log(q g / 2pi) g^-m dg for m >= 2 and q T0 >= 2pi.
inline double density_tail_integral(double T0, double q, int m) {
  const double md = m;
  return std::pow(T0, 1 - md) / (2 * std::numbers::pi * (md - 1)) * (std::log(q * T0 / (2 * std::numbers::pi)) + 1 / (md - 1));
}

}  // namespace detail

inline constexpr double kZeroDensitySlack = 1.2;

/// Bound on sum_{gamma > T} |Phi(1/2 + i gamma)| + |Phi(1/2 - i gamma)| through
/// the zero density (1/2pi) log(q gamma / 2pi) of each factor, inflated by the
/// slack factor. Returns (bound, m) with m minimizing the bound.
inline std::pair<double, int> zero_tail_bound(const DecayBounds& bounds, const std::vector<LFactor>& factors, double T) {
  double best = INFINITY;
  int best_m = 0;
  for (std::size_t m = 2; m < bounds.bounds.size(); ++m) {
    double density = 0;
    for (const auto& f : factors) {
      const double q = static_cast<double>(f.conductor());
      const double T0 = std::max(T, 2 * std::numbers::pi / q);
      density += detail::density_tail_integral(T0, q, static_cast<int>(m));
    }
    const double b = 2 * kZeroDensitySlack * bounds.bounds[m] * density;
    if (b < best) {
      best = b;
      best_m = static_cast<int>(m);
    }
  }
  return {best, best_m};
}

/// Phi(0) - sum_{gamma <= T} [Phi(1/2 + i gamma) + Phi(1/2 - i gamma)] + Phi(1).
inline SideReport zero_side(const TestFunction& phi, const ZeroList& z) {
  require(z.validated, ErrorKind::UnvalidatedZeros, "zero list '" + z.label + "' has not been validated");
  SideReport r;
  const auto phi0 = transform(phi, Complex(0, 0));
  const auto phi1 = transform(phi, Complex(1, 0));
  struct Pair {
    Complex sum;
    double error;
    double magnitude;
  };
  const auto pairs = ordered_parallel_map(z.size(), [&](std::size_t i) {
    const auto up = transform(phi, Complex(0.5, z.ordinates[i]));
    const auto down = transform(phi, Complex(0.5, -z.ordinates[i]));
    return Pair{up.value + down.value, up.quad_error_estimate + down.quad_error_estimate, std::abs(up.value) + std::abs(down.value)};
  });
  Complex zero_sum = 0;
  double quad = phi0.quad_error_estimate + phi1.quad_error_estimate;
  double magnitude = std::abs(phi0.value) + std::abs(phi1.value);
  for (const auto& p : pairs) {
    zero_sum += p.sum;
    quad += p.error;
    magnitude += p.magnitude;
  }
  r.zeros_used = z.size();
  r.imaginary_residual = std::fabs(zero_sum.imag());
  r.add("Phi(0)", phi0.value.real());
  r.add("Phi(1)", phi1.value.real());
  r.add("-zero_sum", -zero_sum.real());

  const auto bounds = DecayBounds::compute(phi, 0.5);
  const auto [tail, m] = zero_tail_bound(bounds, z.factors, z.height);
  r.tail_order = m;
  r.charge("zero_tail", tail);
  r.charge("quadrature", quad);
  r.charge("rounding", 4 * std::numeric_limits<double>::epsilon() * magnitude * static_cast<double>(z.size() + 2));
  r.finalize();
  return r;
}

struct WInfinity {
  double value = 0;
  double error = 0;
};

/// Archimedean term: integral phi(t) / (1 - e^{kappa t}) for support in (0, inf),
/// integral phi(t) e^t / (1 - e^{kappa |t|}) for support in (-inf, 0).
inline WInfinity w_infinity(const TestFunction& phi, int kappa) {
  require(kappa == -1 || kappa == -2, ErrorKind::InvalidInput, "kappa must be -1 (complex place) or -2 (real place)");
  detail::require_support_off_zero(phi);
  const double k = kappa;
  const bool positive = phi.support_positive();
  auto integrand = [&](double t) {
    const double denom = -std::expm1(k * std::fabs(t));  // 1 - e^{kappa |t|}
    return positive ? eval(phi, t) / denom : eval(phi, t) * std::exp(t) / denom;
  };
  quadrature::Options opts;
  opts.initial_panels = 8;
  const auto r = quadrature::integrate<double>(integrand, phi.support_lo(), phi.support_hi(), opts);
  return {r.value, r.error_estimate};
}

namespace detail {

/// Hits k log Np strictly inside the support, k >= 1 or k <= -1 by support sign.
inline void collect_prime_terms(const TestFunction& phi, std::uint64_t norm, std::uint64_t p, const std::string& splitting,
                                std::vector<PrimeTerm>& out) {
  const double l = std::log(static_cast<double>(norm));
  const long k_lo = static_cast<long>(std::floor(phi.support_lo() / l));
  const long k_hi = static_cast<long>(std::ceil(phi.support_hi() / l));
  for (long k = k_lo; k <= k_hi; ++k) {
    if (k == 0) continue;
    const double t = static_cast<double>(k) * l;
    if (!(t > phi.support_lo() && t < phi.support_hi())) continue;
    PrimeTerm term;
    term.norm = norm;
    term.rational_prime = p;
    term.k = k;
    term.log_norm = l;
    term.weight = k > 0 ? 1.0 : std::pow(static_cast<double>(norm), static_cast<double>(k));
    term.phi = eval(phi, t);
    term.contribution = l * term.weight * term.phi;
    term.splitting = splitting;
    out.push_back(term);
  }
}

inline SideReport finish_prime_side(const TestFunction& phi, const NumberFieldDesc& K, std::vector<PrimeTerm> terms, double X) {
  std::stable_sort(terms.begin(), terms.end(), [](const PrimeTerm& a, const PrimeTerm& b) {
    return std::tie(a.norm, a.k, a.rational_prime) < std::tie(b.norm, b.k, b.rational_prime);
  });
  SideReport r;
  r.enumeration_bound = X;
  double finite = 0, magnitude = 0;
  for (const auto& t : terms) {
    finite += t.contribution;
    magnitude += std::fabs(t.contribution);
  }
  r.add("finite_places", finite);
  double quad = 0;
  if (K.r1() > 0) {
    const auto w = w_infinity(phi, -2);
    for (int i = 0; i < K.r1(); ++i) r.add("W_real", w.value);
    quad += K.r1() * w.error;
    magnitude += K.r1() * std::fabs(w.value);
  }
  if (K.r2() > 0) {
    const auto w = w_infinity(phi, -1);
    for (int i = 0; i < K.r2(); ++i) r.add("W_complex", w.value);
    quad += K.r2() * w.error;
    magnitude += K.r2() * std::fabs(w.value);
  }
  r.charge("quadrature", quad);
  r.charge("rounding", 4 * std::numeric_limits<double>::epsilon() * magnitude * static_cast<double>(terms.size() + 2));
  r.terms = std::move(terms);
  r.finalize();
  return r;
}

inline double enumeration_bound(const TestFunction& phi) {
  return std::exp(std::max(std::fabs(phi.support_lo()), std::fabs(phi.support_hi())));
}

/// x^e mod f over F_p for monic quadratic f = x^2 + c1 x + c0, as (a, b) meaning a x + b.
inline std::pair<std::uint64_t, std::uint64_t> x_power_mod(std::uint64_t e, std::uint64_t c1, std::uint64_t c0, std::uint64_t p) {
  auto mul = [&](std::pair<std::uint64_t, std::uint64_t> u, std::pair<std::uint64_t, std::uint64_t> v) {
    // (a x + b)(c x + d) = ac x^2 + (ad + bc) x + bd, x^2 = -c1 x - c0
    const std::uint64_t ac = u.first * v.first % p;
    const std::uint64_t x1 = (u.first * v.second + u.second * v.first) % p;
    const std::uint64_t x0 = u.second * v.second % p;
    return std::pair<std::uint64_t, std::uint64_t>{(x1 + (p - c1) * ac) % p, (x0 + (p - c0) * ac) % p};
  };
  std::pair<std::uint64_t, std::uint64_t> result{0, 1 % p}, base{1 % p, 0};
  while (e) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

/// Factorization type of p in Q(sqrt D) from the minimal polynomial of the ring
/// generator modulo p (Dedekind-Kummer): x^2 - x + (1-D)/4 if D = 1 mod 4, else x^2 - D/4.
inline Splitting dedekind_kummer(long D, std::uint64_t p) {
  const long P = static_cast<long>(p);
  auto mod = [&](long v) { return static_cast<std::uint64_t>(((v % P) + P) % P); };
  const bool one_mod_four = ((D % 4) + 4) % 4 == 1;
  const std::uint64_t c1 = one_mod_four ? mod(-1) : 0;
  const std::uint64_t c0 = one_mod_four ? mod((1 - D) / 4) : mod(-D / 4);
  // Repeated root iff f and f' = 2x + c1 share a root.
  bool repeated = false;
  if (p == 2) {
    repeated = c1 == 0;  // f' = c1 constant; f' = 0 shares every root
  } else {
    // root of f': x = -c1/2
    const std::uint64_t inv2 = (p + 1) / 2;
    const std::uint64_t r = (p - c1) % p * inv2 % p;
    repeated = (r * r + c1 * r + c0) % p == 0;
  }
  if (repeated) return Splitting::Ramified;
  // Two distinct roots iff f divides x^p - x.
  const auto [a, b] = x_power_mod(p, c1, c0, p);
  return (a == 1 % p && b == 0) ? Splitting::Split : Splitting::Inert;
}

}  // namespace detail

/// Sum over finite places of log Np [sum_{k>=1} phi(k log Np) + sum_{k<=-1} Np^k phi(k log Np)]
/// plus the archimedean W terms, enumerating places from the Kronecker symbol.
/// The -log|d_K| delta_0 term pairs with phi(0) = 0 and is omitted.
inline SideReport prime_side(const TestFunction& phi, const NumberFieldDesc& K) {
  detail::require_support_off_zero(phi);
  const double X = detail::enumeration_bound(phi);
  std::vector<PrimeTerm> terms;
  for (const auto& place : prime_places_up_to(K, X)) {
    if (place.archimedean()) continue;
    detail::collect_prime_terms(phi, place.norm, place.rational_prime, to_string(place.splitting), terms);
  }
  return detail::finish_prime_side(phi, K, std::move(terms), X);
}

/// Same sum, enumerating rational primes and reading the splitting off the
/// minimal polynomial mod p. Must agree with prime_side exactly.
inline SideReport prime_side_by_rational_primes(const TestFunction& phi, const NumberFieldDesc& K) {
  detail::require_support_off_zero(phi);
  const double X = detail::enumeration_bound(phi);
  const auto limit = static_cast<std::uint64_t>(std::floor(X));
  std::vector<PrimeTerm> terms;
  for (std::uint64_t p : primes_up_to(limit)) {
    if (K.kind == NumberFieldDesc::Kind::Rationals) {
      detail::collect_prime_terms(phi, p, p, to_string(Splitting::Unramified), terms);
      continue;
    }
    const Splitting s = detail::dedekind_kummer(K.D, p);
    switch (s) {
      case Splitting::Split:
        detail::collect_prime_terms(phi, p, p, to_string(s), terms);
        detail::collect_prime_terms(phi, p, p, to_string(s), terms);
        break;
      case Splitting::Inert:
        if (p * p <= limit) detail::collect_prime_terms(phi, p * p, p, to_string(s), terms);
        break;
      default: detail::collect_prime_terms(phi, p, p, to_string(s), terms);
    }
  }
  return detail::finish_prime_side(phi, K, std::move(terms), X);
}

struct ExplicitReport {
  std::string formula;
  SideReport zero;
  SideReport prime;
  double residual = 0;
  double budget = 0;          // zero + prime budgets + relative floor
  double relative_floor = 0;  // 1e-8 |Phi(0)|
  double phi0 = 0;
  bool pass = false;
};

inline constexpr double kRelativeFloor = 1e-8;

/// Both sides of the explicit formula for zeta_K; z lists the zeros of every factor of zeta_K.
inline ExplicitReport verify_explicit(const TestFunction& phi, const NumberFieldDesc& K, const ZeroList& z) {
  detail::require_support_off_zero(phi);
  auto expected = K.zeta_factors();
  std::vector<std::string> have;
  for (const auto& f : z.factors) have.push_back(f.label());
  std::sort(expected.begin(), expected.end());
  std::sort(have.begin(), have.end());
  require(expected == have, ErrorKind::InvalidInput,
          "zero list '" + z.label + "' does not match the factors of the Dedekind zeta function of " + K.label());
  ExplicitReport r;
  r.formula = "explicit:" + K.label();
  r.zero = zero_side(phi, z);
  r.prime = prime_side(phi, K);
  r.phi0 = r.zero.components[0].value;
  r.residual = std::fabs(r.zero.value - r.prime.value);
  r.relative_floor = kRelativeFloor * std::fabs(r.phi0);
  r.budget = r.zero.error_budget + r.prime.error_budget + r.relative_floor;
  r.pass = r.residual <= r.budget;
  return r;
}

inline constexpr double kTowerTolerance = 1e-10;

/// log p sum_{n != 0} w_n phi(n log p) with w_n = N_n for n > 0 and
/// N_|n| / p^|n| for n < 0, N_n = p^n + 1 - t_n from the exact trace recurrence.
inline SideReport elliptic_prime_side(const TestFunction& phi, const EllipticCurveData& E) {
  detail::require_support_off_zero(phi);
  const double l = std::log(static_cast<double>(E.p));
  SideReport ps;
  std::vector<PrimeTerm> terms;
  detail::collect_prime_terms(phi, E.p, E.p, "frobenius", terms);
  double magnitude = 0;
  std::size_t kmax = 1;
  for (const auto& t : terms) kmax = std::max(kmax, static_cast<std::size_t>(std::labs(t.k)));
  const auto traces = E.trace_sequence(kmax);
  for (auto& t : terms) {
    const std::size_t n = static_cast<std::size_t>(std::labs(t.k));
    const exact::BigInt pn = boost::multiprecision::pow(exact::BigInt(E.p), static_cast<unsigned>(n));
    const exact::BigInt N = pn + 1 - traces[n];
    t.weight = t.k > 0 ? static_cast<double>(N) : static_cast<double>(exact::Rational(N, pn));
    t.contribution = l * t.weight * t.phi;
    magnitude += std::fabs(t.contribution);
  }
  double sum = 0;
  for (const auto& t : terms) sum += t.contribution;
  ps.add("orbit_sum", sum);
  ps.charge("rounding", 4 * std::numeric_limits<double>::epsilon() * magnitude * static_cast<double>(terms.size() + 1));
  ps.terms = std::move(terms);
  ps.enumeration_bound = detail::enumeration_bound(phi);
  ps.finalize();
  return ps;
}

/// Explicit formula for zeta_E(s) = (1 - a p^-s + p^{1-2s}) / ((1 - p^-s)(1 - p^{1-s})).
/// Zero side: the pole towers at 2 pi i j / log p and 1 + 2 pi i j / log p minus
/// the zero towers at 1/2 + i(+-theta + 2 pi j)/log p, each truncated by the decay
/// bounds. Prime side: log p sum_{n != 0} w_n phi(n log p) with w_n = N_n for
/// n > 0 and N_|n| / p^|n| for n < 0, N_n = p^n + 1 - t_n.
inline ExplicitReport verify_elliptic_explicit(const TestFunction& phi, const EllipticCurveData& E) {
  detail::require_support_off_zero(phi);
  const auto tower = elliptic_tower(E);
  ExplicitReport r;
  r.formula = "elliptic:" + E.label();

  SideReport& zs = r.zero;
  const double each = kTowerTolerance / 4;
  const auto b0 = DecayBounds::compute(phi, 0), b1 = DecayBounds::compute(phi, 1), bh = DecayBounds::compute(phi, 0.5);
  const auto poles0 = tower_sum(phi, Complex(0, 0), tower.period, each, &b0);
  const auto poles1 = tower_sum(phi, Complex(1, 0), tower.period, each, &b1);
  const auto zeros_up = tower_sum(phi, Complex(0.5, tower.base_ordinates[0]), tower.period, each, &bh);
  const auto zeros_down = tower_sum(phi, Complex(0.5, tower.base_ordinates[1]), tower.period, each, &bh);
  zs.add("pole_tower(0)", poles0.value.real());
  zs.add("pole_tower(1)", poles1.value.real());
  zs.add("-zero_tower(+theta)", -zeros_up.value.real());
  zs.add("-zero_tower(-theta)", -zeros_down.value.real());
  zs.imaginary_residual = std::fabs((poles0.value + poles1.value - zeros_up.value - zeros_down.value).imag());
  zs.zeros_used = static_cast<std::size_t>(2 * (2 * zeros_up.levels + 1));
  zs.charge("tower_tails", poles0.tail_bound + poles1.tail_bound + zeros_up.tail_bound + zeros_down.tail_bound);
  zs.charge("quadrature", poles0.quad_error + poles1.quad_error + zeros_up.quad_error + zeros_down.quad_error);
  zs.finalize();

  r.prime = elliptic_prime_side(phi, E);
  const SideReport& ps = r.prime;

  r.phi0 = transform(phi, Complex(0, 0)).value.real();
  r.residual = std::fabs(zs.value - ps.value);
  r.relative_floor = 0;
  r.budget = zs.error_budget + ps.error_budget;
  r.pass = r.residual <= r.budget;
  return r;
}

/// Per-term CSV of a prime side: norm, rational_prime, k, log_norm, weight, phi, contribution, splitting.
inline std::string prime_terms_csv(const SideReport& side) {
  std::string out = "norm,rational_prime,k,log_norm,weight,phi,contribution,splitting\n";
  for (const auto& t : side.terms)
    out += std::to_string(t.norm) + "," + std::to_string(t.rational_prime) + "," + std::to_string(t.k) + "," + format_decimal(t.log_norm) +
           "," + format_decimal(t.weight) + "," + format_decimal(t.phi) + "," + format_decimal(t.contribution) + "," + t.splitting + "\n";
  return out;
}

}  // namespace trace_formulary
