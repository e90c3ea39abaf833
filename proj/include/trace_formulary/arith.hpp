#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "trace_formulary/config.hpp"
#include "trace_formulary/error.hpp"
#include "trace_formulary/exact.hpp"
#include "trace_formulary/parallel.hpp"

namespace trace_formulary {

// ---------------------------------------------------------------------------
// Rational primes and quadratic characters

/// Sieve of Eratosthenes; primes p <= limit in increasing order.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline bool is_squarefree(long n) {
  n = std::labs(n);
  for (long d = 2; d * d <= n; ++d)
    if (n % (d * d) == 0) return false;
  return true;
}

/// D = 1, or D = 1 mod 4 squarefree, or D = 4m with m = 2, 3 mod 4 squarefree.
inline bool is_fundamental_discriminant(long D) {
  if (D == 1) return true;
  if (D == 0) return false;
  const long r = ((D % 4) + 4) % 4;
  if (r == 1) return is_squarefree(D);
  if (r != 0) return false;
  const long m = D / 4;
  const long rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && is_squarefree(m);
}

/// Jacobi symbol (a/n) for odd n >= 1.
inline int jacobi(long a, long n) {
  require(n > 0 && n % 2 == 1, ErrorKind::InvalidInput, "Jacobi symbol needs an odd positive modulus");
  a %= n;
  if (a < 0) a += n;
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const long r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

/// Kronecker symbol (D/n) for any integer n; chi_D(-1) = sign(D).
inline int kronecker(long D, long n) {
  if (n == 0) return std::labs(D) == 1 ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (D < 0) result = -result;
  }
  while (n % 2 == 0) {
    n /= 2;
    if (D % 2 == 0) return 0;
    const long r = ((D % 8) + 8) % 8;
    if (r == 3 || r == 5) result = -result;
  }
  return result * jacobi(D, n);
}

// ---------------------------------------------------------------------------
// Number fields

struct NumberFieldDesc {
  enum class Kind { Rationals, Quadratic };
  Kind kind = Kind::Rationals;
  long D = 1;

  static NumberFieldDesc rationals() { return {}; }

  static NumberFieldDesc quadratic(long D) {
    require(D != 1 && is_fundamental_discriminant(D), ErrorKind::NotFundamental,
            std::to_string(D) + " is not a fundamental discriminant of a quadratic field");
    NumberFieldDesc k;
    k.kind = Kind::Quadratic;
    k.D = D;
    return k;
  }

  long discriminant() const { return kind == Kind::Rationals ? 1 : D; }
  int r1() const { return kind == Kind::Rationals ? 1 : (D > 0 ? 2 : 0); }
  int r2() const { return kind == Kind::Quadratic && D < 0 ? 1 : 0; }
  int degree() const { return kind == Kind::Rationals ? 1 : 2; }

  /// Coefficient of the delta_0 discriminant term. It pairs with phi(0), which
  /// vanishes for every admissible test function, so it is carried as metadata.
  double log_abs_discriminant() const { return std::log(static_cast<double>(std::labs(discriminant()))); }

  std::string label() const { return kind == Kind::Rationals ? "Q" : "Q(sqrt(" + std::to_string(D) + "))"; }

  /// Labels of the L-functions whose product is zeta_K.
  std::vector<std::string> zeta_factors() const {
    if (kind == Kind::Rationals) return {"zeta"};
    return {"zeta", "dirichlet:" + std::to_string(D)};
  }
};

/// Accepts Q, Q(i), Q(sqrt(D)), quadratic:D or D=<n>.
inline NumberFieldDesc parse_field(const std::string& text) {
  const std::string t = ConfigDocument::trim(text);
  if (t == "Q" || t == "rationals") return NumberFieldDesc::rationals();
  if (t == "Q(i)") return NumberFieldDesc::quadratic(-4);
  std::string digits;
  if (t.rfind("Q(sqrt(", 0) == 0 && t.size() > 9 && t.substr(t.size() - 2) == "))") {
    const long d = parse_long(t.substr(7, t.size() - 9), "field radicand");
    require(d != 1 && d != 0 && is_squarefree(d), ErrorKind::NotFundamental, "radicand must be squarefree and not 0 or 1");
    const long r = ((d % 4) + 4) % 4;
    return NumberFieldDesc::quadratic(r == 1 ? d : 4 * d);
  }
  if (t.rfind("quadratic:", 0) == 0) digits = t.substr(10);
  else if (t.rfind("D=", 0) == 0) digits = t.substr(2);
  else fail(ErrorKind::InvalidInput, "unknown field '" + t + "' (use Q, Q(i), Q(sqrt(d)), quadratic:D)");
  const long D = parse_long(digits, "discriminant");
  if (D == 1) return NumberFieldDesc::rationals();
  return NumberFieldDesc::quadratic(D);
}

inline void write_config(const NumberFieldDesc& k, ConfigDocument& doc, const std::string& section = "field") {
  doc.set(section, "kind", k.kind == NumberFieldDesc::Kind::Rationals ? "rationals" : "quadratic");
  if (k.kind == NumberFieldDesc::Kind::Quadratic) doc.set(section, "D", std::to_string(k.D));
}

inline NumberFieldDesc read_field_config(const ConfigDocument& doc, const std::string& section = "field") {
  const auto kind = doc.get(section, "kind");
  require(kind.has_value(), ErrorKind::InvalidInput, "config section [" + section + "] lacks 'kind'");
  if (*kind == "rationals") return NumberFieldDesc::rationals();
  require(*kind == "quadratic", ErrorKind::InvalidInput, "field kind must be rationals or quadratic");
  const auto d = doc.get(section, "D");
  require(d.has_value(), ErrorKind::InvalidInput, "quadratic field needs D");
  return NumberFieldDesc::quadratic(parse_long(*d, section + ".D"));
}

enum class PlaceKind { Finite, Real, Complex };
enum class Splitting { Unramified, Split, Inert, Ramified };

inline std::string to_string(PlaceKind k) {
  switch (k) {
    case PlaceKind::Finite: return "finite";
    case PlaceKind::Real: return "real";
    case PlaceKind::Complex: return "complex";
  }
  return "?";
}

inline std::string to_string(Splitting s) {
  switch (s) {
    case Splitting::Unramified: return "rational";
    case Splitting::Split: return "split";
    case Splitting::Inert: return "inert";
    case Splitting::Ramified: return "ramified";
  }
  return "?";
}

struct PlaceRecord {
  PlaceKind kind = PlaceKind::Finite;
  std::uint64_t norm = 0;            // finite places
  std::uint64_t rational_prime = 0;  // finite places
  double log_norm = 0;
  int kappa = 0;  // archimedean places: -2 real, -1 complex
  Splitting splitting = Splitting::Unramified;

  bool archimedean() const { return kind != PlaceKind::Finite; }

  static PlaceRecord finite(std::uint64_t p, std::uint64_t norm, Splitting s) {
    PlaceRecord r;
    r.norm = norm;
    r.rational_prime = p;
    r.log_norm = std::log(static_cast<double>(norm));
    r.splitting = s;
    return r;
  }
  static PlaceRecord infinite(PlaceKind kind) {
    PlaceRecord r;
    r.kind = kind;
    r.kappa = kind == PlaceKind::Real ? -2 : -1;
    return r;
  }
};

/// Finite places with Np <= X, sorted by (Np, p), followed by the archimedean
/// places. Splitting of p in Q(sqrt D) follows the Kronecker symbol: +1 gives
/// two places of norm p, -1 one of norm p^2, 0 (ramified) one of norm p.
inline std::vector<PlaceRecord> prime_places_up_to(const NumberFieldDesc& K, double X) {
  require(X <= 1e6, ErrorKind::InvalidInput, "place enumeration is limited to norms <= 10^6");
  std::vector<PlaceRecord> out;
  const auto limit = X >= 2 ? static_cast<std::uint64_t>(std::floor(X)) : 0;
  for (std::uint64_t p : primes_up_to(limit)) {
    if (K.kind == NumberFieldDesc::Kind::Rationals) {
      out.push_back(PlaceRecord::finite(p, p, Splitting::Unramified));
      continue;
    }
    switch (kronecker(K.D, static_cast<long>(p))) {
      case 1:
        out.push_back(PlaceRecord::finite(p, p, Splitting::Split));
        out.push_back(PlaceRecord::finite(p, p, Splitting::Split));
        break;
      case 0: out.push_back(PlaceRecord::finite(p, p, Splitting::Ramified)); break;
      default:
        if (p * p <= limit) out.push_back(PlaceRecord::finite(p, p * p, Splitting::Inert));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PlaceRecord& a, const PlaceRecord& b) { return a.norm < b.norm; });
  for (int i = 0; i < K.r1(); ++i) out.push_back(PlaceRecord::infinite(PlaceKind::Real));
  for (int i = 0; i < K.r2(); ++i) out.push_back(PlaceRecord::infinite(PlaceKind::Complex));
  return out;
}

/// CSV with columns norm, log_norm, kind, splitting, kappa; archimedean rows
/// leave norm and log_norm empty.
inline std::string places_csv(const std::vector<PlaceRecord>& places) {
  std::string out = "norm,log_norm,kind,splitting,kappa\n";
  for (const auto& p : places) {
    if (p.archimedean())
      out += ",," + to_string(p.kind) + ",," + std::to_string(p.kappa) + "\n";
    else
      out += std::to_string(p.norm) + "," + format_decimal(p.log_norm) + ",finite," + to_string(p.splitting) + ",\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite fields F_{p^k}, k <= 6, in a polynomial basis

class FiniteField {
 public:
  static constexpr int kMaxDegree = 6;
  static constexpr std::uint64_t kMaxOrder = 100'000'000;
  using Element = std::array<std::uint32_t, kMaxDegree>;

  static FiniteField create(std::uint64_t p, int k) {
    require(is_prime(p), ErrorKind::InvalidInput, std::to_string(p) + " is not prime");
    require(k >= 1 && k <= kMaxDegree, ErrorKind::InvalidInput, "extension degree must be in 1..6");
    long double q = 1;
    for (int i = 0; i < k; ++i) q *= p;
    require(q <= kMaxOrder, ErrorKind::FieldTooLarge, "p^k exceeds 10^8");
    FiniteField f;
    f.p_ = p;
    f.k_ = k;
    f.q_ = static_cast<std::uint64_t>(q);
    f.modulus_ = lowest_irreducible(p, k);
    return f;
  }

  std::uint64_t characteristic() const { return p_; }
  int degree() const { return k_; }
  std::uint64_t order() const { return q_; }
  /// Monic defining polynomial, coefficients c_0 .. c_k.
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }

  Element decode(std::uint64_t index) const {
    Element e{};
    for (int i = 0; i < k_; ++i) {
      e[i] = static_cast<std::uint32_t>(index % p_);
      index /= p_;
    }
    return e;
  }

  std::uint64_t encode(const Element& e) const {
    std::uint64_t index = 0;
    for (int i = k_; i-- > 0;) index = index * p_ + e[i];
    return index;
  }

  Element constant(long c) const {
    Element e{};
    const long m = static_cast<long>(p_);
    e[0] = static_cast<std::uint32_t>(((c % m) + m) % m);
    return e;
  }

  Element add(const Element& a, const Element& b) const {
    Element c{};
    for (int i = 0; i < k_; ++i) c[i] = static_cast<std::uint32_t>((a[i] + b[i]) % p_);
    return c;
  }

  Element mul(const Element& a, const Element& b) const {
    std::array<std::uint64_t, 2 * kMaxDegree> prod{};
    for (int i = 0; i < k_; ++i) {
      if (!a[i]) continue;
      for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p_;
    }
    // x^k = -(c_0 + ... + c_{k-1} x^{k-1})
    for (int d = 2 * k_ - 2; d >= k_; --d) {
      const std::uint64_t lead = prod[d];
      if (!lead) continue;
      prod[d] = 0;
      for (int i = 0; i < k_; ++i)
        prod[d - k_ + i] = (prod[d - k_ + i] + (p_ - modulus_[i]) % p_ * lead) % p_;
    }
    Element c{};
    for (int i = 0; i < k_; ++i) c[i] = static_cast<std::uint32_t>(prod[i]);
    return c;
  }

 private:
  std::uint64_t p_ = 0;
  int k_ = 0;
  std::uint64_t q_ = 0;
  std::vector<std::uint64_t> modulus_;

  using Poly = std::vector<std::uint64_t>;

  static Poly poly_mod(Poly a, const Poly& m, std::uint64_t p) {
    // m monic
    while (a.size() >= m.size()) {
      const std::uint64_t lead = a.back();
      const std::size_t shift = a.size() - m.size();
      for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = (a[shift + i] + (p - m[i] * lead % p)) % p;
      a.pop_back();
    }
    return a;
  }

  static bool is_zero(const Poly& a) {
    for (auto c : a)
      if (c) return false;
    return true;
  }

  /// Monic polynomial of degree d from its index sum c_i p^i over the lower coefficients.
  static Poly monic_from_index(std::uint64_t index, int d, std::uint64_t p) {
    Poly m(d + 1);
    for (int i = 0; i < d; ++i) {
      m[i] = index % p;
      index /= p;
    }
    m[d] = 1;
    return m;
  }

  /// Lowest monic irreducible of degree k, ordering candidates by sum c_i p^i
  /// over the non-leading coefficients. Irreducibility by trial division by
  /// every monic polynomial of degree <= k/2.
  static Poly lowest_irreducible(std::uint64_t p, int k) {
    if (k == 1) return {0, 1};
    std::uint64_t count = 1;
    for (int i = 0; i < k; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      const Poly cand = monic_from_index(idx, k, p);
      if (cand[0] == 0) continue;
      bool reducible = false;
      for (int d = 1; d <= k / 2 && !reducible; ++d) {
        std::uint64_t ndiv = 1;
        for (int i = 0; i < d; ++i) ndiv *= p;
        for (std::uint64_t j = 0; j < ndiv && !reducible; ++j)
          reducible = is_zero(poly_mod(cand, monic_from_index(j, d, p), p));
      }
      if (!reducible) return cand;
    }
    fail(ErrorKind::InvalidInput, "no irreducible polynomial found");
  }
};

// ---------------------------------------------------------------------------
// Elliptic curves y^2 = x^3 + A x + B over F_p, p > 3

struct EllipticCurveData {
  std::uint64_t p = 0;
  long A = 0, B = 0;
  long a_p = 0;

  /// t_0 = 2, t_1 = a_p, t_k = a_p t_{k-1} - p t_{k-2}; the Frobenius trace on F_{p^k}.
  std::vector<exact::BigInt> trace_sequence(std::size_t kmax) const {
    std::vector<exact::BigInt> t{2, a_p};
    while (t.size() <= kmax) t.push_back(a_p * t[t.size() - 1] - exact::BigInt(p) * t[t.size() - 2]);
    t.resize(kmax + 1);
    return t;
  }

  exact::BigInt trace(std::size_t k) const { return trace_sequence(k)[k]; }

  /// N_k = p^k + 1 - t_k.
  exact::BigInt points_from_traces(std::size_t k) const {
    return boost::multiprecision::pow(exact::BigInt(p), static_cast<unsigned>(k)) + 1 - trace(k);
  }

  std::string label() const {
    return "y^2 = x^3 + " + std::to_string(A) + "x + " + std::to_string(B) + " over F_" + std::to_string(p);
  }
};

namespace detail {

/// #E(F_q) by enumerating x and testing f(x) against a table of squares.
inline std::uint64_t enumerate_points(const FiniteField& F, long A, long B) {
  const std::uint64_t q = F.order();
  std::vector<char> square(q, 0);
  const std::size_t chunks = std::min<std::uint64_t>(q, 64);
  const std::uint64_t per = (q + chunks - 1) / chunks;
  // Mark squares chunk by chunk; the writes are idempotent.
  auto squares = ordered_parallel_map(chunks, [&](std::size_t c) {
    std::vector<std::uint64_t> hits;
    for (std::uint64_t i = c * per; i < std::min(q, (c + 1) * per); ++i) {
      const auto e = F.decode(i);
      hits.push_back(F.encode(F.mul(e, e)));
    }
    return hits;
  });
  for (const auto& hs : squares)
    for (auto h : hs) square[h] = 1;
  const auto a = F.constant(A), b = F.constant(B);
  const auto counts = ordered_parallel_map(chunks, [&](std::size_t c) {
    std::uint64_t n = 0;
    for (std::uint64_t i = c * per; i < std::min(q, (c + 1) * per); ++i) {
      const auto x = F.decode(i);
      const auto rhs = F.add(F.mul(F.mul(x, x), x), F.add(F.mul(a, x), b));
      const std::uint64_t v = F.encode(rhs);
      n += v == 0 ? 1 : (square[v] ? 2 : 0);
    }
    return n;
  });
  return 1 + std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

}  // namespace detail

inline EllipticCurveData make_curve(std::uint64_t p, long A, long B) {
  require(p > 3 && p <= 10'000 && is_prime(p), ErrorKind::InvalidInput, "curve prime must satisfy 3 < p <= 10^4");
  const long m = static_cast<long>(p);
  A = ((A % m) + m) % m;
  B = ((B % m) + m) % m;
  const exact::BigInt disc = 4 * exact::BigInt(A) * A * A + 27 * exact::BigInt(B) * B;
  require(disc % m != 0, ErrorKind::InvalidInput, "singular curve: 4A^3 + 27B^2 = 0 mod p");
  EllipticCurveData e;
  e.p = p;
  e.A = A;
  e.B = B;
  const auto n1 = detail::enumerate_points(FiniteField::create(p, 1), A, B);
  e.a_p = static_cast<long>(p + 1) - static_cast<long>(n1);
  require(static_cast<long long>(e.a_p) * e.a_p <= 4 * static_cast<long long>(p), ErrorKind::InvalidInput,
          "point count violates the Hasse bound");
  return e;
}

/// #E(F_{p^k}) including the point at infinity, by enumeration.
inline std::uint64_t count_points(const EllipticCurveData& E, int k) {
  return detail::enumerate_points(FiniteField::create(E.p, k), E.A, E.B);
}

/// Accepts "p,A,B".
inline EllipticCurveData parse_curve(const std::string& text) {
  const auto f = split(text, ',');
  require(f.size() == 3, ErrorKind::InvalidInput, "curve must be given as p,A,B");
  return make_curve(static_cast<std::uint64_t>(parse_long(f[0], "curve p")), parse_long(f[1], "curve A"),
                    parse_long(f[2], "curve B"));
}

inline void write_config(const EllipticCurveData& e, ConfigDocument& doc, const std::string& section = "curve") {
  doc.set(section, "p", std::to_string(e.p));
  doc.set(section, "A", std::to_string(e.A));
  doc.set(section, "B", std::to_string(e.B));
}

inline EllipticCurveData read_curve_config(const ConfigDocument& doc, const std::string& section = "curve") {
  auto need = [&](const std::string& key) {
    auto v = doc.get(section, key);
    require(v.has_value(), ErrorKind::InvalidInput, "config section [" + section + "] lacks '" + key + "'");
    return parse_long(*v, section + "." + key);
  };
  return make_curve(static_cast<std::uint64_t>(need("p")), need("A"), need("B"));
}

/// Element of an imaginary quadratic order, held by trace and norm.
struct QuadraticInteger {
  exact::BigInt trace;
  exact::BigInt norm;
  exact::BigInt discriminant() const { return trace * trace - 4 * norm; }
};

/// Frobenius pi = (a_p + sqrt(a_p^2 - 4p)) / 2, with pi * conj(pi) = p.
inline QuadraticInteger frobenius_pi(const EllipticCurveData& E) {
  require(E.a_p % static_cast<long>(E.p) != 0, ErrorKind::NotOrdinary, "curve is supersingular (p divides a_p)");
  QuadraticInteger pi{E.a_p, E.p};
  require(pi.discriminant() < 0, ErrorKind::NotOrdinary, "Frobenius is not imaginary quadratic");
  return pi;
}

}  // namespace trace_formulary
