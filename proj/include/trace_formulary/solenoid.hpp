#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "trace_formulary/arith.hpp"
#include "trace_formulary/config.hpp"
#include "trace_formulary/error.hpp"
#include "trace_formulary/exact.hpp"
#include "trace_formulary/parallel.hpp"
#include "trace_formulary/testfn.hpp"

namespace trace_formulary {

using exact::BigInt;
using exact::IntMatrix;
using exact::Rational;
using exact::RatMatrix;

inline int mobius(long n) {
  require(n >= 1, ErrorKind::InvalidInput, "mobius argument must be positive");
  int mu = 1;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

inline std::vector<long> divisors(long n) {
  std::vector<long> out;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

/// Smallest n such that some eigenvalue of A is a primitive n-th root of unity,
/// or 0. An eigenvalue of degree at most d can only be a primitive n-th root
/// with phi(n) <= d, so the resultant is only formed for those n.
inline long root_of_unity_order(const IntMatrix& A) {
  const long d = static_cast<long>(A.rows());
  const exact::Poly chi = exact::charpoly(A);
  const long bound = (1L << d) * d * d;
  for (long n = 1; n <= bound; ++n) {
    if (exact::euler_phi(n) > d) continue;
    if (exact::resultant(chi, exact::cyclotomic(n)) == 0) return n;
  }
  return 0;
}

/// Integer matrix generating an unramified self-covering of the d-torus.
struct ToralEndo {
  IntMatrix A;
  BigInt det;

  std::size_t dimension() const { return A.rows(); }

  static ToralEndo create(const IntMatrix& A) {
    require(A.square() && A.rows() >= 1 && A.rows() <= 6, ErrorKind::InvalidInput,
            "toral endomorphism must be a square matrix of size 1..6");
    ToralEndo t{A, exact::determinant(A)};
    require(t.det != 0, ErrorKind::Singular, "toral endomorphism has determinant 0");
    if (const long n = root_of_unity_order(A); n != 0)
      throw DegenerateAtK(n, "an eigenvalue is a root of unity of order " + std::to_string(n) +
                                 ", so det(I - A^" + std::to_string(n) + ") = 0");
    return t;
  }
};

/// "2" or "2,1;1,1": rows separated by ';', entries by ','.
inline IntMatrix parse_int_matrix(const std::string& text) {
  std::vector<std::vector<long>> rows;
  for (const auto& row : split(text, ';')) {
    std::vector<long> r;
    for (const auto& e : split(row, ',')) r.push_back(parse_long(e, "matrix entry"));
    rows.push_back(std::move(r));
  }
  require(!rows.empty(), ErrorKind::InvalidInput, "empty matrix");
  IntMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == rows[0].size(), ErrorKind::InvalidInput, "ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline std::string format_matrix(const IntMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += exact::to_string(m(i, j));
    }
  }
  return out;
}

inline BigInt fixed_point_count(const IntMatrix& A, long k) {
  require(k >= 1 && k <= 64, ErrorKind::InvalidInput, "fixed_point_count needs 1 <= k <= 64");
  const IntMatrix B = IntMatrix::identity(A.rows()) - exact::power(A, static_cast<unsigned long>(k));
  const BigInt det = exact::determinant(B);
  if (det == 0) throw DegenerateAtK(k, "det(I - A^" + std::to_string(k) + ") = 0");
  return abs(det);
}

struct OrbitCount {
  long length = 0;
  BigInt count;
};

/// count(m) = (1/m) sum_{e | m} mu(m/e) #Fix(A^e), for m = 1..k_max.
inline std::vector<OrbitCount> orbit_census_from_fixed_counts(const std::vector<BigInt>& fixed) {
  std::vector<OrbitCount> out;
  for (long m = 1; m < static_cast<long>(fixed.size()); ++m) {
    BigInt s = 0;
    for (long e : divisors(m)) s += mobius(m / e) * fixed[e];
    require(s % m == 0 && s >= 0, ErrorKind::InconsistentGenerator,
            "fixed-point counts do not come from an orbit census at length " + std::to_string(m));
    out.push_back({m, s / m});
  }
  return out;
}

inline std::vector<OrbitCount> orbit_census(const IntMatrix& A, long k_max) {
  require(k_max >= 1 && k_max <= 24, ErrorKind::InvalidInput, "orbit_census needs 1 <= k_max <= 24");
  std::vector<BigInt> fixed(k_max + 1);
  for (long e = 1; e <= k_max; ++e) fixed[e] = fixed_point_count(A, e);
  return orbit_census_from_fixed_counts(fixed);
}

namespace detail {

inline Rational det_one_minus(const RatMatrix& B) {
  return exact::determinant(RatMatrix::identity(B.rows()) - B);
}

inline long nonzero_or_degenerate(const Rational& det, long k) {
  if (det == 0) throw DegenerateAtK(k, "det(I - P^" + std::to_string(k) + ") = 0");
  return det.sign();
}

/// det(I - P^k) / |det(I - P^|k|)| for the return map P of one orbit.
inline Rational return_coefficient(const RatMatrix& P, long k) {
  require(k != 0, ErrorKind::InvalidInput, "orbit multiplicity k must be nonzero");
  const Rational num = det_one_minus(exact::signed_power(P, k));
  nonzero_or_degenerate(num, k);
  const Rational den = k > 0 ? num : det_one_minus(exact::signed_power(P, -k));
  nonzero_or_degenerate(den, -k);
  return num / abs(den);
}

}  // namespace detail

/// sgn det(I - A^{km}).
inline int epsilon_gamma(const IntMatrix& A, long m, long k) {
  require(m >= 1 && k != 0, ErrorKind::InvalidInput, "epsilon_gamma needs m >= 1, k != 0");
  const Rational det = detail::det_one_minus(exact::signed_power(exact::to_rational(A), k * m));
  return static_cast<int>(detail::nonzero_or_degenerate(det, k));
}

/// det(I - A^{km}) / |det(I - A^{|k|m})|.
inline Rational geometric_coefficient(const IntMatrix& A, long m, long k) {
  require(m >= 1, ErrorKind::InvalidInput, "orbit length must be positive");
  return detail::return_coefficient(exact::to_rational(exact::power(A, static_cast<unsigned long>(m))), k);
}

/// The same coefficient written for k <= -1 as eps(|k|) * det(-A^{km}).
inline Rational geometric_coefficient_signed_det(const IntMatrix& A, long m, long k) {
  require(m >= 1 && k <= -1, ErrorKind::InvalidInput, "signed-determinant form needs m >= 1, k <= -1");
  return epsilon_gamma(A, m, -k) * exact::determinant(-exact::signed_power(exact::to_rational(A), k * m));
}

/// Orbits of one length sharing a transverse return map, for explicit generators.
struct OrbitFamily {
  long length = 0;
  BigInt count;
  RatMatrix return_map;
};

struct CMData {
  std::uint64_t p = 0;
  long A = 0, B = 0;
  long a_p = 0;
};

/// Suspension of a self-map of M with return time l. Cohomology actions are
/// H_0..H_dim; explicit generators also carry orbit families complete up to
/// orbit_length_limit.
struct SuspensionSystem {
  std::string name;
  std::optional<ToralEndo> toral;
  std::vector<RatMatrix> cohomology;
  long euler_characteristic = 0;
  std::vector<OrbitFamily> orbits;
  long orbit_length_limit = 0;
  double l = 1;
  std::string l_text = "1";
  std::optional<CMData> cm;
};

/// "log p" (symbolic) or a positive decimal.
inline std::pair<double, std::string> parse_length(const std::string& text) {
  const std::string t = ConfigDocument::trim(text);
  if (t.rfind("log", 0) == 0) {
    const double p = parse_double(t.substr(3), "log argument");
    require(p > 1, ErrorKind::InvalidInput, "log argument must exceed 1");
    return {std::log(p), "log " + ConfigDocument::trim(t.substr(3))};
  }
  const double v = parse_double(t, "suspension length");
  require(v > 0 && std::isfinite(v), ErrorKind::InvalidInput, "suspension length must be positive");
  return {v, t};
}

/// Sum_i (-1)^i tr(H_i^n).
inline Rational lefschetz_trace(const std::vector<RatMatrix>& H, long n) {
  Rational s = 0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    const Rational t = exact::signed_power(H[i], n).trace();
    s += (i % 2) ? Rational(-t) : t;
  }
  return s;
}

inline SuspensionSystem toral_system(const ToralEndo& T, const std::string& l_text) {
  SuspensionSystem S;
  S.name = "torus:" + format_matrix(T.A);
  S.toral = T;
  const IntMatrix At = T.A.transpose();
  for (std::size_t i = 0; i <= T.dimension(); ++i) S.cohomology.push_back(exact::to_rational(exact::exterior_power(At, i)));
  S.euler_characteristic = 0;
  std::tie(S.l, S.l_text) = parse_length(l_text);
  return S;
}

/// Checks sum of local indices over Fix(f^n) against the cohomological
/// Lefschetz number for n = 1..orbit_length_limit, and the Euler characteristic.
inline void audit_generator(const SuspensionSystem& S) {
  long chi = 0;
  for (std::size_t i = 0; i < S.cohomology.size(); ++i) {
    require(S.cohomology[i].square(), ErrorKind::InvalidInput, "cohomology action must be square");
    chi += (i % 2 ? -1 : 1) * static_cast<long>(S.cohomology[i].rows());
  }
  require(chi == S.euler_characteristic, ErrorKind::InconsistentGenerator,
          "Euler characteristic " + std::to_string(S.euler_characteristic) +
              " disagrees with the alternating sum of cohomology ranks " + std::to_string(chi));
  for (const auto& f : S.orbits)
    require(f.length >= 1 && f.count >= 0 && f.return_map.square(), ErrorKind::InvalidInput, "malformed orbit family");
  for (long n = 1; n <= S.orbit_length_limit; ++n) {
    Rational indices = 0;
    for (const auto& f : S.orbits) {
      if (f.count == 0 || n % f.length) continue;
      const long k = n / f.length;
      const Rational det = detail::det_one_minus(exact::power(f.return_map, static_cast<unsigned long>(k)));
      indices += f.length * f.count * detail::nonzero_or_degenerate(det, k);
    }
    const Rational trace = lefschetz_trace(S.cohomology, n);
    require(indices == trace, ErrorKind::InconsistentGenerator,
            "at n = " + std::to_string(n) + " the fixed-point indices sum to " + exact::to_string(indices) +
                " but the Lefschetz number is " + exact::to_string(trace));
  }
}

inline SuspensionSystem explicit_system(std::string name, std::vector<RatMatrix> cohomology, long euler_characteristic,
                                        std::vector<OrbitFamily> orbits, long orbit_length_limit,
                                        const std::string& l_text) {
  SuspensionSystem S;
  S.name = std::move(name);
  S.cohomology = std::move(cohomology);
  S.euler_characteristic = euler_characteristic;
  S.orbits = std::move(orbits);
  S.orbit_length_limit = orbit_length_limit;
  std::tie(S.l, S.l_text) = parse_length(l_text);
  audit_generator(S);
  return S;
}

/// Rotation of S^2 about an axis by an angle with cos = 3/5: two fixed poles
/// whose return maps are the planar rotation, identity action on cohomology.
inline SuspensionSystem sphere_rotation_system(const std::string& l_text, long orbit_length_limit = 24) {
  const RatMatrix R{{Rational(3, 5), Rational(-4, 5)}, {Rational(4, 5), Rational(3, 5)}};
  const RatMatrix one{{Rational(1)}};
  return explicit_system("sphere-rotation", {one, RatMatrix(0, 0), one}, 2, {{1, 2, R}}, orbit_length_limit, l_text);
}

/// Frobenius of an ordinary curve as multiplication by pi on C / O: H_1 is
/// the companion matrix of x^2 - a_p x + p and #Fix(f^n) = N_n.
inline SuspensionSystem cm_system_from_curve(const EllipticCurveData& E, long orbit_length_limit = 24) {
  require(orbit_length_limit >= 1 && orbit_length_limit <= 64, ErrorKind::InvalidInput, "orbit length limit must be in 1..64");
  frobenius_pi(E);
  const BigInt p(E.p);
  const RatMatrix C{{Rational(0), Rational(-p)}, {Rational(1), Rational(E.a_p)}};
  std::vector<BigInt> fixed(orbit_length_limit + 1);
  for (long e = 1; e <= orbit_length_limit; ++e) fixed[e] = E.points_from_traces(static_cast<std::size_t>(e));
  std::vector<OrbitFamily> families;
  for (const auto& oc : orbit_census_from_fixed_counts(fixed))
    families.push_back({oc.length, oc.count, exact::power(C, static_cast<unsigned long>(oc.length))});
  auto S = explicit_system("cm:" + E.label(), {RatMatrix{{Rational(1)}}, C, RatMatrix{{Rational(p)}}}, 0,
                           std::move(families), orbit_length_limit, "log " + std::to_string(E.p));
  S.cm = CMData{E.p, E.A, E.B, E.a_p};
  return S;
}

/// Comb l * sum_n c_n delta_{n l}; coefficients are stored divided by l so
/// they stay exact rationals when l is transcendental.
struct DeltaComb {
  double l = 1;
  std::string l_text = "1";
  std::map<long, Rational> coefficients;

  Rational at(long n) const {
    auto it = coefficients.find(n);
    return it == coefficients.end() ? Rational(0) : it->second;
  }
};

struct CombRange {
  long lo = -12, hi = 12;
};

inline DeltaComb lhs_comb(const SuspensionSystem& S, CombRange range) {
  require(range.lo <= range.hi, ErrorKind::InvalidInput, "empty comb range");
  std::vector<RatMatrix> inverses;
  if (range.lo < 0) {
    for (std::size_t i = 0; i < S.cohomology.size(); ++i) {
      const auto& H = S.cohomology[i];
      if (H.rows() == 0) {
        inverses.push_back(H);
        continue;
      }
      if (exact::determinant(H) == 0)
        fail(ErrorKind::NonInvertibleCohomology, "H_" + std::to_string(i) + " is not invertible over Q");
      inverses.push_back(exact::inverse(H));
    }
  }
  const std::size_t count = static_cast<std::size_t>(range.hi - range.lo + 1);
  auto values = ordered_parallel_map(count, [&](std::size_t idx) {
    const long n = range.lo + static_cast<long>(idx);
    if (n == 0) return Rational(S.euler_characteristic);
    const auto& mats = n > 0 ? S.cohomology : inverses;
    Rational s = 0;
    for (std::size_t i = 0; i < mats.size(); ++i) {
      if (mats[i].rows() == 0) continue;
      const Rational t = exact::power(mats[i], static_cast<unsigned long>(std::labs(n))).trace();
      s += (i % 2) ? Rational(-t) : t;
    }
    return s;
  });
  DeltaComb c{S.l, S.l_text, {}};
  for (std::size_t i = 0; i < count; ++i) c.coefficients[range.lo + static_cast<long>(i)] = values[i];
  return c;
}

inline DeltaComb rhs_comb(const SuspensionSystem& S, CombRange range) {
  require(range.lo <= range.hi, ErrorKind::InvalidInput, "empty comb range");
  const long reach = std::max(std::labs(range.lo), std::labs(range.hi));
  std::vector<OrbitFamily> families;
  if (S.toral) {
    if (reach >= 1) {
      const RatMatrix A = exact::to_rational(S.toral->A);
      for (const auto& oc : orbit_census(S.toral->A, reach))
        families.push_back({oc.length, oc.count, exact::power(A, static_cast<unsigned long>(oc.length))});
    }
  } else {
    require(reach <= S.orbit_length_limit, ErrorKind::InvalidInput,
            "orbit data is complete only up to length " + std::to_string(S.orbit_length_limit));
    families = S.orbits;
  }
  const std::size_t count = static_cast<std::size_t>(range.hi - range.lo + 1);
  auto values = ordered_parallel_map(count, [&](std::size_t idx) {
    const long n = range.lo + static_cast<long>(idx);
    if (n == 0) return Rational(S.euler_characteristic);
    Rational s = 0;
    for (const auto& f : families) {
      if (f.count == 0 || n % f.length) continue;
      s += f.length * f.count * detail::return_coefficient(f.return_map, n / f.length);
    }
    return s;
  });
  DeltaComb c{S.l, S.l_text, {}};
  for (std::size_t i = 0; i < count; ++i) c.coefficients[range.lo + static_cast<long>(i)] = values[i];
  return c;
}

/// First index where the combs differ, if any.
inline std::optional<long> first_mismatch(const DeltaComb& a, const DeltaComb& b) {
  std::map<long, bool> keys;
  for (const auto& [n, _] : a.coefficients) keys[n] = true;
  for (const auto& [n, _] : b.coefficients) keys[n] = true;
  for (const auto& [n, _] : keys)
    if (a.at(n) != b.at(n)) return n;
  return std::nullopt;
}

inline void require_equal_combs(const DeltaComb& a, const DeltaComb& b) {
  if (auto n = first_mismatch(a, b)) throw MismatchAt(*n, exact::to_string(a.at(*n)), exact::to_string(b.at(*n)));
}

struct CombVerification {
  DeltaComb lhs, rhs;
  std::vector<long> mismatches;
  bool pass = false;
};

/// Both sides exactly; a failed identity is reported, not thrown.
inline CombVerification verify_comb(const SuspensionSystem& S, CombRange range) {
  CombVerification v{lhs_comb(S, range), rhs_comb(S, range), {}, false};
  for (const auto& [n, c] : v.lhs.coefficients)
    if (c != v.rhs.at(n)) v.mismatches.push_back(n);
  v.pass = v.mismatches.empty();
  return v;
}

inline double pair_comb(const DeltaComb& comb, const TestFunction& phi) {
  double s = 0;
  for (const auto& [n, c] : comb.coefficients) {
    const double t = static_cast<double>(n) * comb.l;
    if (t <= phi.support_lo() || t >= phi.support_hi()) continue;
    s += c.convert_to<double>() * eval(phi, t);
  }
  return comb.l * s;
}

/// Comb indices whose points n l can meet the support of phi.
inline CombRange covering_range(const TestFunction& phi, double l) {
  return {static_cast<long>(std::floor(phi.support_lo() / l)), static_cast<long>(std::ceil(phi.support_hi() / l))};
}

struct SpectralPairing {
  Complex value;
  double error_bound = 0;
  long towers = 0;
};

/// Sum over degrees and eigenvalues mu of H_i of the Theta-eigenvalue tower
/// (log mu + 2 pi i j) / l, evaluated with Phi and signed by (-1)^i.
inline SpectralPairing spectral_pairing(const SuspensionSystem& S, const TestFunction& phi, double tail_tolerance = 1e-10) {
  SpectralPairing out;
  const double period = 2 * std::numbers::pi / S.l;
  for (std::size_t i = 0; i < S.cohomology.size(); ++i) {
    const auto& H = S.cohomology[i];
    if (H.rows() == 0) continue;
    Eigen::MatrixXd M(H.rows(), H.cols());
    for (std::size_t r = 0; r < H.rows(); ++r)
      for (std::size_t c = 0; c < H.cols(); ++c) M(r, c) = H(r, c).convert_to<double>();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
    const double sign = (i % 2) ? -1.0 : 1.0;
    for (Eigen::Index e = 0; e < solver.eigenvalues().size(); ++e) {
      const Complex mu = solver.eigenvalues()[e];
      require(std::abs(mu) > 0, ErrorKind::NonInvertibleCohomology, "zero eigenvalue in H_" + std::to_string(i));
      const auto t = tower_sum(phi, std::log(mu) / S.l, period, tail_tolerance);
      out.value += sign * t.value;
      out.error_bound += t.quad_error + t.tail_bound;
      ++out.towers;
    }
  }
  return out;
}

struct ThetaDegree {
  std::size_t degree = 0;
  std::size_t dimension = 0;
  Rational determinant;
  long exponent = 0;          // |det H_i| = p^exponent
  bool equal_moduli = false;  // all eigenvalues share one absolute value
  Rational real_part;         // exponent / dimension
  Complex base_eigenvalue;    // log(mu) / l for the eigenvalue with nonnegative argument
};

struct ThetaSpectrumReport {
  std::uint64_t p = 0;
  long a_p = 0;
  bool weil_norm = false;  // pi * conj(pi) = p
  std::vector<ThetaDegree> degrees;
  bool pass = false;
};

/// Real parts of the Theta spectrum per cohomological degree, decided from
/// |det H_i| = p^e: when all eigenvalues of H_i have equal modulus the real
/// part is exactly e / dim H_i.
inline ThetaSpectrumReport check_theta_spectrum(const SuspensionSystem& S) {
  if (!S.cm) fail(ErrorKind::NotCM, "system '" + S.name + "' does not come from a CM curve");
  ThetaSpectrumReport r;
  r.p = S.cm->p;
  r.a_p = S.cm->a_p;
  const BigInt p(r.p);
  r.weil_norm = exact::determinant(S.cohomology.at(1)) == Rational(p);
  const Rational expected[] = {Rational(0), Rational(1, 2), Rational(1)};
  r.pass = r.weil_norm && S.cohomology.size() == 3;
  for (std::size_t i = 0; i < S.cohomology.size(); ++i) {
    const auto& H = S.cohomology[i];
    ThetaDegree d;
    d.degree = i;
    d.dimension = H.rows();
    d.determinant = exact::determinant(H);
    Rational v = abs(d.determinant);
    require(denominator(v) == 1, ErrorKind::InvalidInput, "CM cohomology determinant is not integral");
    BigInt n = numerator(v);
    while (n % p == 0) {
      n /= p;
      ++d.exponent;
    }
    const bool pure_power = n == 1;
    if (H.rows() == 1) {
      d.equal_moduli = true;
    } else if (H.rows() == 2) {
      const Rational tr = H.trace();
      d.equal_moduli = tr * tr - 4 * d.determinant < 0;
    }
    d.real_part = Rational(d.exponent, static_cast<long>(d.dimension));
    Eigen::MatrixXd M(H.rows(), H.cols());
    for (std::size_t a = 0; a < H.rows(); ++a)
      for (std::size_t b = 0; b < H.cols(); ++b) M(a, b) = H(a, b).convert_to<double>();
    Complex best(0, -1);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
    for (Eigen::Index e = 0; e < solver.eigenvalues().size(); ++e) {
      const Complex lam = std::log(Complex(solver.eigenvalues()[e])) / S.l;
      if (lam.imag() >= best.imag()) best = lam;
    }
    d.base_eigenvalue = best;
    if (!(pure_power && d.equal_moduli && i < 3 && d.real_part == expected[i])) r.pass = false;
    r.degrees.push_back(d);
  }
  return r;
}

/// Config section [system]: either matrix = "2,1;1,1" with l = "log 2", or
/// curve = "5,1,0", or generator = "sphere-rotation" with l.
inline SuspensionSystem read_system_config(const ConfigDocument& doc, const std::string& section = "system") {
  if (auto curve = doc.get(section, "curve")) return cm_system_from_curve(parse_curve(*curve));
  const std::string l = doc.get(section, "l").value_or("1");
  if (auto gen = doc.get(section, "generator")) {
    require(*gen == "sphere-rotation", ErrorKind::Unsupported, "unknown generator '" + *gen + "'");
    return sphere_rotation_system(l);
  }
  auto matrix = doc.get(section, "matrix");
  require(matrix.has_value(), ErrorKind::InvalidInput, "config section [" + section + "] needs matrix, curve or generator");
  return toral_system(ToralEndo::create(parse_int_matrix(*matrix)), l);
}

inline void write_system_config(const SuspensionSystem& S, ConfigDocument& doc, const std::string& section = "system") {
  if (S.cm) {
    doc.set(section, "curve", std::to_string(S.cm->p) + "," + std::to_string(S.cm->A) + "," + std::to_string(S.cm->B));
    return;
  }
  if (S.toral) doc.set(section, "matrix", format_matrix(S.toral->A));
  else doc.set(section, "generator", S.name);
  doc.set(section, "l", S.l_text);
}

inline std::string comb_csv(const DeltaComb& c) {
  std::string out = "n,t,coefficient_over_l,weight\n";
  for (const auto& [n, v] : c.coefficients)
    out += std::to_string(n) + "," + format_decimal(n * c.l) + "," + exact::to_string(v) + "," +
           format_decimal(c.l * v.convert_to<double>()) + "\n";
  return out;
}

}  // namespace trace_formulary
