#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sampling.hpp"
#include "trace_formulary/explicit_formula.hpp"
#include "trace_formulary/solenoid.hpp"

namespace tf = trace_formulary;
namespace ex = trace_formulary::exact;
using ex::BigInt;
using ex::IntMatrix;
using ex::Rational;

namespace {

IntMatrix M(const std::string& s) { return tf::parse_int_matrix(s); }

std::vector<std::vector<long long>> to_ll(const IntMatrix& m) {
  std::vector<std::vector<long long>> out(m.rows(), std::vector<long long>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).convert_to<long long>();
  return out;
}

/// Points j / (2^k - 1) of R/Z fixed by x -> 2^k x, counted directly.
long doubling_fixed_points(int k) {
  const long N = (1L << k) - 1;
  long count = 0;
  for (long j = 0; j < N; ++j)
    if (((1L << k) * j - j) % N == 0) ++count;
  return count;
}

}  // namespace

TEST(ToralEndo, RejectsRootsOfUnityAndSingular) {
  for (const char* s : {"1", "-1", "1,0;0,1", "0,-1;1,0", "0,1;-1,-1", "1,1;0,1", "2,0;0,1"}) {
    try {
      tf::ToralEndo::create(M(s));
      FAIL() << s;
    } catch (const tf::Error& e) {
      EXPECT_EQ(e.kind(), tf::ErrorKind::DegenerateAtK) << s;
    }
  }
  try {
    tf::ToralEndo::create(M("1,2;2,4"));
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::Singular);
  }
}

TEST(ToralEndo, OrderOfCyclotomicFactor) {
  EXPECT_EQ(tf::root_of_unity_order(M("0,-1;1,0")), 4);
  EXPECT_EQ(tf::root_of_unity_order(M("0,-1;1,-1")), 3);
  EXPECT_EQ(tf::root_of_unity_order(M("2,1;1,1")), 0);
}

TEST(FixedPoints, DoublingMap) {
  EXPECT_EQ(tf::fixed_point_count(M("2"), 3), 7);
  for (int k = 1; k <= 12; ++k) EXPECT_EQ(tf::fixed_point_count(M("2"), k), doubling_fixed_points(k));
}

TEST(FixedPoints, CatMapAgainstSmithNormalForm) {
  const IntMatrix A = M("2,1;1,1");
  EXPECT_EQ(tf::fixed_point_count(A, 1), 1);
  EXPECT_EQ(tf::fixed_point_count(A, 2), 5);
  EXPECT_EQ(tf::fixed_point_count(A, 3), 16);
  for (int k = 1; k <= 10; ++k) {
    const IntMatrix B = ex::power(A, k) - IntMatrix::identity(2);
    EXPECT_EQ(tf::fixed_point_count(A, k), BigInt(oracles::smith_index(to_ll(B))));
  }
}

TEST(FixedPoints, RandomMatricesAgainstSmithNormalForm) {
  for (const auto& T : sampling::random_toral_endos(21, 15, 3, 4))
    for (int k = 1; k <= 4; ++k) {
      const IntMatrix B = ex::power(T.A, k) - IntMatrix::identity(T.dimension());
      EXPECT_EQ(tf::fixed_point_count(T.A, k), BigInt(oracles::smith_index(to_ll(B))));
    }
}

TEST(FixedPoints, ExteriorTraceIdentity) {
  for (const auto& T : sampling::random_toral_endos(1, 20, 4, 5))
    for (long k = 1; k <= 10; ++k) {
      const IntMatrix Ak = ex::power(T.A, static_cast<unsigned long>(k));
      BigInt alt = 0;
      for (std::size_t i = 0; i <= T.dimension(); ++i) {
        const BigInt t = ex::power(ex::exterior_power(T.A, i), static_cast<unsigned long>(k)).trace();
        alt += (i % 2) ? BigInt(-t) : t;
      }
      EXPECT_EQ(ex::determinant(IntMatrix::identity(T.dimension()) - Ak), alt);
      if (k <= 3 && T.dimension() <= 3)
        EXPECT_EQ(alt, BigInt(oracles::leibniz_det(to_ll(IntMatrix::identity(T.dimension()) - Ak))));
    }
}

TEST(Census, DoublingMap) {
  const auto c = tf::orbit_census(M("2"), 6);
  EXPECT_EQ(c[0].count, 1);
  EXPECT_EQ(c[2].count, 2);
  EXPECT_EQ(c[2].length, 3);
}

TEST(Census, CatMap) {
  const auto c = tf::orbit_census(M("2,1;1,1"), 6);
  EXPECT_EQ(c[0].count, 1);
  EXPECT_EQ(c[1].count, 2);
}

TEST(Census, MobiusConsistency) {
  for (const auto& T : sampling::random_toral_endos(1, 20, 4, 5)) {
    const auto c = tf::orbit_census(T.A, 12);
    for (long n = 1; n <= 12; ++n) {
      BigInt s = 0;
      for (long m : tf::divisors(n)) {
        EXPECT_GE(c[m - 1].count, 0);
        s += m * c[m - 1].count;
      }
      EXPECT_EQ(s, tf::fixed_point_count(T.A, n));
    }
  }
}

TEST(Census, MobiusFunction) {
  const int expected[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0};
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(tf::mobius(n), expected[n - 1]);
}

TEST(Signs, SmallCases) {
  EXPECT_EQ(tf::epsilon_gamma(M("2"), 1, 1), -1);
  EXPECT_EQ(tf::epsilon_gamma(M("2,1;1,1"), 1, 1), -1);
}

TEST(Signs, ReflectionLaw) {
  for (const auto& T : sampling::random_toral_endos(5, 20, 4, 5))
    for (long m = 1; m <= 3; ++m)
      for (long k = 1; k <= 4; ++k) {
        // det(I - B^-1) = det(-B^-1) det(I - B): the sign carries (-1)^d along with sgn det B
        const int s = ex::determinant(-ex::power(T.A, static_cast<unsigned long>(k * m))).sign();
        EXPECT_EQ(tf::epsilon_gamma(T.A, m, k), tf::epsilon_gamma(T.A, m, -k) * s);
      }
}

TEST(GeometricCoefficient, DoublingInverse) {
  EXPECT_EQ(tf::geometric_coefficient(M("2"), 1, -1), Rational(1, 2));
  EXPECT_EQ(tf::geometric_coefficient_signed_det(M("2"), 1, -1), Rational(1, 2));
}

TEST(GeometricCoefficient, PositiveMultiplesAreSigns) {
  for (const auto& T : sampling::random_toral_endos(9, 10, 4, 5))
    for (long m = 1; m <= 3; ++m)
      for (long k = 1; k <= 4; ++k) {
        const Rational g = tf::geometric_coefficient(T.A, m, k);
        EXPECT_TRUE(g == 1 || g == -1);
        EXPECT_EQ(g, tf::epsilon_gamma(T.A, m, k));
      }
}

TEST(GeometricCoefficient, CatMapMinusTwo) {
  const IntMatrix A = M("2,1;1,1");
  const auto inv2 = ex::signed_power(ex::to_rational(A), -2);
  const Rational expected = ex::determinant(ex::RatMatrix::identity(2) - inv2) / 5;
  EXPECT_EQ(tf::geometric_coefficient(A, 1, -2), expected);
  EXPECT_EQ(tf::geometric_coefficient_signed_det(A, 1, -2), expected);
}

TEST(GeometricCoefficient, TwoFormsAgreeForNegativeMultiples) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> m_dist(1, 4), k_dist(-4, -1);
  const auto systems = sampling::random_toral_endos(13, 20, 4, 5);
  for (int i = 0; i < 100; ++i) {
    const auto& T = systems[i % systems.size()];
    const long m = m_dist(rng), k = k_dist(rng);
    EXPECT_EQ(tf::geometric_coefficient(T.A, m, k), tf::geometric_coefficient_signed_det(T.A, m, k));
  }
}

TEST(GeometricCoefficient, UnimodularDeterminantLaw) {
  for (const auto& A : sampling::random_unimodular(3, 20, 3))
    for (long km = 1; km <= 6; ++km) {
      EXPECT_EQ(abs(ex::determinant(ex::power(A, static_cast<unsigned long>(km)))), 1);
      EXPECT_EQ(abs(ex::determinant(ex::signed_power(ex::to_rational(A), -km))), 1);
    }
}

TEST(Combs, DoublingMapCoefficients) {
  const auto S = tf::toral_system(tf::ToralEndo::create(M("2")), "1");
  const auto lhs = tf::lhs_comb(S, {-3, 3});
  EXPECT_EQ(lhs.at(1), -1);
  EXPECT_EQ(lhs.at(-1), Rational(1, 2));
  EXPECT_EQ(lhs.at(0), 0);
  const auto rhs = tf::rhs_comb(S, {-3, 3});
  EXPECT_EQ(rhs.at(1), -1);
  EXPECT_EQ(rhs.at(3), -7);
  EXPECT_EQ(rhs.at(-1), Rational(1, 2));
}

TEST(Combs, TorusEulerCharacteristicVanishes) {
  for (const auto& T : sampling::random_toral_endos(2, 10, 4, 5)) {
    const auto S = tf::toral_system(T, "log 3");
    EXPECT_EQ(tf::lhs_comb(S, {0, 0}).at(0), 0);
    EXPECT_EQ(tf::rhs_comb(S, {0, 0}).at(0), 0);
  }
}

TEST(Combs, SphereRotation) {
  const auto S = tf::sphere_rotation_system("0.75");
  const auto v = tf::verify_comb(S, {-12, 12});
  EXPECT_TRUE(v.pass);
  for (long n = -12; n <= 12; ++n) EXPECT_EQ(v.rhs.at(n), 2) << n;
  EXPECT_EQ(v.lhs.at(0), 2);
}

TEST(Combs, InconsistentGeneratorRejected) {
  const ex::RatMatrix one{{Rational(1)}};
  const ex::RatMatrix R{{Rational(3, 5), Rational(-4, 5)}, {Rational(4, 5), Rational(3, 5)}};
  try {
    tf::explicit_system("bad", {one, ex::RatMatrix(0, 0), one}, 2, {{1, 1, R}}, 6, "1");
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::InconsistentGenerator);
  }
  try {
    tf::explicit_system("bad-chi", {one, ex::RatMatrix(0, 0), one}, 0, {{1, 2, R}}, 6, "1");
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::InconsistentGenerator);
  }
}

TEST(Combs, NonInvertibleCohomology) {
  const ex::RatMatrix one{{Rational(1)}}, zero{{Rational(0)}};
  // x -> 0 on a point-like model: H_0 = [1], H_1 = [0], one fixed point of index +1
  const auto S = tf::explicit_system("collapse", {one, zero}, 0, {{1, 1, ex::RatMatrix{{Rational(0)}}}}, 4, "1");
  EXPECT_NO_THROW(tf::lhs_comb(S, {1, 4}));
  try {
    tf::lhs_comb(S, {-1, 1});
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::NonInvertibleCohomology);
  }
}

TEST(Combs, VerifyStandardSystems) {
  for (auto [m, l] : std::vector<std::pair<std::string, std::string>>{{"2", "1"}, {"2,1;1,1", "log 2"}, {"3", "0.5"}, {"1,1;1,2", "1"}}) {
    const auto v = tf::verify_comb(tf::toral_system(tf::ToralEndo::create(M(m)), l), {-12, 12});
    EXPECT_TRUE(v.pass) << m;
    EXPECT_TRUE(v.mismatches.empty());
  }
}

TEST(Combs, VerifyRandomSystems) {
  for (const auto& T : sampling::random_toral_endos(77, 10, 4, 5))
    EXPECT_TRUE(tf::verify_comb(tf::toral_system(T, "1"), {-12, 12}).pass) << tf::format_matrix(T.A);
}

TEST(Combs, MismatchDetectorFires) {
  const auto S = tf::toral_system(tf::ToralEndo::create(M("2")), "1");
  const auto lhs = tf::lhs_comb(S, {-12, 12});
  auto rhs = tf::rhs_comb(S, {-12, 12});
  EXPECT_NO_THROW(tf::require_equal_combs(lhs, rhs));
  rhs.coefficients[2] += 1;
  try {
    tf::require_equal_combs(lhs, rhs);
    FAIL();
  } catch (const tf::MismatchAt& e) {
    EXPECT_EQ(e.n(), 2);
    EXPECT_EQ(e.lhs(), "-3");
    EXPECT_EQ(e.rhs(), "-2");
  }
}

TEST(Pairing, SupportBetweenCombPoints) {
  const auto S = tf::toral_system(tf::ToralEndo::create(M("2")), "1");
  const auto c = tf::lhs_comb(S, {-5, 5});
  EXPECT_EQ(tf::pair_comb(c, tf::TestFunction::bump(0.5, 0.45)), 0);
  EXPECT_EQ(tf::pair_comb(c, tf::TestFunction::bump(2.5, 0.5)), 0);
}

TEST(Pairing, SpectralTowersMatchComb) {
  for (auto [m, l] : std::vector<std::pair<std::string, std::string>>{{"2", "1"}, {"2,1;1,1", "log 2"}}) {
    const auto S = tf::toral_system(tf::ToralEndo::create(M(m)), l);
    const auto phi = tf::TestFunction::bump(0.4, 2.2);
    const double comb = tf::pair_comb(tf::lhs_comb(S, tf::covering_range(phi, S.l)), phi);
    const auto sp = tf::spectral_pairing(S, phi);
    EXPECT_NEAR(sp.value.real(), comb, 1e-8) << m;
    EXPECT_LT(std::fabs(sp.value.imag()), 1e-8);
  }
}

TEST(CMBridge, GaussianCurveCoefficients) {
  const auto E = tf::make_curve(5, 1, 0);
  const auto S = tf::cm_system_from_curve(E);
  EXPECT_NEAR(S.l, std::log(5.0), 1e-15);
  const auto v = tf::verify_comb(S, {-12, 12});
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.lhs.at(1), 4);
  EXPECT_EQ(v.rhs.at(1), 4);
  EXPECT_EQ(v.lhs.at(-1), Rational(4, 5));
  for (long n = 1; n <= 6; ++n) {
    EXPECT_EQ(v.lhs.at(n), Rational(E.points_from_traces(n)));
    EXPECT_EQ(v.lhs.at(-n), Rational(E.points_from_traces(n), boost::multiprecision::pow(BigInt(5), n)));
  }
  EXPECT_EQ(v.lhs.at(2), 32);
}

TEST(CMBridge, PairingMatchesEllipticPrimeSide) {
  for (auto [p, A, B] : std::vector<std::tuple<std::uint64_t, long, long>>{{5, 1, 0}, {7, 1, 1}, {13, 1, 1}}) {
    const auto E = tf::make_curve(p, A, B);
    const auto S = tf::cm_system_from_curve(E);
    for (const auto& phi : {tf::TestFunction::bump(2.25, 1.25), tf::TestFunction::bump(-3, 1.8)}) {
      const double comb = tf::pair_comb(tf::rhs_comb(S, tf::covering_range(phi, S.l)), phi);
      EXPECT_NEAR(comb, tf::elliptic_prime_side(phi, E).value, 1e-10) << p;
    }
  }
}

TEST(CMBridge, SupersingularRejected) {
  try {
    tf::cm_system_from_curve(tf::make_curve(5, 0, 1));
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::NotOrdinary);
  }
}

TEST(ThetaSpectrum, GaussianCurve) {
  const auto r = tf::check_theta_spectrum(tf::cm_system_from_curve(tf::make_curve(5, 1, 0)));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.weil_norm);
  ASSERT_EQ(r.degrees.size(), 3u);
  EXPECT_EQ(r.degrees[0].real_part, 0);
  EXPECT_EQ(r.degrees[1].real_part, Rational(1, 2));
  EXPECT_EQ(r.degrees[2].real_part, 1);
  // log|1 + 2i| / log 5 = 1/2
  EXPECT_NEAR(r.degrees[1].base_eigenvalue.real(), 0.5, 1e-15);
  EXPECT_NEAR(r.degrees[1].base_eigenvalue.imag(), std::atan2(2.0, 1.0) / std::log(5.0), 1e-14);
}

TEST(ThetaSpectrum, NeedsCMSystem) {
  try {
    tf::check_theta_spectrum(tf::toral_system(tf::ToralEndo::create(M("2")), "1"));
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::NotCM);
  }
}

TEST(Config, SystemRoundTrip) {
  for (const char* text : {"[system]\nmatrix = 2,1;1,1\nl = log 2\n", "[system]\ncurve = 7,1,1\n", "[system]\ngenerator = sphere-rotation\nl = 0.5\n"}) {
    const auto S = tf::read_system_config(tf::ConfigDocument::parse(text));
    tf::ConfigDocument doc;
    tf::write_system_config(S, doc);
    const auto back = tf::read_system_config(tf::ConfigDocument::parse(doc.to_text()));
    EXPECT_EQ(back.name, S.name);
    EXPECT_EQ(back.l, S.l);
  }
}

TEST(Config, LengthParsing) {
  EXPECT_NEAR(tf::parse_length("log 5").first, std::log(5.0), 1e-16);
  EXPECT_EQ(tf::parse_length("log 5").second, "log 5");
  EXPECT_EQ(tf::parse_length("0.25").first, 0.25);
  EXPECT_THROW(tf::parse_length("-1"), tf::Error);
}

TEST(Config, CombCsv) {
  const auto S = tf::toral_system(tf::ToralEndo::create(M("2")), "1");
  const auto csv = tf::comb_csv(tf::lhs_comb(S, {-1, 1}));
  EXPECT_EQ(csv, "n,t,coefficient_over_l,weight\n-1,-1,1/2,0.5\n0,0,0,0\n1,1,-1,-1\n");
}
