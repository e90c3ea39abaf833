#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "trace_formulary/folcoh.hpp"

namespace tf = trace_formulary;
using tf::Complex;

namespace {

const long double kGolden = (1.0L + std::sqrt(5.0L)) / 2;

tf::TorusFoliationProblem single_mode(const tf::Slope& a, long m, long n, Complex g) {
  tf::TorusFoliationProblem P{a, {}, std::max(std::labs(m), std::labs(n))};
  P.source[{m, n}] = g;
  P.source[{-m, -n}] = std::conj(g);
  return P;
}

}  // namespace

TEST(Slope, GoldenValueAndConvergents) {
  const auto g = tf::Slope::golden();
  EXPECT_NEAR(g.value(), static_cast<double>(kGolden), 1e-16);
  const auto c = g.convergents(100);
  ASSERT_GE(c.size(), 3u);
  EXPECT_EQ(c[0].p, 1);
  EXPECT_EQ(c[0].q, 1);
  EXPECT_EQ(c[1].p, 2);
  EXPECT_EQ(c[1].q, 1);
  for (std::size_t k = 2; k < c.size(); ++k) {
    EXPECT_EQ(c[k].q, c[k - 1].q + c[k - 2].q) << k;
    EXPECT_EQ(c[k].p, c[k - 1].p + c[k - 2].p) << k;
  }
}

TEST(Slope, Parsing) {
  EXPECT_EQ(tf::parse_slope("golden").label, "golden");
  const auto l = tf::parse_slope("cf:0;1,10000");
  EXPECT_EQ(l.partial_quotient(2), 10000);
  EXPECT_EQ(l.partial_quotient(3), 1);
  EXPECT_EQ(l.max_partial_quotient(), 10000);
  const auto p = tf::parse_slope("cf:0;1,2|3,4");
  EXPECT_EQ(p.partial_quotient(3), 3);
  EXPECT_EQ(p.partial_quotient(4), 4);
  EXPECT_EQ(p.partial_quotient(5), 3);
  EXPECT_NEAR(tf::parse_slope("sqrt2").value(), std::sqrt(2.0), 1e-16);
  EXPECT_TRUE(tf::parse_slope("rational:3/7").rational());
  EXPECT_NEAR(tf::parse_slope("0.7071067811865476").value(), 0.7071067811865476, 1e-15);
}

TEST(Slope, CompleteQuotientRespectsPeriodPhase) {
  const auto s = tf::parse_slope("cf:0;1|2,5");
  // alpha'_3 = [5; 2, 5, 2, ...]
  const double x = s.complete_quotient(3).convert_to<double>();
  const double y = s.complete_quotient(4).convert_to<double>();
  EXPECT_NEAR(x, 5 + 1 / y, 1e-15);
  EXPECT_NEAR(y, 2 + 1 / x, 1e-15);
}

TEST(Solve, SingleModeGolden) {
  const auto s = tf::solve_cohomological(single_mode(tf::Slope::golden(), 1, 0, Complex(0.3, 0.4)));
  EXPECT_NEAR(s.max_abs_u, 0.5 / (2 * std::numbers::pi * static_cast<double>(kGolden)), 1e-16);
}

TEST(Solve, ZeroSourceGivesZero) {
  const auto P = tf::TorusFoliationProblem::on_box(tf::Slope::golden(), 5, [](long, long) { return Complex(0); });
  const auto s = tf::solve_cohomological(P);
  for (const auto& m : s.modes) EXPECT_EQ(m.u, Complex(0));
  EXPECT_EQ(s.max_abs_u, 0);
}

TEST(Solve, RationalSlopeRejected) {
  try {
    tf::solve_cohomological(single_mode(tf::parse_slope("rational:2/3"), 1, 0, 1));
    FAIL();
  } catch (const tf::Error& e) {
    EXPECT_EQ(e.kind(), tf::ErrorKind::RationalSlope);
  }
}

TEST(Solve, NonRealSourceRejected) {
  tf::TorusFoliationProblem P{tf::Slope::golden(), {}, 2};
  P.source[{1, 0}] = Complex(1, 1);
  P.source[{-1, 0}] = Complex(1, 1);
  EXPECT_THROW(tf::solve_cohomological(P), tf::Error);
  P.source[{-1, 0}] = Complex(1, -1);
  P.source[{0, 0}] = 1;
  EXPECT_THROW(tf::solve_cohomological(P), tf::Error);
}

TEST(Solve, LeafwiseOperatorRoundTrip) {
  const auto P = tf::TorusFoliationProblem::on_box(tf::parse_slope("sqrt2"), 30, tf::smooth_source);
  const auto s = tf::solve_cohomological(P);
  for (const auto& m : s.modes) {
    const Complex back = Complex(0, 2 * std::numbers::pi * m.denominator) * m.u;
    EXPECT_LE(std::abs(back - m.g), 2 * std::numeric_limits<double>::epsilon() * std::abs(m.g));
  }
}

TEST(Solve, DenominatorsMatchLongDoubleOracle) {
  const auto P = tf::TorusFoliationProblem::on_box(tf::Slope::golden(), 40, tf::smooth_source);
  for (const auto& m : tf::solve_cohomological(P).modes) {
    const long double d = m.m * kGolden + m.n;
    EXPECT_NEAR(m.denominator, static_cast<double>(d), 1e-16 * (1 + std::fabs(double(m.m)))) << m.m << "," << m.n;
  }
}

TEST(Solve, GoldenBoundedTypeSuite) {
  const auto P = tf::TorusFoliationProblem::on_box(tf::Slope::golden(), 50, tf::smooth_source);
  const auto s = tf::solve_cohomological(P);
  const auto b = tf::bounded_type_check(P, s);
  EXPECT_EQ(b.K, 1);
  EXPECT_TRUE(b.pass);
  EXPECT_LE(b.worst_ratio, 1);
  EXPECT_LE(s.max_abs_u, b.max_bound);
  // independent lower bound: ||m alpha|| >= min over q <= |m| by brute force, and >= 1/(3|m|)
  for (long m = 1; m <= 50; ++m) EXPECT_GE(oracles::brute_min_distance(kGolden, m) * 3 * m, 1.0L) << m;
}

TEST(Solve, LiouvilleInflationMatchesConvergentPrediction) {
  const auto P = tf::TorusFoliationProblem::on_box(tf::parse_slope("cf:0;1,10000"), 50, tf::smooth_source);
  const auto s = tf::solve_cohomological(P);
  const auto c = tf::convergent_prediction(P, s);
  EXPECT_GE(c.ratio, 0.5);
  EXPECT_LE(c.ratio, 2);
  EXPECT_EQ(c.q, 1);
  EXPECT_EQ(c.p, 1);
  const auto golden = tf::solve_cohomological(tf::TorusFoliationProblem::on_box(tf::Slope::golden(), 50, tf::smooth_source));
  EXPECT_GT(s.max_abs_u / golden.max_abs_u, 1000);
}

TEST(Solve, LiouvilleGrowthTracksPartialQuotients) {
  double prev_measured = 0, prev_predicted = 0;
  for (int j = 1; j <= 5; ++j) {
    const auto slope = tf::Slope::continued_fraction({0, 1, static_cast<long>(std::pow(10, j))}, {1});
    const auto P = tf::TorusFoliationProblem::on_box(slope, 50, tf::smooth_source);
    const auto s = tf::solve_cohomological(P);
    const auto c = tf::convergent_prediction(P, s);
    if (j > 1) {
      const double growth = s.max_abs_u / prev_measured, predicted = c.predicted / prev_predicted;
      EXPECT_GE(growth / predicted, 0.5);
      EXPECT_LE(growth / predicted, 2);
    }
    prev_measured = s.max_abs_u;
    prev_predicted = c.predicted;
  }
}

TEST(Profile, GoldenFibonacciBreakpoints) {
  const auto prof = tf::small_denominator_profile(tf::Slope::golden(), 100000);
  long a = 1, b = 2;
  ASSERT_GE(prof.size(), 20u);
  EXPECT_EQ(prof[0].q, 1);
  for (std::size_t i = 1; i < prof.size(); ++i) {
    EXPECT_EQ(prof[i].q, b) << i;
    const long c = a + b;
    a = b;
    b = c;
  }
  const double lower = 1 / std::sqrt(5.0) - 0.015;
  for (const auto& e : prof) {
    if (e.q < 2) continue;
    EXPECT_GE(e.q * e.distance, lower) << e.q;
    EXPECT_LE(e.q * e.distance, 1.0);
  }
}

TEST(Profile, MatchesBruteForceRunningMinimum) {
  const auto prof = tf::small_denominator_profile(tf::Slope::golden(), 3000);
  for (const auto& e : prof) {
    const long double brute = oracles::brute_min_distance(kGolden, e.q);
    EXPECT_NEAR(e.distance, static_cast<double>(brute), 1e-15) << e.q;
    if (e.q > 1) EXPECT_LT(static_cast<double>(oracles::brute_min_distance(kGolden, e.q - 1)), 1.0) << e.q;
  }
}

TEST(Profile, LiouvilleDropAtSecondConvergent) {
  const auto prof = tf::small_denominator_profile(tf::parse_slope("cf:0;1,10000"), 1000000);
  ASSERT_GE(prof.size(), 2u);
  EXPECT_EQ(prof[0].q, 1);
  // ||alpha|| = 1 - alpha is about 1e-4
  EXPECT_NEAR(prof[0].distance, 1e-4, 2e-8);
  EXPECT_EQ(prof[1].q, 10001);
}

TEST(Profile, NonIncreasing) {
  for (const char* s : {"golden", "sqrt2", "cf:0;1,10000", "cf:3;7,15,1,292", "0.123456789"}) {
    const auto prof = tf::small_denominator_profile(tf::parse_slope(s), 1000000);
    for (std::size_t i = 1; i < prof.size(); ++i) {
      EXPECT_LE(prof[i].distance, prof[i - 1].distance) << s;
      EXPECT_GT(prof[i].q, prof[i - 1].q) << s;
    }
  }
}

TEST(Profile, DirectDistanceAgreesWithConvergentFormula) {
  const auto slope = tf::parse_slope("cf:3;7,15,1,292");
  const auto alpha = slope.value_hp();
  for (const auto& e : tf::small_denominator_profile(slope, 1000000)) {
    const double direct = abs(alpha * e.q - e.p).convert_to<double>();
    EXPECT_NEAR(e.distance, direct, 1e-15 * std::max(1.0, direct)) << e.q;
  }
}

TEST(Output, CsvColumns) {
  const auto prof = tf::small_denominator_profile(tf::Slope::golden(), 10);
  EXPECT_EQ(tf::profile_csv(prof).substr(0, 15), "q,min_distance\n");
  const auto s = tf::solve_cohomological(single_mode(tf::Slope::golden(), 1, 0, 1));
  const auto csv = tf::modes_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,n,abs_g,abs_denominator,abs_u");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
