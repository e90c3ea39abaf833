// Walks through the three families of checks with the library API.

#include <cstdio>

#include "trace_formulary/trace_formulary.hpp"

namespace tf = trace_formulary;

int main() {
  // Explicit formula over Q with zeros found by the Hardy Z scanner.
  const auto zeros = tf::validate_zeros(tf::scan_zeros("zeta", 100, 0.1), 1e-6).zeros;
  const auto phi = tf::with_unit_mass(tf::TestFunction::bump(2, 1));
  const auto r = tf::verify_explicit(phi, tf::NumberFieldDesc::rationals(), zeros);
  std::printf("explicit over Q: zero side %.12f, prime side %.12f, residual %.2e <= budget %.2e: %s\n", r.zero.value, r.prime.value,
              r.residual, r.budget, r.pass ? "pass" : "fail");

  // Cat map suspension: exact comb coefficients on both sides.
  const auto cat = tf::toral_system(tf::ToralEndo::create(tf::parse_int_matrix("2,1;1,1")), "log 2");
  const auto v = tf::verify_comb(cat, {-4, 4});
  std::printf("cat map comb %s:", v.pass ? "balances" : "differs");
  for (const auto& [n, c] : v.rhs.coefficients) std::printf(" c_%ld/l=%s", n, tf::exact::to_string(c).c_str());
  std::printf("\n");

  // y^2 = x^3 + x over F_5 as a suspension, paired with a bump.
  const auto E = tf::make_curve(5, 1, 0);
  const auto cm = tf::cm_system_from_curve(E);
  const auto bump = tf::TestFunction::bump(2.25, 1.25);
  std::printf("CM pairing %.15f, elliptic prime side %.15f\n", tf::pair_comb(tf::rhs_comb(cm, tf::covering_range(bump, cm.l)), bump),
              tf::elliptic_prime_side(bump, E).value);

  // Small denominators for the golden slope.
  for (const auto& e : tf::small_denominator_profile(tf::Slope::golden(), 100))
    std::printf("q=%ld  q*||q alpha|| = %.6f\n", e.q, e.q * e.distance);
  return r.pass && v.pass ? 0 : 1;
}
