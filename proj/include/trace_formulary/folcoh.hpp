#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "trace_formulary/config.hpp"
#include "trace_formulary/error.hpp"
#include "trace_formulary/exact.hpp"
#include "trace_formulary/parallel.hpp"
#include "trace_formulary/special.hpp"

namespace trace_formulary {

using Float50 = boost::multiprecision::cpp_bin_float_50;

/// Slope alpha as a continued fraction [a_0; a_1, a_2, ...]: the head followed
/// by the period repeated forever. An empty period means alpha is rational.
struct Slope {
  std::vector<long> head;
  std::vector<long> period;
  std::string label;

  bool rational() const { return period.empty(); }

  std::size_t known_terms() const { return head.size(); }

  long partial_quotient(std::size_t k) const {
    if (k < head.size()) return head[k];
    require(!period.empty(), ErrorKind::InvalidInput, "terminating continued fraction has no term " + std::to_string(k));
    return period[(k - head.size()) % period.size()];
  }

  /// Largest a_k for k >= 1 (the bounded-type constant K).
  long max_partial_quotient() const {
    long K = 0;
    for (std::size_t k = 1; k < head.size(); ++k) K = std::max(K, head[k]);
    for (long a : period) K = std::max(K, a);
    return K;
  }

  static Slope continued_fraction(std::vector<long> head, std::vector<long> period, std::string label = "") {
    require(!head.empty(), ErrorKind::InvalidInput, "continued fraction needs a_0");
    for (std::size_t k = 1; k < head.size(); ++k)
      require(head[k] >= 1, ErrorKind::InvalidInput, "partial quotients a_k (k >= 1) must be positive");
    for (long a : period) require(a >= 1, ErrorKind::InvalidInput, "periodic partial quotients must be positive");
    if (label.empty()) {
      label = "cf:" + std::to_string(head[0]);
      for (std::size_t k = 1; k < head.size(); ++k) label += (k == 1 ? ";" : ",") + std::to_string(head[k]);
      if (!period.empty()) {
        label += "|";
        for (std::size_t k = 0; k < period.size(); ++k) label += (k ? "," : "") + std::to_string(period[k]);
      }
    }
    return Slope{std::move(head), std::move(period), std::move(label)};
  }

  /// (1 + sqrt 5) / 2 = [1; 1, 1, ...].
  static Slope golden() { return continued_fraction({1}, {1}, "golden"); }

  static Slope rational_slope(long p, long q) {
    require(q > 0, ErrorKind::InvalidInput, "rational slope needs a positive denominator");
    std::vector<long> terms;
    long a = p, b = q;
    while (b != 0) {
      long t = a / b;
      if (a % b != 0 && (a < 0) != (b < 0)) --t;
      terms.push_back(t);
      const long r = a - t * b;
      a = b;
      b = r;
    }
    return Slope{terms, {}, "rational:" + std::to_string(p) + "/" + std::to_string(q)};
  }

  /// The binary value of x expanded until the denominator passes 1e8, then
  /// continued with ones so the slope is irrational.
  static Slope from_decimal(double x, const std::string& text) {
    require(std::isfinite(x), ErrorKind::InvalidInput, "slope must be finite");
    exact::Rational r(x);
    std::vector<long> head;
    exact::BigInt q_prev = 0, q = 1;
    while (true) {
      const exact::BigInt num = numerator(r), den = denominator(r);
      exact::BigInt a = num / den;
      if (num < 0 && a * den != num) --a;
      head.push_back(a.convert_to<long>());
      const exact::BigInt q_next = a * q + q_prev;
      if (head.size() > 1) {
        q_prev = q;
        q = q_next;
      }
      r -= exact::Rational(a);
      if (r == 0 || q > 100000000) break;
      r = 1 / r;
    }
    return Slope{std::move(head), {1}, text};
  }

  struct Convergent {
    std::size_t k;
    exact::BigInt p, q;
  };

  /// p_k / q_k for k = 0.. while q_k <= q_limit, plus the last one past it.
  std::vector<Convergent> convergents(const exact::BigInt& q_limit) const {
    std::vector<Convergent> out;
    exact::BigInt p_prev = 1, q_prev = 0, p = partial_quotient(0), q = 1;
    out.push_back({0, p, q});
    for (std::size_t k = 1; q <= q_limit; ++k) {
      if (rational() && k >= head.size()) break;
      const long a = partial_quotient(k);
      const exact::BigInt pn = a * p + p_prev, qn = a * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
      out.push_back({k, p, q});
    }
    return out;
  }

  /// alpha to about 50 digits: a convergent with q > 10^30.
  Float50 value_hp() const {
    const auto c = convergents(exact::BigInt("1000000000000000000000000000000")).back();
    return Float50(c.p) / Float50(c.q);
  }

  double value() const { return value_hp().convert_to<double>(); }

  /// alpha'_k = [a_k; a_{k+1}, ...].
  Float50 complete_quotient(std::size_t k) const {
    if (rational() && k >= head.size()) return Float50(0);
    Slope tail;
    if (k < head.size()) {
      tail.head.assign(head.begin() + static_cast<long>(k), head.end());
      tail.period = period;
    } else {
      tail.head = {partial_quotient(k)};
      tail.period = period;
      std::rotate(tail.period.begin(), tail.period.begin() + static_cast<long>((k + 1 - head.size()) % period.size()),
                  tail.period.end());
    }
    return tail.value_hp();
  }
};

/// "golden", "sqrt2", "cf:0;1,10000" (continued with ones), "cf:0;1,2|3,4"
/// (period 3,4), "rational:p/q", or a decimal.
inline Slope parse_slope(const std::string& text_in) {
  const std::string text = ConfigDocument::trim(text_in);
  if (text == "golden") return Slope::golden();
  if (text == "sqrt2") return Slope::continued_fraction({1}, {2}, "sqrt2");
  if (text.rfind("rational:", 0) == 0) {
    const auto f = split(text.substr(9), '/');
    require(f.size() == 2, ErrorKind::InvalidInput, "rational slope must be p/q");
    return Slope::rational_slope(parse_long(f[0], "slope numerator"), parse_long(f[1], "slope denominator"));
  }
  if (text.rfind("cf:", 0) == 0) {
    const auto parts = split(text.substr(3), '|');
    require(parts.size() <= 2, ErrorKind::InvalidInput, "continued fraction has at most one period");
    const auto lead = split(parts[0], ';');
    require(lead.size() <= 2, ErrorKind::InvalidInput, "continued fraction must be a0;a1,a2,...");
    std::vector<long> head{parse_long(lead[0], "a_0")};
    if (lead.size() == 2)
      for (const auto& a : split(lead[1], ',')) head.push_back(parse_long(a, "partial quotient"));
    std::vector<long> period{1};
    if (parts.size() == 2) {
      period.clear();
      for (const auto& a : split(parts[1], ',')) period.push_back(parse_long(a, "periodic partial quotient"));
    }
    return Slope::continued_fraction(head, period, text);
  }
  return Slope::from_decimal(parse_double(text, "slope"), text);
}

using ModeIndex = std::pair<long, long>;

/// d_F u = g on T^2 for d_F = alpha d/dx + d/dy, in Fourier modes (m, n).
struct TorusFoliationProblem {
  Slope alpha;
  std::map<ModeIndex, Complex> source;
  long cutoff = 50;

  /// All modes with |m|, |n| <= cutoff except (0, 0), coefficients g(m, n).
  static TorusFoliationProblem on_box(Slope alpha, long cutoff, const std::function<Complex(long, long)>& g) {
    require(cutoff >= 1 && cutoff <= 2000, ErrorKind::InvalidInput, "mode cutoff must be in 1..2000");
    TorusFoliationProblem P{std::move(alpha), {}, cutoff};
    for (long m = -cutoff; m <= cutoff; ++m)
      for (long n = -cutoff; n <= cutoff; ++n)
        if (m != 0 || n != 0) P.source[{m, n}] = g(m, n);
    return P;
  }

  void validate() const {
    for (const auto& [mn, g] : source) {
      const auto [m, n] = mn;
      require(m != 0 || n != 0, ErrorKind::InvalidInput, "source has a (0,0) mode; the leafwise average must vanish");
      require(std::labs(m) <= cutoff && std::labs(n) <= cutoff, ErrorKind::InvalidInput, "source mode outside the cutoff");
      auto it = source.find({-m, -n});
      require(it != source.end() && it->second == std::conj(g), ErrorKind::InvalidInput,
              "source is not real: g(-m,-n) != conj g(m,n) at (" + std::to_string(m) + "," + std::to_string(n) + ")");
    }
  }
};

/// 1 / (1 + m^2 + n^2).
inline Complex smooth_source(long m, long n) { return 1.0 / (1.0 + double(m) * m + double(n) * n); }

struct ModeSolution {
  long m = 0, n = 0;
  Complex g, u;
  double denominator = 0;  // m alpha + n
};

struct FoliationSolution {
  std::vector<ModeSolution> modes;
  double max_abs_u = 0;
  ModeIndex argmax{0, 0};
};

/// u(m,n) = g(m,n) / (2 pi i (m alpha + n)) with m alpha + n formed at 50 digits.
inline FoliationSolution solve_cohomological(const TorusFoliationProblem& P) {
  if (P.alpha.rational())
    fail(ErrorKind::RationalSlope, "slope " + P.alpha.label + " is rational; the leafwise equation has resonant modes");
  P.validate();
  const Float50 alpha = P.alpha.value_hp();
  std::vector<std::pair<ModeIndex, Complex>> entries(P.source.begin(), P.source.end());
  FoliationSolution s;
  s.modes = ordered_parallel_map(entries.size(), [&](std::size_t i) {
    ModeSolution ms;
    ms.m = entries[i].first.first;
    ms.n = entries[i].first.second;
    ms.g = entries[i].second;
    ms.denominator = (alpha * ms.m + ms.n).convert_to<double>();
    ms.u = ms.g / Complex(0, 2 * std::numbers::pi * ms.denominator);
    return ms;
  });
  for (const auto& ms : s.modes)
    if (std::abs(ms.u) > s.max_abs_u) {
      s.max_abs_u = std::abs(ms.u);
      s.argmax = {ms.m, ms.n};
    }
  return s;
}

struct ProfileEntry {
  long q = 0, p = 0;
  double distance = 0;  // min over 1 <= q' <= q of ||q' alpha||
};

/// The running minimum of ||q alpha|| over 1 <= q <= N changes only at
/// convergent denominators, where it equals
/// ||q_k alpha|| = 1 / (q_k alpha'_{k+1} + q_{k-1}).
/// Entries are listed at those breakpoints; a repeated q keeps the later convergent.
inline std::vector<ProfileEntry> small_denominator_profile(const Slope& alpha, long N) {
  require(N >= 1 && N <= 1000000, ErrorKind::InvalidInput, "profile bound N must be in 1..1e6");
  const auto conv = alpha.convergents(exact::BigInt(N));
  std::vector<ProfileEntry> out;
  exact::BigInt q_prev = 0;
  for (const auto& c : conv) {
    if (c.q > N) break;
    ProfileEntry e{c.q.convert_to<long>(), c.p.convert_to<long>(), 0};
    const bool last_term = alpha.rational() && c.k + 1 >= alpha.head.size();
    if (!last_term) {
      const Float50 d = 1 / (Float50(c.q) * alpha.complete_quotient(c.k + 1) + Float50(q_prev));
      e.distance = d.convert_to<double>();
    }
    if (!out.empty() && out.back().q == e.q) out.back() = e;
    else out.push_back(e);
    q_prev = c.q;
  }
  return out;
}

struct BoundedTypeCheck {
  long K = 0;
  double worst_ratio = 0;  // max over m != 0 of 2 pi |u| / ((K + 2) |m| |g|)
  double max_abs_u = 0;
  double max_bound = 0;    // (K + 2) N max|g| / (2 pi)
  bool pass = false;
};

/// For partial quotients bounded by K, ||m alpha|| > 1 / ((K + 2) |m|), hence
/// 2 pi |u(m,n)| <= (K + 2) |m| |g(m,n)| for m != 0.
inline BoundedTypeCheck bounded_type_check(const TorusFoliationProblem& P, const FoliationSolution& s) {
  require(!P.alpha.rational(), ErrorKind::RationalSlope, "bounded-type check needs an irrational slope");
  BoundedTypeCheck b;
  b.K = P.alpha.max_partial_quotient();
  double max_g = 0;
  for (const auto& ms : s.modes) {
    max_g = std::max(max_g, std::abs(ms.g));
    if (ms.m == 0 || ms.g == Complex(0)) continue;
    const double ratio = 2 * std::numbers::pi * std::abs(ms.u) / ((b.K + 2) * std::labs(ms.m) * std::abs(ms.g));
    b.worst_ratio = std::max(b.worst_ratio, ratio);
  }
  b.max_abs_u = s.max_abs_u;
  b.max_bound = (b.K + 2) * static_cast<double>(P.cutoff) * max_g / (2 * std::numbers::pi);
  b.pass = b.worst_ratio <= 1 && b.max_abs_u <= b.max_bound;
  return b;
}

struct ConvergentPrediction {
  double predicted = 0;  // max over convergents in range of |g(q_k, -p_k)| / (2 pi ||q_k alpha||)
  long q = 0, p = 0;
  double measured = 0;
  double ratio = 0;      // measured / predicted
};

/// Predicts max|u| from the resonant modes (q_k, -p_k) alone.
inline ConvergentPrediction convergent_prediction(const TorusFoliationProblem& P, const FoliationSolution& s) {
  ConvergentPrediction c;
  for (const auto& e : small_denominator_profile(P.alpha, P.cutoff)) {
    auto it = P.source.find({e.q, -e.p});
    if (it == P.source.end() || e.distance == 0) continue;
    const double v = std::abs(it->second) / (2 * std::numbers::pi * e.distance);
    if (v > c.predicted) {
      c.predicted = v;
      c.q = e.q;
      c.p = e.p;
    }
  }
  c.measured = s.max_abs_u;
  c.ratio = c.predicted > 0 ? c.measured / c.predicted : 0;
  return c;
}

inline std::string modes_csv(const FoliationSolution& s) {
  std::string out = "m,n,abs_g,abs_denominator,abs_u\n";
  for (const auto& ms : s.modes)
    out += std::to_string(ms.m) + "," + std::to_string(ms.n) + "," + format_decimal(std::abs(ms.g)) + "," +
           format_decimal(std::abs(ms.denominator)) + "," + format_decimal(std::abs(ms.u)) + "\n";
  return out;
}

inline std::string profile_csv(const std::vector<ProfileEntry>& profile) {
  std::string out = "q,min_distance\n";
  for (const auto& e : profile) out += std::to_string(e.q) + "," + format_decimal(e.distance) + "\n";
  return out;
}

}  // namespace trace_formulary
