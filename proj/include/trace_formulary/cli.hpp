#pragma once

// Batch front end shared by the trace_formulary binary and its tests. Needs
// nlohmann json (vendor/json.hpp) and OpenSSL libcrypto at link time.

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trace_formulary/trace_formulary.hpp"

namespace trace_formulary::cli {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kPass = 0, kIdentityFail = 1, kUsage = 2 };

// ---------------------------------------------------------------------------
// Configuration

/// Keys each subcommand understands, with defaults. An empty default means
/// the key is optional and unset.
inline const std::map<std::string, std::map<std::string, std::string>>& known_keys() {
  static const std::map<std::string, std::map<std::string, std::string>> keys{
      {"explicit",
       {{"field", "Q"}, {"curve", ""}, {"phi", "bump:2,1"}, {"zeros", ""}, {"zero_tol", "1e-6"}, {"format", "json"}, {"output", "-"}}},
      {"solenoid",
       {{"matrix", ""}, {"curve", ""}, {"generator", ""}, {"l", "1"}, {"range", "12"}, {"pair", ""}, {"tol", "1e-10"},
        {"format", "json"}, {"output", "-"}}},
      {"zeros scan", {{"label", "zeta"}, {"T", "50"}, {"step", "0.1"}, {"output", ""}}},
      {"zeros validate", {{"file", ""}, {"tol", "1e-6"}, {"output", "-"}}},
      {"folcoh", {{"alpha", "golden"}, {"N", "1000"}, {"cutoff", "50"}, {"format", "csv"}, {"modes", ""}, {"output", "-"}}},
  };
  return keys;
}

/// Keys holding paths; values read from a config file resolve against its directory.
inline bool is_path_key(const std::string& key) { return key == "zeros" || key == "file" || key == "output" || key == "modes"; }

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> values;  // fully resolved
  std::string config_path;                    // empty when no config file was given

  const std::string& get(const std::string& key) const {
    auto it = values.find(key);
    require(it != values.end(), ErrorKind::InvalidInput, "unknown option '" + key + "' for " + subcommand);
    return it->second;
  }
  bool has(const std::string& key) const { return !get(key).empty(); }
  double number(const std::string& key) const { return parse_double(get(key), key); }
  long integer(const std::string& key) const { return parse_long(get(key), key); }

  /// Zero files are comma separated.
  std::vector<std::string> paths(const std::string& key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    for (auto& s : split(get(key), ','))
      if (!s.empty()) out.push_back(s);
    return out;
  }

  /// Referenced input files exist, tolerances are positive, formats known.
  void validate() const {
    for (const char* key : {"zeros", "file"}) {
      if (!values.count(key)) continue;
      for (const auto& p : paths(key))
        require(std::filesystem::is_regular_file(p), ErrorKind::InvalidInput, "input file '" + p + "' does not exist");
    }
    for (const char* key : {"zero_tol", "tol"}) {
      if (!values.count(key)) continue;
      const double t = number(key);
      require(t > 0 && std::isfinite(t), ErrorKind::InvalidInput, std::string(key) + " must be positive");
    }
    if (values.count("format")) {
      const auto& f = get("format");
      require(f == "json" || f == "csv", ErrorKind::InvalidInput, "format must be json or csv, got '" + f + "'");
    }
  }
};

/// Defaults, then command-line flags, then the config file section named after
/// the subcommand (`[explicit]`, `[zeros scan]`, ...), each overriding the last.
inline RunConfig resolve_config(const std::string& subcommand, const std::map<std::string, std::string>& flags,
                                const std::string& config_path = {}) {
  auto known = known_keys().find(subcommand);
  require(known != known_keys().end(), ErrorKind::InvalidInput, "unknown subcommand '" + subcommand + "'");
  RunConfig c;
  c.subcommand = subcommand;
  c.values = known->second;
  for (const auto& [k, v] : flags) {
    require(c.values.count(k) > 0, ErrorKind::InvalidInput, "unknown option '" + k + "' for " + subcommand);
    c.values[k] = v;
  }
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::InvalidInput, "cannot open config file '" + config_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto doc = ConfigDocument::parse(ss.str());
    const auto base = std::filesystem::path(config_path).parent_path();
    for (const auto& [k, v] : doc.section(subcommand)) {
      require(c.values.count(k) > 0, ErrorKind::InvalidInput, config_path + ": unknown key '" + k + "' in [" + subcommand + "]");
      if (is_path_key(k) && v != "-" && !v.empty()) {
        std::string joined;
        for (const auto& p : split(v, ',')) {
          if (!joined.empty()) joined += ",";
          const std::filesystem::path path(p);
          joined += path.is_absolute() ? p : (base / path).lexically_normal().string();
        }
        c.values[k] = joined;
      } else {
        c.values[k] = v;
      }
    }
    c.config_path = config_path;
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Output

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::InvalidInput, "cannot open '" + path + "' for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// Fixed 17-significant-digit rendering; non-finite values become null.
inline std::string format_number17(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // keys are sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
      return;
    }
    case Json::value_t::number_float: out += format_number17(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Sorted keys, two-space indent, doubles at 17 significant digits.
inline std::string dump_report(const Json& j) {
  std::string out;
  detail::dump(j, out, 0);
  out += "\n";
  return out;
}

/// Temp file next to the target, then rename. "-" writes to stdout.
inline void write_atomic(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    return;
  }
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::InvalidInput, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorKind::InvalidInput, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorKind::InvalidInput, "cannot rename onto '" + path + "': " + ec.message());
  }
}

/// Report envelope: resolved config, input digests, result body, verdict.
inline Json envelope(const RunConfig& c, Json result, bool pass) {
  Json j;
  j["tool"] = "trace_formulary";
  j["version"] = kToolVersion;
  j["subcommand"] = c.subcommand;
  Json cfg = Json::object();
  for (const auto& [k, v] : c.values) cfg[k] = v;
  j["config"] = cfg;
  Json inputs = Json::array();
  if (!c.config_path.empty()) inputs.push_back({{"role", "config"}, {"path", c.config_path}, {"sha256", sha256_file(c.config_path)}});
  for (const char* key : {"zeros", "file"}) {
    if (!c.values.count(key)) continue;
    for (const auto& p : c.paths(key)) inputs.push_back({{"role", key}, {"path", p}, {"sha256", sha256_file(p)}});
  }
  j["inputs"] = inputs;
  j["result"] = std::move(result);
  j["pass"] = pass;
  j["exit_code"] = pass ? kPass : kIdentityFail;
  return j;
}

// ---------------------------------------------------------------------------
// Report bodies

inline Json to_json(const TestFunction& f) {
  return {{"kind", to_string(f.kind)}, {"center", f.center}, {"halfwidth", f.halfwidth}, {"amplitude", f.amplitude}};
}

inline Json to_json(const SideReport& s) {
  Json comps = Json::array(), budget = Json::array();
  for (const auto& c : s.components) comps.push_back({{"label", c.label}, {"value", c.value}});
  for (const auto& b : s.budget) budget.push_back({{"label", b.label}, {"value", b.value}});
  Json j{{"value", s.value}, {"components", comps}, {"budget", budget}, {"error_budget", s.error_budget}};
  if (s.zeros_used) {
    j["zeros_used"] = s.zeros_used;
    j["tail_order"] = s.tail_order;
    j["imaginary_residual"] = s.imaginary_residual;
  }
  if (!s.terms.empty()) {
    j["prime_power_terms"] = s.terms.size();
    j["enumeration_bound"] = s.enumeration_bound;
  }
  return j;
}

inline Json to_json(const ExplicitReport& r) {
  return {{"formula", r.formula},   {"zero_side", to_json(r.zero)}, {"prime_side", to_json(r.prime)},
          {"residual", r.residual}, {"budget", r.budget},           {"relative_floor", r.relative_floor},
          {"phi0", r.phi0},         {"pass", r.pass}};
}

inline Json to_json(const DeltaComb& c) {
  Json coeffs = Json::object();
  for (const auto& [n, v] : c.coefficients) coeffs[std::to_string(n)] = exact::to_string(v);
  return {{"l", c.l}, {"l_text", c.l_text}, {"coefficients_over_l", coeffs}};
}

// ---------------------------------------------------------------------------
// Subcommands

namespace detail {

inline ZeroList load_validated_zeros(const RunConfig& c) {
  const auto files = c.paths("zeros");
  require(!files.empty(), ErrorKind::InvalidInput, "explicit needs --zeros (one or more zero files)");
  ZeroList z = read_zero_file(files[0]);
  for (std::size_t i = 1; i < files.size(); ++i) z = merge(z, read_zero_file(files[i]));
  return validate_zeros(z, c.number("zero_tol")).zeros;
}

inline int finish(const RunConfig& c, const Json& result, bool pass, const std::string& csv) {
  const bool as_csv = c.values.count("format") && c.get("format") == "csv";
  write_atomic(c.get("output"), as_csv ? csv : dump_report(envelope(c, result, pass)));
  return pass ? kPass : kIdentityFail;
}

}  // namespace detail

inline int run_explicit(const RunConfig& c) {
  const auto phi = parse_test_function(c.get("phi"));
  ExplicitReport r;
  Json result;
  if (c.has("curve")) {
    const auto E = parse_curve(c.get("curve"));
    r = verify_elliptic_explicit(phi, E);
    result = to_json(r);
    result["curve"] = {{"p", E.p}, {"A", E.A}, {"B", E.B}, {"a_p", E.a_p}};
  } else {
    const auto K = parse_field(c.get("field"));
    const auto z = detail::load_validated_zeros(c);
    r = verify_explicit(phi, K, z);
    result = to_json(r);
    result["field"] = {{"label", K.label()}, {"discriminant", K.discriminant()}, {"log_abs_discriminant", K.log_abs_discriminant()}};
    result["zeros"] = {{"label", z.label}, {"count", z.size()}, {"height", z.height}};
  }
  result["phi"] = to_json(phi);
  return detail::finish(c, result, r.pass, prime_terms_csv(r.prime));
}

inline SuspensionSystem system_from_config(const RunConfig& c) {
  const int sources = int(c.has("matrix")) + int(c.has("curve")) + int(c.has("generator"));
  require(sources == 1, ErrorKind::InvalidInput, "solenoid needs exactly one of --matrix, --curve, --generator");
  ConfigDocument doc;
  for (const char* k : {"matrix", "curve", "generator", "l"})
    if (c.has(k)) doc.set("system", k, c.get(k));
  return read_system_config(doc);
}

inline int run_solenoid(const RunConfig& c) {
  const auto S = system_from_config(c);
  audit_generator(S);
  const long R = c.integer("range");
  require(R >= 0 && R <= 64, ErrorKind::InvalidInput, "range must be in 0..64");
  CombRange range{-R, R};
  std::optional<TestFunction> phi;
  if (c.has("pair")) {
    phi = parse_test_function(c.get("pair"));
    const auto cover = covering_range(*phi, S.l);
    range.lo = std::min(range.lo, cover.lo);
    range.hi = std::max(range.hi, cover.hi);
    require(range.hi - range.lo <= 256, ErrorKind::InvalidInput, "pairing support needs more than 256 comb points");
  }
  const auto v = verify_comb(S, range);
  Json result{{"system", S.name},
              {"l", S.l},
              {"l_text", S.l_text},
              {"euler_characteristic", S.euler_characteristic},
              {"range", {range.lo, range.hi}},
              {"lhs", to_json(v.lhs)},
              {"rhs", to_json(v.rhs)},
              {"mismatches", v.mismatches},
              {"comb_pass", v.pass}};
  bool pass = v.pass;
  if (phi) {
    const double tol = c.number("tol");
    const double comb_value = pair_comb(v.rhs, *phi);
    const auto sp = spectral_pairing(S, *phi);
    const double diff = std::abs(sp.value - Complex(comb_value));
    const bool spectral_ok = diff <= tol + sp.error_bound;
    Json pairing{{"phi", to_json(*phi)},
                 {"comb", comb_value},
                 {"spectral_real", sp.value.real()},
                 {"spectral_imag", sp.value.imag()},
                 {"spectral_error_bound", sp.error_bound},
                 {"towers", sp.towers},
                 {"difference", diff},
                 {"tolerance", tol},
                 {"pass", spectral_ok}};
    pass = pass && spectral_ok;
    if (S.cm) {
      const auto E = parse_curve(c.get("curve"));
      const auto prime = elliptic_prime_side(*phi, E);
      const double d = std::fabs(prime.value - comb_value);
      const bool ok = d <= tol;
      pairing["elliptic_prime_side"] = prime.value;
      pairing["elliptic_difference"] = d;
      pairing["elliptic_pass"] = ok;
      pass = pass && ok;
    }
    result["pairing"] = pairing;
  }
  if (S.cm) {
    const auto t = check_theta_spectrum(S);
    Json degrees = Json::array();
    for (const auto& d : t.degrees)
      degrees.push_back({{"degree", d.degree},
                         {"dimension", d.dimension},
                         {"determinant", exact::to_string(d.determinant)},
                         {"real_part", exact::to_string(d.real_part)},
                         {"equal_moduli", d.equal_moduli}});
    result["theta_spectrum"] = {{"p", t.p}, {"a_p", t.a_p}, {"weil_norm", t.weil_norm}, {"degrees", degrees}, {"pass", t.pass}};
    pass = pass && t.pass;
  }
  return detail::finish(c, result, pass, comb_csv(v.rhs));
}

inline int run_zeros_scan(const RunConfig& c) {
  const auto z = scan_zeros(c.get("label"), c.number("T"), c.number("step"));
  std::string out = c.get("output");
  if (out.empty()) {
    out = "zeros_" + c.get("label") + ".txt";
    for (char& ch : out)
      if (ch == ':' || ch == '*' || ch == '/') ch = '_';
  }
  write_atomic(out, to_text(z));
  std::cerr << z.size() << " zeros of " << z.label << " up to T = " << z.height_text << " written to " << out << "\n";
  return kPass;
}

inline int run_zeros_validate(const RunConfig& c) {
  require(c.has("file"), ErrorKind::InvalidInput, "zeros validate needs --file");
  const auto z = read_zero_file(c.get("file"));
  Json result{{"label", z.label}, {"height", z.height}, {"count", z.size()}, {"tolerance", c.number("tol")}};
  bool pass = true;
  try {
    const auto r = validate_zeros(z, c.number("tol"));
    result["expected_count"] = r.expected_count;
    result["count_ok"] = r.count_ok;
    result["max_magnitude"] = r.max_magnitude;
    result["warning"] = r.warning;
  } catch (const ValidationFailed& e) {
    pass = false;
    result["failed_ordinate"] = e.ordinate();
    result["failed_magnitude"] = e.magnitude();
    result["message"] = e.what();
  }
  write_atomic(c.get("output"), dump_report(envelope(c, result, pass)));
  return pass ? kPass : kIdentityFail;
}

inline int run_folcoh(const RunConfig& c) {
  const auto alpha = parse_slope(c.get("alpha"));
  require(!alpha.rational(), ErrorKind::RationalSlope, "slope '" + c.get("alpha") + "' is rational");
  const long N = c.integer("N"), cutoff = c.integer("cutoff");
  require(cutoff >= 1 && cutoff <= 400, ErrorKind::InvalidInput, "cutoff must be in 1..400");
  const auto profile = small_denominator_profile(alpha, N);
  const auto P = TorusFoliationProblem::on_box(alpha, cutoff, smooth_source);
  const auto s = solve_cohomological(P);
  const auto b = bounded_type_check(P, s);
  const auto pred = convergent_prediction(P, s);
  bool monotone = true;
  for (std::size_t i = 1; i < profile.size(); ++i) monotone = monotone && profile[i].distance <= profile[i - 1].distance;
  if (c.has("modes")) write_atomic(c.get("modes"), modes_csv(s));
  Json prof = Json::array();
  for (const auto& e : profile) prof.push_back({{"q", e.q}, {"p", e.p}, {"min_distance", e.distance}});
  Json result{{"alpha", alpha.label},
              {"alpha_value", alpha.value()},
              {"N", N},
              {"profile", prof},
              {"profile_non_increasing", monotone},
              {"max_abs_u", s.max_abs_u},
              {"bounded_type", {{"K", b.K}, {"worst_ratio", b.worst_ratio}, {"max_bound", b.max_bound}, {"pass", b.pass}}},
              {"convergent_prediction",
               {{"predicted", pred.predicted}, {"q", pred.q}, {"p", pred.p}, {"measured", pred.measured}, {"ratio", pred.ratio}}}};
  return detail::finish(c, result, monotone && b.pass, profile_csv(profile));
}

/// Dispatches one run; every engine error becomes exit 2 with a diagnostic.
inline int run(const RunConfig& c, std::ostream& diag = std::cerr) {
  try {
    if (c.subcommand == "explicit") return run_explicit(c);
    if (c.subcommand == "solenoid") return run_solenoid(c);
    if (c.subcommand == "zeros scan") return run_zeros_scan(c);
    if (c.subcommand == "zeros validate") return run_zeros_validate(c);
    if (c.subcommand == "folcoh") return run_folcoh(c);
    fail(ErrorKind::InvalidInput, "unknown subcommand '" + c.subcommand + "'");
  } catch (const Error& e) {
    diag << "trace_formulary " << c.subcommand << ": " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace trace_formulary::cli
