#include <map>
#include <string>

#include "CLI11.hpp"
#include "trace_formulary/cli.hpp"

namespace cli = trace_formulary::cli;

namespace {

struct Sub {
  CLI::App* app = nullptr;
  std::string name;
  std::map<std::string, std::string> values;
  std::string config;
};

// Registers one string option per known key; only flags actually given are
// forwarded, so config file values can still override defaults.
void add_options(Sub& s, const std::map<std::string, std::string>& help) {
  for (const auto& [key, def] : cli::known_keys().at(s.name)) {
    std::string desc = help.count(key) ? help.at(key) : key;
    if (!def.empty()) desc += " (default " + def + ")";
    s.app->add_option("--" + key, s.values[key], desc);
  }
  s.app->add_option("--config", s.config, "config file; its [" + s.name + "] section overrides flags");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit formula, suspension comb and foliation cohomology checks"};
  app.require_subcommand(1);
  const std::map<std::string, std::string> help{
      {"field", "number field: Q, Q(i), Q(sqrt(D))"},
      {"curve", "elliptic curve p,A,B"},
      {"phi", "test function kind:center,halfwidth[,amplitude]"},
      {"zeros", "comma separated zero files"},
      {"zero_tol", "validation threshold for |L(1/2+i gamma)|"},
      {"format", "json or csv"},
      {"output", "output path, - for stdout"},
      {"matrix", "integer matrix rows, e.g. 2,1;1,1"},
      {"generator", "named generator (sphere-rotation)"},
      {"l", "suspension length, decimal or 'log p'"},
      {"range", "comb indices |n| <= range"},
      {"pair", "test function to pair against the comb"},
      {"tol", "agreement tolerance"},
      {"label", "L-function label, e.g. zeta or zeta*dirichlet:-4"},
      {"T", "scan height"},
      {"step", "scan grid spacing"},
      {"file", "zero file to validate"},
      {"alpha", "slope: golden, sqrt2, rational:p/q, cf:a0;a1,..|period, or decimal"},
      {"N", "profile denominators q <= N"},
      {"cutoff", "Fourier box |m|,|n| <= cutoff"},
      {"modes", "optional per-mode CSV path"},
  };

  Sub expl{app.add_subcommand("explicit", "verify an explicit formula against prime powers"), "explicit"};
  Sub sol{app.add_subcommand("solenoid", "exact delta comb identity and pairings"), "solenoid"};
  auto* zeros = app.add_subcommand("zeros", "scan or validate zero lists");
  zeros->require_subcommand(1);
  Sub scan{zeros->add_subcommand("scan", "scan Hardy Z for zeros"), "zeros scan"};
  Sub val{zeros->add_subcommand("validate", "validate a zero file"), "zeros validate"};
  Sub fol{app.add_subcommand("folcoh", "small denominators for a linear foliation of the torus"), "folcoh"};
  Sub* subs[] = {&expl, &sol, &scan, &val, &fol};
  for (Sub* s : subs) add_options(*s, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  for (Sub* s : subs) {
    if (!s->app->parsed()) continue;
    std::map<std::string, std::string> given;
    for (const auto& [key, value] : s->values)
      if (s->app->count("--" + key) > 0) given[key] = value;
    trace_formulary::cli::RunConfig config;
    try {
      config = cli::resolve_config(s->name, given, s->config);
    } catch (const trace_formulary::Error& e) {
      std::cerr << "trace_formulary " << s->name << ": " << e.what() << "\n";
      return cli::kUsage;
    }
    return cli::run(config);
  }
  return cli::kUsage;
}
