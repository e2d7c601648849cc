// semigroup_cli: run one verification subcommand and write its JSON summary
// and CSV traces.
//
//   semigroup_cli wave2heat --N 64 --p 2 --K1 -1 --K2 -1 --lambda "2+sin"
//   semigroup_cli evolve --config heat.cfg --out results
//   semigroup_cli coercivity --sweep sweep.json
//
// Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration.
// SEMIGROUP_OUT_DIR overrides the output directory of the config file; --out
// overrides both.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "semigroup/cli.hpp"

namespace sc = semigroup::cli;

int main(int argc, char** argv) {
  CLI::App app{"Dissipativity and semigroup generation checks at desk scale"};
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string sweep;
    std::vector<std::string> tol;
    std::map<std::string, std::string> values;
    bool quiet = false;
  };
  std::map<std::string, Options> options;

  static const std::vector<std::pair<std::string, std::string>> flags = {
      {"N", "number of cells"},
      {"p", "exponent of the l^p space"},
      {"K1", "boundary parameter at xi = 1, |K1| <= 1"},
      {"K2", "boundary parameter at xi = 0, |K2| <= 1"},
      {"lambda", "profile: c | a+b*xi | a+b*sin | const:c | affine:a,b | sin:a,b"},
      {"dt", "time step"},
      {"T", "final time"},
      {"seed", "random seed"},
      {"samples", "sample count"},
      {"scheme", "implicit-euler | crank-nicolson | expm"},
      {"x0", "initial state for evolve: random | cos"},
      {"snapshots", "number of state snapshots written by evolve"},
      {"out", "output directory"},
  };

  for (const auto& name : sc::subcommands()) {
    auto* sub = app.add_subcommand(name);
    auto& o = options[name];
    sub->add_option("--config", o.config, "key = value or JSON config file");
    sub->add_option("--sweep", o.sweep, "JSON array of configs run concurrently");
    sub->add_option("--tol", o.tol, "check tolerance override, name=value")->take_all();
    sub->add_flag("--quiet,-q", o.quiet, "suppress the per-check lines");
    for (const auto& [flag, help] : flags) sub->add_option("--" + flag, o.values[flag], help);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommand(name);
  auto& o = options[name];

  try {
    std::vector<sc::KeyValues> layers;
    if (!o.config.empty()) layers.push_back(sc::read_config_file(o.config));
    if (const char* env = std::getenv("SEMIGROUP_OUT_DIR"); env && *env) {
      layers.push_back({{"out", env}});
    }
    sc::KeyValues cli_layer;
    for (const auto& [flag, _] : flags) {
      if (sub->count("--" + flag) > 0) cli_layer.emplace_back(flag, o.values[flag]);
    }
    for (const auto& t : o.tol) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw sc::ConfigError("--tol expects name=value, got " + t);
      cli_layer.emplace_back("tol." + t.substr(0, eq), t.substr(eq + 1));
    }
    layers.push_back(cli_layer);

    if (!o.sweep.empty()) {
      std::ifstream in(o.sweep);
      if (!in) throw sc::ConfigError("cannot read sweep file " + o.sweep);
      nlohmann::json sweep;
      try {
        sweep = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw sc::ConfigError(std::string("sweep JSON: ") + e.what());
      }
      const auto base = sc::make_config(name, layers);
      std::vector<sc::RunOutcome> outcomes;
      const int code = sc::run_sweep(name, layers, sweep, base.out_dir, &outcomes);
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        std::cout << "sweep_" << i << ": " << (outcomes[i].exit_code == 0 ? "PASS" : "FAIL")
                  << "\n";
      }
      return code;
    }

    const auto config = sc::make_config(name, layers);
    const auto outcome = sc::run(name, config);
    if (!o.quiet) {
      for (const auto& c : outcome.summary["checks"]) {
        std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>()
                  << " value=" << c["value"].dump() << " tol=" << c["tolerance"].dump() << "\n";
      }
      if (outcome.summary.contains("error")) {
        std::cout << "ERROR " << outcome.summary["error"]["message"].get<std::string>() << "\n";
      }
      std::cout << "summary: " << outcome.artifacts.front().string() << "\n";
    }
    return outcome.exit_code;
  } catch (const sc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return sc::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sc::kExitCheckFailure;
  }
}
