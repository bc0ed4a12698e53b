#include "trustmarket/cli.hpp"

#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "trustmarket/error.hpp"

namespace trustmarket {

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

using Command = int (*)(cli::Node&, const cli::RunOptions&, std::ostream&);

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Platform trust-game model: equilibria, sweeps, optimization, dynamics, simulation"};
  app.name("trustmarket");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::vector<std::string> overrides;
  app.add_option("--config,--input", config_path, "JSON experiment file");
  auto* out_opt = app.add_option("--out,--output", out_path, "output path (overrides the config's out)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config's seed)");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--set", overrides, "dotted.key=value override, repeatable");

  const std::vector<std::pair<const char*, Command>> commands = {
      {"equilibrium", &cli::cmd_equilibrium},
      {"sweep", &cli::cmd_sweep},
      {"optimize", &cli::cmd_optimize},
      {"integrate", &cli::cmd_integrate},
      {"simulate", &cli::cmd_simulate},
  };
  const std::vector<std::pair<const char*, const char*>> help = {
      {"equilibrium", "stable equilibrium, profit and welfare of one policy"},
      {"sweep", "evaluate quantities on a 2-D grid"},
      {"optimize", "platform-optimal policy over an (r, kappa) or (r, s) grid"},
      {"integrate", "replicator trajectory"},
      {"simulate", "finite-population stochastic simulation"},
  };
  for (const auto& [name, text] : help) app.add_subcommand(name, text)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    cli::json doc = cli::json::object();
    if (!config_path.empty()) doc = cli::load_document(config_path);
    for (const std::string& o : overrides) cli::apply_override(doc, o);
    if (*out_opt) doc["out"] = out_path;
    if (*seed_opt) doc["seed"] = seed;

    cli::Node root(doc, "");
    const cli::RunOptions opt{jobs};
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(root, opt, out);
    return kConfigError;
  } catch (const cli::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::EmptyWindow ? kConfigError : kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace trustmarket
