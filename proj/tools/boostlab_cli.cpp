// boostlab: command-line front end for the experiment harness.
//
//   boostlab <adaboost|pboost|adversary|coingame|sweep|compose|approx>
//            [--config FILE] [--seed N] [--reps N] [--out DIR]
//            [--snapshots all|window|none] [--set key=value]...
//
// Exit status: 0 success, 2 a boosting run failed, 3 invalid configuration.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boostlab/core_model.hpp"
#include "boostlab/harness/config.hpp"
#include "boostlab/harness/experiment.hpp"

namespace bh = boostlab::harness;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out;
  std::string snapshots;
  std::vector<std::string> sets;
};

bh::ExperimentConfig assemble(bh::ExperimentKind kind, const Flags& f) {
  bh::ExperimentConfig cfg = f.config.empty() ? bh::ExperimentConfig::defaults(kind)
                                              : bh::load_config(f.config, kind);
  if (f.seed) cfg.seed = *f.seed;
  if (f.reps) cfg.reps = *f.reps;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (cfg.out_dir.empty()) cfg.out_dir = bh::default_out_dir();
  if (!f.snapshots.empty()) {
    auto mode = bh::parse_snapshot_mode(f.snapshots);
    if (!mode) throw bh::ConfigError("unknown snapshot mode '" + f.snapshots + "'");
    cfg.snapshots = *mode;
  }
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw bh::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boostlab: boosting experiments with parallel weak-learner queries"};
  app.require_subcommand(1, 1);
  Flags flags;
  std::optional<bh::ExperimentKind> chosen;

  for (bh::ExperimentKind kind : bh::all_kinds()) {
    const std::string name(bh::kind_name(kind));
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", flags.config, "experiment config file");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--reps", flags.reps, "number of repetitions")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output directory (default $BOOSTLAB_OUT_DIR or boostlab_out)");
    sub->add_option("--snapshots", flags.snapshots, "distribution snapshots to retain")
        ->check(CLI::IsMember({"all", "window", "none"}));
    sub->add_option("--set", flags.sets, "override one parameter, key=value");
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bh::kExitInvalidConfig;
  }

  bh::ExperimentConfig cfg;
  try {
    cfg = assemble(*chosen, flags);
  } catch (const std::exception& e) {
    std::cerr << "boostlab: invalid config: " << e.what() << '\n';
    return bh::kExitInvalidConfig;
  }

  try {
    const bh::ExperimentResult result = bh::run_experiment(cfg);
    bh::persist(cfg, result, cfg.out_dir, std::cout);
    if (result.exit_code == bh::kExitBoostFailed) {
      std::cerr << "boostlab: at least one boosting run failed\n";
    }
    return result.exit_code;
  } catch (const bh::ConfigError& e) {
    std::cerr << "boostlab: invalid config: " << e.what() << '\n';
  } catch (const boostlab::InvalidInput& e) {
    std::cerr << "boostlab: invalid parameters: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "boostlab: " << e.what() << '\n';
  }
  return bh::kExitInvalidConfig;
}
