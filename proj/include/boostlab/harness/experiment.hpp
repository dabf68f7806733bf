// Experiment orchestration for every CLI subcommand.
//
// Repetition r of a run uses seed derive_seed(master, {r}), so adding
// repetitions never changes earlier ones. Results are computed first and
// persisted afterwards, in repetition order, so output does not depend on
// scheduling.

#ifndef BOOSTLAB_HARNESS_EXPERIMENT_HPP
#define BOOSTLAB_HARNESS_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "boostlab/adversary.hpp"
#include "boostlab/core_model.hpp"
#include "boostlab/harness/config.hpp"
#include "boostlab/harness/report.hpp"
#include "boostlab/parallel_boost.hpp"

namespace boostlab::harness {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitBoostFailed = 2;
inline constexpr int kExitInvalidConfig = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "BOOSTLAB_OUT_DIR";
/// $BOOSTLAB_OUT_DIR when set and nonempty, else "boostlab_out".
std::string default_out_dir();

std::uint64_t rep_seed(std::uint64_t master, std::size_t rep);

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::optional<CsvTable> table;  // written as <kind>_table.csv
  int exit_code = kExitSuccess;
};

/// Validates `cfg` (ConfigError on failure) and runs every repetition.
/// Deterministic given the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes the result's CSV files under `out_dir` and the table to `human`.
void persist(const ExperimentConfig& cfg, const ExperimentResult& result,
             const std::filesystem::path& out_dir, std::ostream& human);

/// Parameters of a pboost / sweep config, with R overridden when given.
ParallelParams pboost_parameters(const ExperimentConfig& cfg,
                                 std::optional<std::size_t> steps_per_block = std::nullopt,
                                 std::optional<std::size_t> queries = std::nullopt);

RunRecord run_adaboost_rep(const ExperimentConfig& cfg, std::size_t rep);
RunRecord run_pboost_rep(const ExperimentConfig& cfg, const ParallelParams& params,
                         std::size_t rep);
RunRecord run_adversary_rep(const ExperimentConfig& cfg, std::size_t rep);

struct SweepRow {
  std::size_t steps_per_block = 0;  // R
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t rounds_used = 0;
  std::size_t queries_per_round = 0;
  std::size_t min_queries = 0;  // smallest doubled Q reaching the target; 0 if none
  double final_loss = 0.0;      // held-out error, NaN on failure
  bool success = false;
};

/// One row per (R, rep). Throws ConfigError when some R violates 2γR ≤ 1.
std::vector<SweepRow> sweep_tradeoff(const ExperimentConfig& cfg);

/// Fraction of `trials` i.i.d. n-samples from `dist` that are ε-approximations
/// of `dist` for `cls`.
double approximation_pass_rate(const HypothesisClass& cls,
                               const WeightDistribution& dist,
                               const LabeledDomain& domain, double epsilon,
                               std::size_t n, std::size_t trials, std::uint64_t seed);

struct DoublingStep {
  std::size_t n = 0;
  double pass_rate = 0.0;
};

/// Doubles n from n_start until the pass rate reaches `target` or n exceeds
/// n_max. The last step is the one found (check its pass rate).
std::vector<DoublingStep> doubling_sample_size(const HypothesisClass& cls,
                                               const WeightDistribution& dist,
                                               const LabeledDomain& domain,
                                               double epsilon, double target,
                                               std::size_t n_start, std::size_t n_max,
                                               std::size_t trials, std::uint64_t seed);

}  // namespace boostlab::harness

#endif  // BOOSTLAB_HARNESS_EXPERIMENT_HPP
