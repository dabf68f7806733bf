// Round-query trade-off boosting: each interaction round runs a bagging block
// (Q parallel weak-learner calls on multisets sampled from the block-start
// distribution) followed by up to R AdaBoost steps against the pooled answers.

#ifndef BOOSTLAB_PARALLEL_BOOST_HPP
#define BOOSTLAB_PARALLEL_BOOST_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "boostlab/adaboost.hpp"
#include "boostlab/core_model.hpp"
#include "boostlab/weak_learners.hpp"

namespace boostlab {

/// How the bagging step builds each query distribution.
enum class SubsampleMode {
  kSample,    // T_{k,q} ~ (D_{kR})^n, query = uniform over T_{k,q}
  kIdentity,  // query = D_{kR} itself (no subsampling)
};

struct ParallelParams {
  double gamma = 0.1;
  std::size_t steps_per_block = 1;  // R
  std::size_t subsample_size = 1;   // n
  std::size_t queries = 1;          // Q
  std::size_t total_steps = 1;      // K
  double learning_rate = 0.0;       // w
  double c_prime = 1.0;
  SubsampleMode subsample = SubsampleMode::kSample;
  bool queries_capped = false;  // formula Q exceeded the configured cap
  bool steps_capped = false;    // formula K exceeded the configured cap

  std::size_t blocks() const {
    return (total_steps + steps_per_block - 1) / steps_per_block;
  }
  /// Throws InvalidInput unless n, Q, K, R ≥ 1, 0 < γ ≤ 1/2 and 2γR ≤ 1.
  void validate() const;
};

struct ParameterCaps {
  std::size_t max_queries = 4096;
  std::size_t max_steps = 0;  // 0: uncapped
};

/// K = ⌈16·ln(m)/γ²⌉, n = ⌈c′·d/γ²⌉, Q = ⌈exp(16·c′·d·R²)·ln(1/γ)⌉, each
/// clipped to its cap with a flag.
ParallelParams default_parameters(std::size_t m, std::size_t d, double gamma,
                                  std::size_t steps_per_block, double c_prime,
                                  ParameterCaps caps = {});

struct BaggingBlock {
  std::size_t index = 0;
  std::vector<std::vector<std::size_t>> multisets;  // T_{k,q}, one per slot
  std::vector<std::size_t> slots;                   // slot of each pool member
  std::vector<Hypothesis> pool;                     // H_k
  std::size_t failed_slots = 0;
};

/// Draws the Q multisets for block `block` from `dist` and queries the oracle
/// once per multiset. Slot q's sample depends only on (seed, block, q).
/// Concurrency-safe oracles are queried from several threads.
BaggingBlock bagging_round(const WeightDistribution& dist,
                           const ParallelParams& params, WeakLearnerOracle& oracle,
                           const LabeledDomain& domain, std::uint64_t seed,
                           std::size_t block, QueryLedger& ledger);

struct BlockStep {
  std::size_t pool_index = 0;
  double loss = 0.0;
};

struct BlockFailure {
  std::size_t step = 0;  // step within the block
  double best_loss = 0.0;
};

using BlockResult = std::variant<std::vector<BlockStep>, BlockFailure>;

/// Runs `steps` AdaBoost steps against `pool`, each picking the minimum-loss
/// member (lowest index on ties) and requiring loss ≤ 1/2 − γ/4 (+1e-12).
/// Steps are applied to `builder`, which owns the current distribution.
BlockResult boosting_block(std::span<const Hypothesis> pool,
                           const ParallelParams& params,
                           const LabeledDomain& domain, std::size_t steps,
                           std::size_t block, TraceBuilder& builder);

/// Full driver: ⌈K/R⌉ interaction rounds with Q queries each.
BoostOutcome run_parallel_boost(const LabeledDomain& domain,
                                const TrainingSet& training,
                                WeakLearnerOracle& oracle,
                                const ParallelParams& params, std::uint64_t seed,
                                SnapshotPolicy policy = {});

}  // namespace boostlab

#endif  // BOOSTLAB_PARALLEL_BOOST_HPP
