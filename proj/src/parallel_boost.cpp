#include "boostlab/parallel_boost.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "boostlab/random.hpp"

namespace boostlab {

void ParallelParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    throw InvalidInput("parallel boosting needs 0 < gamma <= 1/2");
  }
  if (steps_per_block == 0 || subsample_size == 0 || queries == 0 ||
      total_steps == 0) {
    throw InvalidInput("R, n, Q and K must all be at least 1");
  }
  if (2.0 * gamma * static_cast<double>(steps_per_block) > 1.0) {
    throw InvalidInput("R must satisfy 2*gamma*R <= 1");
  }
  if (!(learning_rate >= 0.0)) throw InvalidInput("learning rate must be >= 0");
}

ParallelParams default_parameters(std::size_t m, std::size_t d, double gamma,
                                  std::size_t steps_per_block, double c_prime,
                                  ParameterCaps caps) {
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    throw InvalidInput("default_parameters needs 0 < gamma <= 1/2");
  }
  if (steps_per_block == 0 ||
      2.0 * gamma * static_cast<double>(steps_per_block) > 1.0) {
    throw InvalidInput("R must satisfy 1 <= R <= 1/(2*gamma)");
  }
  if (m < 1 || d < 1 || !(c_prime > 0.0)) {
    throw InvalidInput("default_parameters needs m, d >= 1 and c' > 0");
  }
  if (caps.max_queries == 0) throw InvalidInput("query cap must be >= 1");

  ParallelParams p;
  p.gamma = gamma;
  p.steps_per_block = steps_per_block;
  p.c_prime = c_prime;
  p.learning_rate = learning_rate(gamma);

  p.total_steps = boosting_steps(m, gamma);
  if (caps.max_steps != 0 && p.total_steps > caps.max_steps) {
    p.total_steps = caps.max_steps;
    p.steps_capped = true;
  }

  const double dd = static_cast<double>(d);
  p.subsample_size = static_cast<std::size_t>(std::ceil(c_prime * dd / (gamma * gamma)));

  // log Q = 16·c′·d·R² + ln ln(1/γ); compared in log-space to avoid overflow.
  const double r = static_cast<double>(steps_per_block);
  const double log_q =
      16.0 * c_prime * dd * r * r + std::log(std::log(1.0 / gamma));
  if (log_q > std::log(static_cast<double>(caps.max_queries))) {
    p.queries = caps.max_queries;
    p.queries_capped = true;
  } else {
    p.queries = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(std::exp(log_q))), 1, caps.max_queries);
  }
  return p;
}

namespace {

std::vector<std::size_t> sample_multiset(const WeightDistribution& dist,
                                         std::size_t n, Rng& rng) {
  const auto weights = dist.weights();
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<std::size_t> out(n);
  for (auto& x : out) x = dist.support()[pick(rng)];
  return out;
}

template <typename Fn>
void for_each_slot(std::size_t count, bool parallel, Fn&& fn) {
  const std::size_t workers =
      parallel ? std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()))
               : 1;
  if (workers <= 1) {
    for (std::size_t q = 0; q < count; ++q) fn(q);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t q = next++; q < count; q = next++) fn(q);
    });
  }
}

}  // namespace

BaggingBlock bagging_round(const WeightDistribution& dist,
                           const ParallelParams& params, WeakLearnerOracle& oracle,
                           const LabeledDomain& domain, std::uint64_t seed,
                           std::size_t block, QueryLedger& ledger) {
  params.validate();
  dist.validate(domain);
  const std::size_t q_count = params.queries;

  BaggingBlock out;
  out.index = block;
  out.multisets.resize(q_count);
  std::vector<std::optional<WeightDistribution>> queries(q_count);
  std::vector<std::optional<Hypothesis>> answers(q_count);

  for_each_slot(q_count, oracle.concurrency_safe(), [&](std::size_t q) {
    if (params.subsample == SubsampleMode::kIdentity) {
      queries[q] = dist;
      out.multisets[q].assign(dist.support().begin(), dist.support().end());
    } else {
      Rng rng = make_rng(seed, {block, q});
      out.multisets[q] = sample_multiset(dist, params.subsample_size, rng);
      queries[q] = WeightDistribution::uniform(out.multisets[q]);
    }
    answers[q] = oracle.ask(*queries[q]);
  });

  for (std::size_t q = 0; q < q_count; ++q) {
    if (!answers[q]) {
      ledger.record({block, queries[q]->digest(), std::nullopt, 0.0});
      ++out.failed_slots;
      continue;
    }
    ledger.record({block, queries[q]->digest(), answers[q]->id(),
                   empirical_loss(*answers[q], *queries[q], domain)});
    out.slots.push_back(q);
    out.pool.push_back(std::move(*answers[q]));
  }
  return out;
}

BlockResult boosting_block(std::span<const Hypothesis> pool,
                           const ParallelParams& params,
                           const LabeledDomain& domain, std::size_t steps,
                           std::size_t block, TraceBuilder& builder) {
  if (steps > params.steps_per_block) {
    throw InvalidInput("boosting block cannot run more than R steps");
  }
  const double threshold = 0.5 - params.gamma / 4 + kAdvantageTolerance;
  std::vector<BlockStep> chosen;
  chosen.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double loss = empirical_loss(pool[i], builder.current(), domain);
      if (loss < best_loss) {
        best_loss = loss;
        best = i;
      }
    }
    if (pool.empty() || best_loss > threshold) {
      return BlockFailure{s, pool.empty() ? 1.0 : best_loss};
    }
    builder.step(block, pool[best], best_loss);
    chosen.push_back({best, best_loss});
  }
  return chosen;
}

BoostOutcome run_parallel_boost(const LabeledDomain& domain,
                                const TrainingSet& training,
                                WeakLearnerOracle& oracle,
                                const ParallelParams& params, std::uint64_t seed,
                                SnapshotPolicy policy) {
  params.validate();
  if (training.indices.empty()) throw InvalidInput("empty training set");

  TraceBuilder builder(domain, training, params.gamma, params.learning_rate,
                       params.total_steps, policy);
  BoostOutcome out;
  out.ledger = QueryLedger(params.queries, params.blocks());
  const std::size_t r_steps = params.steps_per_block;
  for (std::size_t k = 0; k < params.blocks(); ++k) {
    oracle.set_round(k);
    // Copy: the builder's distribution moves on during the boosting step.
    const WeightDistribution block_start = builder.current();
    BaggingBlock bag =
        bagging_round(block_start, params, oracle, domain, seed, k, out.ledger);
    const std::size_t steps =
        std::min((k + 1) * r_steps, params.total_steps) - k * r_steps;
    BlockResult result =
        boosting_block(bag.pool, params, domain, steps, k, builder);
    if (auto* fail = std::get_if<BlockFailure>(&result)) {
      BoostFailure failure;
      failure.reason = BoostFailure::Reason::kNoValidHypothesis;
      failure.block = k;
      failure.step = k * r_steps + fail->step;
      failure.best_loss = fail->best_loss;
      out.failure = failure;
      out.trace = builder.take();
      return out;
    }
  }
  out.trace = builder.take();
  out.classifier.emplace(out.trace.hypotheses);
  return out;
}

}  // namespace boostlab
