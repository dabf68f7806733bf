// Hard-instance weak learner used by the lower bound.
//
// The instance draws a uniform concept c over 2m points and P = p·R_s stages.
// Stage i holds one biased hypothesis a^(i), agreeing with c at each point
// independently with probability 1/2 + C_bias·γ, followed by 2^d̂ uniformly
// random hypotheses. Queries are answered by the first hypothesis in the
// global order H^(1), ..., H^(P), {c} whose loss is at most 1/2 − γ. Answers
// coming from beyond the stages released so far are logged as leaks.

#ifndef BOOSTLAB_ADVERSARY_HPP
#define BOOSTLAB_ADVERSARY_HPP

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "boostlab/core_model.hpp"
#include "boostlab/random.hpp"
#include "boostlab/weak_learners.hpp"

namespace boostlab {

struct AdversaryConfig {
  std::size_t m = 500;
  std::size_t d = 6;
  double gamma = 0.05;
  std::size_t rounds = 20;            // p
  std::size_t stages_per_round = 1;   // R_s
  double c_bias = 7.0;
  double alpha_thr = 2.0;
  std::size_t d_hat = 0;  // 0 selects 2d
  std::uint64_t seed = 0;

  std::size_t stages() const { return rounds * stages_per_round; }
  std::size_t random_exponent() const { return d_hat == 0 ? 2 * d : d_hat; }
  /// Throws InvalidInput on an invalid or over-budget configuration.
  void validate() const;

  /// Seeded descriptor: the instance is reproduced by regeneration.
  std::string to_descriptor() const;
  static AdversaryConfig from_descriptor(const std::string& text);

  friend bool operator==(const AdversaryConfig&, const AdversaryConfig&) = default;
};

/// Upper bound on stored label bits, P·(1 + 2^d̂)·2m.
inline constexpr std::uint64_t kAdversaryBitBudget = std::uint64_t{1} << 33;

class AdversarialInstance {
 public:
  const AdversaryConfig& config() const { return config_; }
  const LabeledDomain& domain() const { return domain_; }
  std::size_t stage_count() const { return stages_.size(); }
  const HypothesisClass& stage(std::size_t i) const { return stages_[i]; }
  /// Global order: all stages, then c.
  std::size_t hypothesis_count() const;
  const Hypothesis& fallback() const { return fallback_; }

 private:
  friend AdversarialInstance build_instance(const AdversaryConfig& cfg);
  AdversarialInstance(AdversaryConfig cfg, LabeledDomain domain,
                      std::vector<HypothesisClass> stages, Hypothesis fallback)
      : config_(cfg),
        domain_(std::move(domain)),
        stages_(std::move(stages)),
        fallback_(std::move(fallback)) {}

  AdversaryConfig config_;
  LabeledDomain domain_;
  std::vector<HypothesisClass> stages_;
  Hypothesis fallback_;
};

AdversarialInstance build_instance(const AdversaryConfig& cfg);

struct LeakEvent {
  std::size_t round = 0;        // 1-based interaction round
  std::size_t query_index = 0;  // position of the query within its batch
  std::size_t stage = 0;        // 0-based; == stage_count() for the fallback c
  bool fallback = false;

  friend bool operator==(const LeakEvent&, const LeakEvent&) = default;
};

/// Append-only, thread-safe sink of leak events.
class LeakLog {
 public:
  void append(LeakEvent e);
  /// Events sorted by (round, query index).
  std::vector<LeakEvent> sorted() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<LeakEvent> events_;
};

struct AdversaryAnswer {
  Hypothesis hypothesis;
  std::size_t stage = 0;     // 0-based; == stage_count() for c
  std::size_t position = 0;  // index within the stage
  double loss = 0.0;
  bool leaked = false;
};

/// Answers each query with the first hypothesis in global order whose loss is
/// ≤ 1/2 − γ. `round` is 1-based; stages beyond round·R_s count as leaks.
std::vector<AdversaryAnswer> answer_round(const AdversarialInstance& instance,
                                          std::size_t round,
                                          std::span<const WeightDistribution> queries,
                                          double gamma, LeakLog* log = nullptr);

/// The adversary as a weak-learner oracle. The driver's 0-based round index is
/// mapped to interaction round index+1. Queries are numbered in arrival
/// order, so drivers must call it serially for a reproducible leak log.
class AdversaryOracle : public WeakLearnerOracle {
 public:
  AdversaryOracle(const AdversarialInstance& instance, double gamma)
      : instance_(instance), gamma_(gamma) {}

  const LeakLog& leaks() const { return leaks_; }
  /// Largest 1-based stage index any answer came from (0 if none).
  std::size_t deepest_stage() const;
  bool fallback_used() const;

 protected:
  std::optional<Hypothesis> answer(const WeightDistribution& dist) override;

 private:
  const AdversarialInstance& instance_;
  double gamma_;
  LeakLog leaks_;
  mutable std::mutex mu_;
  std::size_t deepest_ = 0;
  bool fallback_used_ = false;
  std::size_t queries_this_round_ = 0;
  std::size_t last_round_ = static_cast<std::size_t>(-1);
};

enum class QueryShape { kSpread, kConcentrated };

/// Spread iff spreadness(dist, d) < α_thr·γ.
QueryShape classify_query(const WeightDistribution& dist, std::size_t d,
                          double alpha_thr, double gamma);

/// unseen_fraction · coin_majority_error(stages, 2·C_bias·γ).
double bayes_optimal_loss(std::size_t stages, double gamma, double c_bias,
                          double unseen_fraction);

/// Uniform distribution over all 2m points, with the concept's labels.
struct TargetDistribution {
  WeightDistribution dist;
  std::vector<int> labels;
};
TargetDistribution target_distribution(const AdversarialInstance& instance);

/// m i.i.d. draws from the target distribution.
TrainingSet sample_training_set(const LabeledDomain& domain, std::size_t count,
                                Rng& rng);

/// Fraction of domain points absent from the training multiset.
double unseen_fraction(const TrainingSet& training, const LabeledDomain& domain);

}  // namespace boostlab

#endif  // BOOSTLAB_ADVERSARY_HPP
