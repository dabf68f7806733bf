// AdaBoost with a fixed learning rate, log-space exponential-loss tracking,
// uniform voting aggregation and margin reporting.
//
// The trace types and TraceBuilder here are shared with parallel_boost so that
// both drivers record rounds identically.

#ifndef BOOSTLAB_ADABOOST_HPP
#define BOOSTLAB_ADABOOST_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "boostlab/core_model.hpp"
#include "boostlab/weak_learners.hpp"

namespace boostlab {

/// w = ½·ln((1/2 + γ/4) / (1/2 − γ/4)). Requires 0 ≤ γ < 2.
double learning_rate(double gamma);

/// K = ⌈16·ln(m)/γ²⌉.
std::size_t boosting_steps(std::size_t m, double gamma);

/// D'(i) ∝ D(i)·exp(−c(x_i)·h(x_i)·w). Returns `dist` unchanged when the
/// multiplier is uniform (w = 0, or h all-correct / all-wrong on the support).
WeightDistribution update_distribution(const WeightDistribution& dist,
                                       const Hypothesis& h,
                                       const LabeledDomain& domain, double w);

enum class SnapshotMode { kAll, kWindow, kNone };

struct SnapshotPolicy {
  SnapshotMode mode = SnapshotMode::kAll;
  std::size_t window = 0;            // kWindow: distributions kept
  std::size_t max_entries = 1 << 26;  // kAll: cap on stored weights in total
};

/// D_step's weights. All snapshots of one trace share the trace's support.
struct Snapshot {
  std::size_t step = 0;
  std::vector<double> weights;
};

struct TraceRound {
  std::size_t block = 0;
  std::uint64_t dist_digest = 0;  // digest of D_r, the distribution queried
  double max_weight = 0.0;
  double min_weight = 0.0;
  std::uint64_t hypothesis_id = 0;
  double loss = 0.0;             // L_{D_r}(h_r)
  double log_z = 0.0;            // log Z_{r+1}
  double min_margin = 0.0;       // min training margin of the vote so far

  friend bool operator==(const TraceRound&, const TraceRound&) = default;
};

struct BoostTrace {
  double gamma = 0.0;
  double learning_rate = 0.0;
  std::size_t target_steps = 0;
  std::vector<std::size_t> support;  // training multiset
  double log_z0 = 0.0;               // ln m
  std::vector<TraceRound> rounds;
  std::vector<Hypothesis> hypotheses;  // h_0, h_1, ... in step order
  std::vector<Snapshot> snapshots;     // ascending step order
  bool snapshots_truncated = false;
};

/// g(x) = (1/K)·Σ h_k(x); prediction sign(g) with sign(0) = +1.
class VotingClassifier {
 public:
  explicit VotingClassifier(std::vector<Hypothesis> voters);

  std::size_t size() const { return voters_.size(); }
  const std::vector<Hypothesis>& voters() const { return voters_; }
  double vote(const LabeledDomain& domain, std::size_t point) const;
  int predict(const LabeledDomain& domain, std::size_t point) const;
  /// Fraction of `points` where the prediction disagrees with the concept.
  double error_on(const LabeledDomain& domain,
                  std::span<const std::size_t> points) const;

 private:
  std::vector<Hypothesis> voters_;
};

struct ExponentialLoss {
  std::vector<double> log_point;  // log Z_{i,j} per training position j
  double log_total = 0.0;         // log Z_i
};

/// Exponential loss after the first `steps` recorded hypotheses (all when
/// omitted), computed in log-space.
ExponentialLoss exponential_loss(const BoostTrace& trace,
                                 const LabeledDomain& domain,
                                 std::optional<std::size_t> steps = std::nullopt);

double min_margin(const VotingClassifier& vc, const TrainingSet& training,
                  const LabeledDomain& domain);

struct BoostFailure {
  enum class Reason { kOracleFailed, kAdvantageViolation, kNoValidHypothesis };
  Reason reason = Reason::kNoValidHypothesis;
  std::size_t block = 0;  // interaction round
  std::size_t step = 0;   // global boosting step r
  double best_loss = 0.0;
};

/// Result of a boosting run. On failure the classifier is empty but the trace
/// and ledger still describe every completed step.
struct BoostOutcome {
  BoostTrace trace;
  QueryLedger ledger;
  std::optional<VotingClassifier> classifier;
  std::optional<BoostFailure> failure;

  bool ok() const { return classifier.has_value(); }
};

/// Incrementally records boosting steps: digests, Z values, margins and
/// snapshots according to a SnapshotPolicy.
class TraceBuilder {
 public:
  TraceBuilder(const LabeledDomain& domain, const TrainingSet& training,
               double gamma, double w, std::size_t target_steps,
               SnapshotPolicy policy);

  const WeightDistribution& current() const { return current_; }
  std::size_t steps() const { return trace_.rounds.size(); }

  /// Applies h at the current distribution and records the step.
  void step(std::size_t block, const Hypothesis& h, double loss);

  BoostTrace take() { return std::move(trace_); }

 private:
  void keep_snapshot(std::size_t step);

  const LabeledDomain& domain_;
  SnapshotPolicy policy_;
  BoostTrace trace_;
  WeightDistribution current_;
  std::vector<long long> vote_sums_;  // Σ_r c(x_j)·h_r(x_j)
  std::size_t stored_entries_ = 0;
};

/// Per-round AdaBoost: one validated oracle query per step at threshold γ/4.
/// Requires 0 < γ ≤ 1/2 and K ≥ 1.
BoostOutcome run_adaboost(const LabeledDomain& domain, const TrainingSet& training,
                          WeakLearnerOracle& oracle, double gamma,
                          std::size_t steps, SnapshotPolicy policy = {});

}  // namespace boostlab

#endif  // BOOSTLAB_ADABOOST_HPP
