// Weak-learner oracle contract, query accounting, and the two concrete
// learners: exact ERM over a finite class and weighted decision stumps.

#ifndef BOOSTLAB_WEAK_LEARNERS_HPP
#define BOOSTLAB_WEAK_LEARNERS_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "boostlab/core_model.hpp"

namespace boostlab {

/// Tolerance applied when re-checking an oracle's advantage guarantee.
inline constexpr double kAdvantageTolerance = 1e-12;

/// Given a distribution, returns a hypothesis or declares failure (nullopt).
///
/// Callers go through ask(), which counts queries. Stateful oracles may use
/// the round index set by the driver through set_round().
class WeakLearnerOracle {
 public:
  virtual ~WeakLearnerOracle() = default;

  std::optional<Hypothesis> ask(const WeightDistribution& dist) {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return answer(dist);
  }

  /// True when answer() may run concurrently with itself.
  virtual bool concurrency_safe() const { return false; }

  void set_round(std::size_t round) { round_ = round; }
  std::size_t round() const { return round_; }
  std::size_t query_count() const {
    return queries_.load(std::memory_order_relaxed);
  }

 protected:
  virtual std::optional<Hypothesis> answer(const WeightDistribution& dist) = 0;

 private:
  std::atomic<std::size_t> queries_{0};
  std::size_t round_ = 0;
};

struct QueryRecord {
  std::size_t round = 0;
  std::uint64_t query_digest = 0;
  std::optional<std::uint64_t> answer_id;  // empty when the oracle failed
  double measured_loss = 0.0;
};

/// Per-round record of oracle calls: p = distinct rounds, t = total calls.
class QueryLedger {
 public:
  QueryLedger() = default;
  /// Zero budgets mean unlimited.
  QueryLedger(std::size_t max_per_round, std::size_t max_rounds)
      : max_per_round_(max_per_round), max_rounds_(max_rounds) {}

  /// Throws std::length_error when a budget would be exceeded.
  void record(QueryRecord rec);

  std::size_t total_queries() const { return records_.size(); }
  std::size_t rounds() const { return per_round_.size(); }
  std::size_t queries_in_round(std::size_t round) const;
  std::size_t max_queries_per_round() const;
  std::span<const QueryRecord> records() const { return records_; }

 private:
  std::size_t max_per_round_ = 0;
  std::size_t max_rounds_ = 0;
  std::vector<QueryRecord> records_;
  std::vector<std::pair<std::size_t, std::size_t>> per_round_;  // (round, count)
};

/// Member of `cls` with minimal empirical loss; ties go to the lowest index.
/// Returns the member's position.
std::size_t erm_finite_index(const HypothesisClass& cls,
                             const WeightDistribution& dist,
                             const LabeledDomain& domain);

Hypothesis erm_finite(const HypothesisClass& cls, const WeightDistribution& dist,
                      const LabeledDomain& domain);

struct StumpFit {
  Stump stump;
  double loss = 0.0;
};

/// Weighted 0-1 loss minimizing stump, exhaustive over all features, midpoint
/// thresholds and both polarities. `weights` indexes the rows of `features`.
StumpFit train_stump(const FeatureMatrix& features, std::span<const int> labels,
                     std::span<const double> weights);

/// ERM over a fixed finite class. Optionally declares failure when the best
/// member's loss exceeds `failure_loss`.
class ErmOracle : public WeakLearnerOracle {
 public:
  ErmOracle(const LabeledDomain& domain, HypothesisClass cls,
            std::optional<double> failure_loss = std::nullopt);
  bool concurrency_safe() const override { return true; }
  const HypothesisClass& hypothesis_class() const { return cls_; }

 protected:
  std::optional<Hypothesis> answer(const WeightDistribution& dist) override;

 private:
  const LabeledDomain& domain_;
  HypothesisClass cls_;
  std::optional<double> failure_loss_;
};

/// Decision stumps over the domain's feature vectors. Declares failure when
/// the best stump cannot beat 1/2 on the query.
class StumpOracle : public WeakLearnerOracle {
 public:
  explicit StumpOracle(const LabeledDomain& domain);
  bool concurrency_safe() const override { return true; }

 protected:
  std::optional<Hypothesis> answer(const WeightDistribution& dist) override;

 private:
  const LabeledDomain& domain_;
};

struct AdvantageViolation {
  Hypothesis hypothesis;
  double measured_loss = 0.0;
};

struct OracleFailure {};

using QueryOutcome = std::variant<Hypothesis, AdvantageViolation, OracleFailure>;

/// Forwards one query, re-measures the answer and rejects it when its loss
/// exceeds 1/2 − gamma (+1e-12). Every call is recorded in `ledger` under
/// `round`.
QueryOutcome validated_query(WeakLearnerOracle& oracle,
                             const WeightDistribution& dist, double gamma,
                             const LabeledDomain& domain, QueryLedger& ledger,
                             std::size_t round);

}  // namespace boostlab

#endif  // BOOSTLAB_WEAK_LEARNERS_HPP
