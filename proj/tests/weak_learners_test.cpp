#include "boostlab/weak_learners.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "boostlab/adversary.hpp"
#include "boostlab/datasets.hpp"
#include "boostlab/random.hpp"

namespace boostlab {
namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

class ConstantOracle : public WeakLearnerOracle {
 public:
  explicit ConstantOracle(std::optional<Hypothesis> h) : h_(std::move(h)) {}

 protected:
  std::optional<Hypothesis> answer(const WeightDistribution&) override { return h_; }

 private:
  std::optional<Hypothesis> h_;
};

TEST(ErmFinite, ReturnsConceptWhenPresent) {
  Rng rng = make_rng(1);
  LabeledDomain d(random_labels(32, rng));
  HypothesisClass cls = random_class(32, 10, rng);
  std::vector<Hypothesis> members(cls.members().begin(), cls.members().end());
  members.insert(members.begin() + 4, Hypothesis(d.concept_labels()));
  HypothesisClass with_c(members);
  const auto u = WeightDistribution::uniform(iota(32));
  EXPECT_EQ(erm_finite_index(with_c, u, d), 4u);
  EXPECT_EQ(empirical_loss(erm_finite(with_c, u, d), u, d), 0.0);
}

TEST(ErmFinite, BeatsEveryMemberAndBreaksTiesLow) {
  Rng rng = make_rng(2);
  LabeledDomain d(random_labels(40, rng));
  HypothesisClass cls = random_class(40, 64, rng);
  std::exponential_distribution<double> draw(1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> w(40);
    for (auto& x : w) x = draw(rng);
    WeightDistribution dist(iota(40), w);
    const std::size_t best = erm_finite_index(cls, dist, d);
    const double loss = empirical_loss(cls[best], dist, d);
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const double li = empirical_loss(cls[i], dist, d);
      EXPECT_LE(loss, li);
      if (i < best) EXPECT_LT(loss, li);
    }
    EXPECT_EQ(erm_finite_index(cls, dist, d), best);
  }
  HypothesisClass dup({cls[3], cls[3]});
  EXPECT_EQ(erm_finite_index(dup, WeightDistribution::uniform(iota(40)), d), 0u);
}

TEST(ErmFinite, EmptyClassIsInvalid) {
  LabeledDomain d(PackedLabels(4));
  EXPECT_THROW(erm_finite(HypothesisClass{}, WeightDistribution::uniform({0}), d),
               InvalidInput);
}

TEST(TrainStump, SeparableDataHasZeroLoss) {
  FeatureMatrix f(6, 1, {0.1, 0.5, 0.2, 0.9, 0.7, 0.3});
  const std::vector<int> y = {-1, 1, -1, 1, 1, -1};
  const std::vector<double> w(6, 1.0 / 6);
  StumpFit fit = train_stump(f, y, w);
  EXPECT_EQ(fit.loss, 0.0);
  EXPECT_EQ(fit.stump.polarity, 1);
  EXPECT_DOUBLE_EQ(fit.stump.threshold, 0.4);
}

TEST(TrainStump, FindsNegativePolarity) {
  FeatureMatrix f(4, 2, {0, 0.1, 0, 0.2, 0, 0.8, 0, 0.9});
  const std::vector<int> y = {1, 1, -1, -1};
  const std::vector<double> w(4, 0.25);
  StumpFit fit = train_stump(f, y, w);
  EXPECT_EQ(fit.loss, 0.0);
  EXPECT_EQ(fit.stump.feature, 1u);
  EXPECT_EQ(fit.stump.polarity, -1);
}

TEST(TrainStump, NoisyLabelsNeverExceedHalf) {
  Rng rng = make_rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 20 + t;
    std::vector<double> data(n * 2);
    for (auto& x : data) x = unit(rng);
    std::vector<int> y(n);
    for (auto& v : y) v = unit(rng) < 0.5 ? 1 : -1;
    std::vector<double> w(n);
    for (auto& v : w) v = unit(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= total;
    StumpFit fit = train_stump(FeatureMatrix(n, 2, data), y, w);
    EXPECT_LE(fit.loss, 0.5 + 1e-12);
  }
}

TEST(TrainStump, RejectsZeroDimension) {
  FeatureMatrix f(2, 0, {});
  const std::vector<int> y = {1, -1};
  const std::vector<double> w = {0.5, 0.5};
  EXPECT_THROW(train_stump(f, y, w), InvalidInput);
  FeatureMatrix g(2, 1, {0, 1});
  const std::vector<double> w3 = {0.5, 0.25, 0.25};
  EXPECT_THROW(train_stump(g, y, w3), InvalidInput);
}

TEST(StumpOracle, AnswersOnRealizableTask) {
  StumpTask task = make_stump_task(50, 2, 3, 7);
  StumpOracle oracle(task.domain);
  auto dist = WeightDistribution::uniform_over(task.training);
  auto h = oracle.ask(dist);
  ASSERT_TRUE(h.has_value());
  EXPECT_LE(empirical_loss(*h, dist, task.domain), 0.5 - task.guaranteed_advantage());
  EXPECT_EQ(oracle.query_count(), 1u);
}

TEST(StumpOracle, NeedsFeatures) {
  LabeledDomain d(PackedLabels(4));
  EXPECT_THROW(StumpOracle{d}, InvalidInput);
}

TEST(ValidatedQuery, ConceptOraclePasses) {
  Rng rng = make_rng(4);
  LabeledDomain d(random_labels(20, rng));
  ConstantOracle oracle(Hypothesis(d.concept_labels()));
  QueryLedger ledger;
  for (double g : {0.01, 0.1, 0.49}) {
    auto out = validated_query(oracle, WeightDistribution::uniform(iota(20)), g, d,
                               ledger, 0);
    EXPECT_TRUE(std::holds_alternative<Hypothesis>(out));
  }
  EXPECT_EQ(ledger.total_queries(), 3u);
  EXPECT_EQ(ledger.rounds(), 1u);
  EXPECT_EQ(oracle.query_count(), 3u);
}

TEST(ValidatedQuery, ConstantPlusOnAllMinusConceptViolates) {
  std::vector<int> minus(10, -1);
  LabeledDomain d(PackedLabels::from_signs(minus));
  std::vector<int> plus(10, 1);
  ConstantOracle oracle(Hypothesis(PackedLabels::from_signs(plus)));
  QueryLedger ledger;
  auto out = validated_query(oracle, WeightDistribution::uniform(iota(10)), 0.1, d,
                             ledger, 0);
  auto* v = std::get_if<AdvantageViolation>(&out);
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->measured_loss, 1.0);
  EXPECT_EQ(ledger.records().back().measured_loss, 1.0);
}

TEST(ValidatedQuery, FailureIsDistinctVariant) {
  LabeledDomain d(PackedLabels(4));
  ConstantOracle oracle(std::nullopt);
  QueryLedger ledger;
  auto out = validated_query(oracle, WeightDistribution::uniform({0, 1}), 0.1, d, ledger, 2);
  EXPECT_TRUE(std::holds_alternative<OracleFailure>(out));
  EXPECT_FALSE(ledger.records().back().answer_id.has_value());
  EXPECT_THROW(validated_query(oracle, WeightDistribution::uniform({0}), 0.5, d, ledger, 0),
               InvalidInput);
}

TEST(ValidatedQuery, ToleranceAtBoundary) {
  const int c[] = {1, 1, 1, 1};
  LabeledDomain d(PackedLabels::from_signs(c));
  const int h[] = {1, 1, 1, -1};
  ConstantOracle oracle(Hypothesis(PackedLabels::from_signs(h)));
  QueryLedger ledger;
  auto u = WeightDistribution::uniform(iota(4));
  EXPECT_TRUE(std::holds_alternative<Hypothesis>(
      validated_query(oracle, u, 0.25, d, ledger, 0)));
  EXPECT_TRUE(std::holds_alternative<AdvantageViolation>(
      validated_query(oracle, u, 0.25 + 1e-9, d, ledger, 0)));
}

TEST(ValidatedQuery, AdversaryOracleHasNoViolationsOnSpreadQueries) {
  AdversaryConfig cfg;
  cfg.m = 250;
  cfg.d = 4;
  cfg.gamma = 0.05;
  cfg.rounds = 5;
  cfg.seed = 17;
  const AdversarialInstance inst = build_instance(cfg);
  AdversaryOracle oracle(inst, cfg.gamma);
  QueryLedger ledger;
  Rng rng = make_rng(8);
  std::exponential_distribution<double> draw(1.0);
  std::size_t violations = 0;
  for (int q = 0; q < 500; ++q) {
    std::vector<double> w(inst.domain().size());
    for (auto& x : w) x = draw(rng);
    WeightDistribution dist(iota(w.size()), w);
    oracle.set_round(q % cfg.rounds);
    auto out = validated_query(oracle, dist, cfg.gamma, inst.domain(), ledger, q % cfg.rounds);
    violations += std::holds_alternative<Hypothesis>(out) ? 0 : 1;
  }
  EXPECT_EQ(violations, 0u);
  EXPECT_EQ(ledger.total_queries(), 500u);
  EXPECT_EQ(ledger.rounds(), cfg.rounds);
}

TEST(QueryLedger, CountsRoundsAndEnforcesBudgets) {
  QueryLedger ledger(2, 2);
  ledger.record({0, 1, 1, 0.1});
  ledger.record({0, 2, 2, 0.2});
  EXPECT_THROW(ledger.record({0, 3, 3, 0.3}), std::length_error);
  ledger.record({5, 4, std::nullopt, 0.0});
  EXPECT_THROW(ledger.record({6, 5, 5, 0.1}), std::length_error);
  EXPECT_EQ(ledger.total_queries(), 3u);
  EXPECT_EQ(ledger.rounds(), 2u);
  EXPECT_EQ(ledger.queries_in_round(0), 2u);
  EXPECT_EQ(ledger.queries_in_round(5), 1u);
  EXPECT_EQ(ledger.queries_in_round(9), 0u);
  EXPECT_EQ(ledger.max_queries_per_round(), 2u);
}

TEST(ErmOracle, DeclaresFailureAboveThreshold) {
  const int c[] = {1, -1, 1, -1};
  LabeledDomain d(PackedLabels::from_signs(c));
  const int h[] = {1, 1, 1, 1};
  ErmOracle strict(d, HypothesisClass({Hypothesis(PackedLabels::from_signs(h))}), 0.4);
  EXPECT_FALSE(strict.ask(WeightDistribution::uniform(iota(4))).has_value());
  ErmOracle lax(d, HypothesisClass({Hypothesis(PackedLabels::from_signs(h))}));
  EXPECT_TRUE(lax.ask(WeightDistribution::uniform(iota(4))).has_value());
  EXPECT_TRUE(lax.concurrency_safe());
}

}  // namespace
}  // namespace boostlab
