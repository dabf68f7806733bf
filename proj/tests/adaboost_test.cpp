#include "boostlab/adaboost.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "boostlab/analysis.hpp"
#include "boostlab/datasets.hpp"
#include "boostlab/random.hpp"

namespace boostlab {
namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

class ScriptedOracle : public WeakLearnerOracle {
 public:
  ScriptedOracle(Hypothesis good, Hypothesis bad, std::size_t bad_round)
      : good_(std::move(good)), bad_(std::move(bad)), bad_round_(bad_round) {}

 protected:
  std::optional<Hypothesis> answer(const WeightDistribution&) override {
    return round() == bad_round_ ? bad_ : good_;
  }

 private:
  Hypothesis good_;
  Hypothesis bad_;
  std::size_t bad_round_;
};

TEST(LearningRate, MatchesClosedForm) {
  EXPECT_EQ(learning_rate(0.0), 0.0);
  EXPECT_NEAR(learning_rate(0.4), 0.202732554054082, 1e-15);
  EXPECT_NEAR(learning_rate(0.5), 0.255412811882995, 1e-15);
  EXPECT_THROW(learning_rate(2.0), InvalidInput);
  EXPECT_THROW(learning_rate(-0.1), InvalidInput);
}

TEST(LearningRate, NeverExceedsGamma) {
  for (int i = 0; i <= 1000; ++i) {
    const double g = 0.5 * i / 1000.0;
    EXPECT_LE(learning_rate(g), g) << "gamma=" << g;
  }
}

TEST(BoostingSteps, CeilingOfFormula) {
  EXPECT_EQ(boosting_steps(1000, 0.1), 11053u);
  EXPECT_EQ(boosting_steps(1, 0.1), 0u);
  EXPECT_THROW(boosting_steps(10, 0.0), InvalidInput);
}

TEST(UpdateDistribution, ConceptAndZeroRateAreIdentity) {
  Rng rng = make_rng(3);
  LabeledDomain d(random_labels(10, rng));
  WeightDistribution dist(iota(10), {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  EXPECT_EQ(update_distribution(dist, Hypothesis(d.concept_labels()), d, 0.3), dist);
  EXPECT_EQ(update_distribution(dist, Hypothesis(random_labels(10, rng)), d, 0.0), dist);
  EXPECT_THROW(update_distribution(dist, Hypothesis(d.concept_labels()), d, -1.0),
               InvalidInput);
}

TEST(UpdateDistribution, TwoPointClosedForm) {
  const int c[] = {1, 1};
  LabeledDomain d(PackedLabels::from_signs(c));
  const int h[] = {1, -1};
  auto out = update_distribution(WeightDistribution::uniform({0, 1}),
                                 Hypothesis(PackedLabels::from_signs(h)), d, 0.2);
  EXPECT_NEAR(out.weight(0), 0.401312339887548, 1e-15);
  EXPECT_NEAR(out.weight(1), 0.598687660112452, 1e-15);
}

TEST(UpdateDistribution, NegationUndoesUpdate) {
  Rng rng = make_rng(4);
  LabeledDomain d(random_labels(30, rng));
  std::exponential_distribution<double> draw(1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> w(30);
    for (auto& x : w) x = draw(rng);
    WeightDistribution dist(iota(30), w);
    Hypothesis h(random_labels(30, rng));
    auto there = update_distribution(dist, h, d, 0.17);
    EXPECT_TRUE(std::ranges::equal(there.support(), dist.support()));
    auto back = update_distribution(there, h.negated(), d, 0.17);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(back.weight(i), dist.weight(i), 1e-9);
  }
}

TEST(ExponentialLoss, ZeroStepsIsLogM) {
  Rng rng = make_rng(5);
  LabeledDomain d(random_labels(16, rng));
  TrainingSet s{{0, 1, 2, 3, 3, 5, 7}};
  TraceBuilder b(d, s, 0.1, learning_rate(0.1), 3, {});
  BoostTrace trace = b.take();
  auto z = exponential_loss(trace, d);
  EXPECT_NEAR(z.log_total, std::log(7.0), 1e-15);
  EXPECT_NEAR(trace.log_z0, std::log(7.0), 1e-15);
  for (double v : z.log_point) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(exponential_loss(trace, d, 1), InvalidInput);
}

TEST(ExponentialLoss, AgreesWithRecordedLogZ) {
  StumpTask task = make_stump_task(60, 2, 3, 9);
  StumpOracle oracle(task.domain);
  auto out = run_adaboost(task.domain, task.training, oracle, 0.2, 40);
  ASSERT_TRUE(out.ok());
  for (std::size_t k : {1u, 10u, 40u}) {
    EXPECT_NEAR(exponential_loss(out.trace, task.domain, k).log_total,
                out.trace.rounds[k - 1].log_z, 1e-9);
  }
}

TEST(RunAdaboost, ConceptOracleGivesUnitMargins) {
  Rng rng = make_rng(6);
  LabeledDomain d(random_labels(20, rng));
  ErmOracle oracle(d, HypothesisClass({Hypothesis(d.concept_labels())}));
  TrainingSet s{iota(20)};
  auto out = run_adaboost(d, s, oracle, 0.3, 7);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out.classifier->size(), 7u);
  EXPECT_EQ(min_margin(*out.classifier, s, d), 1.0);
  for (std::size_t x = 0; x < 20; ++x) EXPECT_EQ(out.classifier->vote(d, x), d.label(x));
  EXPECT_EQ(out.ledger.total_queries(), 7u);
  EXPECT_EQ(out.ledger.rounds(), 7u);
}

TEST(RunAdaboost, HalfLossAnswerFailsAtThatRound) {
  const int c[] = {1, 1, -1, -1};
  LabeledDomain d(PackedLabels::from_signs(c));
  const int half[] = {1, -1, 1, -1};
  ScriptedOracle oracle(Hypothesis(d.concept_labels()),
                        Hypothesis(PackedLabels::from_signs(half)), 2);
  auto out = run_adaboost(d, TrainingSet{iota(4)}, oracle, 0.2, 5);
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.failure->step, 2u);
  EXPECT_EQ(out.failure->reason, BoostFailure::Reason::kAdvantageViolation);
  EXPECT_DOUBLE_EQ(out.failure->best_loss, 0.5);
  EXPECT_EQ(out.trace.rounds.size(), 2u);
  EXPECT_EQ(out.ledger.total_queries(), 3u);
}

TEST(RunAdaboost, OracleFailureIsAValue) {
  StumpTask task = make_stump_task(10, 1, 1, 2);
  class Refuse : public WeakLearnerOracle {
    std::optional<Hypothesis> answer(const WeightDistribution&) override {
      return std::nullopt;
    }
  } oracle;
  auto out = run_adaboost(task.domain, task.training, oracle, 0.1, 3);
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.failure->reason, BoostFailure::Reason::kOracleFailed);
  EXPECT_EQ(out.failure->step, 0u);
}

TEST(RunAdaboost, RejectsBadArguments) {
  StumpTask task = make_stump_task(10, 1, 1, 2);
  StumpOracle oracle(task.domain);
  EXPECT_THROW(run_adaboost(task.domain, task.training, oracle, 0.0, 3), InvalidInput);
  EXPECT_THROW(run_adaboost(task.domain, task.training, oracle, 0.6, 3), InvalidInput);
  EXPECT_THROW(run_adaboost(task.domain, task.training, oracle, 0.1, 0), InvalidInput);
  EXPECT_THROW(run_adaboost(task.domain, TrainingSet{}, oracle, 0.1, 3), InvalidInput);
}

TEST(RunAdaboost, ZDecayAndMarginOnStumpTask) {
  StumpTask task = make_stump_task(200, 2, 5, 31);
  StumpOracle oracle(task.domain);
  const double gamma = 0.1;
  const std::size_t k = boosting_steps(200, gamma);
  auto out = run_adaboost(task.domain, task.training, oracle, gamma, k);
  ASSERT_TRUE(out.ok());
  auto z = check_z_decay(out.trace);
  EXPECT_TRUE(z.ok());
  EXPECT_EQ(z.checked, k);
  EXPECT_GE(min_margin(*out.classifier, task.training, task.domain), gamma / 16);
  EXPECT_EQ(out.classifier->error_on(task.domain, task.training.indices), 0.0);
  EXPECT_DOUBLE_EQ(out.trace.rounds.back().min_margin,
                   min_margin(*out.classifier, task.training, task.domain));
}

TEST(MinMargin, DisagreeingPairIsZero) {
  Rng rng = make_rng(8);
  LabeledDomain d(random_labels(12, rng));
  Hypothesis c(d.concept_labels());
  TrainingSet s{iota(12)};
  EXPECT_EQ(min_margin(VotingClassifier({c, c, c}), s, d), 1.0);
  EXPECT_EQ(min_margin(VotingClassifier({c, c.negated()}), s, d), 0.0);
  EXPECT_EQ(VotingClassifier({c, c.negated()}).predict(d, 0), 1);
  EXPECT_THROW(VotingClassifier({}), InvalidInput);
}

TEST(TraceBuilder, SnapshotPolicies) {
  StumpTask task = make_stump_task(30, 2, 3, 4);
  StumpOracle oracle(task.domain);
  auto all = run_adaboost(task.domain, task.training, oracle, 0.2, 12,
                          {SnapshotMode::kAll, 0, 1 << 20});
  EXPECT_EQ(all.trace.snapshots.size(), 13u);
  EXPECT_EQ(all.trace.snapshots.front().step, 0u);
  auto window = run_adaboost(task.domain, task.training, oracle, 0.2, 12,
                             {SnapshotMode::kWindow, 3, 0});
  ASSERT_EQ(window.trace.snapshots.size(), 3u);
  EXPECT_EQ(window.trace.snapshots.back().step, 12u);
  EXPECT_EQ(window.trace.snapshots.back().weights, all.trace.snapshots.back().weights);
  auto none = run_adaboost(task.domain, task.training, oracle, 0.2, 12,
                           {SnapshotMode::kNone, 0, 0});
  EXPECT_TRUE(none.trace.snapshots.empty());
  EXPECT_EQ(none.trace.rounds, all.trace.rounds);
  auto capped = run_adaboost(task.domain, task.training, oracle, 0.2, 12,
                             {SnapshotMode::kAll, 0, 60});
  EXPECT_TRUE(capped.trace.snapshots_truncated);
  EXPECT_EQ(capped.trace.snapshots.size(), 2u);
}

TEST(RunAdaboost, DeterministicAcrossRuns) {
  StumpTask task = make_stump_task(50, 3, 3, 12);
  StumpOracle a(task.domain);
  StumpOracle b(task.domain);
  auto x = run_adaboost(task.domain, task.training, a, 0.1, 100);
  auto y = run_adaboost(task.domain, task.training, b, 0.1, 100);
  EXPECT_EQ(x.trace.rounds, y.trace.rounds);
}

}  // namespace
}  // namespace boostlab
