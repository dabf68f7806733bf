#include "boostlab/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace boostlab {

double learning_rate(double gamma) {
  if (!(gamma >= 0.0 && gamma < 2.0)) {
    throw InvalidInput("learning rate needs 0 <= gamma < 2");
  }
  return 0.5 * std::log((0.5 + gamma / 4) / (0.5 - gamma / 4));
}

std::size_t boosting_steps(std::size_t m, double gamma) {
  if (m < 1 || !(gamma > 0.0)) throw InvalidInput("boosting_steps needs m >= 1, gamma > 0");
  return static_cast<std::size_t>(
      std::ceil(16.0 * std::log(static_cast<double>(m)) / (gamma * gamma)));
}

WeightDistribution update_distribution(const WeightDistribution& dist,
                                       const Hypothesis& h,
                                       const LabeledDomain& domain, double w) {
  if (!(w >= 0.0)) throw InvalidInput("learning rate must be nonnegative");
  dist.validate(domain);
  const auto support = dist.support();
  std::vector<int> agree(support.size());
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    agree[i] = domain.label(support[i]) * h.evaluate(domain, support[i]);
    if (agree[i] < 0) ++wrong;
  }
  if (w == 0.0 || wrong == 0 || wrong == support.size()) return dist;

  const double down = std::exp(-w);
  const double up = std::exp(w);
  std::vector<double> weights(dist.weights().begin(), dist.weights().end());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] *= agree[i] > 0 ? down : up;
  }
  return WeightDistribution({support.begin(), support.end()}, std::move(weights));
}

VotingClassifier::VotingClassifier(std::vector<Hypothesis> voters)
    : voters_(std::move(voters)) {
  if (voters_.empty()) throw InvalidInput("voting classifier needs voters");
}

double VotingClassifier::vote(const LabeledDomain& domain,
                              std::size_t point) const {
  long long sum = 0;
  for (const auto& h : voters_) sum += h.evaluate(domain, point);
  return static_cast<double>(sum) / static_cast<double>(voters_.size());
}

int VotingClassifier::predict(const LabeledDomain& domain,
                              std::size_t point) const {
  return vote(domain, point) >= 0.0 ? 1 : -1;
}

double VotingClassifier::error_on(const LabeledDomain& domain,
                                  std::span<const std::size_t> points) const {
  if (points.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t p : points) {
    if (predict(domain, p) != domain.label(p)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(points.size());
}

namespace {

double log_sum_exp(std::span<const double> xs) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double x : xs) peak = std::max(peak, x);
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - peak);
  return peak + std::log(acc);
}

double log_z_from_votes(std::span<const long long> vote_sums, double w,
                        std::vector<double>& scratch) {
  scratch.resize(vote_sums.size());
  for (std::size_t j = 0; j < vote_sums.size(); ++j) {
    scratch[j] = -w * static_cast<double>(vote_sums[j]);
  }
  return log_sum_exp(scratch);
}

}  // namespace

ExponentialLoss exponential_loss(const BoostTrace& trace,
                                 const LabeledDomain& domain,
                                 std::optional<std::size_t> steps) {
  const std::size_t used = steps.value_or(trace.hypotheses.size());
  if (used > trace.hypotheses.size()) {
    throw InvalidInput("exponential_loss: more steps than the trace holds");
  }
  std::vector<long long> votes(trace.support.size(), 0);
  for (std::size_t r = 0; r < used; ++r) {
    const Hypothesis& h = trace.hypotheses[r];
    for (std::size_t j = 0; j < trace.support.size(); ++j) {
      const std::size_t x = trace.support[j];
      votes[j] += domain.label(x) * h.evaluate(domain, x);
    }
  }
  ExponentialLoss out;
  out.log_total = log_z_from_votes(votes, trace.learning_rate, out.log_point);
  return out;
}

double min_margin(const VotingClassifier& vc, const TrainingSet& training,
                  const LabeledDomain& domain) {
  if (training.indices.empty()) throw InvalidInput("min_margin over no points");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t x : training.indices) {
    best = std::min(best, domain.label(x) * vc.vote(domain, x));
  }
  return best;
}

TraceBuilder::TraceBuilder(const LabeledDomain& domain,
                           const TrainingSet& training, double gamma, double w,
                           std::size_t target_steps, SnapshotPolicy policy)
    : domain_(domain),
      policy_(policy),
      current_(WeightDistribution::uniform_over(training)),
      vote_sums_(training.size(), 0) {
  training.validate(domain);
  trace_.gamma = gamma;
  trace_.learning_rate = w;
  trace_.target_steps = target_steps;
  trace_.support = training.indices;
  std::vector<double> scratch;
  trace_.log_z0 = log_z_from_votes(vote_sums_, w, scratch);
  keep_snapshot(0);
}

void TraceBuilder::step(std::size_t block, const Hypothesis& h, double loss) {
  TraceRound round;
  round.block = block;
  round.dist_digest = current_.digest();
  round.max_weight = current_.max_weight();
  round.min_weight = current_.min_weight();
  round.hypothesis_id = h.id();
  round.loss = loss;

  const auto& support = trace_.support;
  const auto k = static_cast<double>(trace_.hypotheses.size() + 1);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < support.size(); ++j) {
    vote_sums_[j] += domain_.label(support[j]) * h.evaluate(domain_, support[j]);
    worst = std::min(worst, static_cast<double>(vote_sums_[j]) / k);
  }
  std::vector<double> scratch;
  round.log_z = log_z_from_votes(vote_sums_, trace_.learning_rate, scratch);
  round.min_margin = worst;

  current_ = update_distribution(current_, h, domain_, trace_.learning_rate);
  trace_.rounds.push_back(round);
  trace_.hypotheses.push_back(h);
  keep_snapshot(trace_.rounds.size());
}

void TraceBuilder::keep_snapshot(std::size_t step) {
  switch (policy_.mode) {
    case SnapshotMode::kNone:
      return;
    case SnapshotMode::kAll:
      if (stored_entries_ + current_.size() > policy_.max_entries) {
        trace_.snapshots_truncated = true;
        return;
      }
      stored_entries_ += current_.size();
      break;
    case SnapshotMode::kWindow:
      if (policy_.window == 0) return;
      if (trace_.snapshots.size() == policy_.window) {
        trace_.snapshots.erase(trace_.snapshots.begin());
        trace_.snapshots_truncated = true;
      }
      break;
  }
  trace_.snapshots.push_back(
      {step, {current_.weights().begin(), current_.weights().end()}});
}

BoostOutcome run_adaboost(const LabeledDomain& domain, const TrainingSet& training,
                          WeakLearnerOracle& oracle, double gamma,
                          std::size_t steps, SnapshotPolicy policy) {
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    throw InvalidInput("run_adaboost needs 0 < gamma <= 1/2");
  }
  if (steps == 0) throw InvalidInput("run_adaboost needs K >= 1");
  if (training.indices.empty()) throw InvalidInput("empty training set");

  const double w = learning_rate(gamma);
  TraceBuilder builder(domain, training, gamma, w, steps, policy);
  BoostOutcome out;
  for (std::size_t r = 0; r < steps; ++r) {
    oracle.set_round(r);
    QueryOutcome answer =
        validated_query(oracle, builder.current(), gamma / 4, domain, out.ledger, r);
    if (auto* h = std::get_if<Hypothesis>(&answer)) {
      builder.step(r, *h, out.ledger.records().back().measured_loss);
      continue;
    }
    BoostFailure failure;
    failure.block = r;
    failure.step = r;
    if (auto* v = std::get_if<AdvantageViolation>(&answer)) {
      failure.reason = BoostFailure::Reason::kAdvantageViolation;
      failure.best_loss = v->measured_loss;
    } else {
      failure.reason = BoostFailure::Reason::kOracleFailed;
      failure.best_loss = std::numeric_limits<double>::quiet_NaN();
    }
    out.failure = failure;
    out.trace = builder.take();
    return out;
  }
  out.trace = builder.take();
  out.classifier.emplace(out.trace.hypotheses);
  return out;
}

}  // namespace boostlab
