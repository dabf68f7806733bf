#include "boostlab/weak_learners.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace boostlab {

void QueryLedger::record(QueryRecord rec) {
  auto it = std::find_if(per_round_.begin(), per_round_.end(),
                         [&](const auto& e) { return e.first == rec.round; });
  if (it == per_round_.end()) {
    if (max_rounds_ != 0 && per_round_.size() >= max_rounds_) {
      throw std::length_error("query ledger: round budget exceeded");
    }
    per_round_.emplace_back(rec.round, 0);
    it = std::prev(per_round_.end());
  }
  if (max_per_round_ != 0 && it->second >= max_per_round_) {
    throw std::length_error("query ledger: per-round query budget exceeded");
  }
  ++it->second;
  records_.push_back(rec);
}

std::size_t QueryLedger::queries_in_round(std::size_t round) const {
  for (const auto& [r, count] : per_round_) {
    if (r == round) return count;
  }
  return 0;
}

std::size_t QueryLedger::max_queries_per_round() const {
  std::size_t best = 0;
  for (const auto& e : per_round_) best = std::max(best, e.second);
  return best;
}

std::size_t erm_finite_index(const HypothesisClass& cls,
                             const WeightDistribution& dist,
                             const LabeledDomain& domain) {
  if (cls.empty()) throw InvalidInput("ERM over an empty hypothesis class");
  std::size_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const double loss = empirical_loss(cls[i], dist, domain);
    if (loss < best_loss) {
      best_loss = loss;
      best = i;
    }
  }
  return best;
}

Hypothesis erm_finite(const HypothesisClass& cls, const WeightDistribution& dist,
                      const LabeledDomain& domain) {
  return cls[erm_finite_index(cls, dist, domain)];
}

namespace {

// Sweeps thresholds from -inf upward for each feature. Candidate order is
// (feature, threshold ascending, polarity +1 then -1); the first minimum wins.
StumpFit fit_stump(const FeatureMatrix& features, std::span<const std::size_t> rows,
                   std::span<const int> labels, std::span<const double> weights) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  double negative_mass = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    total += weights[i];
    if (labels[i] < 0) negative_mass += weights[i];
  }

  StumpFit best{Stump{0, -kInf, 1}, kInf};
  auto consider = [&](std::size_t feature, double threshold, double err_plus) {
    if (err_plus < best.loss) best = {Stump{feature, threshold, 1}, err_plus};
    const double err_minus = total - err_plus;
    if (err_minus < best.loss) best = {Stump{feature, threshold, -1}, err_minus};
  };

  std::vector<std::size_t> order(rows.size());
  for (std::size_t f = 0; f < features.cols(); ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return features.at(rows[a], f) < features.at(rows[b], f);
    });
    // Threshold -inf: every point predicted +1.
    double err = negative_mass;
    consider(f, -kInf, err);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t i = order[k];
      err += labels[i] > 0 ? weights[i] : -weights[i];
      const double v = features.at(rows[i], f);
      if (k + 1 < order.size()) {
        const double next = features.at(rows[order[k + 1]], f);
        if (next == v) continue;
        consider(f, v + (next - v) / 2, err);
      } else {
        consider(f, kInf, err);
      }
    }
  }
  // Exact loss of the winner.
  double wrong = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (best.stump.evaluate(features.row(rows[i])) != labels[i]) wrong += weights[i];
  }
  best.loss = std::clamp(wrong / total, 0.0, 1.0);
  return best;
}

}  // namespace

StumpFit train_stump(const FeatureMatrix& features, std::span<const int> labels,
                     std::span<const double> weights) {
  if (features.cols() == 0) throw InvalidInput("stump training needs dim >= 1");
  if (labels.size() != features.rows() || weights.size() != features.rows() ||
      features.rows() == 0) {
    throw InvalidInput("stump training: rows, labels and weights must agree");
  }
  std::vector<std::size_t> rows(features.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_stump(features, rows, labels, weights);
}

ErmOracle::ErmOracle(const LabeledDomain& domain, HypothesisClass cls,
                     std::optional<double> failure_loss)
    : domain_(domain), cls_(std::move(cls)), failure_loss_(failure_loss) {
  if (cls_.empty()) throw InvalidInput("ERM oracle needs a nonempty class");
}

std::optional<Hypothesis> ErmOracle::answer(const WeightDistribution& dist) {
  const std::size_t best = erm_finite_index(cls_, dist, domain_);
  if (failure_loss_ && empirical_loss(cls_[best], dist, domain_) > *failure_loss_) {
    return std::nullopt;
  }
  return cls_[best];
}

StumpOracle::StumpOracle(const LabeledDomain& domain) : domain_(domain) {
  if (!domain.has_features()) {
    throw InvalidInput("stump oracle needs a domain with features");
  }
}

std::optional<Hypothesis> StumpOracle::answer(const WeightDistribution& dist) {
  dist.validate(domain_);
  const auto support = dist.support();
  std::vector<int> labels(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    labels[i] = domain_.label(support[i]);
  }
  const StumpFit fit =
      fit_stump(domain_.features(), support, labels, dist.weights());
  if (fit.loss >= 0.5) return std::nullopt;
  return Hypothesis(fit.stump);
}

QueryOutcome validated_query(WeakLearnerOracle& oracle,
                             const WeightDistribution& dist, double gamma,
                             const LabeledDomain& domain, QueryLedger& ledger,
                             std::size_t round) {
  if (!(gamma > 0.0 && gamma < 0.5)) {
    throw InvalidInput("validated_query needs 0 < gamma < 1/2");
  }
  std::optional<Hypothesis> h = oracle.ask(dist);
  if (!h) {
    ledger.record({round, dist.digest(), std::nullopt, 0.0});
    return OracleFailure{};
  }
  const double loss = empirical_loss(*h, dist, domain);
  ledger.record({round, dist.digest(), h->id(), loss});
  if (loss > 0.5 - gamma + kAdvantageTolerance) {
    return AdvantageViolation{std::move(*h), loss};
  }
  return std::move(*h);
}

}  // namespace boostlab
