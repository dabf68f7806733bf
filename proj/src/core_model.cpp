#include "boostlab/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boostlab/random.hpp"

namespace boostlab {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidInput("feature matrix data does not match its shape");
  }
}

PackedLabels PackedLabels::from_signs(std::span<const int> signs) {
  PackedLabels out(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) {
      throw InvalidInput("labels must be +1 or -1");
    }
    out.set(i, signs[i]);
  }
  return out;
}

void PackedLabels::set(std::size_t i, int label) {
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (label > 0) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

void PackedLabels::trim() {
  if (size_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }
}

PackedLabels PackedLabels::negated() const {
  PackedLabels out = *this;
  for (auto& w : out.words_) w = ~w;
  out.trim();
  return out;
}

std::uint64_t PackedLabels::digest() const {
  Fnv1a h;
  h.add(size_);
  h.add_span(std::span<const std::uint64_t>(words_));
  return h.value();
}

LabeledDomain::LabeledDomain(PackedLabels concept_labels)
    : concept_(std::move(concept_labels)) {
  if (concept_.size() == 0 || concept_.size() % 2 != 0) {
    throw InvalidInput("domain size must be 2m with m >= 1");
  }
}

LabeledDomain::LabeledDomain(PackedLabels concept_labels, FeatureMatrix features)
    : LabeledDomain(std::move(concept_labels)) {
  if (features.rows() != concept_.size() || features.cols() == 0) {
    throw InvalidInput("feature rows must match the domain size");
  }
  features_ = std::move(features);
}

void TrainingSet::validate(const LabeledDomain& domain) const {
  for (std::size_t i : indices) {
    if (i >= domain.size()) {
      throw InvalidInput("training index outside the domain");
    }
  }
}

WeightDistribution::WeightDistribution(std::vector<std::size_t> support,
                                       std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.size() != weights_.size() || support_.empty()) {
    throw InvalidInput("distribution support and weights must be nonempty and "
                       "of equal length");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInput("distribution weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidInput("distribution has zero total mass");
  for (double& w : weights_) w /= total;
}

WeightDistribution WeightDistribution::uniform(std::vector<std::size_t> support) {
  const std::size_t n = support.size();
  return WeightDistribution(std::move(support), std::vector<double>(n, 1.0));
}

WeightDistribution WeightDistribution::uniform_over(const TrainingSet& training) {
  return uniform(training.indices);
}

WeightDistribution WeightDistribution::point_mass(std::vector<std::size_t> support,
                                                  std::size_t position) {
  std::vector<double> w(support.size(), 0.0);
  if (position >= w.size()) throw InvalidInput("point mass position out of range");
  w[position] = 1.0;
  return WeightDistribution(std::move(support), std::move(w));
}

double WeightDistribution::max_weight() const {
  return *std::max_element(weights_.begin(), weights_.end());
}

double WeightDistribution::min_weight() const {
  return *std::min_element(weights_.begin(), weights_.end());
}

std::uint64_t WeightDistribution::digest() const {
  Fnv1a h;
  h.add_span(std::span<const std::size_t>(support_));
  h.add_span(std::span<const double>(weights_));
  return h.value();
}

void WeightDistribution::validate(const LabeledDomain& domain) const {
  for (std::size_t i : support_) {
    if (i >= domain.size()) {
      throw InvalidInput("distribution index outside the domain");
    }
  }
}

int Hypothesis::evaluate(const LabeledDomain& domain, std::size_t point) const {
  if (const auto* dense = std::get_if<PackedLabels>(&repr_)) {
    return (*dense)[point];
  }
  return std::get<Stump>(repr_).evaluate(domain.features().row(point));
}

Hypothesis Hypothesis::negated() const {
  if (const auto* dense = std::get_if<PackedLabels>(&repr_)) {
    return Hypothesis(dense->negated());
  }
  Stump s = std::get<Stump>(repr_);
  s.polarity = -s.polarity;
  return Hypothesis(s);
}

std::uint64_t Hypothesis::id() const {
  if (const auto* dense = std::get_if<PackedLabels>(&repr_)) {
    return dense->digest();
  }
  const Stump& s = std::get<Stump>(repr_);
  Fnv1a h;
  h.add(std::uint8_t{0x5});
  h.add(s.feature);
  h.add(s.threshold);
  h.add(s.polarity);
  return h.value();
}

namespace {

void check_compatible(const Hypothesis& h, const LabeledDomain& domain) {
  if (h.is_dense()) {
    if (h.dense().size() != domain.size()) {
      throw InvalidInput("dense hypothesis length differs from the domain size");
    }
  } else if (!domain.has_features() ||
             h.stump().feature >= domain.features().cols()) {
    throw InvalidInput("stump hypothesis needs a domain with that feature");
  }
}

// Shared by spreadness and generalized_spreadness so that the two agree
// bit-for-bit when t = √d.
double spread_functional(std::span<const double> weights, std::size_t head,
                         double tail_scale) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return weights[a] > weights[b];
  });
  double top = 0.0;
  double tail_sq = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double w = weights[order[r]];
    if (r < head) {
      top += w;
    } else {
      tail_sq += w * w;
    }
  }
  return top + tail_scale * std::sqrt(tail_sq);
}

}  // namespace

double empirical_loss(const Hypothesis& h, const WeightDistribution& dist,
                      const LabeledDomain& domain) {
  dist.validate(domain);
  check_compatible(h, domain);
  const auto support = dist.support();
  const auto weights = dist.weights();
  double wrong = 0.0;
  double right = 0.0;
  if (h.is_dense()) {
    const PackedLabels& labels = h.dense();
    const PackedLabels& truth = domain.concept_labels();
    for (std::size_t i = 0; i < support.size(); ++i) {
      (labels[support[i]] != truth[support[i]] ? wrong : right) += weights[i];
    }
  } else {
    for (std::size_t i = 0; i < support.size(); ++i) {
      (h.evaluate(domain, support[i]) != domain.label(support[i]) ? wrong : right) +=
          weights[i];
    }
  }
  return std::clamp(wrong / (wrong + right), 0.0, 1.0);
}

double advantage(const Hypothesis& h, const WeightDistribution& dist,
                 const LabeledDomain& domain) {
  return 0.5 - empirical_loss(h, dist, domain);
}

double margin(const std::function<double(std::size_t)>& vote, std::size_t point,
              const LabeledDomain& domain) {
  return domain.label(point) * vote(point);
}

double spreadness(const WeightDistribution& dist, std::size_t d) {
  if (d == 0) throw InvalidInput("spreadness needs d >= 1");
  return spread_functional(dist.weights(), d, std::sqrt(static_cast<double>(d)));
}

double generalized_spreadness(std::span<const double> weights, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidInput("generalized spreadness needs t > 0");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("weights must be nonnegative");
  }
  // Largest k with √k ≤ t, so that t = √d selects exactly d head entries even
  // when t·t rounds below d.
  auto head = static_cast<std::size_t>(std::floor(t * t));
  while (std::sqrt(static_cast<double>(head + 1)) <= t) ++head;
  while (head > 0 && std::sqrt(static_cast<double>(head)) > t) --head;
  return spread_functional(weights, head, t);
}

}  // namespace boostlab
