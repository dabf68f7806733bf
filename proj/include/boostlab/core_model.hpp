// Domain, distribution, hypothesis, loss, margin and spreadness primitives.
//
// Every other module works over a finite labeled domain of 2m points
// identified by their index. Distributions carry their own support (a list of
// domain indices, duplicates allowed) so that a distribution over a training
// multiset and one over the whole domain share one representation.

#ifndef BOOSTLAB_CORE_MODEL_HPP
#define BOOSTLAB_CORE_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace boostlab {

/// Raised when an operation's precondition on its inputs is violated.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kNormalizationTolerance = 1e-9;

/// Row-major real matrix, one row per domain point.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A ±1 labeling of n points stored one bit per point (bit set = +1).
class PackedLabels {
 public:
  PackedLabels() = default;
  explicit PackedLabels(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}
  /// Accepts any vector whose entries are exactly +1 or -1.
  static PackedLabels from_signs(std::span<const int> signs);

  std::size_t size() const { return size_; }
  int operator[](std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u ? 1 : -1;
  }
  void set(std::size_t i, int label);
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words() { return words_; }
  /// Clears the unused high bits of the last word.
  void trim();
  PackedLabels negated() const;
  std::uint64_t digest() const;

  friend bool operator==(const PackedLabels&, const PackedLabels&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Finite input universe of 2m points with a ±1 ground-truth concept.
/// Points are identified by index 0..2m-1. Feature vectors are optional and
/// only present for the stump demo tasks.
class LabeledDomain {
 public:
  explicit LabeledDomain(PackedLabels concept_labels);
  LabeledDomain(PackedLabels concept_labels, FeatureMatrix features);

  std::size_t size() const { return concept_.size(); }
  std::size_t m() const { return concept_.size() / 2; }
  int label(std::size_t point) const { return concept_[point]; }
  const PackedLabels& concept_labels() const { return concept_; }
  bool has_features() const { return features_.rows() != 0; }
  const FeatureMatrix& features() const { return features_; }

 private:
  PackedLabels concept_;
  FeatureMatrix features_;
};

/// Multiset of domain indices; labels are implied by the domain's concept.
struct TrainingSet {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  void validate(const LabeledDomain& domain) const;
};

/// Nonnegative, unit-normalized weights over a support of domain indices.
/// Immutable: updates produce new values.
class WeightDistribution {
 public:
  /// Normalizes `weights` by explicit division. Throws InvalidInput on a size
  /// mismatch, a negative or non-finite weight, or zero total mass.
  WeightDistribution(std::vector<std::size_t> support,
                     std::vector<double> weights);

  static WeightDistribution uniform(std::vector<std::size_t> support);
  static WeightDistribution uniform_over(const TrainingSet& training);
  static WeightDistribution point_mass(std::vector<std::size_t> support,
                                       std::size_t position);

  std::size_t size() const { return support_.size(); }
  std::span<const std::size_t> support() const { return support_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t position) const { return weights_[position]; }
  double max_weight() const;
  double min_weight() const;
  std::uint64_t digest() const;
  void validate(const LabeledDomain& domain) const;

  friend bool operator==(const WeightDistribution&,
                         const WeightDistribution&) = default;

 private:
  std::vector<std::size_t> support_;
  std::vector<double> weights_;
};

/// Axis-aligned threshold rule: polarity * (x[feature] > threshold ? +1 : -1).
struct Stump {
  std::size_t feature = 0;
  double threshold = -std::numeric_limits<double>::infinity();
  int polarity = 1;

  int evaluate(std::span<const double> row) const {
    return (row[feature] > threshold ? 1 : -1) * polarity;
  }
  friend bool operator==(const Stump&, const Stump&) = default;
};

/// A ±1 labeling of the domain, either dense or as a stump rule.
class Hypothesis {
 public:
  explicit Hypothesis(PackedLabels labels) : repr_(std::move(labels)) {}
  explicit Hypothesis(Stump stump) : repr_(stump) {}

  /// Returns exactly +1 or -1. Stumps require a domain with features.
  int evaluate(const LabeledDomain& domain, std::size_t point) const;
  Hypothesis negated() const;
  bool is_dense() const { return std::holds_alternative<PackedLabels>(repr_); }
  const PackedLabels& dense() const { return std::get<PackedLabels>(repr_); }
  const Stump& stump() const { return std::get<Stump>(repr_); }
  /// Content hash; equal hypotheses share an id.
  std::uint64_t id() const;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;

 private:
  std::variant<PackedLabels, Stump> repr_;
};

/// Ordered finite list of hypotheses. The order is fixed at construction.
class HypothesisClass {
 public:
  HypothesisClass() = default;
  explicit HypothesisClass(std::vector<Hypothesis> members)
      : members_(std::move(members)) {}

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const Hypothesis& operator[](std::size_t i) const { return members_[i]; }
  std::span<const Hypothesis> members() const { return members_; }

 private:
  std::vector<Hypothesis> members_;
};

/// Σ_i dist(i)·1[h(x_i) ≠ c(x_i)].
double empirical_loss(const Hypothesis& h, const WeightDistribution& dist,
                      const LabeledDomain& domain);

/// 1/2 − empirical_loss.
double advantage(const Hypothesis& h, const WeightDistribution& dist,
                 const LabeledDomain& domain);

/// c(x)·g(x) for a vote function with values in [−1, 1].
double margin(const std::function<double(std::size_t)>& vote, std::size_t point,
              const LabeledDomain& domain);

/// Top-d mass plus √d times the Euclidean norm of the remaining weights.
double spreadness(const WeightDistribution& dist, std::size_t d);

/// Top-⌊t²⌋ mass plus t times the Euclidean norm of the tail.
double generalized_spreadness(std::span<const double> weights, double t);

}  // namespace boostlab

#endif  // BOOSTLAB_CORE_MODEL_HPP
