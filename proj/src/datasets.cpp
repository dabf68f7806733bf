#include "boostlab/datasets.hpp"

#include <random>

namespace boostlab {

StumpTask make_stump_task(std::size_t m, std::size_t dim, std::size_t voters,
                          std::uint64_t seed) {
  if (m < 1 || dim < 1) throw InvalidInput("stump task needs m, dim >= 1");
  if (voters % 2 == 0) throw InvalidInput("stump task needs an odd voter count");

  Rng rng = make_rng(seed, {0x5747});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> cut(0.2, 0.8);
  std::uniform_int_distribution<std::size_t> feature(0, dim - 1);
  std::bernoulli_distribution coin(0.5);

  std::vector<Stump> stumps(voters);
  for (auto& s : stumps) {
    s.feature = feature(rng);
    s.threshold = cut(rng);
    s.polarity = coin(rng) ? 1 : -1;
  }

  const std::size_t n = 2 * m;
  std::vector<double> data(n * dim);
  for (auto& x : data) x = unit(rng);
  FeatureMatrix features(n, dim, std::move(data));
  PackedLabels labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    int sum = 0;
    for (const auto& s : stumps) sum += s.evaluate(features.row(i));
    labels.set(i, sum > 0 ? 1 : -1);
  }

  StumpTask task{LabeledDomain(std::move(labels), std::move(features)), {}, {},
                 std::move(stumps)};
  for (std::size_t i = 0; i < m; ++i) task.training.indices.push_back(i);
  for (std::size_t i = m; i < n; ++i) task.held_out.push_back(i);
  return task;
}

PackedLabels random_labels(std::size_t n, Rng& rng) {
  PackedLabels out(n);
  for (auto& w : out.mutable_words()) w = rng();
  out.trim();
  return out;
}

HypothesisClass random_class(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<Hypothesis> members;
  members.reserve(count);
  for (std::size_t i = 0; i < count; ++i) members.emplace_back(random_labels(n, rng));
  return HypothesisClass(std::move(members));
}

}  // namespace boostlab
