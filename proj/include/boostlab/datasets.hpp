// Synthetic tasks for demos, experiments and tests.

#ifndef BOOSTLAB_DATASETS_HPP
#define BOOSTLAB_DATASETS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "boostlab/core_model.hpp"
#include "boostlab/random.hpp"

namespace boostlab {

/// Realizable feature-vector task: 2m points uniform in [0,1]^dim labeled by
/// the majority vote of `voters` (odd) random stumps. The first m points are
/// the training set, the last m are held out.
///
/// Because the concept is a majority of V stumps, every distribution over the
/// points admits a stump with advantage at least 1/(2V).
struct StumpTask {
  LabeledDomain domain;
  TrainingSet training;
  std::vector<std::size_t> held_out;
  std::vector<Stump> concept_stumps;

  double guaranteed_advantage() const {
    return 0.5 / static_cast<double>(concept_stumps.size());
  }
};

StumpTask make_stump_task(std::size_t m, std::size_t dim, std::size_t voters,
                          std::uint64_t seed);

/// Uniformly random dense labeling of n points.
PackedLabels random_labels(std::size_t n, Rng& rng);

/// `count` independent uniformly random dense hypotheses over n points.
HypothesisClass random_class(std::size_t n, std::size_t count, Rng& rng);

}  // namespace boostlab

#endif  // BOOSTLAB_DATASETS_HPP
