// Numeric verification toolkit: max-divergence, advanced composition,
// ε-approximation certification, the biased-coin game, and the min-margin
// generalization bound.

#ifndef BOOSTLAB_ANALYSIS_HPP
#define BOOSTLAB_ANALYSIS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "boostlab/adaboost.hpp"
#include "boostlab/core_model.hpp"
#include "boostlab/random.hpp"

namespace boostlab {

/// Raised when a trace lacks the snapshots an analysis needs.
class UnsupportedTrace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ln sup_x a(x)/b(x) over points with a(x) > 0; +inf when some such point has
/// b(x) = 0. Throws InvalidInput when the supports differ.
double max_divergence(const WeightDistribution& a, const WeightDistribution& b);
double max_divergence(std::span<const double> a, std::span<const double> b);

struct DivergenceCheck {
  std::size_t from_step = 0;
  std::size_t to_step = 0;
  double forward = 0.0;  // D(D_from, D_to)
  double reverse = 0.0;  // D(D_to, D_from)
  double bound = 0.0;
  bool ok() const;
};

struct DivergenceReport {
  double step_bound = 0.0;    // 2γ
  double window_bound = 0.0;  // 2γR
  std::vector<DivergenceCheck> steps;    // consecutive snapshot pairs
  std::vector<DivergenceCheck> windows;  // (D_{kR}, D_r), r within block k
  std::vector<DivergenceCheck> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks every consecutive retained pair against 2γ and every retained
/// (D_{kR}, D_r) pair with kR ≤ r ≤ (k+1)R against 2γR, both directions,
/// each with 1e-9 slack. Throws UnsupportedTrace with fewer than two
/// snapshots.
DivergenceReport check_trace_divergence(const BoostTrace& trace, double gamma,
                                        std::size_t steps_per_block);

struct ZDecayReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;  // steps whose loss exceeded 1/2 − γ/4
  std::vector<std::size_t> violations;
  double worst_excess = 0.0;  // max of Δlog Z − ½·ln(1 − γ²/4)

  bool ok() const { return violations.empty(); }
};

/// log Z_{r+1} − log Z_r ≤ ½·ln(1 − γ²/4) + 1e-9 at every recorded step whose
/// loss is at most 1/2 − γ/4.
ZDecayReport check_z_decay(const BoostTrace& trace);

struct CompositionResult {
  double epsilon = 0.0;
  double delta = 0.0;
};

/// ε̂ = nε(e^ε − 1) + ε·√(2n·ln(1/δ′)), δ̂ = nδ + δ′.
CompositionResult advanced_composition(double epsilon, double delta,
                                       std::size_t n, double delta_prime);

struct ApproximationResult {
  bool passed = false;
  std::size_t worst = 0;  // class position of the largest deviation
  double deviation = 0.0;
};

inline constexpr double kApproximationTolerance = 1e-12;

/// Exhaustive check that the uniform distribution over `sample` matches
/// `dist`'s loss on every class member to within ε (+1e-12).
ApproximationResult eps_approximation_check(std::span<const std::size_t> sample,
                                            const WeightDistribution& dist,
                                            const HypothesisClass& cls,
                                            double epsilon,
                                            const LabeledDomain& domain);

/// ⌈c′·(d + ln(1/δ))/ε²⌉.
std::size_t vc_sample_size(double vc_dim, double epsilon, double delta,
                           double c_prime);

/// Largest n supported by coin_majority_error.
inline constexpr std::size_t kMaxCoinTosses = 100000;

/// Error of the majority rule on n tosses of a coin with bias ±ε:
/// P[Bin(n, (1+ε)/2) < n/2] + ½·P[= n/2], by exact log-space summation.
double coin_majority_error(std::size_t n, double epsilon);

enum class CoinRule { kMajority, kFirstCoin };

/// Guess ±1 from the tosses (+1 = heads).
using CoinGuess = std::function<int(std::span<const std::int8_t>, Rng&)>;

struct SimulationResult {
  double error = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

/// Monte Carlo of the coin game: b uniform in {±1}, n tosses of
/// Ber((1 + bε)/2), error = P[guess ≠ b].
SimulationResult coin_game_simulate(std::size_t n, double epsilon,
                                    std::size_t trials, CoinRule rule,
                                    std::uint64_t seed);
SimulationResult coin_game_simulate(std::size_t n, double epsilon,
                                    std::size_t trials, const CoinGuess& rule,
                                    std::uint64_t seed);

struct ExponentBand {
  double lower = 0.0;  // c₁ = min of −ln(err)/(ε²n + 1)
  double upper = 0.0;  // c₂ = max of the same ratio
  double ratio() const { return upper / lower; }
};

/// Fits the tightest band c₁·(ε²n+1) ≤ −ln(err) ≤ c₂·(ε²n+1) over the grid.
ExponentBand coin_exponent_band(std::span<const std::size_t> ns,
                                std::span<const double> epsilons);

/// α_gen·(d·ln(m)·ln(m/d) + ln(1/δ)) / (γ²·m).
double breiman_bound(double d, double m, double gamma, double delta,
                     double alpha_gen);

}  // namespace boostlab

#endif  // BOOSTLAB_ANALYSIS_HPP
