#include "boostlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace boostlab {

namespace {

constexpr double kDivergenceSlack = 1e-9;

double log_sum_exp(std::span<const double> xs) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double x : xs) peak = std::max(peak, x);
  if (peak == -std::numeric_limits<double>::infinity()) return peak;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - peak);
  return peak + std::log(acc);
}

}  // namespace

double max_divergence(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("max_divergence: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0.0) continue;
    if (b[i] <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::log(a[i] / b[i]));
  }
  return worst;
}

double max_divergence(const WeightDistribution& a, const WeightDistribution& b) {
  if (!std::ranges::equal(a.support(), b.support())) {
    throw InvalidInput("max_divergence: distributions have different index sets");
  }
  return max_divergence(a.weights(), b.weights());
}

bool DivergenceCheck::ok() const {
  return forward <= bound + kDivergenceSlack && reverse <= bound + kDivergenceSlack;
}

DivergenceReport check_trace_divergence(const BoostTrace& trace, double gamma,
                                        std::size_t steps_per_block) {
  if (steps_per_block == 0) throw InvalidInput("window length R must be >= 1");
  const auto& snaps = trace.snapshots;
  if (snaps.size() < 2) {
    throw UnsupportedTrace("trace retains fewer than two distribution snapshots");
  }
  DivergenceReport report;
  report.step_bound = 2.0 * gamma;
  report.window_bound = 2.0 * gamma * static_cast<double>(steps_per_block);

  auto make = [](const Snapshot& from, const Snapshot& to, double bound) {
    DivergenceCheck c;
    c.from_step = from.step;
    c.to_step = to.step;
    c.forward = max_divergence(from.weights, to.weights);
    c.reverse = max_divergence(to.weights, from.weights);
    c.bound = bound;
    return c;
  };

  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    if (snaps[i + 1].step != snaps[i].step + 1) continue;
    report.steps.push_back(make(snaps[i], snaps[i + 1], report.step_bound));
    if (!report.steps.back().ok()) report.violations.push_back(report.steps.back());
  }
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    if (snaps[i].step % steps_per_block != 0) continue;
    for (std::size_t j = i + 1; j < snaps.size(); ++j) {
      if (snaps[j].step > snaps[i].step + steps_per_block) break;
      report.windows.push_back(make(snaps[i], snaps[j], report.window_bound));
      if (!report.windows.back().ok()) {
        report.violations.push_back(report.windows.back());
      }
    }
  }
  return report;
}

ZDecayReport check_z_decay(const BoostTrace& trace) {
  const double g = trace.gamma;
  const double bound = 0.5 * std::log1p(-g * g / 4.0);
  ZDecayReport report;
  report.worst_excess = -std::numeric_limits<double>::infinity();
  double prev = trace.log_z0;
  for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
    const TraceRound& round = trace.rounds[r];
    const double drop = round.log_z - prev;
    prev = round.log_z;
    if (round.loss > 0.5 - g / 4.0) {
      ++report.skipped;
      continue;
    }
    ++report.checked;
    report.worst_excess = std::max(report.worst_excess, drop - bound);
    if (drop > bound + kDivergenceSlack) report.violations.push_back(r);
  }
  return report;
}

CompositionResult advanced_composition(double epsilon, double delta,
                                       std::size_t n, double delta_prime) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInput("advanced_composition needs epsilon >= 0");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw InvalidInput("advanced_composition needs delta in [0, 1)");
  }
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    throw InvalidInput("advanced_composition needs delta' in (0, 1)");
  }
  if (n < 1) throw InvalidInput("advanced_composition needs n >= 1");
  const double nn = static_cast<double>(n);
  CompositionResult out;
  out.epsilon = nn * epsilon * std::expm1(epsilon) +
                epsilon * std::sqrt(2.0 * nn * std::log(1.0 / delta_prime));
  out.delta = std::min(1.0, nn * delta + delta_prime);
  return out;
}

ApproximationResult eps_approximation_check(std::span<const std::size_t> sample,
                                            const WeightDistribution& dist,
                                            const HypothesisClass& cls,
                                            double epsilon,
                                            const LabeledDomain& domain) {
  if (sample.empty()) throw InvalidInput("eps-approximation needs a nonempty sample");
  if (!(epsilon >= 0.0)) throw InvalidInput("epsilon must be nonnegative");
  const WeightDistribution empirical =
      WeightDistribution::uniform({sample.begin(), sample.end()});
  ApproximationResult out;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const double dev = std::abs(empirical_loss(cls[i], dist, domain) -
                                empirical_loss(cls[i], empirical, domain));
    if (dev > out.deviation) {
      out.deviation = dev;
      out.worst = i;
    }
  }
  out.passed = out.deviation <= epsilon + kApproximationTolerance;
  return out;
}

std::size_t vc_sample_size(double vc_dim, double epsilon, double delta,
                           double c_prime) {
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) ||
      !(vc_dim >= 0.0) || !(c_prime > 0.0)) {
    throw InvalidInput("vc_sample_size: parameters out of range");
  }
  return static_cast<std::size_t>(
      std::ceil(c_prime * (vc_dim + std::log(1.0 / delta)) / (epsilon * epsilon)));
}

double coin_majority_error(std::size_t n, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidInput("coin bias epsilon must lie in [0, 1]");
  }
  if (n > kMaxCoinTosses) {
    throw InvalidInput("coin_majority_error supports at most 100000 tosses");
  }
  if (n == 0) return 0.5;
  if (epsilon == 1.0) return 0.0;
  const double log_p = std::log1p(epsilon) - std::log(2.0);
  const double log_q = std::log1p(-epsilon) - std::log(2.0);
  const double nn = static_cast<double>(n);
  const double log_n_fact = std::lgamma(nn + 1.0);
  std::vector<double> terms;
  terms.reserve(n / 2 + 1);
  for (std::size_t k = 0; 2 * k <= n; ++k) {
    const double kk = static_cast<double>(k);
    double t = log_n_fact - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) +
               kk * log_p + (nn - kk) * log_q;
    if (2 * k == n) t -= std::log(2.0);
    terms.push_back(t);
  }
  return std::clamp(std::exp(log_sum_exp(terms)), 0.0, 0.5);
}

namespace {

int majority_guess(std::span<const std::int8_t> tosses, Rng& rng) {
  long long sum = 0;
  for (auto t : tosses) sum += t;
  if (sum > 0) return 1;
  if (sum < 0) return -1;
  return std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
}

int first_coin_guess(std::span<const std::int8_t> tosses, Rng& rng) {
  if (tosses.empty()) return std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  return tosses.front();
}

}  // namespace

SimulationResult coin_game_simulate(std::size_t n, double epsilon,
                                    std::size_t trials, const CoinGuess& rule,
                                    std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("coin game needs at least one trial");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidInput("coin bias epsilon must lie in [0, 1]");
  }
  Rng rng = make_rng(seed, {0xc01});
  std::bernoulli_distribution hidden(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::int8_t> tosses(n);
  std::size_t errors = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const int b = hidden(rng) ? 1 : -1;
    const double heads = (1.0 + b * epsilon) / 2.0;
    for (auto& x : tosses) x = unit(rng) < heads ? 1 : -1;
    if (rule(tosses, rng) != b) ++errors;
  }
  SimulationResult out;
  out.trials = trials;
  out.error = static_cast<double>(errors) / static_cast<double>(trials);
  out.standard_error =
      std::sqrt(out.error * (1.0 - out.error) / static_cast<double>(trials));
  return out;
}

SimulationResult coin_game_simulate(std::size_t n, double epsilon,
                                    std::size_t trials, CoinRule rule,
                                    std::uint64_t seed) {
  return coin_game_simulate(
      n, epsilon, trials,
      rule == CoinRule::kMajority ? CoinGuess(majority_guess)
                                  : CoinGuess(first_coin_guess),
      seed);
}

ExponentBand coin_exponent_band(std::span<const std::size_t> ns,
                                std::span<const double> epsilons) {
  if (ns.empty() || epsilons.empty()) throw InvalidInput("empty coin grid");
  ExponentBand band{std::numeric_limits<double>::infinity(), 0.0};
  for (double eps : epsilons) {
    for (std::size_t n : ns) {
      const double scale = eps * eps * static_cast<double>(n) + 1.0;
      const double ratio = -std::log(coin_majority_error(n, eps)) / scale;
      band.lower = std::min(band.lower, ratio);
      band.upper = std::max(band.upper, ratio);
    }
  }
  return band;
}

double breiman_bound(double d, double m, double gamma, double delta,
                     double alpha_gen) {
  if (!(d >= 1.0) || !(m > d)) throw InvalidInput("breiman_bound needs m > d >= 1");
  if (!(gamma > 0.0 && gamma < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput("breiman_bound needs gamma, delta in (0, 1)");
  }
  if (!(alpha_gen > 0.0)) throw InvalidInput("breiman_bound needs alpha_gen > 0");
  return alpha_gen * (d * std::log(m) * std::log(m / d) + std::log(1.0 / delta)) /
         (gamma * gamma * m);
}

}  // namespace boostlab
