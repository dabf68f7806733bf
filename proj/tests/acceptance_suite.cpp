// Desk-scale acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "boostlab/adaboost.hpp"
#include "boostlab/analysis.hpp"
#include "boostlab/datasets.hpp"
#include "boostlab/harness/config.hpp"
#include "boostlab/harness/experiment.hpp"
#include "boostlab/parallel_boost.hpp"
#include "boostlab/weak_learners.hpp"
#include "oracle_values.hpp"

namespace {

using namespace boostlab;
using namespace boostlab::harness;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Suite {
  std::size_t z_runs = 0;
  std::size_t z_failures = 0;
  std::size_t div_traces = 0;
  std::size_t div_failures = 0;

  void absorb(const RunRecord& r) {
    const double z = r.metric("z_decay_ok").value_or(0.0);
    ++z_runs;
    if (z != 1.0) ++z_failures;
    const double d = r.metric("divergence_ok").value_or(std::nan(""));
    if (std::isnan(d)) return;
    ++div_traces;
    if (d != 1.0) ++div_failures;
  }
  void absorb(const BoostTrace& trace, std::size_t steps_per_block) {
    ++z_runs;
    if (!check_z_decay(trace).ok()) ++z_failures;
    if (trace.snapshots.size() < 2) return;
    ++div_traces;
    if (!check_trace_divergence(trace, trace.gamma, steps_per_block).ok()) ++div_failures;
  }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return s / static_cast<double>(xs.size() - 1);
}

Verdict margin_criterion(Suite& suite) {
  auto cfg = ExperimentConfig::defaults(ExperimentKind::kAdaboost);
  cfg.seed = 2024;
  cfg.snapshots = SnapshotMode::kAll;
  cfg.set("m", "200");
  cfg.set("dim", "2");
  cfg.set("max_steps", "5000");
  double gamma = 0.1;
  for (int iter = 0; iter < 12; ++iter) {
    cfg.set("gamma", fmt("%.17g", gamma));
    RunRecord r = run_adaboost_rep(cfg, 0);
    suite.absorb(r);
    const double adv = *r.metric("min_advantage");
    const double next = std::min(0.5, 4.0 * adv);
    if (iter > 0 && r.outcome == Outcome::kSuccess && next >= gamma) {
      const double margin = *r.metric("min_margin");
      return {margin >= gamma / 16.0,
              fmt("gamma=%.6g (4*min advantage=%.6g) K=%.0f min margin=%.6g target=%.6g",
                  gamma, 4.0 * adv, *r.metric("steps"), margin, gamma / 16.0)};
    }
    gamma = next;
  }
  return {false, "gamma did not settle to 4*(min observed advantage)"};
}

Verdict composition_criterion() {
  double worst = 0.0;
  for (const auto& cell : oracle::kCompositionGrid) {
    const double got = advanced_composition(cell.epsilon, 0.0, cell.n, 0.25).epsilon;
    worst = std::max(worst, std::abs(got - cell.epsilon_hat) / cell.epsilon_hat);
  }
  const std::vector<double> eps = {0.01, 0.05, 0.1, 0.2, 0.5};
  const std::vector<std::size_t> ns = {1, 10, 100, 1000};
  bool monotone = true;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const double here = advanced_composition(eps[i], 0.0, ns[j], 0.25).epsilon;
      if (i + 1 < eps.size() &&
          advanced_composition(eps[i + 1], 0.0, ns[j], 0.25).epsilon <= here) {
        monotone = false;
      }
      if (j + 1 < ns.size() &&
          advanced_composition(eps[i], 0.0, ns[j + 1], 0.25).epsilon <= here) {
        monotone = false;
      }
    }
  }
  return {worst <= 1e-10 && monotone,
          fmt("%zu cells, worst relative error %.3g, monotone=%s",
              oracle::kCompositionGrid.size(), worst, monotone ? "yes" : "no")};
}

Verdict adversary_criterion() {
  auto cfg = ExperimentConfig::defaults(ExperimentKind::kAdversary);
  cfg.seed = 31;
  cfg.reps = 20;
  cfg.snapshots = SnapshotMode::kNone;
  const ExperimentResult result = run_experiment(cfg);
  std::vector<double> losses;
  std::vector<double> floors;
  double violations = 0.0;
  double fallbacks = 0.0;
  for (const auto& r : result.records) {
    losses.push_back(*r.metric("final_loss"));
    floors.push_back(*r.metric("bayes_floor"));
    violations += *r.metric("validity_violations");
    fallbacks += *r.metric("fallback_used");
  }
  const double slack = 3.0 * std::sqrt(variance(losses) / 20.0);
  const bool ok = mean(losses) >= mean(floors) - slack && violations == 0.0;
  return {ok, fmt("mean loss %.6g vs floor %.6g - %.3g, validity violations %.0f, "
                  "fallback runs %.0f",
                  mean(losses), mean(floors), slack, violations, fallbacks)};
}

Verdict coin_criterion() {
  auto cfg = ExperimentConfig::defaults(ExperimentKind::kCoingame);
  cfg.seed = 5;
  const ExperimentResult result = run_experiment(cfg);
  const RunRecord& r = result.records.front();
  const bool within = *r.metric("all_within_3se") == 1.0;
  const double ratio = *r.metric("band_ratio");
  return {within && ratio <= 5.0,
          fmt("%zu cells, max |z|=%.3g, band [%.4g, %.4g] ratio %.4g",
              result.table->rows(), *r.metric("max_abs_z"), *r.metric("band_lower"),
              *r.metric("band_upper"), ratio)};
}

Verdict approx_criterion() {
  auto cfg = ExperimentConfig::defaults(ExperimentKind::kApprox);
  cfg.seed = 8;
  const ExperimentResult result = run_experiment(cfg);
  const RunRecord& r = result.records.front();
  const double a = *r.metric("n_found_0");
  const double b = *r.metric("n_found_1");
  const double ratio = b / a;
  const bool reached = result.exit_code == kExitSuccess && std::isfinite(ratio);
  return {reached && ratio >= 2.0 && ratio <= 8.0,
          fmt("n(eps=0.1)=%.0f n(eps=0.05)=%.0f ratio %.3g", a, b, ratio)};
}

Verdict pboost_criterion(Suite& suite) {
  auto cfg = ExperimentConfig::defaults(ExperimentKind::kPboost);
  cfg.seed = 11;
  cfg.reps = 10;
  cfg.snapshots = SnapshotMode::kWindow;
  const ExperimentResult result = run_experiment(cfg);
  std::size_t successes = 0;
  bool accounting = true;
  bool held_out = true;
  double worst_held_out = 0.0;
  for (const auto& r : result.records) {
    suite.absorb(r);
    if (r.outcome != Outcome::kSuccess) continue;
    ++successes;
    const double err = *r.metric("held_out_error");
    worst_held_out = std::max(worst_held_out, err);
    if (err > 0.1) held_out = false;
    if (*r.metric("rounds_used") != *r.metric("expected_rounds") ||
        *r.metric("queries_per_round") != *r.metric("Q")) {
      accounting = false;
    }
  }
  const RunRecord& first = result.records.front();
  return {successes >= 9 && accounting && held_out,
          fmt("R=%.0f Q=%.0f n=%.0f K=%.0f: %zu/10 succeeded, worst held-out %.4g, "
              "rounds=ceil(K/R) and queries/round=Q: %s",
              *first.metric("R"), *first.metric("Q"), *first.metric("n"),
              *first.metric("K"), successes, worst_held_out, accounting ? "yes" : "no")};
}

Verdict degeneration_criterion(Suite& suite) {
  std::size_t matched = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const StumpTask task = make_stump_task(200, 2, 5, seed);
    ParallelParams p;
    p.gamma = 0.1;
    p.steps_per_block = 1;
    p.queries = 1;
    p.total_steps = 400;
    p.learning_rate = learning_rate(p.gamma);
    p.subsample = SubsampleMode::kIdentity;
    StumpOracle a(task.domain);
    StumpOracle b(task.domain);
    const BoostOutcome ada = run_adaboost(task.domain, task.training, a, p.gamma,
                                          p.total_steps);
    const BoostOutcome par = run_parallel_boost(task.domain, task.training, b, p, seed);
    suite.absorb(ada.trace, 1);
    suite.absorb(par.trace, 1);
    if (ada.ok() == par.ok() && ada.trace.rounds == par.trace.rounds &&
        ada.trace.hypotheses == par.trace.hypotheses &&
        ada.trace.snapshots.size() == par.trace.snapshots.size()) {
      bool same = true;
      for (std::size_t i = 0; i < ada.trace.snapshots.size(); ++i) {
        same = same && ada.trace.snapshots[i].weights == par.trace.snapshots[i].weights;
      }
      if (same) ++matched;
    }
  }
  return {matched == 5,
          fmt("R=1, Q=1, identity subsample, K=400: %zu/5 seeds bit-identical", matched)};
}

Verdict failure_trend_criterion(Suite& suite) {
  auto cfg = ExperimentConfig::defaults(ExperimentKind::kPboost);
  cfg.seed = 77;
  cfg.reps = 50;
  cfg.snapshots = SnapshotMode::kNone;
  cfg.set("m", "400");
  cfg.set("gamma", "0.1");
  cfg.set("R", "2");
  cfg.set("n", "8");
  cfg.set("max_steps", "400");
  const std::vector<std::size_t> qs = {1, 2, 4, 8};
  std::vector<double> rates;
  for (std::size_t q : qs) {
    const ParallelParams params = pboost_parameters(cfg, std::nullopt, q);
    std::size_t failures = 0;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const RunRecord r = run_pboost_rep(cfg, params, rep);
      suite.absorb(r);
      if (r.outcome == Outcome::kFailed) ++failures;
    }
    rates.push_back(static_cast<double>(failures) / 50.0);
  }
  std::size_t inversions = 0;
  bool within = true;
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    if (rates[i + 1] <= rates[i]) continue;
    ++inversions;
    const double se = std::sqrt(rates[i] * (1 - rates[i]) / 50.0 +
                                rates[i + 1] * (1 - rates[i + 1]) / 50.0);
    if (rates[i + 1] - rates[i] > 2.0 * se) within = false;
  }
  return {inversions <= 1 && within,
          fmt("m=400 R=2 n=8, failure rate at Q=1,2,4,8: %.2f %.2f %.2f %.2f", rates[0],
              rates[1], rates[2], rates[3])};
}

}  // namespace

int main() {
  Suite suite;
  std::vector<std::pair<std::string, Verdict>> lines(10);
  auto timed = [](const std::function<Verdict()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v = f();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.detail += fmt(" [%.1fs]", s);
    return v;
  };

  lines[1] = {"margin", timed([&] { return margin_criterion(suite); })};
  lines[3] = {"advanced composition", timed(composition_criterion)};
  lines[4] = {"adversary floor", timed(adversary_criterion)};
  lines[5] = {"coin game", timed(coin_criterion)};
  lines[6] = {"eps-approximation", timed(approx_criterion)};
  lines[7] = {"parallel boosting", timed([&] { return pboost_criterion(suite); })};
  lines[8] = {"degeneration", timed([&] { return degeneration_criterion(suite); })};
  lines[9] = {"failure vs Q", timed([&] { return failure_trend_criterion(suite); })};
  lines[0] = {"z-decay",
              {suite.z_runs > 0 && suite.z_failures == 0,
               fmt("%zu runs, %zu with violations", suite.z_runs, suite.z_failures)}};
  lines[2] = {"max-divergence",
              {suite.div_traces > 0 && suite.div_failures == 0,
               fmt("%zu retained traces, %zu with violations", suite.div_traces,
                   suite.div_failures)}};

  int failed = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& [name, v] = lines[i];
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, name.c_str(),
                v.detail.c_str());
    if (!v.pass) ++failed;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
