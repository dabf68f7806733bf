#include "boostlab/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "boostlab/adaboost.hpp"
#include "boostlab/analysis.hpp"
#include "boostlab/datasets.hpp"
#include "boostlab/random.hpp"
#include "boostlab/weak_learners.hpp"

namespace boostlab::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

SnapshotPolicy snapshot_policy(const ExperimentConfig& cfg, std::size_t window) {
  SnapshotPolicy p;
  p.mode = cfg.snapshots;
  p.window = std::max<std::size_t>(window, 2);
  return p;
}

RunRecord base_record(const ExperimentConfig& cfg, std::size_t rep) {
  RunRecord r;
  r.kind = std::string(kind_name(cfg.kind));
  r.config_digest = cfg.digest();
  r.rep = rep;
  r.seed = rep_seed(cfg.seed, rep);
  return r;
}

void fill_rounds(RunRecord& record, const BoostOutcome& outcome) {
  const auto& rounds = outcome.trace.rounds;
  record.rounds.reserve(rounds.size());
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    RoundMetrics m;
    m.round = i;
    m.block = rounds[i].block;
    m.queries = outcome.ledger.queries_in_round(rounds[i].block);
    m.loss = rounds[i].loss;
    m.log_z = rounds[i].log_z;
    m.min_margin = rounds[i].min_margin;
    record.rounds.push_back(m);
  }
  if (outcome.failure) {
    record.outcome = Outcome::kFailed;
    record.failed_step = outcome.failure->step;
  }
}

double divergence_flag(const BoostOutcome& outcome, std::size_t steps_per_block) {
  if (outcome.trace.snapshots.size() < 2) return kNaN;
  return check_trace_divergence(outcome.trace, outcome.trace.gamma, steps_per_block).ok()
             ? 1.0
             : 0.0;
}

double trace_margin(const BoostOutcome& outcome) {
  return outcome.trace.rounds.empty() ? kNaN : outcome.trace.rounds.back().min_margin;
}

std::vector<RunRecord> repeat(const ExperimentConfig& cfg,
                              const std::function<RunRecord(std::size_t)>& one) {
  std::vector<RunRecord> out;
  out.reserve(cfg.reps);
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) out.push_back(one(rep));
  return out;
}

int exit_code_for(const std::vector<RunRecord>& records) {
  for (const auto& r : records) {
    if (r.outcome == Outcome::kFailed) return kExitBoostFailed;
  }
  return kExitSuccess;
}

ExperimentResult run_coingame(const ExperimentConfig& cfg) {
  const auto ns = cfg.counts("n_values");
  const auto eps = cfg.reals("eps_values");
  const std::size_t trials = cfg.count("trials");
  const bool majority = cfg.text("rule") == "majority";
  ExperimentResult result;
  CsvTable table({"rep", "eps", "n", "closed_form", "empirical", "standard_error",
                  "z", "within_3se"});
  const ExponentBand band = coin_exponent_band(ns, eps);
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    Stopwatch clock;
    RunRecord record = base_record(cfg, rep);
    double max_z = 0.0;
    bool all_within = true;
    std::size_t cell = 0;
    for (double e : eps) {
      for (std::size_t n : ns) {
        const double closed =
            majority ? coin_majority_error(n, e) : (n == 0 ? 0.5 : (1.0 - e) / 2.0);
        const SimulationResult sim = coin_game_simulate(
            n, e, trials, majority ? CoinRule::kMajority : CoinRule::kFirstCoin,
            derive_seed(record.seed, {cell++}));
        const double se = std::sqrt(closed * (1.0 - closed) / static_cast<double>(trials));
        const double diff = std::abs(sim.error - closed);
        const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : kNaN);
        const bool within = diff <= 3.0 * se;
        all_within = all_within && within;
        if (!std::isnan(z)) max_z = std::max(max_z, z);
        table.add_row({std::to_string(rep), format_real(e), std::to_string(n),
                       format_real(closed), format_real(sim.error), format_real(se),
                       format_real(z), within ? "1" : "0"});
      }
    }
    record.metrics = {{"max_abs_z", max_z},
                      {"all_within_3se", all_within ? 1.0 : 0.0},
                      {"band_lower", band.lower},
                      {"band_upper", band.upper},
                      {"band_ratio", band.ratio()}};
    record.wall_seconds = clock.seconds();
    result.records.push_back(std::move(record));
  }
  result.table = std::move(table);
  return result;
}

ExperimentResult run_compose(const ExperimentConfig& cfg) {
  auto eps = cfg.reals("eps_values");
  auto ns = cfg.counts("n_values");
  const double delta = cfg.real("delta");
  const double delta_prime = cfg.real("delta_prime");
  Stopwatch clock;
  CsvTable table({"eps", "n", "delta", "delta_prime", "eps_hat", "delta_hat"});
  std::vector<std::vector<double>> grid(eps.size(), std::vector<double>(ns.size()));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const CompositionResult c = advanced_composition(eps[i], delta, ns[j], delta_prime);
      grid[i][j] = c.epsilon;
      table.add_row({format_real(eps[i]), std::to_string(ns[j]), format_real(delta),
                     format_real(delta_prime), format_real(c.epsilon),
                     format_real(c.delta)});
    }
  }
  bool mono_eps = true;
  bool mono_n = true;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      for (std::size_t k = 0; k < eps.size(); ++k) {
        if (eps[k] > eps[i] && grid[k][j] < grid[i][j]) mono_eps = false;
      }
      for (std::size_t k = 0; k < ns.size(); ++k) {
        if (ns[k] > ns[j] && grid[i][k] < grid[i][j]) mono_n = false;
      }
    }
  }
  ExperimentResult result;
  RunRecord record = base_record(cfg, 0);
  record.metrics = {{"cells", static_cast<double>(eps.size() * ns.size())},
                    {"monotone_eps", mono_eps ? 1.0 : 0.0},
                    {"monotone_n", mono_n ? 1.0 : 0.0}};
  record.wall_seconds = clock.seconds();
  result.records.push_back(std::move(record));
  result.table = std::move(table);
  return result;
}

ExperimentResult run_approx(const ExperimentConfig& cfg) {
  const std::size_t points = cfg.count("points");
  const auto eps = cfg.reals("eps_values");
  const double target = 1.0 - cfg.real("delta");
  ExperimentResult result;
  CsvTable table({"rep", "eps", "n", "pass_rate", "reached"});
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    Stopwatch clock;
    RunRecord record = base_record(cfg, rep);
    Rng rng = make_rng(record.seed, {0});
    LabeledDomain domain(random_labels(points, rng));
    const HypothesisClass cls =
        random_class(points, std::size_t{1} << cfg.count("class_log2"), rng);
    std::vector<std::size_t> support(points);
    for (std::size_t i = 0; i < points; ++i) support[i] = i;
    std::vector<double> weights(points, 1.0);
    if (cfg.text("dist") == "random") {
      std::exponential_distribution<double> draw(1.0);
      for (auto& w : weights) w = draw(rng);
    }
    const WeightDistribution dist(support, weights);

    std::vector<double> found;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const auto steps = doubling_sample_size(
          cls, dist, domain, eps[i], target, cfg.count("n_start"), cfg.count("n_max"),
          cfg.count("trials"), derive_seed(record.seed, {1, i}));
      for (const auto& s : steps) {
        table.add_row({std::to_string(rep), format_real(eps[i]), std::to_string(s.n),
                       format_real(s.pass_rate), s.pass_rate >= target ? "1" : "0"});
      }
      const bool reached = !steps.empty() && steps.back().pass_rate >= target;
      found.push_back(reached ? static_cast<double>(steps.back().n) : kNaN);
      record.metrics.emplace_back("n_found_" + std::to_string(i), found.back());
    }
    record.metrics.emplace_back(
        "ratio_last_first", found.size() >= 2 ? found.back() / found.front() : kNaN);
    record.wall_seconds = clock.seconds();
    result.records.push_back(std::move(record));
  }
  result.table = std::move(table);
  return result;
}

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
  ExperimentResult result;
  CsvTable table({"R", "rep", "seed", "rounds_used", "queries_per_round", "min_q",
                  "final_loss", "success"});
  for (const SweepRow& row : sweep_tradeoff(cfg)) {
    table.add_row({std::to_string(row.steps_per_block), std::to_string(row.rep),
                   std::to_string(row.seed), std::to_string(row.rounds_used),
                   std::to_string(row.queries_per_round), std::to_string(row.min_queries),
                   format_real(row.final_loss), row.success ? "1" : "0"});
    if (!row.success) result.exit_code = kExitBoostFailed;
  }
  result.table = std::move(table);
  return result;
}

}  // namespace

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  if (env != nullptr && *env != '\0') return env;
  return "boostlab_out";
}

std::uint64_t rep_seed(std::uint64_t master, std::size_t rep) {
  return derive_seed(master, {rep});
}

ParallelParams pboost_parameters(const ExperimentConfig& cfg,
                                 std::optional<std::size_t> steps_per_block,
                                 std::optional<std::size_t> queries) {
  ParameterCaps caps;
  caps.max_queries = cfg.count("max_queries");
  caps.max_steps = cfg.count("max_steps");
  const std::size_t r = steps_per_block.value_or(cfg.count("R"));
  ParallelParams p;
  try {
    p = default_parameters(cfg.count("m"), cfg.count("d"), cfg.real("gamma"), r,
                           cfg.real("c_prime"), caps);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  const std::size_t q = queries.value_or(cfg.count("Q"));
  if (q > 0) {
    p.queries = q;
    p.queries_capped = false;
  }
  if (cfg.count("n") > 0) p.subsample_size = cfg.count("n");
  if (cfg.count("steps") > 0) {
    p.total_steps = cfg.count("steps");
    p.steps_capped = false;
  }
  p.subsample =
      cfg.text("subsample") == "identity" ? SubsampleMode::kIdentity : SubsampleMode::kSample;
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return p;
}

RunRecord run_adaboost_rep(const ExperimentConfig& cfg, std::size_t rep) {
  Stopwatch clock;
  RunRecord record = base_record(cfg, rep);
  const StumpTask task =
      make_stump_task(cfg.count("m"), cfg.count("dim"), cfg.count("voters"), record.seed);
  const double gamma = cfg.real("gamma");
  std::size_t steps = cfg.count("steps");
  if (steps == 0) {
    steps = boosting_steps(cfg.count("m"), gamma);
    if (cfg.count("max_steps") > 0) steps = std::min(steps, cfg.count("max_steps"));
  }
  StumpOracle oracle(task.domain);
  const BoostOutcome outcome = run_adaboost(task.domain, task.training, oracle, gamma,
                                            steps, snapshot_policy(cfg, 2));
  fill_rounds(record, outcome);
  double min_adv = std::numeric_limits<double>::infinity();
  for (const auto& q : outcome.ledger.records()) min_adv = std::min(min_adv, 0.5 - q.measured_loss);
  record.metrics = {
      {"gamma", gamma},
      {"steps", static_cast<double>(steps)},
      {"min_advantage", outcome.ledger.records().empty() ? kNaN : min_adv},
      {"min_margin", trace_margin(outcome)},
      {"margin_target", gamma / 16.0},
      {"train_error", outcome.ok() ? outcome.classifier->error_on(task.domain, task.training.indices) : kNaN},
      {"held_out_error", outcome.ok() ? outcome.classifier->error_on(task.domain, task.held_out) : kNaN},
      {"z_decay_ok", check_z_decay(outcome.trace).ok() ? 1.0 : 0.0},
      {"divergence_ok", divergence_flag(outcome, 1)},
  };
  record.wall_seconds = clock.seconds();
  return record;
}

RunRecord run_pboost_rep(const ExperimentConfig& cfg, const ParallelParams& params,
                         std::size_t rep) {
  Stopwatch clock;
  RunRecord record = base_record(cfg, rep);
  const StumpTask task =
      make_stump_task(cfg.count("m"), cfg.count("dim"), cfg.count("voters"), record.seed);
  StumpOracle oracle(task.domain);
  const BoostOutcome outcome =
      run_parallel_boost(task.domain, task.training, oracle, params,
                         derive_seed(record.seed, {1}),
                         snapshot_policy(cfg, params.steps_per_block + 1));
  fill_rounds(record, outcome);
  record.metrics = {
      {"gamma", params.gamma},
      {"R", static_cast<double>(params.steps_per_block)},
      {"Q", static_cast<double>(params.queries)},
      {"n", static_cast<double>(params.subsample_size)},
      {"K", static_cast<double>(params.total_steps)},
      {"expected_rounds", static_cast<double>(params.blocks())},
      {"rounds_used", static_cast<double>(outcome.ledger.rounds())},
      {"queries_per_round", static_cast<double>(outcome.ledger.max_queries_per_round())},
      {"total_queries", static_cast<double>(outcome.ledger.total_queries())},
      {"min_margin", trace_margin(outcome)},
      {"train_error", outcome.ok() ? outcome.classifier->error_on(task.domain, task.training.indices) : kNaN},
      {"held_out_error", outcome.ok() ? outcome.classifier->error_on(task.domain, task.held_out) : kNaN},
      {"z_decay_ok", check_z_decay(outcome.trace).ok() ? 1.0 : 0.0},
      {"divergence_ok", divergence_flag(outcome, params.steps_per_block)},
      {"queries_capped", params.queries_capped ? 1.0 : 0.0},
  };
  record.wall_seconds = clock.seconds();
  return record;
}

RunRecord run_adversary_rep(const ExperimentConfig& cfg, std::size_t rep) {
  Stopwatch clock;
  RunRecord record = base_record(cfg, rep);
  AdversaryConfig a;
  a.m = cfg.count("m");
  a.d = cfg.count("d");
  a.gamma = cfg.real("gamma");
  a.rounds = cfg.count("p");
  a.stages_per_round = cfg.count("stages_per_round");
  a.c_bias = cfg.real("c_bias");
  a.alpha_thr = cfg.real("alpha_thr");
  a.d_hat = cfg.count("d_hat");
  a.seed = record.seed;
  const AdversarialInstance instance = build_instance(a);
  Rng rng = make_rng(record.seed, {2});
  const TrainingSet training = sample_training_set(instance.domain(), a.m, rng);
  AdversaryOracle oracle(instance, a.gamma);
  const std::size_t steps = cfg.count("steps") > 0 ? cfg.count("steps") : a.rounds;
  const BoostOutcome outcome = run_adaboost(instance.domain(), training, oracle, a.gamma,
                                            steps, snapshot_policy(cfg, 2));
  fill_rounds(record, outcome);
  record.leaks = oracle.leaks().size();

  std::size_t violations = 0;
  for (const auto& q : outcome.ledger.records()) {
    if (q.measured_loss > 0.5 - a.gamma) ++violations;
  }
  std::vector<std::size_t> everything(instance.domain().size());
  for (std::size_t i = 0; i < everything.size(); ++i) everything[i] = i;
  const double unseen = unseen_fraction(training, instance.domain());
  const double final_loss =
      outcome.ok() ? outcome.classifier->error_on(instance.domain(), everything) : kNaN;
  const double floor =
      oracle.fallback_used()
          ? 0.0
          : bayes_optimal_loss(oracle.deepest_stage(), a.gamma, a.c_bias, unseen);
  record.metrics = {
      {"final_loss", final_loss},
      {"bayes_floor", floor},
      {"gap", final_loss - floor},
      {"stages_seen", static_cast<double>(oracle.deepest_stage())},
      {"unseen_fraction", unseen},
      {"fallback_used", oracle.fallback_used() ? 1.0 : 0.0},
      {"validity_violations", static_cast<double>(violations)},
      {"queries", static_cast<double>(outcome.ledger.total_queries())},
  };
  record.wall_seconds = clock.seconds();
  return record;
}

std::vector<SweepRow> sweep_tradeoff(const ExperimentConfig& cfg) {
  std::vector<SweepRow> rows;
  const double target = cfg.real("success_target");
  for (std::size_t r : cfg.counts("r_values")) {
    const ParallelParams base = pboost_parameters(cfg, r);
    std::size_t min_q = 0;
    for (std::size_t q = 1; q <= cfg.count("q_max"); q *= 2) {
      const ParallelParams trial = pboost_parameters(cfg, r, q);
      std::size_t ok = 0;
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
        ok += run_pboost_rep(cfg, trial, rep).outcome == Outcome::kSuccess ? 1 : 0;
      }
      if (static_cast<double>(ok) >= target * static_cast<double>(cfg.reps)) {
        min_q = q;
        break;
      }
    }
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const RunRecord rec = run_pboost_rep(cfg, base, rep);
      SweepRow row;
      row.steps_per_block = r;
      row.rep = rep;
      row.seed = rec.seed;
      row.rounds_used = static_cast<std::size_t>(*rec.metric("rounds_used"));
      row.queries_per_round = static_cast<std::size_t>(*rec.metric("queries_per_round"));
      row.min_queries = min_q;
      row.final_loss = *rec.metric("held_out_error");
      row.success = rec.outcome == Outcome::kSuccess;
      rows.push_back(row);
    }
  }
  return rows;
}

double approximation_pass_rate(const HypothesisClass& cls,
                               const WeightDistribution& dist,
                               const LabeledDomain& domain, double epsilon,
                               std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (n < 1 || trials < 1) throw InvalidInput("pass rate needs n >= 1 and trials >= 1");
  std::discrete_distribution<std::size_t> pick(dist.weights().begin(),
                                               dist.weights().end());
  std::vector<std::size_t> sample(n);
  std::size_t passed = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, {n, t});
    for (auto& x : sample) x = dist.support()[pick(rng)];
    passed += eps_approximation_check(sample, dist, cls, epsilon, domain).passed ? 1 : 0;
  }
  return static_cast<double>(passed) / static_cast<double>(trials);
}

std::vector<DoublingStep> doubling_sample_size(const HypothesisClass& cls,
                                               const WeightDistribution& dist,
                                               const LabeledDomain& domain,
                                               double epsilon, double target,
                                               std::size_t n_start, std::size_t n_max,
                                               std::size_t trials, std::uint64_t seed) {
  if (n_start < 1) throw InvalidInput("doubling search needs n_start >= 1");
  std::vector<DoublingStep> steps;
  for (std::size_t n = n_start; n <= n_max; n *= 2) {
    const double rate =
        approximation_pass_rate(cls, dist, domain, epsilon, n, trials, seed);
    steps.push_back({n, rate});
    if (rate >= target) break;
  }
  return steps;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  switch (cfg.kind) {
    case ExperimentKind::kAdaboost:
      result.records = repeat(cfg, [&](std::size_t rep) { return run_adaboost_rep(cfg, rep); });
      break;
    case ExperimentKind::kPboost: {
      const ParallelParams params = pboost_parameters(cfg);
      result.records =
          repeat(cfg, [&](std::size_t rep) { return run_pboost_rep(cfg, params, rep); });
      break;
    }
    case ExperimentKind::kAdversary:
      result.records = repeat(cfg, [&](std::size_t rep) { return run_adversary_rep(cfg, rep); });
      break;
    case ExperimentKind::kCoingame:
      return run_coingame(cfg);
    case ExperimentKind::kSweep:
      return run_sweep(cfg);
    case ExperimentKind::kCompose:
      return run_compose(cfg);
    case ExperimentKind::kApprox:
      return run_approx(cfg);
  }
  result.exit_code = exit_code_for(result.records);
  return result;
}

void persist(const ExperimentConfig& cfg, const ExperimentResult& result,
             const std::filesystem::path& out_dir, std::ostream& human) {
  const std::string kind(kind_name(cfg.kind));
  report(kind, result.records, out_dir, human);
  if (result.table) result.table->write(out_dir / (kind + "_table.csv"));
}

}  // namespace boostlab::harness
