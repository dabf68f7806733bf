#include "boostlab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "boostlab/analysis.hpp"
#include "boostlab/datasets.hpp"

namespace boostlab {

void AdversaryConfig::validate() const {
  if (m < 1) throw InvalidInput("adversary needs m >= 1");
  if (d < 1) throw InvalidInput("adversary needs d >= 1");
  if (!(gamma > 0.0 && gamma < 0.5)) {
    throw InvalidInput("adversary needs 0 < gamma < 1/2");
  }
  if (!(c_bias > 0.0) || !(c_bias * gamma < 0.5)) {
    throw InvalidInput("C_bias * gamma must lie in (0, 1/2)");
  }
  if (!(alpha_thr > 0.0)) throw InvalidInput("alpha_thr must be positive");
  if (stages() < 1) throw InvalidInput("adversary needs at least one stage");
  const std::size_t exponent = random_exponent();
  if (exponent < 1 || exponent > 30) {
    throw InvalidInput("random-hypothesis exponent d_hat must be in [1, 30]");
  }
  const long double bits = static_cast<long double>(stages()) *
                           (1.0L + std::ldexp(1.0L, static_cast<int>(exponent))) *
                           2.0L * static_cast<long double>(m);
  if (bits > static_cast<long double>(kAdversaryBitBudget)) {
    throw InvalidInput("adversary instance exceeds the desk-scale size cap "
                       "(reduce d, d_hat, stages or m)");
  }
}

std::string AdversaryConfig::to_descriptor() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "m=%zu d=%zu gamma=%.17g rounds=%zu stages_per_round=%zu "
                "c_bias=%.17g alpha_thr=%.17g d_hat=%zu seed=%llu",
                m, d, gamma, rounds, stages_per_round, c_bias, alpha_thr, d_hat,
                static_cast<unsigned long long>(seed));
  return buf;
}

AdversaryConfig AdversaryConfig::from_descriptor(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw InvalidInput("bad descriptor token: " + token);
    if (!kv.emplace(token.substr(0, eq), token.substr(eq + 1)).second) {
      throw InvalidInput("duplicate descriptor key: " + token);
    }
  }
  AdversaryConfig cfg;
  auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) throw InvalidInput(std::string("descriptor lacks ") + key);
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  try {
    cfg.m = std::stoull(take("m"));
    cfg.d = std::stoull(take("d"));
    cfg.gamma = std::stod(take("gamma"));
    cfg.rounds = std::stoull(take("rounds"));
    cfg.stages_per_round = std::stoull(take("stages_per_round"));
    cfg.c_bias = std::stod(take("c_bias"));
    cfg.alpha_thr = std::stod(take("alpha_thr"));
    cfg.d_hat = std::stoull(take("d_hat"));
    cfg.seed = std::stoull(take("seed"));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidInput*>(&e)) throw;
    throw InvalidInput(std::string("malformed descriptor value: ") + e.what());
  }
  if (!kv.empty()) throw InvalidInput("unknown descriptor key: " + kv.begin()->first);
  cfg.validate();
  return cfg;
}

std::size_t AdversarialInstance::hypothesis_count() const {
  std::size_t total = 1;
  for (const auto& s : stages_) total += s.size();
  return total;
}

AdversarialInstance build_instance(const AdversaryConfig& cfg) {
  cfg.validate();
  const std::size_t n = 2 * cfg.m;
  Rng concept_rng = make_rng(cfg.seed, {0});
  PackedLabels concept_labels = random_labels(n, concept_rng);

  const std::size_t randoms = std::size_t{1} << cfg.random_exponent();
  const double agree = 0.5 + cfg.c_bias * cfg.gamma;
  std::vector<HypothesisClass> stages;
  stages.reserve(cfg.stages());
  for (std::size_t i = 0; i < cfg.stages(); ++i) {
    Rng rng = make_rng(cfg.seed, {1, i});
    std::bernoulli_distribution keeps(agree);
    PackedLabels biased(n);
    for (std::size_t x = 0; x < n; ++x) {
      biased.set(x, keeps(rng) ? concept_labels[x] : -concept_labels[x]);
    }
    std::vector<Hypothesis> members;
    members.reserve(randoms + 1);
    members.emplace_back(std::move(biased));
    for (std::size_t j = 0; j < randoms; ++j) {
      members.emplace_back(random_labels(n, rng));
    }
    stages.emplace_back(std::move(members));
  }
  Hypothesis fallback{concept_labels};
  return AdversarialInstance(cfg, LabeledDomain(std::move(concept_labels)),
                             std::move(stages), std::move(fallback));
}

void LeakLog::append(LeakEvent e) {
  std::lock_guard lock(mu_);
  events_.push_back(e);
}

std::vector<LeakEvent> LeakLog::sorted() const {
  std::vector<LeakEvent> out;
  {
    std::lock_guard lock(mu_);
    out = events_;
  }
  std::stable_sort(out.begin(), out.end(), [](const LeakEvent& a, const LeakEvent& b) {
    return std::tie(a.round, a.query_index) < std::tie(b.round, b.query_index);
  });
  return out;
}

std::size_t LeakLog::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

namespace {

AdversaryAnswer answer_one(const AdversarialInstance& instance, std::size_t round,
                           const WeightDistribution& query, double gamma) {
  const LabeledDomain& domain = instance.domain();
  const double limit = 0.5 - gamma;
  const std::size_t window = round * instance.config().stages_per_round;
  for (std::size_t s = 0; s < instance.stage_count(); ++s) {
    const HypothesisClass& stage = instance.stage(s);
    for (std::size_t j = 0; j < stage.size(); ++j) {
      const double loss = empirical_loss(stage[j], query, domain);
      if (loss <= limit) return {stage[j], s, j, loss, s >= window};
    }
  }
  const double loss = empirical_loss(instance.fallback(), query, domain);
  if (!(loss <= limit)) {
    throw std::logic_error("adversary: the concept failed to qualify");
  }
  return {instance.fallback(), instance.stage_count(), 0, loss, true};
}

}  // namespace

std::vector<AdversaryAnswer> answer_round(const AdversarialInstance& instance,
                                          std::size_t round,
                                          std::span<const WeightDistribution> queries,
                                          double gamma, LeakLog* log) {
  if (round < 1 || round > instance.config().rounds) {
    throw InvalidInput("adversary round must lie in [1, p]");
  }
  if (!(gamma > 0.0 && gamma < 0.5)) throw InvalidInput("gamma must be in (0, 1/2)");
  std::vector<AdversaryAnswer> out;
  out.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    queries[q].validate(instance.domain());
    out.push_back(answer_one(instance, round, queries[q], gamma));
    const AdversaryAnswer& a = out.back();
    if (a.leaked && log != nullptr) {
      log->append({round, q, a.stage, a.stage == instance.stage_count()});
    }
  }
  return out;
}

std::optional<Hypothesis> AdversaryOracle::answer(const WeightDistribution& dist) {
  // Rounds beyond p are clamped to p: the window then covers every stage and
  // only the fallback counts as a leak.
  const std::size_t round = std::min(this->round() + 1, instance_.config().rounds);
  std::lock_guard lock(mu_);
  if (round != last_round_) {
    last_round_ = round;
    queries_this_round_ = 0;
  }
  const std::size_t index = queries_this_round_++;
  AdversaryAnswer a = answer_one(instance_, round, dist, gamma_);
  if (a.leaked) {
    leaks_.append({round, index, a.stage, a.stage == instance_.stage_count()});
  }
  if (a.stage == instance_.stage_count()) {
    fallback_used_ = true;
  } else {
    deepest_ = std::max(deepest_, a.stage + 1);
  }
  return std::move(a.hypothesis);
}

std::size_t AdversaryOracle::deepest_stage() const {
  std::lock_guard lock(mu_);
  return deepest_;
}

bool AdversaryOracle::fallback_used() const {
  std::lock_guard lock(mu_);
  return fallback_used_;
}

QueryShape classify_query(const WeightDistribution& dist, std::size_t d,
                          double alpha_thr, double gamma) {
  return spreadness(dist, d) < alpha_thr * gamma ? QueryShape::kSpread
                                                 : QueryShape::kConcentrated;
}

double bayes_optimal_loss(std::size_t stages, double gamma, double c_bias,
                          double unseen_fraction) {
  const double eps = 2.0 * c_bias * gamma;
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidInput("bayes_optimal_loss needs 2*C_bias*gamma in (0, 1)");
  }
  if (!(unseen_fraction >= 0.0 && unseen_fraction <= 1.0)) {
    throw InvalidInput("unseen fraction must lie in [0, 1]");
  }
  return unseen_fraction * coin_majority_error(stages, eps);
}

TargetDistribution target_distribution(const AdversarialInstance& instance) {
  const LabeledDomain& domain = instance.domain();
  std::vector<std::size_t> points(domain.size());
  std::vector<int> labels(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    points[i] = i;
    labels[i] = domain.label(i);
  }
  return {WeightDistribution::uniform(std::move(points)), std::move(labels)};
}

TrainingSet sample_training_set(const LabeledDomain& domain, std::size_t count,
                                Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, domain.size() - 1);
  TrainingSet out;
  out.indices.resize(count);
  for (auto& x : out.indices) x = pick(rng);
  return out;
}

double unseen_fraction(const TrainingSet& training, const LabeledDomain& domain) {
  training.validate(domain);
  std::vector<char> seen(domain.size(), 0);
  for (std::size_t x : training.indices) seen[x] = 1;
  const auto hits = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
  return static_cast<double>(domain.size() - hits) / static_cast<double>(domain.size());
}

}  // namespace boostlab
