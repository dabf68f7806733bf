#include "boostlab/harness/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "boostlab/adversary.hpp"
#include "boostlab/random.hpp"

namespace boostlab::harness {

namespace {

enum class ParamType { kReal, kCount, kChoice, kReals, kCounts };

struct ParamSpec {
  std::string name;
  std::string fallback;
  ParamType type;
  double lo = 0.0;  // inclusive bounds for numeric values
  double hi = 0.0;
  std::vector<std::string> choices{};
};

constexpr double kBig = 1e18;

std::vector<ParamSpec> task_params(const char* m) {
  return {
      {"m", m, ParamType::kCount, 1, 1e7},
      {"dim", "2", ParamType::kCount, 1, 1024},
      {"voters", "5", ParamType::kCount, 1, 1001},
      {"gamma", "0.1", ParamType::kReal, 1e-6, 0.5},
  };
}

std::vector<ParamSpec> pboost_params() {
  auto p = task_params("400");
  std::vector<ParamSpec> more = {
      {"R", "2", ParamType::kCount, 1, 1e6},
      {"Q", "64", ParamType::kCount, 0, 1e7},
      {"n", "0", ParamType::kCount, 0, 1e8},
      {"d", "3", ParamType::kCount, 1, 1e6},
      {"c_prime", "0.5", ParamType::kReal, 1e-9, kBig},
      {"steps", "0", ParamType::kCount, 0, 1e8},
      {"max_steps", "2000", ParamType::kCount, 0, 1e8},
      {"max_queries", "4096", ParamType::kCount, 1, 1e7},
      {"subsample", "sample", ParamType::kChoice, 0, 0, {"sample", "identity"}},
  };
  p.insert(p.end(), more.begin(), more.end());
  return p;
}

const std::map<ExperimentKind, std::vector<ParamSpec>>& schema() {
  static const auto table = [] {
    std::map<ExperimentKind, std::vector<ParamSpec>> t;
    auto ada = task_params("200");
    ada.push_back({"steps", "0", ParamType::kCount, 0, 1e8});
    ada.push_back({"max_steps", "5000", ParamType::kCount, 0, 1e8});
    t[ExperimentKind::kAdaboost] = ada;

    t[ExperimentKind::kPboost] = pboost_params();

    t[ExperimentKind::kAdversary] = {
        {"m", "500", ParamType::kCount, 1, 1e7},
        {"d", "6", ParamType::kCount, 1, 30},
        {"gamma", "0.05", ParamType::kReal, 1e-9, 0.5},
        {"p", "20", ParamType::kCount, 1, 1e6},
        {"stages_per_round", "1", ParamType::kCount, 1, 1e6},
        {"c_bias", "7", ParamType::kReal, 1e-9, kBig},
        {"alpha_thr", "2", ParamType::kReal, 1e-9, kBig},
        {"d_hat", "0", ParamType::kCount, 0, 30},
        {"steps", "0", ParamType::kCount, 0, 1e8},
    };

    t[ExperimentKind::kCoingame] = {
        {"n_values", "25,100,400,1600", ParamType::kCounts, 0, 100000},
        {"eps_values", "0.05,0.1,0.2", ParamType::kReals, 0, 1},
        {"trials", "100000", ParamType::kCount, 1, 1e9},
        {"rule", "majority", ParamType::kChoice, 0, 0, {"majority", "first"}},
    };

    auto sweep = pboost_params();
    sweep.push_back({"r_values", "1,2,4", ParamType::kCounts, 1, 1e6});
    sweep.push_back({"q_max", "256", ParamType::kCount, 1, 1e7});
    sweep.push_back({"success_target", "0.9", ParamType::kReal, 0, 1});
    t[ExperimentKind::kSweep] = sweep;

    t[ExperimentKind::kCompose] = {
        {"eps_values", "0.01,0.05,0.1,0.2,0.5", ParamType::kReals, 0, kBig},
        {"n_values", "1,10,100,1000", ParamType::kCounts, 1, 1e12},
        {"delta", "0", ParamType::kReal, 0, 0.999999999},
        {"delta_prime", "0.25", ParamType::kReal, 1e-300, 0.999999999},
    };

    t[ExperimentKind::kApprox] = {
        {"points", "64", ParamType::kCount, 2, 1e7},
        {"class_log2", "8", ParamType::kCount, 0, 20},
        {"eps_values", "0.1,0.05", ParamType::kReals, 1e-6, 0.999999},
        {"delta", "0.1", ParamType::kReal, 1e-9, 0.999999999},
        {"trials", "200", ParamType::kCount, 1, 1e7},
        {"n_start", "8", ParamType::kCount, 1, 1e9},
        {"n_max", "65536", ParamType::kCount, 1, 1e9},
        {"dist", "uniform", ParamType::kChoice, 0, 0, {"uniform", "random"}},
    };
    return t;
  }();
  return table;
}

const ParamSpec& find_spec(ExperimentKind kind, const std::string& key) {
  for (const auto& s : schema().at(kind)) {
    if (s.name == key) return s;
  }
  throw ConfigError("unknown key '" + key + "' for experiment kind '" +
                    std::string(kind_name(kind)) + "'");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno != 0 || !std::isfinite(x)) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a finite number");
  }
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a nonnegative integer");
  }
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

void check_range(const ParamSpec& s, double x) {
  if (x < s.lo || x > s.hi) {
    std::ostringstream msg;
    msg << "key '" << s.name << "': " << x << " outside [" << s.lo << ", " << s.hi << "]";
    throw ConfigError(msg.str());
  }
}

void check_value(const ParamSpec& s, const std::string& v) {
  switch (s.type) {
    case ParamType::kReal:
      check_range(s, to_real(s.name, v));
      break;
    case ParamType::kCount:
      check_range(s, static_cast<double>(to_u64(s.name, v)));
      break;
    case ParamType::kChoice:
      if (std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end()) {
        throw ConfigError("key '" + s.name + "': unsupported value '" + v + "'");
      }
      break;
    case ParamType::kReals:
    case ParamType::kCounts: {
      const auto items = split_list(v);
      if (items.empty()) throw ConfigError("key '" + s.name + "': empty list");
      for (const auto& item : items) {
        check_range(s, s.type == ParamType::kReals
                           ? to_real(s.name, item)
                           : static_cast<double>(to_u64(s.name, item)));
      }
      break;
    }
  }
}

}  // namespace

std::optional<SnapshotMode> parse_snapshot_mode(std::string_view s) {
  if (s == "all") return SnapshotMode::kAll;
  if (s == "window") return SnapshotMode::kWindow;
  if (s == "none") return SnapshotMode::kNone;
  return std::nullopt;
}

std::string_view kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kAdaboost: return "adaboost";
    case ExperimentKind::kPboost: return "pboost";
    case ExperimentKind::kAdversary: return "adversary";
    case ExperimentKind::kCoingame: return "coingame";
    case ExperimentKind::kSweep: return "sweep";
    case ExperimentKind::kCompose: return "compose";
    case ExperimentKind::kApprox: return "approx";
  }
  return "?";
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds = {
      ExperimentKind::kAdaboost, ExperimentKind::kPboost,  ExperimentKind::kAdversary,
      ExperimentKind::kCoingame, ExperimentKind::kSweep,   ExperimentKind::kCompose,
      ExperimentKind::kApprox};
  return kinds;
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (auto k : all_kinds()) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

const std::vector<std::pair<std::string, std::string>>& parameter_defaults(
    ExperimentKind kind) {
  static const auto table = [] {
    std::map<ExperimentKind, std::vector<std::pair<std::string, std::string>>> t;
    for (const auto& [k, specs] : schema()) {
      for (const auto& s : specs) t[k].emplace_back(s.name, s.fallback);
    }
    return t;
  }();
  return table.at(kind);
}

std::string_view snapshot_mode_name(SnapshotMode mode) {
  switch (mode) {
    case SnapshotMode::kAll: return "all";
    case SnapshotMode::kWindow: return "window";
    case SnapshotMode::kNone: return "none";
  }
  return "?";
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  for (const auto& [key, value] : parameter_defaults(kind)) cfg.params[key] = value;
  return cfg;
}

double ExperimentConfig::real(const std::string& key) const {
  return to_real(key, text(key));
}

std::size_t ExperimentConfig::count(const std::string& key) const {
  return static_cast<std::size_t>(to_u64(key, text(key)));
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(text(key))) out.push_back(to_real(key, item));
  return out;
}

std::vector<std::size_t> ExperimentConfig::counts(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text(key))) {
    out.push_back(static_cast<std::size_t>(to_u64(key, item)));
  }
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  find_spec(kind, key);
  params[key] = value;
}

void ExperimentConfig::validate() const {
  if (reps < 1) throw ConfigError("reps must be at least 1");
  for (const auto& [key, value] : params) check_value(find_spec(kind, key), value);
  for (const auto& s : schema().at(kind)) {
    if (!params.contains(s.name)) throw ConfigError("missing key '" + s.name + "'");
  }

  auto check_r = [&](std::size_t r) {
    if (2.0 * real("gamma") * static_cast<double>(r) > 1.0) {
      throw ConfigError("R = " + std::to_string(r) + " violates 2*gamma*R <= 1");
    }
  };
  switch (kind) {
    case ExperimentKind::kAdaboost:
      if (count("voters") % 2 == 0) throw ConfigError("voters must be odd");
      break;
    case ExperimentKind::kPboost:
    case ExperimentKind::kSweep:
      if (count("voters") % 2 == 0) throw ConfigError("voters must be odd");
      check_r(count("R"));
      if (kind == ExperimentKind::kSweep) {
        for (auto r : counts("r_values")) check_r(r);
      }
      break;
    case ExperimentKind::kAdversary: {
      AdversaryConfig a;
      a.m = count("m");
      a.d = count("d");
      a.gamma = real("gamma");
      a.rounds = count("p");
      a.stages_per_round = count("stages_per_round");
      a.c_bias = real("c_bias");
      a.alpha_thr = real("alpha_thr");
      a.d_hat = count("d_hat");
      try {
        a.validate();
      } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
      }
      break;
    }
    case ExperimentKind::kCoingame:
    case ExperimentKind::kCompose:
      break;
    case ExperimentKind::kApprox:
      if (count("points") % 2 != 0) throw ConfigError("points must be even");
      if (count("n_start") > count("n_max")) {
        throw ConfigError("n_start must not exceed n_max");
      }
      break;
  }
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "kind = " << kind_name(kind) << "\n";
  out << "seed = " << seed << "\n";
  out << "reps = " << reps << "\n";
  if (!out_dir.empty()) out << "out = " << out_dir << "\n";
  out << "snapshots = " << snapshot_mode_name(snapshots) << "\n";
  out << "\n[" << kind_name(kind) << "]\n";
  for (const auto& [key, fallback] : parameter_defaults(kind)) {
    (void)fallback;
    out << key << " = " << params.at(key) << "\n";
  }
  return out.str();
}

std::uint64_t ExperimentConfig::digest() const {
  ExperimentConfig canonical = *this;
  canonical.out_dir.clear();
  const std::string text = canonical.serialize();
  Fnv1a h;
  h.add_bytes(text.data(), text.size());
  return h.value();
}

ExperimentConfig parse_config(std::string_view text,
                              std::optional<ExperimentKind> expected) {
  std::map<std::string, std::string> experiment;
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && !parse_kind(section)) {
        throw ConfigError("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value' inside a section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto& target = section == "experiment" ? experiment : sections[section];
    if (!target.emplace(key, value).second) {
      throw ConfigError("duplicate key '" + key + "' in [" + section + "]");
    }
  }

  std::optional<ExperimentKind> kind = expected;
  if (auto it = experiment.find("kind"); it != experiment.end()) {
    auto parsed = parse_kind(it->second);
    if (!parsed) throw ConfigError("unknown experiment kind '" + it->second + "'");
    if (expected && *expected != *parsed) {
      throw ConfigError("config is for '" + it->second + "', not '" +
                        std::string(kind_name(*expected)) + "'");
    }
    kind = parsed;
    experiment.erase(it);
  }
  if (!kind) throw ConfigError("experiment kind not specified");

  ExperimentConfig cfg = ExperimentConfig::defaults(*kind);
  for (const auto& [key, value] : experiment) {
    if (key == "seed") {
      cfg.seed = to_u64(key, value);
    } else if (key == "reps") {
      cfg.reps = static_cast<std::size_t>(to_u64(key, value));
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "snapshots") {
      auto mode = parse_snapshot_mode(value);
      if (!mode) throw ConfigError("snapshots must be all, window or none");
      cfg.snapshots = *mode;
    } else {
      throw ConfigError("unknown key '" + key + "' in [experiment]");
    }
  }
  for (const auto& [name, values] : sections) {
    if (name != kind_name(*kind)) {
      throw ConfigError("section [" + name + "] does not match experiment kind '" +
                        std::string(kind_name(*kind)) + "'");
    }
    for (const auto& [key, value] : values) cfg.set(key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), expected);
}

}  // namespace boostlab::harness
