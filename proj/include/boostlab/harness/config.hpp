// Experiment configuration: a flat key-value text format with one section per
// experiment kind.
//
//   [experiment]
//   kind = pboost
//   seed = 7
//   reps = 10
//   out = results
//   snapshots = all
//
//   [pboost]
//   m = 400
//   gamma = 0.1
//
// Unknown sections or keys are rejected and every value is range-checked at
// load time. Missing keys take the documented defaults.

#ifndef BOOSTLAB_HARNESS_CONFIG_HPP
#define BOOSTLAB_HARNESS_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boostlab/adaboost.hpp"

namespace boostlab::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kAdaboost, kPboost, kAdversary, kCoingame, kSweep, kCompose, kApprox };

std::string_view kind_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

/// Default value of every parameter accepted by `kind`, in canonical order.
const std::vector<std::pair<std::string, std::string>>& parameter_defaults(
    ExperimentKind kind);

std::string_view snapshot_mode_name(SnapshotMode mode);
std::optional<SnapshotMode> parse_snapshot_mode(std::string_view name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kAdaboost;
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  std::string out_dir;
  SnapshotMode snapshots = SnapshotMode::kAll;
  std::map<std::string, std::string> params;  // every key of the kind

  static ExperimentConfig defaults(ExperimentKind kind);

  double real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;

  /// Sets one parameter; throws ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);
  /// Range-checks every parameter against the owning module's preconditions.
  void validate() const;
  /// Canonical text form; parse(serialize()) reproduces the config.
  std::string serialize() const;
  std::uint64_t digest() const;
};

/// Parses config text. `expected` pins the kind when the text has none (or
/// must match it when it does).
ExperimentConfig parse_config(std::string_view text,
                              std::optional<ExperimentKind> expected = std::nullopt);
ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> expected = std::nullopt);

}  // namespace boostlab::harness

#endif  // BOOSTLAB_HARNESS_CONFIG_HPP
