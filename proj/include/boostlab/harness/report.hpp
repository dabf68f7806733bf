// Run records and their CSV / console rendering.
//
// CSV files written per experiment (all with a header row, fixed column order,
// reals printed with 12 significant digits):
//
//   <kind>_summary.csv    kind,rep,seed,config_digest,outcome,failed_step,leaks,<metrics...>
//   <kind>_aggregate.csv  kind,runs,failures,failure_rate
//   <kind>_rounds.csv     rep,seed,round,block,queries,loss,log_z,min_margin
//
// Kinds that produce tables (coingame, sweep, compose, approx) additionally
// write <kind>_table.csv, documented next to the experiment that writes it.

#ifndef BOOSTLAB_HARNESS_REPORT_HPP
#define BOOSTLAB_HARNESS_REPORT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace boostlab::harness {

struct RoundMetrics {
  std::size_t round = 0;
  std::size_t block = 0;
  std::size_t queries = 0;
  double loss = 0.0;
  double log_z = 0.0;
  double min_margin = 0.0;
};

enum class Outcome { kSuccess, kFailed };

struct RunRecord {
  std::string kind;
  std::uint64_t config_digest = 0;
  std::uint64_t seed = 0;
  std::size_t rep = 0;
  std::vector<RoundMetrics> rounds;
  Outcome outcome = Outcome::kSuccess;
  std::optional<std::size_t> failed_step;
  std::size_t leaks = 0;
  std::vector<std::pair<std::string, double>> metrics;  // fixed order per kind
  double wall_seconds = 0.0;

  std::optional<double> metric(const std::string& name) const;
};

/// 12-significant-digit rendering used for every real in CSV output.
std::string format_real(double x);

/// Minimal CSV writer; fields never contain separators.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row);
  std::string render() const;
  void write(const std::filesystem::path& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable summary_table(const std::string& kind, const std::vector<RunRecord>& records);
CsvTable aggregate_table(const std::string& kind, const std::vector<RunRecord>& records);
CsvTable rounds_table(const std::vector<RunRecord>& records);

/// Writes the summary, aggregate and (when any run has rounds) per-round CSVs
/// under `out_dir`, and prints a human-readable table to `human`.
void report(const std::string& kind, const std::vector<RunRecord>& records,
            const std::filesystem::path& out_dir, std::ostream& human);

}  // namespace boostlab::harness

#endif  // BOOSTLAB_HARNESS_REPORT_HPP
