#include "boostlab/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace boostlab::harness {

namespace {

const std::vector<std::string> kBaseColumns = {
    "kind", "rep", "seed", "config_digest", "outcome", "failed_step", "leaks"};

std::string outcome_name(Outcome o) {
  return o == Outcome::kSuccess ? "success" : "failed";
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::optional<double> RunRecord::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  return std::nullopt;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw std::invalid_argument("csv row width does not match the header");
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << render();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

CsvTable summary_table(const std::string& kind, const std::vector<RunRecord>& records) {
  std::vector<std::string> header = kBaseColumns;
  if (!records.empty()) {
    for (const auto& [name, value] : records.front().metrics) header.push_back(name);
  }
  CsvTable table(header);
  for (const auto& r : records) {
    std::vector<std::string> row = {
        kind,
        std::to_string(r.rep),
        std::to_string(r.seed),
        hex64(r.config_digest),
        outcome_name(r.outcome),
        r.failed_step ? std::to_string(*r.failed_step) : "",
        std::to_string(r.leaks)};
    for (const auto& [name, value] : r.metrics) row.push_back(format_real(value));
    table.add_row(std::move(row));
  }
  return table;
}

CsvTable aggregate_table(const std::string& kind, const std::vector<RunRecord>& records) {
  CsvTable table({"kind", "runs", "failures", "failure_rate"});
  if (records.empty()) return table;
  std::size_t failures = 0;
  for (const auto& r : records) failures += r.outcome == Outcome::kFailed ? 1 : 0;
  table.add_row({kind, std::to_string(records.size()), std::to_string(failures),
                 format_real(static_cast<double>(failures) /
                             static_cast<double>(records.size()))});
  return table;
}

CsvTable rounds_table(const std::vector<RunRecord>& records) {
  CsvTable table(
      {"rep", "seed", "round", "block", "queries", "loss", "log_z", "min_margin"});
  for (const auto& r : records) {
    for (const auto& m : r.rounds) {
      table.add_row({std::to_string(r.rep), std::to_string(r.seed),
                     std::to_string(m.round), std::to_string(m.block),
                     std::to_string(m.queries), format_real(m.loss),
                     format_real(m.log_z), format_real(m.min_margin)});
    }
  }
  return table;
}

void report(const std::string& kind, const std::vector<RunRecord>& records,
            const std::filesystem::path& out_dir, std::ostream& human) {
  std::filesystem::create_directories(out_dir);
  summary_table(kind, records).write(out_dir / (kind + "_summary.csv"));
  aggregate_table(kind, records).write(out_dir / (kind + "_aggregate.csv"));
  bool any_rounds = false;
  for (const auto& r : records) any_rounds = any_rounds || !r.rounds.empty();
  if (any_rounds) rounds_table(records).write(out_dir / (kind + "_rounds.csv"));

  human << std::left << std::setw(5) << "rep" << std::setw(22) << "seed"
        << std::setw(9) << "outcome" << std::setw(8) << "rounds" << std::setw(10)
        << "seconds"
        << "metrics\n";
  for (const auto& r : records) {
    std::string metrics;
    for (const auto& [name, value] : r.metrics) {
      if (!metrics.empty()) metrics += ' ';
      metrics += name + "=" + format_real(value);
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", r.wall_seconds);
    std::string outcome = outcome_name(r.outcome);
    if (r.failed_step) outcome += "@" + std::to_string(*r.failed_step);
    human << std::left << std::setw(5) << r.rep << std::setw(22) << r.seed
          << std::setw(9) << outcome << std::setw(8) << r.rounds.size()
          << std::setw(10) << secs << metrics << '\n';
  }
}

}  // namespace boostlab::harness
