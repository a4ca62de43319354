//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
// Report-row model and the CSV/table renderers for the benchmark CLI, kept
// header-only and free of CLI dependencies so unit tests can exercise the
// exact bytes the tool emits.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_TOOLS_BENCH_OUTPUT_HPP
#define IDWS_TOOLS_BENCH_OUTPUT_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace idws_cli {

// One CSV line: a single repeat of a (scheduler, distribution) cell.
struct ReportRow {
  std::string scheduler;
  std::string distribution;
  uint64_t n = 0;
  uint32_t threads = 0;
  std::string transport;
  uint32_t repeat = 0; // 1-based
  double wall_s = 0.0;
  double imbalance = 0.0;
  uint64_t steal_attempts = 0;
  uint64_t steals_granted = 0;
  uint64_t checksum = 0;
  bool verify_ran = false;
  bool verify_failed = false;
};

inline const char *csv_header() {
  return "scheduler,distribution,n,threads,transport,repeat,wall_s,imbalance,"
         "steal_attempts,steals_granted,checksum";
}

// Six significant digits, plain decimal point, no grouping ("%.6g").
inline std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Median with the conventional even-count average; a three-element
// [1.2, 1.0, 1.4] reports 1.2.
inline double median_double(std::vector<double> v) {
  if (v.empty())
    return 0.0;
  std::sort(v.begin(), v.end());
  size_t mid = v.size() / 2;
  if (v.size() % 2 == 1)
    return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

// Integer columns keep integer medians: lower middle for even counts.
inline uint64_t median_u64(std::vector<uint64_t> v) {
  if (v.empty())
    return 0;
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

// Canonical output: one line per repeat, newline-terminated final line.
// Verify results ride on the exit status, not in the schema.
inline void emit_csv(const std::vector<ReportRow> &rows, std::ostream &os) {
  os << csv_header() << '\n';
  for (const ReportRow &r : rows) {
    os << r.scheduler << ',' << r.distribution << ',' << r.n << ','
       << r.threads << ',' << r.transport << ',' << r.repeat << ','
       << format_sig6(r.wall_s) << ',' << format_sig6(r.imbalance) << ','
       << r.steal_attempts << ',' << r.steals_granted << ',' << r.checksum
       << '\n';
  }
}

// Lossy human rendering: one line per cell, medians over that cell's
// repeats. Rows belonging to one cell are consecutive in matrix order.
inline void emit_table(const std::vector<ReportRow> &rows, std::ostream &os) {
  struct Cell {
    const ReportRow *first = nullptr;
    std::vector<double> wall, imbalance;
    std::vector<uint64_t> attempts, granted;
    bool verify_failed = false;
  };
  std::vector<Cell> cells;
  for (const ReportRow &r : rows) {
    if (cells.empty() || cells.back().first->scheduler != r.scheduler ||
        cells.back().first->distribution != r.distribution) {
      cells.emplace_back();
      cells.back().first = &r;
    }
    Cell &c = cells.back();
    c.wall.push_back(r.wall_s);
    c.imbalance.push_back(r.imbalance);
    c.attempts.push_back(r.steal_attempts);
    c.granted.push_back(r.steals_granted);
    c.verify_failed = c.verify_failed || (r.verify_ran && r.verify_failed);
  }

  std::vector<std::vector<std::string>> grid;
  bool any_verify = false;
  for (const ReportRow &r : rows)
    any_verify = any_verify || r.verify_ran;
  std::vector<std::string> head = {"scheduler",  "distribution", "n",
                                   "threads",    "transport",    "wall_s",
                                   "imbalance",  "attempts",     "granted",
                                   "checksum"};
  if (any_verify)
    head.push_back("verify");
  grid.push_back(head);
  for (const Cell &c : cells) {
    std::vector<std::string> line = {
        c.first->scheduler,
        c.first->distribution,
        std::to_string(c.first->n),
        std::to_string(c.first->threads),
        c.first->transport,
        format_sig6(median_double(c.wall)),
        format_sig6(median_double(c.imbalance)),
        std::to_string(median_u64(c.attempts)),
        std::to_string(median_u64(c.granted)),
        std::to_string(c.first->checksum)};
    if (any_verify)
      line.push_back(c.verify_failed ? "FAIL" : "ok");
    grid.push_back(std::move(line));
  }

  std::vector<size_t> width(grid[0].size(), 0);
  for (const auto &line : grid)
    for (size_t i = 0; i < line.size(); ++i)
      width[i] = std::max(width[i], line[i].size());
  for (const auto &line : grid) {
    for (size_t i = 0; i < line.size(); ++i) {
      os << line[i];
      if (i + 1 < line.size())
        os << std::string(width[i] - line[i].size() + 2, ' ');
    }
    os << '\n';
  }
}

} // namespace idws_cli

#endif // IDWS_TOOLS_BENCH_OUTPUT_HPP
