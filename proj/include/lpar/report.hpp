#pragma once

// CSV, aligned-table and gnuplot output for benchmark rows, plus a CSV reader
// used to re-check emitted ratios.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpar/bench.hpp"

namespace lpar::bench {

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{"benchmark",         "params",     "config", "threads",
                                                "iterations",        "seconds",    "median_seconds",
                                                "reference_seconds", "ratio_kind", "ratio",  "status"};
  return columns;
}

inline std::string format_seconds(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", s);
  return buf;
}

inline std::string format_ratio(double r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", r);
  return buf;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

/// The row as it will appear in a file: ratio recomputed from the printed times.
inline std::vector<std::string> csv_fields(const BenchResult& r) {
  const auto seconds = format_seconds(r.seconds);
  const auto reference = format_seconds(r.reference_seconds);
  const double ratio = ratio_of(r.ratio_kind, parse_double(seconds), parse_double(reference));
  return {r.benchmark,
          r.params,
          r.config,
          std::to_string(r.threads),
          std::to_string(r.iterations),
          seconds,
          format_seconds(r.median_seconds),
          reference,
          to_string(r.ratio_kind),
          format_ratio(ratio),
          r.status};
}

inline void write_csv(std::ostream& os, const std::vector<BenchResult>& rows) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    const auto f = csv_fields(r);
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << '\n';
  }
}

inline void write_table(std::ostream& os, const std::vector<BenchResult>& rows) {
  const auto& cols = csv_columns();
  std::vector<std::vector<std::string>> cells{cols};
  for (const auto& r : rows) cells.push_back(csv_fields(r));
  std::vector<std::size_t> width(cols.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) os << "  ";
      os << std::left << std::setw(static_cast<int>(width[i])) << line[i];
    }
    os << '\n';
  }
  os << std::right;
}

/// Whitespace-separated blocks, one per params group, columns "threads ratio".
/// Matches the plots' axes: thread (or set) count against speedup/slowdown.
inline void write_plot_data(std::ostream& os, const std::vector<BenchResult>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const BenchResult*>> groups;
  for (const auto& r : rows) {
    const auto key = r.benchmark + " " + r.params;
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  bool first = true;
  for (const auto& key : order) {
    if (!first) os << "\n\n";
    first = false;
    os << "# " << key << "\n# config threads seconds ratio\n";
    for (const auto* r : groups[key]) {
      const auto f = csv_fields(*r);
      os << r->config << ' ' << r->threads << ' ' << f[5] << ' ' << f[9] << '\n';
    }
  }
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}
}  // namespace detail

inline std::vector<BenchResult> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  if (detail::split_csv_line(line) != csv_columns()) throw std::invalid_argument("unexpected CSV header: " + line);
  std::vector<BenchResult> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != csv_columns().size()) throw std::invalid_argument("bad CSV row: " + line);
    BenchResult r;
    r.benchmark = f[0];
    r.params = f[1];
    r.config = f[2];
    r.threads = std::stoul(f[3]);
    r.iterations = std::stoul(f[4]);
    r.seconds = parse_double(f[5]);
    r.median_seconds = parse_double(f[6]);
    r.reference_seconds = parse_double(f[7]);
    if (f[8] == "speedup")
      r.ratio_kind = RatioKind::speedup;
    else if (f[8] == "slowdown")
      r.ratio_kind = RatioKind::slowdown;
    else
      throw std::invalid_argument("bad ratio kind: " + f[8]);
    r.ratio = parse_double(f[9]);
    r.status = f[10];
    rows.push_back(r);
  }
  return rows;
}

/// Every ratio equals the quotient of its row's times to 3 decimal places.
inline bool ratios_consistent(const std::vector<BenchResult>& rows) {
  return std::ranges::all_of(rows, [](const BenchResult& r) {
    return format_ratio(ratio_of(r.ratio_kind, r.seconds, r.reference_seconds)) == format_ratio(r.ratio);
  });
}

}  // namespace lpar::bench
