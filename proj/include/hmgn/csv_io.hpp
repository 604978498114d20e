#pragma once

// Plain-text series and tables. Numbers are written in the shortest form
// that reads back to the same double; missing values are empty cells.

#include <iosfwd>
#include <string>
#include <vector>

#include "hmgn/series.hpp"

namespace hmgn {

std::string format_double(double v);

/// Reads one column of values with an optional header line. Empty cells and
/// "nan" mark missing values. With several columns the one headed "value"
/// is used, else the first.
TimeSeries parse_series_csv(std::istream& in);
TimeSeries read_series_csv(const std::string& path);

/// Header "value", missing entries as empty cells.
void write_series_csv(std::ostream& out, const TimeSeries& s);
void write_series_csv(const std::string& path, const TimeSeries& s);

/// Columns index (1-based), observed (empty when missing), fitted.
void write_fit_csv(const std::string& path, const TimeSeries& observed, const VectorXd& fitted);

/// Row-oriented table writer with a fixed header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row);
  void write(std::ostream& out) const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace hmgn
