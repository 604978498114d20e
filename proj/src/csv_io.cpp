#include "hmgn/csv_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hmgn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  if (out.empty()) out.emplace_back();
  return out;
}

bool is_missing(const std::string& cell) {
  const std::string c = lower(cell);
  return c.empty() || c == "nan" || c == "na";
}

bool parse_number(const std::string& cell, double& v) {
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

TimeSeries parse_series_csv(std::istream& in) {
  std::string line;
  std::vector<double> values;
  std::size_t column = 0;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (first && t.empty()) continue;
    const auto fields = split_fields(t);
    if (first) {
      first = false;
      double probe = 0.0;
      if (!is_missing(fields[0]) && !parse_number(fields[0], probe)) {
        for (std::size_t k = 0; k < fields.size(); ++k)
          if (lower(fields[k]) == "value") column = k;
        continue;
      }
    }
    if (column >= fields.size()) throw InvalidArgument("csv line " + std::to_string(line_no) + ": missing column");
    const std::string& cell = fields[column];
    double v = std::numeric_limits<double>::quiet_NaN();
    if (!is_missing(cell) && !parse_number(cell, v))
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
    values.push_back(v);
  }
  if (values.empty()) throw InvalidArgument("csv input contains no values");
  return TimeSeries::from_nan_coded(Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size())));
}

TimeSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return parse_series_csv(in);
}

void write_series_csv(std::ostream& out, const TimeSeries& s) {
  out << "value\n";
  for (Index i = 0; i < s.size(); ++i) {
    if (s.mask()[i]) out << format_double(s.values()[i]);
    out << '\n';
  }
}

void write_series_csv(const std::string& path, const TimeSeries& s) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  write_series_csv(out, s);
}

void write_fit_csv(const std::string& path, const TimeSeries& observed, const VectorXd& fitted) {
  if (fitted.size() != observed.size()) throw InvalidArgument("write_fit_csv: length mismatch");
  CsvTable table({"index", "observed", "fitted"});
  for (Index i = 0; i < observed.size(); ++i)
    table.add_row({std::to_string(i + 1), observed.mask()[i] ? format_double(observed.values()[i]) : std::string(),
                   format_double(fitted[i])});
  table.write(path);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw InvalidArgument("CsvTable: row width differs from header");
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
    out << '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  write(out);
}

}  // namespace hmgn
