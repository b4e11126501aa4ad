#include "lipgd/harness/csv.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lipgd::harness {

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) {
    out.mean = out.std = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::size_t AggregateTable::metric_index(const std::string& metric) const {
  const auto it = std::find(metrics.begin(), metrics.end(), metric);
  if (it == metrics.end()) throw std::invalid_argument("no metric '" + metric + "' in aggregate");
  return static_cast<std::size_t>(it - metrics.begin());
}

std::vector<std::string> aggregate_metrics() {
  std::vector<std::string> out;
  for (const auto& c : iteration_columns())
    if (c != "t") out.push_back(c);
  return out;
}

void aggregate_cell(const CellInfo& cell, const std::vector<const TrainLog*>& logs,
                    AggregateTable& table) {
  if (table.metrics.empty()) table.metrics = aggregate_metrics();
  if (logs.empty()) return;
  const std::size_t rows = logs.front()->records.size();
  for (const TrainLog* log : logs)
    if (log->records.size() != rows) throw std::invalid_argument("logs in one cell have different lengths");

  std::vector<double> column(logs.size());
  for (std::size_t r = 0; r < rows; ++r) {
    AggregateRow row{cell.arm, cell.axis, cell.value, cell.N, cell.p, cell.P, cell.beta,
                     logs.front()->records[r].t, logs.size(), {}, {}};
    for (const TrainLog* log : logs)
      if (log->records[r].t != row.t) throw std::invalid_argument("logs in one cell have different t grids");
    for (const auto& metric : table.metrics) {
      for (std::size_t k = 0; k < logs.size(); ++k) column[k] = record_value(logs[k]->records[r], metric);
      const MeanStd ms = mean_std(column);
      row.mean.push_back(ms.mean);
      row.std.push_back(ms.std);
    }
    table.rows.push_back(std::move(row));
  }
}

namespace {

const std::vector<std::string> kKeyColumns{"arm", "axis", "value", "N", "p", "P", "beta", "t", "n_seeds"};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

void write_aggregate_csv(const AggregateTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < kKeyColumns.size(); ++i) out << (i ? "," : "") << kKeyColumns[i];
  for (const auto& m : table.metrics) out << ',' << m << "_mean," << m << "_std";
  out << '\n';
  out.precision(17);
  for (const auto& row : table.rows) {
    out << row.arm << ',' << row.axis << ',' << row.value << ',' << row.N << ',' << row.p << ','
        << row.P << ',' << row.beta << ',' << row.t << ',' << row.n_seeds;
    for (std::size_t k = 0; k < table.metrics.size(); ++k) out << ',' << row.mean[k] << ',' << row.std[k];
    out << '\n';
  }
}

AggregateTable read_aggregate_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("aggregate CSV is empty");
  const auto header = split(line);
  if (header.size() < kKeyColumns.size() || (header.size() - kKeyColumns.size()) % 2 != 0)
    throw std::invalid_argument("aggregate CSV header has the wrong shape");
  for (std::size_t i = 0; i < kKeyColumns.size(); ++i)
    if (header[i] != kKeyColumns[i]) throw std::invalid_argument("aggregate CSV: expected column '" + kKeyColumns[i] + "'");

  AggregateTable table;
  for (std::size_t i = kKeyColumns.size(); i < header.size(); i += 2) {
    const std::string& m = header[i];
    if (m.size() < 6 || m.substr(m.size() - 5) != "_mean" || header[i + 1] != m.substr(0, m.size() - 5) + "_std")
      throw std::invalid_argument("aggregate CSV: metric columns must come in _mean/_std pairs");
    table.metrics.push_back(m.substr(0, m.size() - 5));
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw std::invalid_argument("aggregate CSV line " + std::to_string(line_no) + ": wrong number of cells");
    try {
      AggregateRow row;
      row.arm = cells[0];
      row.axis = cells[1];
      row.value = parse_double(cells[2]);
      row.N = std::stoull(cells[3]);
      row.p = std::stoull(cells[4]);
      row.P = std::stoull(cells[5]);
      row.beta = parse_double(cells[6]);
      row.t = std::stoull(cells[7]);
      row.n_seeds = std::stoull(cells[8]);
      for (std::size_t i = kKeyColumns.size(); i < cells.size(); i += 2) {
        row.mean.push_back(parse_double(cells[i]));
        row.std.push_back(parse_double(cells[i + 1]));
      }
      table.rows.push_back(std::move(row));
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("aggregate CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

}  // namespace lipgd::harness
