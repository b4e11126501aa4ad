#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lipgd/trainer.hpp"

namespace lipgd::harness {

struct MeanStd {
  double mean = 0.0;
  /// Sample standard deviation (n - 1); zero for a single value.
  double std = 0.0;
};

MeanStd mean_std(std::span<const double> values);
double median(std::vector<double> values);

/// Mean and spread across seeds of every numeric record column at one t.
struct AggregateRow {
  std::string arm;
  std::string axis;
  double value = 0.0;
  std::size_t N = 0;
  std::size_t p = 0;
  std::size_t P = 0;
  double beta = 0.0;
  std::size_t t = 0;
  std::size_t n_seeds = 0;
  std::vector<double> mean;
  std::vector<double> std;
};

struct AggregateTable {
  /// Record columns other than t, in record order.
  std::vector<std::string> metrics;
  std::vector<AggregateRow> rows;

  std::size_t metric_index(const std::string& metric) const;
};

/// Record columns aggregated per row.
std::vector<std::string> aggregate_metrics();

/// Identifies one sweep cell in the aggregate.
struct CellInfo {
  std::string arm;
  std::string axis;
  double value = 0.0;
  std::size_t N = 0;
  std::size_t p = 0;
  std::size_t P = 0;
  double beta = 0.0;
};

/// Appends one row per logged t. All logs must share the same t grid.
void aggregate_cell(const CellInfo& cell, const std::vector<const TrainLog*>& logs,
                    AggregateTable& table);

void write_aggregate_csv(const AggregateTable& table, std::ostream& out);
/// Throws std::invalid_argument on a malformed table.
AggregateTable read_aggregate_csv(std::istream& in);

}  // namespace lipgd::harness
