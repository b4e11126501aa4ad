#include "lipgd/losses.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lipgd {

void Dataset::validate() const {
  if (ys.empty()) throw std::invalid_argument("dataset must contain at least one sample");
  if (xs.rows() != ys.size()) throw DimensionError("dataset: xs rows != ys length");
  if (xs.cols() == 0) throw DimensionError("dataset: inputs need at least one coordinate");
  if (!all_finite(xs.span()) || !all_finite(ys.span()))
    throw std::invalid_argument("dataset entries must be finite");
}

void Dataset::write_csv(std::ostream& out) const {
  for (std::size_t j = 0; j < dim(); ++j) out << "x_" << j << ',';
  out << "y\n";
  out.precision(17);
  for (std::size_t n = 0; n < size(); ++n) {
    for (double v : x(n)) out << v << ',';
    out << y(n) << '\n';
  }
}

Dataset Dataset::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset CSV is empty");
  std::size_t cols = 1;
  for (char ch : line) cols += ch == ',';
  if (cols < 2) throw std::invalid_argument("dataset CSV needs at least one input column and y");
  std::vector<double> xs;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      (c + 1 < cols ? xs : ys).push_back(v);
      ++c;
    }
    if (c != cols) throw std::invalid_argument("dataset CSV row has the wrong number of cells");
  }
  Dataset data{Matrix(ys.size(), cols - 1, std::move(xs)), Vector(std::move(ys))};
  data.validate();
  return data;
}

double huber(double yhat, double y, double delta) {
  const double r = std::abs(yhat - y);
  return r <= delta ? 0.5 * r * r : delta * (r - 0.5 * delta);
}

namespace {
void check_inputs(const Params& theta, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("risk over an empty dataset");
  if (data.dim() != theta.W.cols()) throw DimensionError("data dimension does not match W");
}
}  // namespace

double mse_risk(const Params& theta, const Activation& act, const Dataset& data) {
  check_inputs(theta, data);
  double s = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const double r = forward(theta, act, data.x(n)) - data.y(n);
    s += r * r;
  }
  return s / static_cast<double>(data.size());
}

double huber_risk(const Params& theta, const Activation& act, const Dataset& data,
                  double delta) {
  check_inputs(theta, data);
  double s = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) s += huber(forward(theta, act, data.x(n)), data.y(n), delta);
  return s / static_cast<double>(data.size());
}

MonteCarloEstimate true_risk_mc(const Params& theta, const Activation& act,
                                const Sampler& sampler, std::size_t m_samples, Rng& rng,
                                double delta) {
  if (m_samples < 1) throw std::invalid_argument("true_risk_mc: need at least one sample");
  // Welford accumulation.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < m_samples; ++i) {
    const Sample s = sampler(rng);
    const double loss = huber(forward(theta, act, s.x.span()), s.y, delta);
    const double dlt = loss - mean;
    mean += dlt / static_cast<double>(i + 1);
    m2 += dlt * (loss - mean);
  }
  MonteCarloEstimate out{mean, 0.0, m_samples};
  if (m_samples > 1) {
    const double var = m2 / static_cast<double>(m_samples - 1);
    out.std_error = std::sqrt(var / static_cast<double>(m_samples));
  }
  return out;
}

}  // namespace lipgd
