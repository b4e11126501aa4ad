#include "lipgd/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lipgd {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                         std::to_string(rows_ * cols_));
  }
  if (!all_finite(data_)) throw std::invalid_argument("matrix entries must be finite");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double euclidean_norm(std::span<const double> v) {
  // Scaled accumulation so huge or tiny entries do not overflow/underflow.
  const double scale = max_abs(v);
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double x : v) {
    const double y = x / scale;
    s += y * y;
  }
  return scale * std::sqrt(s);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vector matvec(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) throw DimensionError("matvec: vector length does not match columns");
  Vector y(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] = dot(m.row(r), x);
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix gram(const Matrix& m) {
  const bool tall = m.cols() <= m.rows();
  const std::size_t n = tall ? m.cols() : m.rows();
  Matrix g(n, n);
  if (tall) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) g(i, j) += row[i] * row[j];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g(i, j) = dot(m.row(i), m.row(j));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

double frobenius_norm(const Matrix& m) { return euclidean_norm(m.span()); }

PowerIterationResult power_iteration(const Matrix& a, std::size_t max_iterations,
                                     double tolerance) {
  const std::size_t n = a.rows();
  PowerIterationResult result;
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Vector w = matvec(a, v.span());
    const double rayleigh = dot(v.span(), w.span());
    const double wn = euclidean_norm(w);
    result.iterations = it;
    if (wn == 0.0) {
      // Start vector sits in the null space; the caller must not trust this.
      result.eigenvalue = 0.0;
      result.converged = false;
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (it > 1 && std::abs(rayleigh - lambda) <= tolerance * std::abs(rayleigh)) {
      result.eigenvalue = rayleigh;
      result.converged = true;
      return result;
    }
    lambda = rayleigh;
  }
  result.eigenvalue = lambda;
  return result;
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw DimensionError("symmetric_eigenvalues: matrix is not square");
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= 1e-30 * std::max(1.0, frobenius_norm(a) * frobenius_norm(a))) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

SpectralNormResult spectral_norm(const Matrix& m, const PowerIterationOptions& opts) {
  if (m.rows() == 0 || m.cols() == 0) throw DimensionError("spectral_norm: empty matrix");
  if (!all_finite(m.span())) throw std::invalid_argument("spectral_norm: non-finite entries");
  SpectralNormResult out;
  // Scale to unit max entry so the Gram matrix cannot overflow.
  const double scale = max_abs(m.span());
  if (scale == 0.0) return out;
  Matrix scaled = m;
  for (double& x : scaled.span()) x /= scale;
  const Matrix g = gram(scaled);

  auto dense = [&] {
    const auto eig = symmetric_eigenvalues(g);
    return scale * std::sqrt(std::max(0.0, eig.front()));
  };

  if (g.rows() <= opts.dense_threshold) {
    out.value = dense();
    out.dense = true;
    return out;
  }
  const auto pi = power_iteration(g, opts.max_iterations, opts.tolerance);
  out.iterations = pi.iterations;
  if (pi.converged) {
    out.value = scale * std::sqrt(std::max(0.0, pi.eigenvalue));
  } else {
    out.value = dense();
    out.fallback = true;
  }
  return out;
}

double operator_norm(const Matrix& m) { return spectral_norm(m).value; }

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng Rng::derive(std::uint64_t tag) const { return Rng(mix_seed(seed_, tag)); }

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.span()) x = rng.normal();
  return m;
}

Vector gaussian_vector(std::size_t len, Rng& rng) {
  Vector v(len);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace lipgd
