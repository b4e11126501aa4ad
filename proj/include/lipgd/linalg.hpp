#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipgd {

/// Thrown when operand shapes do not line up.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Dense vector of doubles.
class Vector {
public:
  Vector() = default;
  explicit Vector(std::size_t len, double fill = 0.0) : data_(len, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool operator==(const Vector&) const = default;

private:
  std::vector<double> data_;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Takes ownership of row-major `values`; throws DimensionError on a size
  /// mismatch and std::invalid_argument on non-finite entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double euclidean_norm(std::span<const double> v);
inline double euclidean_norm(const Vector& v) { return euclidean_norm(v.span()); }
/// Largest absolute entry (zero for an empty range).
double max_abs(std::span<const double> v);
bool all_finite(std::span<const double> v);

/// y = m * x
Vector matvec(const Matrix& m, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);
/// mᵀm when cols <= rows, otherwise m mᵀ. Always the smaller Gram matrix.
Matrix gram(const Matrix& m);
double frobenius_norm(const Matrix& m);

struct SpectralNormResult {
  double value = 0.0;
  std::size_t iterations = 0;
  /// True when the power iteration did not converge and the dense eigen
  /// solve produced the value.
  bool fallback = false;
  /// True when the dense eigen solve was used directly (small Gram matrix).
  bool dense = false;
};

struct PowerIterationOptions {
  std::size_t max_iterations = 10000;
  double tolerance = 1e-10;
  /// Gram matrices up to this order go straight to the dense solver.
  std::size_t dense_threshold = 16;
};

/// Largest singular value of `m`. Power iteration on the smaller Gram
/// matrix, starting from the normalized all-ones vector.
SpectralNormResult spectral_norm(const Matrix& m, const PowerIterationOptions& opts = {});
double operator_norm(const Matrix& m);

/// Power iteration alone; `converged` is false if the budget ran out.
struct PowerIterationResult {
  double eigenvalue = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};
PowerIterationResult power_iteration(const Matrix& symmetric, std::size_t max_iterations,
                                     double tolerance);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
std::vector<double> symmetric_eigenvalues(Matrix symmetric);

/// Seeded generator. Identical seeds give identical streams.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  /// Independent child stream keyed by `tag`; does not advance this stream.
  Rng derive(std::uint64_t tag) const;

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 finalizer, used to derive well-separated seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// i.i.d. standard normal entries.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);
Vector gaussian_vector(std::size_t len, Rng& rng);

}  // namespace lipgd
