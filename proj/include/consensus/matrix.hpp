#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "consensus/error.hpp"

namespace consensus {

using Vector = std::vector<double>;

/// Default tolerance for row-sum and nonnegativity validation. Loose enough that
/// a decimal rendering of 1/3 still validates as stochastic.
inline constexpr double kValidationTol = 1e-12;

/// Dense row-major real matrix. Entries are finite and both dimensions are at least one.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    check_shape();
    check_finite();
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    check_shape();
    if (data_.size() != rows_ * cols_) {
      throw validation_error("matrix entry count " + std::to_string(data_.size()) +
                             " does not match shape " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
    check_finite();
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<std::vector<double>> tmp;
    for (const auto& r : rows) tmp.emplace_back(r);
    *this = from_rows(tmp);
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw validation_error("matrix must have at least one row and column");
    const std::size_t cols = rows.front().size();
    std::vector<double> entries;
    entries.reserve(rows.size() * cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) {
        throw validation_error("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                   " entries, expected " + std::to_string(cols),
                               i);
      }
      entries.insert(entries.end(), rows[i].begin(), rows[i].end());
    }
    return Matrix(rows.size(), cols, std::move(entries));
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// The rank-one consensus matrix 1·c.
  static Matrix consensus(std::size_t rows, std::span<const double> c) {
    Matrix m(rows, c.size());
    for (std::size_t i = 0; i < rows; ++i) std::copy(c.begin(), c.end(), m.row_begin(i));
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  double* row_begin(std::size_t i) noexcept { return data_.data() + i * cols_; }

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  std::span<const double> entries() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw validation_error("cannot multiply " + a.shape_string() + " by " + b.shape_string());
    }
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) {
      throw validation_error("cannot multiply " + a.shape_string() + " by vector of length " +
                             std::to_string(x.size()));
    }
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  Matrix() = default;

  void check_shape() const {
    if (rows_ == 0 || cols_ == 0) throw validation_error("matrix must have at least one row and column");
  }
  void check_finite() const {
    for (std::size_t k = 0; k < data_.size(); ++k) {
      if (!std::isfinite(data_[k])) {
        throw validation_error("non-finite entry at row " + std::to_string(k / cols_) + ", column " +
                                   std::to_string(k % cols_),
                               k / cols_, k % cols_);
      }
    }
  }
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw validation_error("shape mismatch " + shape_string() + " vs " + o.shape_string());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Vector row_sums(const Matrix& m) {
  Vector s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    s[i] = std::accumulate(r.begin(), r.end(), 0.0);
  }
  return s;
}

inline Vector column_sums(const Matrix& m) {
  Vector s(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s[j] += m(i, j);
  return s;
}

/// Common row sum, if every row sum lies within `tol` of the first one.
inline std::optional<double> equal_row_sum(const Matrix& m, double tol = kValidationTol) {
  const Vector s = row_sums(m);
  for (double v : s)
    if (std::abs(v - s.front()) > tol) return std::nullopt;
  return s.front();
}

/// A matrix all of whose row sums equal `row_sum`; the domain of consensus seminorms.
class EqualRowSumMatrix {
 public:
  static EqualRowSumMatrix make(Matrix m, double tol = kValidationTol) {
    const Vector s = row_sums(m);
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double dev = std::abs(s[i] - s[0]);
      if (dev > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "row " << i << " sums to " << s[i] << " but row 0 sums to " << s[0] << " (deviation " << dev
            << ")";
        throw validation_error(msg.str(), i, std::nullopt, dev);
      }
    }
    return EqualRowSumMatrix(std::move(m), s[0]);
  }

  const Matrix& matrix() const noexcept { return base_; }
  double row_sum() const noexcept { return row_sum_; }
  std::size_t rows() const noexcept { return base_.rows(); }
  std::size_t cols() const noexcept { return base_.cols(); }

 private:
  EqualRowSumMatrix(Matrix m, double sigma) : base_(std::move(m)), row_sum_(sigma) {}

  Matrix base_;
  double row_sum_;
};

/// Nonnegative matrix with unit row sums.
class StochasticMatrix {
 public:
  const Matrix& matrix() const noexcept { return base_.matrix(); }
  const EqualRowSumMatrix& equal_row_sum() const noexcept { return base_; }
  operator const EqualRowSumMatrix&() const noexcept { return base_; }  // NOLINT: is-a relation
  bool doubly_stochastic() const noexcept { return doubly_stochastic_; }
  std::size_t rows() const noexcept { return base_.rows(); }
  std::size_t cols() const noexcept { return base_.cols(); }

 private:
  friend StochasticMatrix validate_stochastic(Matrix m, double tol);
  StochasticMatrix(EqualRowSumMatrix base, bool ds) : base_(std::move(base)), doubly_stochastic_(ds) {}

  EqualRowSumMatrix base_;
  bool doubly_stochastic_;
};

/// Checks nonnegativity and unit row sums within `tol`. Entries in [-tol, 0) are clamped
/// to zero. Throws validation_error naming the first violating row (and entry).
inline StochasticMatrix validate_stochastic(Matrix m, double tol = kValidationTol) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double& v = m(i, j);
      if (v < -tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "row " << i << " has negative entry " << v << " in column " << j;
        throw validation_error(msg.str(), i, j, -v);
      }
      if (v < 0.0) v = 0.0;
    }
    const auto r = m.row(i);
    const double s = std::accumulate(r.begin(), r.end(), 0.0);
    if (std::abs(s - 1.0) > tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << i << " sums to " << s << ", not 1 (deviation " << std::abs(s - 1.0) << ")";
      throw validation_error(msg.str(), i, std::nullopt, std::abs(s - 1.0));
    }
  }
  bool ds = m.square();
  if (ds) {
    for (double c : column_sums(m)) ds = ds && std::abs(c - 1.0) <= tol;
  }
  auto base = EqualRowSumMatrix::make(std::move(m), 2.0 * tol);
  return StochasticMatrix(std::move(base), ds);
}

/// Support indicator of a matrix.
class PatternMatrix {
 public:
  PatternMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool operator()(std::size_t i, std::size_t j) const noexcept { return bits_[i * cols_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) noexcept { bits_[i * cols_ + j] = v ? 1 : 0; }

  /// Indices of the positive entries of row i.
  std::vector<std::size_t> support(std::size_t i) const {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j)) s.push_back(j);
    return s;
  }

  Matrix to_matrix() const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j) ? 1.0 : 0.0;
    return m;
  }

  friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<unsigned char> bits_;
};

inline PatternMatrix pattern(const Matrix& m, double zero_tol = 0.0) {
  PatternMatrix p(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) p.set(i, j, std::abs(m(i, j)) > zero_tol);
  return p;
}

/// Idempotent P whose kernel is span{1}. The orthogonal form is I - (1/n)11'.
/// `complement()` gives I - P, a projection onto span{1}.
class CenteringProjection {
 public:
  enum class Form { orthogonal, general };

  static CenteringProjection orthogonal(std::size_t n) {
    Matrix p(n, n, -1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) p(i, i) += 1.0;
    return CenteringProjection(std::move(p), Form::orthogonal);
  }

  /// Accepts any idempotent P with P·1 = 0 and rank n-1.
  static CenteringProjection general(Matrix p, double tol = 1e-10) {
    if (!p.square()) throw validation_error("projection must be square, got " + p.shape_string());
    const std::size_t n = p.rows();
    const Matrix sq = p * p;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(sq(i, j) - p(i, j)) > tol)
          throw validation_error("projection is not idempotent at row " + std::to_string(i), i, j,
                                 std::abs(sq(i, j) - p(i, j)));
    const Vector ones(n, 1.0);
    const Vector p1 = p * std::span<const double>(ones);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(p1[i]) > tol)
        throw validation_error("projection does not annihilate the consensus vector at row " + std::to_string(i),
                               i, std::nullopt, std::abs(p1[i]));
    // Idempotent => rank equals trace.
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += p(i, i);
    if (std::abs(trace - static_cast<double>(n - 1)) > 1e-8)
      throw validation_error("projection kernel is larger than span{1} (rank " + std::to_string(trace) + ")");
    return CenteringProjection(std::move(p), Form::general);
  }

  std::size_t dimension() const noexcept { return p_.rows(); }
  Form form() const noexcept { return form_; }
  const Matrix& matrix() const noexcept { return p_; }

  Matrix complement() const { return Matrix::identity(p_.rows()) - p_; }

  /// P·m. The orthogonal form subtracts column means rather than multiplying.
  Matrix apply(const Matrix& m) const {
    if (m.rows() != p_.rows()) throw validation_error("projection dimension mismatch");
    if (form_ == Form::general) return p_ * m;
    Matrix out = m;
    const double n = static_cast<double>(m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, j);
      mean /= n;
      for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) -= mean;
    }
    return out;
  }

 private:
  CenteringProjection(Matrix p, Form f) : p_(std::move(p)), form_(f) {}

  Matrix p_;
  Form form_;
};

inline CenteringProjection centering(std::size_t n) { return CenteringProjection::orthogonal(n); }

}  // namespace consensus
