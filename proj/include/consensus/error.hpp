#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace consensus {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input does not satisfy the requested matrix class (stochastic, equal row sums, ...).
/// Carries the first offending row and, where meaningful, the column.
class validation_error : public error {
 public:
  validation_error(const std::string& what, std::optional<std::size_t> row = std::nullopt,
                   std::optional<std::size_t> col = std::nullopt, double deviation = 0.0)
      : error(what), row_(row), col_(col), deviation_(deviation) {}

  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> col() const noexcept { return col_; }
  double deviation() const noexcept { return deviation_; }

 private:
  std::optional<std::size_t> row_;
  std::optional<std::size_t> col_;
  double deviation_;
};

/// Malformed matrix text (CSV/JSON).
class parse_error : public error {
 public:
  using error::error;
};

/// Numerical engine failure: simplex iteration cap, eigensolver non-convergence,
/// or a certificate that does not re-verify.
class solver_error : public error {
 public:
  using error::error;
};

}  // namespace consensus
