#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "consensus/error.hpp"
#include "consensus/lp.hpp"
#include "consensus/matrix.hpp"

namespace consensus::lp {

/// Outcome of testing whether A y < 0 has a solution y >= 0.
///
/// Exactly one branch is populated. A feasible result holds `witness_y` with
/// A·witness_y <= -margin·1 and margin > 0; an infeasible one holds `farkas_x` >= 0,
/// nonzero, with farkas_x'A >= -1e-8 (Gordan's alternative). Both factories re-verify
/// the certificate against A and throw solver_error if it does not hold.
class StrictFeasibilityResult {
 public:
  static constexpr double kFarkasTol = 1e-8;

  static StrictFeasibilityResult feasible_with(const Matrix& a, Vector y) {
    if (y.size() != a.cols()) throw solver_error("feasibility witness has wrong length");
    for (double v : y)
      if (v < 0.0) throw solver_error("feasibility witness has a negative entry");
    const Vector ay = a * std::span<const double>(y);
    const double margin = -*std::max_element(ay.begin(), ay.end());
    if (!(margin > 0.0)) throw solver_error("feasibility witness does not make A y strictly negative");
    StrictFeasibilityResult r;
    r.feasible_ = true;
    r.witness_y_ = std::move(y);
    r.margin_ = margin;
    return r;
  }

  static StrictFeasibilityResult infeasible_with(const Matrix& a, Vector x) {
    if (x.size() != a.rows()) throw solver_error("Farkas witness has wrong length");
    double peak = 0.0;
    for (double v : x) {
      if (v < 0.0) throw solver_error("Farkas witness has a negative entry");
      peak = std::max(peak, v);
    }
    if (!(peak > 0.0)) throw solver_error("Farkas witness is zero");
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) s += x[i] * a(i, j);
      if (s < -kFarkasTol * peak) {
        throw solver_error("Farkas witness fails x'A >= 0 at column " + std::to_string(j));
      }
    }
    StrictFeasibilityResult r;
    r.feasible_ = false;
    r.farkas_x_ = std::move(x);
    return r;
  }

  bool feasible() const noexcept { return feasible_; }
  const Vector& witness_y() const noexcept { return witness_y_; }
  const Vector& farkas_x() const noexcept { return farkas_x_; }
  double margin() const noexcept { return margin_; }

 private:
  StrictFeasibilityResult() = default;

  bool feasible_ = false;
  Vector witness_y_;
  Vector farkas_x_;
  double margin_ = 0.0;
};

inline constexpr double kStrictSlackThreshold = 1e-9;

/// Decides whether some y >= 0 satisfies A y < 0 entrywise.
///
/// Solves  max s  s.t.  A y + s·1 <= 0,  0 <= y <= 1,  s >= 0. The system is homogeneous,
/// so the box on y loses nothing and also bounds s. Strictly feasible iff s* > 1e-9; otherwise
/// the row multipliers of the optimal basis form a Farkas vector x >= 0 with x'A >= 0.
inline StrictFeasibilityResult strict_feasibility(const Matrix& a, const SolverOptions& opt = {}) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  LinearProgram prog(m + 1);
  for (std::size_t j = 0; j < m; ++j) prog.set_bounds(j, 0.0, 1.0);
  prog.set_objective(m, -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vector row(m + 1, 1.0);
    for (std::size_t j = 0; j < m; ++j) row[j] = a(i, j);
    prog.add_constraint(std::move(row), Sense::less_equal, 0.0);
  }
  const Outcome out = solve(prog, opt);
  if (out.status != Status::optimal) {
    throw solver_error(std::string("strict feasibility LP ended ") + to_string(out.status));
  }
  const double slack = out.primal[m];
  if (slack > kStrictSlackThreshold) {
    Vector y(out.primal.begin(), out.primal.begin() + static_cast<std::ptrdiff_t>(m));
    for (double& v : y) v = std::clamp(v, 0.0, 1.0);
    return StrictFeasibilityResult::feasible_with(a, std::move(y));
  }
  Vector x(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::max(-out.duals[i], 0.0);
    peak = std::max(peak, x[i]);
  }
  if (!(peak > 0.0)) throw solver_error("strict feasibility LP produced a zero Farkas vector");
  for (double& v : x) {
    v /= peak;
    if (v < 1e-10) v = 0.0;
  }
  return StrictFeasibilityResult::infeasible_with(a, std::move(x));
}

/// The matrix 11' - 2[[S]] whose strict feasibility decides contraction in the metric
/// infinity seminorm.
inline Matrix contraction_system(const PatternMatrix& p) {
  Matrix a(p.rows(), p.cols(), 1.0);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      if (p(i, j)) a(i, j) = -1.0;
  return a;
}

}  // namespace consensus::lp
