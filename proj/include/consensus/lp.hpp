#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "consensus/error.hpp"
#include "consensus/matrix.hpp"

namespace consensus::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { less_equal, equal, greater_equal };
enum class Status { optimal, infeasible, unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "?";
}

struct Constraint {
  Vector coeffs;
  Sense sense;
  double rhs;
};

/// minimize objective'x  subject to  constraints, lower <= x <= upper.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t vars) : objective_(vars, 0.0), lower_(vars, 0.0), upper_(vars, kInf) {
    if (vars == 0) throw validation_error("linear program needs at least one variable");
  }

  std::size_t variables() const noexcept { return objective_.size(); }
  std::size_t constraint_count() const noexcept { return rows_.size(); }

  void set_objective(std::size_t j, double c) { objective_.at(j) = c; }
  void set_objective(Vector c) {
    if (c.size() != objective_.size()) throw validation_error("objective length mismatch");
    objective_ = std::move(c);
  }
  void set_bounds(std::size_t j, double lo, double hi) {
    if (!(lo <= hi) || lo == kInf || hi == -kInf) {
      throw validation_error("inconsistent bounds for variable " + std::to_string(j));
    }
    lower_.at(j) = lo;
    upper_.at(j) = hi;
  }
  void add_constraint(Vector coeffs, Sense sense, double rhs) {
    if (coeffs.size() != objective_.size()) throw validation_error("constraint length mismatch");
    if (!std::isfinite(rhs)) throw validation_error("constraint right-hand side must be finite");
    rows_.push_back({std::move(coeffs), sense, rhs});
  }

  const Vector& objective() const noexcept { return objective_; }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  const std::vector<Constraint>& constraints() const noexcept { return rows_; }

 private:
  Vector objective_;
  Vector lower_;
  Vector upper_;
  std::vector<Constraint> rows_;
};

/// Dual sign convention (minimization): the multiplier of a >= row is >= 0, of a <= row is <= 0.
/// `farkas` (infeasible only) is nonnegative on <= rows and nonpositive on >= rows, and the
/// aggregated row  sum_i farkas_i a_i x <= sum_i farkas_i b_i  has no solution inside the bounds.
struct Outcome {
  Status status = Status::infeasible;
  Vector primal;
  Vector duals;
  double objective = 0.0;
  Vector farkas;
  std::size_t iterations = 0;
};

struct SolverOptions {
  double pivot_tol = 1e-10;
  double cost_tol = 1e-10;
  double feasibility_tol = 1e-9;
  std::size_t max_iterations = 50000;
};

namespace detail {

// A structural column of the standard form maps back to an original variable as
// x_orig = offset + sign * x_std.
struct ColumnMap {
  std::size_t var;
  double sign;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t i, std::size_t j) noexcept { return t_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const noexcept { return t_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) noexcept { return at(i, cols_); }
  double& cost(std::size_t j) noexcept { return at(rows_, j); }
  double& value() noexcept { return at(rows_, cols_); }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t w = cols_ + 1;
    double* pr = &t_[r * w];
    const double inv = 1.0 / pr[c];
    for (std::size_t j = 0; j < w; ++j) pr[j] *= inv;
    pr[c] = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* pi = &t_[i * w];
      const double f = pi[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < w; ++j) pi[j] -= f * pr[j];
      pi[c] = 0.0;
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> t_;
};

}  // namespace detail

/// Dense two-phase primal simplex with Bland's rule. No presolve.
inline Outcome solve(const LinearProgram& lp, const SolverOptions& opt = {}) {
  const std::size_t nvar = lp.variables();

  // Standard form: structural columns x_std >= 0.
  std::vector<detail::ColumnMap> colmap;
  Vector offset(nvar, 0.0);
  struct BoundRow {
    std::size_t col;
    double cap;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < nvar; ++j) {
    const double lo = lp.lower()[j];
    const double hi = lp.upper()[j];
    if (std::isfinite(lo)) {
      offset[j] = lo;
      colmap.push_back({j, 1.0});
      if (std::isfinite(hi)) bound_rows.push_back({colmap.size() - 1, hi - lo});
    } else if (std::isfinite(hi)) {
      offset[j] = hi;
      colmap.push_back({j, -1.0});
    } else {
      colmap.push_back({j, 1.0});
      colmap.push_back({j, -1.0});
    }
  }
  const std::size_t nstruct = colmap.size();
  const std::size_t morig = lp.constraint_count();
  const std::size_t nrows = morig + bound_rows.size();

  // Row data in standard columns, before slack/flip.
  std::vector<Vector> a(nrows, Vector(nstruct, 0.0));
  Vector b(nrows, 0.0);
  std::vector<Sense> sense(nrows, Sense::less_equal);
  for (std::size_t i = 0; i < morig; ++i) {
    const auto& con = lp.constraints()[i];
    double r = con.rhs;
    for (std::size_t j = 0; j < nvar; ++j) r -= con.coeffs[j] * offset[j];
    for (std::size_t k = 0; k < nstruct; ++k) a[i][k] = con.coeffs[colmap[k].var] * colmap[k].sign;
    b[i] = r;
    sense[i] = con.sense;
  }
  for (std::size_t t = 0; t < bound_rows.size(); ++t) {
    a[morig + t][bound_rows[t].col] = 1.0;
    b[morig + t] = bound_rows[t].cap;
  }

  // Flip rows to a nonnegative right-hand side; >= rows with zero rhs become <= rows.
  Vector flip(nrows, 1.0);
  for (std::size_t i = 0; i < nrows; ++i) {
    if (b[i] < 0.0 || (b[i] == 0.0 && sense[i] == Sense::greater_equal)) {
      flip[i] = -1.0;
      b[i] = -b[i];
      for (double& v : a[i]) v = -v;
      if (sense[i] == Sense::less_equal) {
        sense[i] = Sense::greater_equal;
      } else if (sense[i] == Sense::greater_equal) {
        sense[i] = Sense::less_equal;
      }
    }
  }

  // Column layout: structural | slacks (one per inequality row) | artificials.
  std::vector<std::size_t> slack_col(nrows, SIZE_MAX);
  std::size_t ncols = nstruct;
  for (std::size_t i = 0; i < nrows; ++i)
    if (sense[i] != Sense::equal) slack_col[i] = ncols++;
  const std::size_t first_art = ncols;
  std::vector<std::size_t> init_col(nrows);
  std::vector<bool> is_art;
  for (std::size_t i = 0; i < nrows; ++i) {
    if (sense[i] == Sense::less_equal) {
      init_col[i] = slack_col[i];
    } else {
      init_col[i] = ncols++;
    }
  }
  is_art.assign(ncols, false);
  for (std::size_t j = first_art; j < ncols; ++j) is_art[j] = true;

  detail::Tableau tab(nrows, ncols);
  std::vector<std::size_t> basis(nrows);
  for (std::size_t i = 0; i < nrows; ++i) {
    for (std::size_t k = 0; k < nstruct; ++k) tab.at(i, k) = a[i][k];
    if (slack_col[i] != SIZE_MAX) tab.at(i, slack_col[i]) = sense[i] == Sense::less_equal ? 1.0 : -1.0;
    if (is_art[init_col[i]]) tab.at(i, init_col[i]) = 1.0;
    tab.rhs(i) = b[i];
    basis[i] = init_col[i];
  }

  std::size_t iterations = 0;
  auto run = [&](bool phase_one) -> bool {
    // Returns false when unbounded.
    for (;;) {
      std::size_t enter = SIZE_MAX;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (!phase_one && is_art[j]) continue;
        if (tab.cost(j) < -opt.cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter == SIZE_MAX) return true;
      std::size_t leave = SIZE_MAX;
      double best = kInf;
      for (std::size_t i = 0; i < nrows; ++i) {
        const double e = tab.at(i, enter);
        if (e <= opt.pivot_tol) continue;
        const double ratio = tab.rhs(i) / e;
        // Bland: among minimum ratios, the smallest basic variable index leaves.
        const bool tie = leave != SIZE_MAX && ratio <= best + 1e-12;
        if (leave == SIZE_MAX || ratio < best - 1e-12 || (tie && basis[i] < basis[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == SIZE_MAX) return false;
      if (++iterations > opt.max_iterations) {
        std::ostringstream msg;
        msg << "simplex iteration cap " << opt.max_iterations << " exceeded; basis [";
        for (std::size_t i = 0; i < nrows; ++i) msg << (i ? "," : "") << basis[i];
        msg << "]";
        throw solver_error(msg.str());
      }
      tab.pivot(leave, enter);
      basis[leave] = enter;
    }
  };

  auto set_costs = [&](const Vector& c) {
    for (std::size_t j = 0; j <= ncols; ++j) tab.at(nrows, j) = j < ncols ? c[j] : 0.0;
    for (std::size_t i = 0; i < nrows; ++i) {
      const double cb = c[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= ncols; ++j) tab.at(nrows, j) -= cb * tab.at(i, j);
    }
  };

  // Row multipliers y = c_B B^-1 read from the reduced costs of the initial basis columns.
  auto row_multipliers = [&](const Vector& c) {
    Vector y(nrows);
    for (std::size_t i = 0; i < nrows; ++i) y[i] = c[init_col[i]] - tab.cost(init_col[i]);
    return y;
  };

  Outcome out;
  Vector c1(ncols, 0.0);
  bool need_phase_one = false;
  for (std::size_t j = first_art; j < ncols; ++j) {
    c1[j] = 1.0;
    need_phase_one = true;
  }
  if (need_phase_one) {
    set_costs(c1);
    run(true);
    const double infeas = -tab.value();
    if (infeas > opt.feasibility_tol) {
      const Vector y = row_multipliers(c1);
      out.status = Status::infeasible;
      out.farkas.assign(morig, 0.0);
      for (std::size_t i = 0; i < morig; ++i) out.farkas[i] = -flip[i] * y[i];
      out.iterations = iterations;
      return out;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < nrows; ++i) {
      if (!is_art[basis[i]]) continue;
      std::size_t col = SIZE_MAX;
      double big = opt.pivot_tol;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(tab.at(i, j)) > big) {
          big = std::abs(tab.at(i, j));
          col = j;
        }
      }
      if (col != SIZE_MAX) {
        tab.pivot(i, col);
        basis[i] = col;
      }
    }
  }

  Vector c2(ncols, 0.0);
  for (std::size_t k = 0; k < nstruct; ++k) c2[k] = lp.objective()[colmap[k].var] * colmap[k].sign;
  set_costs(c2);
  const bool bounded = run(false);
  out.iterations = iterations;

  Vector xstd(ncols, 0.0);
  for (std::size_t i = 0; i < nrows; ++i) xstd[basis[i]] = tab.rhs(i);
  out.primal = offset;
  for (std::size_t k = 0; k < nstruct; ++k) out.primal[colmap[k].var] += colmap[k].sign * xstd[k];
  out.objective = 0.0;
  for (std::size_t j = 0; j < nvar; ++j) out.objective += lp.objective()[j] * out.primal[j];

  if (!bounded) {
    out.status = Status::unbounded;
    return out;
  }
  out.status = Status::optimal;
  const Vector y = row_multipliers(c2);
  out.duals.assign(morig, 0.0);
  for (std::size_t i = 0; i < morig; ++i) out.duals[i] = flip[i] * y[i];
  return out;
}

/// Lower bound of sum_j g_j x_j over the variable box (may be -inf).
inline double box_minimum(const LinearProgram& lp, const Vector& g) {
  double s = 0.0;
  for (std::size_t j = 0; j < lp.variables(); ++j) {
    if (g[j] > 0.0) {
      s += g[j] * lp.lower()[j];
    } else if (g[j] < 0.0) {
      s += g[j] * lp.upper()[j];
    }
  }
  return s;
}

/// Re-checks an infeasibility certificate returned by solve().
inline bool verify_farkas(const LinearProgram& lp, const Vector& farkas, double tol = 1e-9) {
  if (farkas.size() != lp.constraint_count()) return false;
  Vector g(lp.variables(), 0.0);
  double rhs = 0.0;
  for (std::size_t i = 0; i < farkas.size(); ++i) {
    const auto& con = lp.constraints()[i];
    const double f = farkas[i];
    if (con.sense == Sense::less_equal && f < -tol) return false;
    if (con.sense == Sense::greater_equal && f > tol) return false;
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += f * con.coeffs[j];
    rhs += f * con.rhs;
  }
  // Coefficients at rounding level are treated as exact zeros so an unbounded box
  // direction does not swamp the certificate.
  double scale = 0.0;
  for (double v : farkas) scale = std::max(scale, std::abs(v));
  for (double& v : g)
    if (std::abs(v) <= tol * std::max(1.0, scale)) v = 0.0;
  return box_minimum(lp, g) > rhs + tol;
}

}  // namespace consensus::lp
