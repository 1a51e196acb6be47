#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "consensus/error.hpp"
#include "consensus/linalg.hpp"
#include "consensus/lp.hpp"
#include "consensus/matrix.hpp"

namespace consensus {

enum class PNorm { one, two, inf };
enum class SeminormKind { metric, induced, ergodicity, vector };
enum class Method { explicit_formula, lp, eigensolve, sampling_lower_bound };

inline constexpr double kFormulaTol = 1e-9;
inline constexpr double kLpTol = 1e-9;
inline constexpr double kEigenTol = 1e-10;

inline std::string_view to_string(PNorm p) {
  switch (p) {
    case PNorm::one: return "1";
    case PNorm::two: return "2";
    case PNorm::inf: return "inf";
  }
  return "?";
}
inline std::string_view to_string(SeminormKind k) {
  switch (k) {
    case SeminormKind::metric: return "metric";
    case SeminormKind::induced: return "induced";
    case SeminormKind::ergodicity: return "ergodicity";
    case SeminormKind::vector: return "vector";
  }
  return "?";
}
inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::explicit_formula: return "explicit_formula";
    case Method::lp: return "lp";
    case Method::eigensolve: return "eigensolve";
    case Method::sampling_lower_bound: return "sampling_lower_bound";
  }
  return "?";
}

inline std::optional<PNorm> parse_pnorm(std::string_view s) {
  if (s == "1") return PNorm::one;
  if (s == "2") return PNorm::two;
  if (s == "inf" || s == "infinity") return PNorm::inf;
  return std::nullopt;
}

/// A computed seminorm. With method == sampling_lower_bound the value is a certified
/// lower bound rather than an evaluation.
struct SeminormValue {
  double value = 0.0;
  SeminormKind kind = SeminormKind::metric;
  PNorm p = PNorm::inf;
  Method method = Method::explicit_formula;
  double tolerance = kFormulaTol;
};

// ---------------------------------------------------------------------------
// Vectors

/// A minimizer r of ||x - r1||_p: midpoint for inf, lower median for 1, mean for 2.
inline double consensus_shift(std::span<const double> x, PNorm p) {
  if (x.empty()) throw validation_error("vector seminorm of an empty vector");
  switch (p) {
    case PNorm::inf: {
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      return 0.5 * (*lo + *hi);
    }
    case PNorm::one: {
      Vector v(x.begin(), x.end());
      const std::size_t k = (v.size() - 1) / 2;
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
      return v[k];
    }
    case PNorm::two:
      return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  }
  return 0.0;
}

inline double pnorm(std::span<const double> x, PNorm p) {
  double s = 0.0;
  switch (p) {
    case PNorm::inf:
      for (double v : x) s = std::max(s, std::abs(v));
      return s;
    case PNorm::one:
      for (double v : x) s += std::abs(v);
      return s;
    case PNorm::two:
      for (double v : x) s += v * v;
      return std::sqrt(s);
  }
  return s;
}

/// min_c ||x - c1||_p.
inline SeminormValue vector_seminorm(std::span<const double> x, PNorm p) {
  SeminormValue out{0.0, SeminormKind::vector, p, Method::explicit_formula, kFormulaTol};
  if (p == PNorm::inf) {
    if (x.empty()) throw validation_error("vector seminorm of an empty vector");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    out.value = 0.5 * (*hi - *lo);
    return out;
  }
  const double r = consensus_shift(x, p);
  Vector e(x.begin(), x.end());
  for (double& v : e) v -= r;
  out.value = pnorm(e, p);
  return out;
}

// ---------------------------------------------------------------------------
// Metric seminorms  |M|_p = min_c ||M - 1c||_p

/// The q = floor(rows/2) largest and smallest entries of one column. Ordering is by value,
/// ties broken toward the lower row index; the two sets are disjoint.
struct ColumnSplit {
  std::size_t column = 0;
  std::size_t q = 0;
  std::vector<std::size_t> top;
  std::vector<std::size_t> bottom;
  double spread = 0.0;  // sum(top) - sum(bottom)
};

inline ColumnSplit column_split(const Matrix& m, std::size_t j) {
  if (j >= m.cols()) throw validation_error("column index out of range");
  std::vector<std::size_t> order(m.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m(a, j) < m(b, j); });
  ColumnSplit s;
  s.column = j;
  s.q = m.rows() / 2;
  s.bottom.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s.q));
  s.top.assign(order.end() - static_cast<std::ptrdiff_t>(s.q), order.end());
  std::reverse(s.top.begin(), s.top.end());
  for (std::size_t i : s.top) s.spread += m(i, j);
  for (std::size_t i : s.bottom) s.spread -= m(i, j);
  return s;
}

/// Metric 1-seminorm: max over columns of (sum of q largest - sum of q smallest).
inline SeminormValue metric_p1(const Matrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, column_split(m, j).spread);
  return {best, SeminormKind::metric, PNorm::one, Method::explicit_formula, kFormulaTol};
}

/// Metric 2-seminorm ||PM||_2 with P the orthogonal centering projection, computed as
/// sqrt(lambda_max(M'PM)).
inline SeminormValue metric_p2(const Matrix& m, const EigenOptions& opt = {kEigenTol, 100000}) {
  const Matrix pm = centering(m.rows()).apply(m);
  return {spectral_norm(pm, opt), SeminormKind::metric, PNorm::two, Method::eigensolve, opt.relative_tol};
}

struct ChebyshevFit {
  SeminormValue value;
  Vector shift;  // the minimizing row vector c
  std::size_t simplex_iterations = 0;
};

/// Metric inf-seminorm by linear programming:
///   min t  s.t.  d_ij >= +(m_ij - c_j),  d_ij >= -(m_ij - c_j),  sum_j d_ij <= t.
/// Each c_j is boxed to its column range, which contains a minimizer.
inline ChebyshevFit metric_pinf_fit(const Matrix& m, const lp::SolverOptions& opt = {}) {
  const std::size_t n = m.rows();
  const std::size_t k = m.cols();
  const std::size_t nd = n * k;
  const std::size_t t_var = k + nd;
  lp::LinearProgram prog(k + nd + 1);
  for (std::size_t j = 0; j < k; ++j) {
    double lo = m(0, j);
    double hi = m(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
    prog.set_bounds(j, lo, hi);
  }
  prog.set_objective(t_var, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t d = k + i * k + j;
      Vector up(k + nd + 1, 0.0);
      up[d] = 1.0;
      up[j] = 1.0;
      prog.add_constraint(std::move(up), lp::Sense::greater_equal, m(i, j));
      Vector down(k + nd + 1, 0.0);
      down[d] = 1.0;
      down[j] = -1.0;
      prog.add_constraint(std::move(down), lp::Sense::greater_equal, -m(i, j));
    }
    Vector sum(k + nd + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j) sum[k + i * k + j] = -1.0;
    sum[t_var] = 1.0;
    prog.add_constraint(std::move(sum), lp::Sense::greater_equal, 0.0);
  }
  const lp::Outcome out = lp::solve(prog, opt);
  if (out.status != lp::Status::optimal) {
    throw solver_error(std::string("metric inf-seminorm LP ended ") + lp::to_string(out.status) + " after " +
                       std::to_string(out.iterations) + " iterations");
  }
  ChebyshevFit fit;
  fit.shift.assign(out.primal.begin(), out.primal.begin() + static_cast<std::ptrdiff_t>(k));
  // Report the attained objective at the returned shift; it is feasible by construction.
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::abs(m(i, j) - fit.shift[j]);
    worst = std::max(worst, s);
  }
  fit.value = {worst, SeminormKind::metric, PNorm::inf, Method::lp, kLpTol};
  fit.simplex_iterations = out.iterations;
  return fit;
}

inline SeminormValue metric_pinf(const Matrix& m) { return metric_pinf_fit(m).value; }

inline SeminormValue metric_seminorm(const Matrix& m, PNorm p) {
  switch (p) {
    case PNorm::one: return metric_p1(m);
    case PNorm::two: return metric_p2(m);
    case PNorm::inf: return metric_pinf(m);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Coefficient of ergodicity and induced seminorms

/// Half the largest l1 distance between two rows, with the achieving row pair.
struct ErgodicityResult {
  SeminormValue value;
  std::size_t row_u = 0;
  std::size_t row_v = 0;
  /// z_k = sign(m_uk - m_vk); attains the maximum in the induced inf-seminorm definition.
  Vector sign_vector;
};

inline ErgodicityResult ergodicity_detail(const Matrix& m) {
  ErgodicityResult r;
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m.cols(); ++k) s += std::abs(m(i, k) - m(j, k));
      if (s > best) {
        best = s;
        r.row_u = i;
        r.row_v = j;
      }
    }
  r.value = {0.5 * best, SeminormKind::ergodicity, PNorm::inf, Method::explicit_formula, kFormulaTol};
  r.sign_vector.assign(m.cols(), 0.0);
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const double d = m(r.row_u, k) - m(r.row_v, k);
    r.sign_vector[k] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  return r;
}

inline SeminormValue ergodicity_coefficient(const Matrix& m) { return ergodicity_detail(m).value; }

/// Induced inf-seminorm of an equal-row-sum matrix; coincides with the ergodicity coefficient.
inline ErgodicityResult induced_pinf(const EqualRowSumMatrix& m) {
  ErgodicityResult r = ergodicity_detail(m.matrix());
  r.value.kind = SeminormKind::induced;
  return r;
}

/// Induced 2-seminorm ||P M P||_2. M1 = sigma·1 is annihilated by the left P, so this equals
/// max |Mx|_2 over |x|_2 = 1.
inline SeminormValue induced_p2(const EqualRowSumMatrix& m, const EigenOptions& opt = {kEigenTol, 100000}) {
  Matrix b = centering(m.rows()).apply(m.matrix());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    auto r = b.row(i);
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    for (double& v : r) v -= mean;
  }
  return {spectral_norm(b, opt), SeminormKind::induced, PNorm::two, Method::eigensolve, opt.relative_tol};
}

/// Monte-Carlo lower bound on max |Mx|_p over |x|_p = 1.
///
/// Trial t draws standard normal x from its own generator seeded with (seed, t), so the
/// result over a trial prefix is reproducible and nondecreasing in `trials`. For up to 12
/// columns the row-pair sign vectors (and their negations) are evaluated first.
inline SeminormValue induced_sampling_lower_bound(const EqualRowSumMatrix& m, PNorm p, std::size_t trials,
                                                  std::uint64_t seed) {
  if (trials == 0) throw validation_error("sampling needs at least one trial");
  const Matrix& a = m.matrix();
  const std::size_t k = a.cols();
  double best = 0.0;
  auto consider = [&](Vector x) {
    const double s = vector_seminorm(x, p).value;
    if (s <= 1e-12) return;
    for (double& v : x) v /= s;
    best = std::max(best, vector_seminorm(a * std::span<const double>(x), p).value);
  };
  if (k <= 12) {
    for (std::size_t u = 0; u < a.rows(); ++u)
      for (std::size_t v = u + 1; v < a.rows(); ++v) {
        Vector z(k);
        for (std::size_t c = 0; c < k; ++c) {
          const double d = a(u, c) - a(v, c);
          z[c] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        }
        Vector neg = z;
        for (double& x : neg) x = -x;
        consider(std::move(z));
        consider(std::move(neg));
      }
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 gen(seq);
    Vector x(k);
    for (double& v : x) v = normal(gen);
    consider(std::move(x));
  }
  return {best, SeminormKind::induced, p, Method::sampling_lower_bound, 0.0};
}

/// ||P M||_2 for an arbitrary centering projection P (kernel span{1}); a consensus seminorm
/// for every such P.
inline double projected_seminorm(const Matrix& m, const CenteringProjection& proj) {
  return spectral_norm(proj.apply(m));
}

// ---------------------------------------------------------------------------
// Named choices used by certification, simulation and the CLI.

enum class SeminormChoice { metric_1, metric_2, metric_inf, induced_2, induced_inf };

inline std::string_view to_string(SeminormChoice c) {
  switch (c) {
    case SeminormChoice::metric_1: return "metric-1";
    case SeminormChoice::metric_2: return "metric-2";
    case SeminormChoice::metric_inf: return "metric-inf";
    case SeminormChoice::induced_2: return "induced-2";
    case SeminormChoice::induced_inf: return "induced-inf";
  }
  return "?";
}

inline std::optional<SeminormChoice> parse_choice(std::string_view s) {
  for (auto c : {SeminormChoice::metric_1, SeminormChoice::metric_2, SeminormChoice::metric_inf,
                 SeminormChoice::induced_2, SeminormChoice::induced_inf})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

inline PNorm norm_of(SeminormChoice c) {
  switch (c) {
    case SeminormChoice::metric_1: return PNorm::one;
    case SeminormChoice::metric_2:
    case SeminormChoice::induced_2: return PNorm::two;
    case SeminormChoice::metric_inf:
    case SeminormChoice::induced_inf: return PNorm::inf;
  }
  return PNorm::inf;
}

inline bool is_induced(SeminormChoice c) {
  return c == SeminormChoice::induced_2 || c == SeminormChoice::induced_inf;
}

/// Evaluates a named seminorm. Induced choices require equal row sums within `row_sum_tol`.
inline SeminormValue evaluate(SeminormChoice c, const Matrix& m, double row_sum_tol = kValidationTol) {
  switch (c) {
    case SeminormChoice::metric_1: return metric_p1(m);
    case SeminormChoice::metric_2: return metric_p2(m);
    case SeminormChoice::metric_inf: return metric_pinf(m);
    case SeminormChoice::induced_2: return induced_p2(EqualRowSumMatrix::make(m, row_sum_tol));
    case SeminormChoice::induced_inf: return induced_pinf(EqualRowSumMatrix::make(m, row_sum_tol)).value;
  }
  return {};
}

}  // namespace consensus
