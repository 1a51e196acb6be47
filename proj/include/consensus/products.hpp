#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "consensus/certify.hpp"
#include "consensus/error.hpp"
#include "consensus/matrix.hpp"
#include "consensus/random.hpp"
#include "consensus/seminorms.hpp"

namespace consensus {

/// Row-sum tolerance applied to running products, whose row sums drift by rounding.
inline constexpr double kProductRowSumTol = 1e-8;

/// A finite set of square matrices of equal dimension, all with unit row sums.
class MatrixEnsemble {
 public:
  static MatrixEnsemble make(std::vector<Matrix> members, double tol = kValidationTol) {
    if (members.empty()) throw validation_error("ensemble must contain at least one matrix");
    const std::size_t n = members.front().rows();
    bool all_stochastic = true;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Matrix& m = members[k];
      if (!m.square() || m.rows() != n) {
        throw validation_error("ensemble member " + std::to_string(k) + " is " + m.shape_string() +
                               ", expected " + std::to_string(n) + "x" + std::to_string(n));
      }
      const auto sigma = equal_row_sum(m, tol);
      if (!sigma || std::abs(*sigma - 1.0) > tol) {
        throw validation_error("ensemble member " + std::to_string(k) + " does not have all row sums equal to 1");
      }
      for (double v : m.entries()) all_stochastic = all_stochastic && v >= -tol;
    }
    return MatrixEnsemble(std::move(members), all_stochastic);
  }

  const std::vector<Matrix>& matrices() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t dimension() const noexcept { return members_.front().rows(); }
  bool all_stochastic() const noexcept { return all_stochastic_; }

  /// The largest seminorm over the members; rate certification needs this below 1.
  double lambda(SeminormChoice c) const {
    double best = 0.0;
    for (const Matrix& m : members_) best = std::max(best, evaluate(c, m, kProductRowSumTol).value);
    return best;
  }

 private:
  MatrixEnsemble(std::vector<Matrix> m, bool st) : members_(std::move(m)), all_stochastic_(st) {}

  std::vector<Matrix> members_;
  bool all_stochastic_;
};

struct CyclicSchedule {};
struct RandomSchedule {
  std::uint64_t seed = 0;
};
/// Indices are reused cyclically when the run is longer than the list.
struct ExplicitSchedule {
  std::vector<std::size_t> indices;
};
using Schedule = std::variant<CyclicSchedule, RandomSchedule, ExplicitSchedule>;

namespace detail {

class ScheduleCursor {
 public:
  ScheduleCursor(const Schedule& s, std::size_t ensemble_size) : schedule_(s), size_(ensemble_size) {
    if (const auto* r = std::get_if<RandomSchedule>(&schedule_)) gen_.seed(r->seed);
    if (const auto* e = std::get_if<ExplicitSchedule>(&schedule_)) {
      if (e->indices.empty()) throw validation_error("explicit schedule is empty");
      for (std::size_t k : e->indices)
        if (k >= size_) throw validation_error("explicit schedule index " + std::to_string(k) + " out of range");
    }
  }

  std::size_t next() {
    const std::size_t step = count_++;
    if (std::holds_alternative<CyclicSchedule>(schedule_)) return step % size_;
    if (std::holds_alternative<RandomSchedule>(schedule_)) {
      return std::uniform_int_distribution<std::size_t>(0, size_ - 1)(gen_);
    }
    const auto& idx = std::get<ExplicitSchedule>(schedule_).indices;
    return idx[step % idx.size()];
  }

 private:
  Schedule schedule_;
  std::size_t size_;
  std::size_t count_ = 0;
  random::Engine gen_;
};

}  // namespace detail

/// One step i of x_i = M_i x_{i-1}: e_i = x_i - r_i·1 with r_i minimizing ||x_i - r·1||_p.
struct SimulationStep {
  std::size_t step = 0;
  std::size_t matrix_index = 0;
  double product_seminorm = 0.0;   // chosen seminorm of M_i ... M_1
  double rank_one_distance = 0.0;  // metric seminorm of M_i ... M_1 (same p)
  Vector state;
  double shift = 0.0;              // r_i
  double residual = 0.0;           // ||e_i||_p
  double state_seminorm = 0.0;     // |x_i|_p
};

struct SimulationTrace {
  SeminormChoice seminorm = SeminormChoice::induced_inf;
  PNorm p = PNorm::inf;
  std::size_t dimension = 0;
  bool stochastic = false;
  Vector initial;
  double initial_seminorm = 0.0;
  std::vector<SimulationStep> steps;
};

struct SimulationOptions {
  /// Evaluate the chosen seminorm and metric distance of the running product each step.
  bool track_product = true;
  double overflow_limit = 1e150;
};

inline SimulationTrace run_product(const MatrixEnsemble& ens, const Schedule& schedule, std::size_t steps,
                                   std::span<const double> d, SeminormChoice choice,
                                   const SimulationOptions& opt = {}) {
  if (steps == 0) throw validation_error("simulation needs at least one step");
  const std::size_t n = ens.dimension();
  if (d.size() != n) {
    throw validation_error("initial vector has length " + std::to_string(d.size()) + ", ensemble dimension is " +
                           std::to_string(n));
  }
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
    throw validation_error("initial vector must be nonzero");
  }
  const PNorm p = norm_of(choice);
  SimulationTrace trace;
  trace.seminorm = choice;
  trace.p = p;
  trace.dimension = n;
  trace.stochastic = ens.all_stochastic();
  trace.initial.assign(d.begin(), d.end());
  trace.initial_seminorm = vector_seminorm(d, p).value;
  trace.steps.reserve(steps);

  detail::ScheduleCursor cursor(schedule, ens.size());
  Vector x(d.begin(), d.end());
  Matrix product = Matrix::identity(n);
  const SeminormChoice metric_choice = p == PNorm::one   ? SeminormChoice::metric_1
                                       : p == PNorm::two ? SeminormChoice::metric_2
                                                         : SeminormChoice::metric_inf;
  for (std::size_t i = 1; i <= steps; ++i) {
    const std::size_t k = cursor.next();
    const Matrix& m = ens.matrices()[k];
    x = m * std::span<const double>(x);
    for (double v : x) {
      if (!std::isfinite(v) || std::abs(v) > opt.overflow_limit) {
        throw error("state overflow at step " + std::to_string(i));
      }
    }
    SimulationStep s;
    s.step = i;
    s.matrix_index = k;
    s.shift = consensus_shift(x, p);
    Vector e = x;
    for (double& v : e) v -= s.shift;
    s.residual = pnorm(e, p);
    s.state_seminorm = vector_seminorm(x, p).value;
    if (opt.track_product) {
      product = m * product;
      s.product_seminorm = evaluate(choice, product, kProductRowSumTol).value;
      s.rank_one_distance =
          choice == metric_choice ? s.product_seminorm : evaluate(metric_choice, product).value;
    }
    s.state = std::move(x);
    x = s.state;
    trace.steps.push_back(std::move(s));
  }
  return trace;
}

struct RateOptions {
  double relative_tol = 1e-9;
  /// Absolute slack per step, in units of machine epsilon times ||d||_inf times n.
  double rounding_units = 64.0;
};

struct RateReport {
  double lambda = 0.0;
  bool passed = false;
  std::optional<std::size_t> first_violation;
  /// max_i |x_i|_p / (lambda^i |d|_p); at most 1 when the envelope holds.
  double envelope_constant = 0.0;
  /// Smallest C with |r_k - r_i| <= C lambda^i for all recorded i < k above the rounding floor.
  double cauchy_constant = 0.0;
  /// (mu + 1)|d|_p / ||1||_p from the convergence proof; present for stochastic ensembles.
  std::optional<double> cauchy_bound;
  std::size_t steps_checked = 0;
};

/// Checks |x_i|_p <= lambda^i |d|_p at every step and fits the geometric Cauchy envelope of r_i.
inline RateReport certify_rate(const SimulationTrace& trace, double lambda, const RateOptions& opt = {}) {
  if (!(lambda < 1.0) || lambda < 0.0) {
    throw validation_error("rate certification requires 0 <= lambda < 1, got " + std::to_string(lambda));
  }
  RateReport rep;
  rep.lambda = lambda;
  const double n = static_cast<double>(trace.dimension);
  const double d_sup = pnorm(trace.initial, PNorm::inf);
  const double d_semi = trace.initial_seminorm;
  const double eps = std::numeric_limits<double>::epsilon();

  double pow = 1.0;
  for (const auto& s : trace.steps) {
    pow *= lambda;
    const double bound = pow * d_semi;
    const double slack = opt.relative_tol * bound + opt.rounding_units * eps * d_sup * n * static_cast<double>(s.step);
    if (s.state_seminorm > bound + slack && !rep.first_violation) rep.first_violation = s.step;
    if (bound > 0.0) rep.envelope_constant = std::max(rep.envelope_constant, s.state_seminorm / bound);
    ++rep.steps_checked;
  }

  // Only steps where lambda^i |d| stays well above rounding noise constrain C.
  const double floor = 1e3 * eps * std::max(d_sup, 1e-300) * n;
  pow = 1.0;
  for (std::size_t a = 0; a < trace.steps.size(); ++a) {
    pow *= lambda;
    if (pow * std::max(d_semi, d_sup) <= floor) break;
    for (std::size_t b = a + 1; b < trace.steps.size(); ++b) {
      rep.cauchy_constant =
          std::max(rep.cauchy_constant, std::abs(trace.steps[b].shift - trace.steps[a].shift) / pow);
    }
  }

  bool cauchy_ok = std::isfinite(rep.cauchy_constant);
  if (trace.stochastic) {
    // ||Q||_p <= mu ||Q||_inf = mu for stochastic products Q.
    const double mu = trace.p == PNorm::inf ? 1.0 : (trace.p == PNorm::one ? n : std::sqrt(n));
    const double ones = trace.p == PNorm::inf ? 1.0 : (trace.p == PNorm::one ? n : std::sqrt(n));
    rep.cauchy_bound = (mu + 1.0) * d_semi / ones;
    cauchy_ok = cauchy_ok && rep.cauchy_constant <= *rep.cauchy_bound * (1.0 + 1e-9) + floor;
  }
  rep.passed = !rep.first_violation && cauchy_ok;
  return rep;
}

struct LimitOptions {
  double tol = 1e-12;
  std::size_t step_cap = 10000;
  /// Seminorm whose ensemble maximum must be below 1 before iterating.
  SeminormChoice contraction = SeminormChoice::induced_inf;
};

struct LimitResult {
  Matrix product;
  Vector c;  // the common row of the limit 1c
  std::size_t steps = 0;
  double achieved = 0.0;  // metric 1-seminorm of the final product
};

/// Multiplies M_i ... M_1 until the product is within `tol` of a rank-one matrix 1c.
inline LimitResult product_limit(const MatrixEnsemble& ens, const Schedule& schedule, const LimitOptions& opt = {}) {
  const double lambda = ens.lambda(opt.contraction);
  if (!(lambda < 1.0 - kContractionTol)) {
    throw validation_error("ensemble is not contractive in " + std::string(to_string(opt.contraction)) +
                           " (lambda = " + std::to_string(lambda) + ")");
  }
  detail::ScheduleCursor cursor(schedule, ens.size());
  Matrix product = Matrix::identity(ens.dimension());
  double achieved = metric_p1(product).value;
  std::size_t step = 0;
  while (step < opt.step_cap) {
    product = ens.matrices()[cursor.next()] * product;
    ++step;
    achieved = metric_p1(product).value;
    if (achieved < opt.tol) {
      const auto row0 = product.row(0);
      return {product, Vector(row0.begin(), row0.end()), step, achieved};
    }
  }
  throw error("product did not reach rank one within " + std::to_string(opt.step_cap) +
              " steps (metric 1-seminorm " + std::to_string(achieved) + ")");
}

// ---------------------------------------------------------------------------
// Empirical equivalence constants between two consensus seminorms.

struct EquivalenceEstimate {
  double c_m_hat = 0.0;  // min value_b / value_a
  double c_M_hat = 0.0;  // max value_b / value_a
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

inline constexpr double kNearConsensus = 1e-8;

inline EquivalenceEstimate estimate_equivalence(SeminormChoice a, SeminormChoice b, std::span<const Matrix> samples) {
  EquivalenceEstimate est;
  est.c_m_hat = std::numeric_limits<double>::infinity();
  est.c_M_hat = 0.0;
  for (const Matrix& m : samples) {
    const double va = evaluate(a, m, kProductRowSumTol).value;
    if (va <= kNearConsensus) {
      ++est.rejected;
      continue;
    }
    // Identical seminorms give exactly 1.
    const double ratio = a == b ? 1.0 : evaluate(b, m, kProductRowSumTol).value / va;
    est.c_m_hat = std::min(est.c_m_hat, ratio);
    est.c_M_hat = std::max(est.c_M_hat, ratio);
    ++est.accepted;
  }
  if (est.accepted == 0) throw validation_error("every sample was a near-consensus matrix");
  return est;
}

/// Samples random n x n equal-row-sum matrices (row sum 1) from `seed`.
inline EquivalenceEstimate estimate_equivalence(SeminormChoice a, SeminormChoice b, std::size_t n,
                                                std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw validation_error("equivalence estimation needs at least two samples");
  random::Engine gen(seed);
  std::vector<Matrix> ms;
  ms.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) ms.push_back(random::equal_row_sum(n, n, gen));
  return estimate_equivalence(a, b, ms);
}

}  // namespace consensus
