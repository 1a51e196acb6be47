#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "consensus/error.hpp"
#include "consensus/feasibility.hpp"
#include "consensus/matrix.hpp"
#include "consensus/seminorms.hpp"

namespace consensus {

/// Seminorm values below 1 - kContractionTol count as contractive.
inline constexpr double kContractionTol = 1e-7;

struct MatrixClassReport {
  bool stochastic = false;
  bool doubly_stochastic = false;
  bool scrambling = false;
  bool positive_column = false;
  bool positive_diagonal = false;
  bool rooted = false;
};

/// Digraph convention: arc i -> j when s_ij > 0. Rooted means one vertex reaches every vertex.
inline bool rooted(const PatternMatrix& p) {
  const std::size_t n = p.rows();
  for (std::size_t root = 0; root < n; ++root) {
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    seen[root] = true;
    frontier.push(root);
    std::size_t reached = 1;
    while (!frontier.empty()) {
      const std::size_t i = frontier.front();
      frontier.pop();
      for (std::size_t j = 0; j < n; ++j)
        if (p(i, j) && !seen[j]) {
          seen[j] = true;
          ++reached;
          frontier.push(j);
        }
    }
    if (reached == n) return true;
  }
  return false;
}

/// Every pair of rows shares a column where both are positive.
inline bool scrambling(const PatternMatrix& p) {
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = i + 1; j < p.rows(); ++j) {
      bool shared = false;
      for (std::size_t k = 0; k < p.cols() && !shared; ++k) shared = p(i, k) && p(j, k);
      if (!shared) return false;
    }
  return true;
}

inline MatrixClassReport classify(const StochasticMatrix& s) {
  if (!s.matrix().square()) {
    throw validation_error("classification needs a square matrix, got " + s.matrix().shape_string());
  }
  const PatternMatrix p = pattern(s.matrix());
  const std::size_t n = p.rows();
  MatrixClassReport r;
  r.stochastic = true;
  r.doubly_stochastic = s.doubly_stochastic();
  r.scrambling = scrambling(p);
  for (std::size_t j = 0; j < n && !r.positive_column; ++j) {
    bool all = true;
    for (std::size_t i = 0; i < n && all; ++i) all = p(i, j);
    r.positive_column = all;
  }
  r.positive_diagonal = true;
  for (std::size_t i = 0; i < n; ++i) r.positive_diagonal = r.positive_diagonal && p(i, i);
  r.rooted = rooted(p);
  return r;
}

// ---------------------------------------------------------------------------
// Certificates

/// y >= 0 with (11' - 2[[S]]) y <= -margin·1.
struct FeasibleVectorWitness {
  Vector y;
  double margin = 0.0;
};
/// x >= 0, x != 0 with x'(11' - 2[[S]]) >= 0.
struct FarkasWitness {
  Vector x;
};
/// Row pair (u, v) and z = sign(m_u - m_v) attaining the induced inf-seminorm.
struct SignVectorWitness {
  std::size_t row_u = 0;
  std::size_t row_v = 0;
  Vector z;
};

using Witness = std::variant<std::monostate, FeasibleVectorWitness, FarkasWitness, SignVectorWitness>;

struct ContractionCertificate {
  SeminormChoice seminorm = SeminormChoice::induced_inf;
  double value = 0.0;
  bool contractive = false;
  double tolerance = kContractionTol;
  Witness witness;
};

/// Recomputes the witness claim directly against `m`.
inline bool verify(const ContractionCertificate& cert, const Matrix& m) {
  if (cert.contractive != (cert.value < 1.0 - cert.tolerance)) return false;
  return std::visit(
      [&](const auto& w) -> bool {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, std::monostate>) {
          return false;
        } else if constexpr (std::is_same_v<W, FeasibleVectorWitness>) {
          if (!cert.contractive) return false;
          const Matrix a = lp::contraction_system(pattern(m));
          try {
            (void)lp::StrictFeasibilityResult::feasible_with(a, w.y);
          } catch (const solver_error&) {
            return false;
          }
          return true;
        } else if constexpr (std::is_same_v<W, FarkasWitness>) {
          if (cert.contractive) return false;
          const Matrix a = lp::contraction_system(pattern(m));
          try {
            (void)lp::StrictFeasibilityResult::infeasible_with(a, w.x);
          } catch (const solver_error&) {
            return false;
          }
          return true;
        } else {
          if (w.z.size() != m.cols() || w.row_u >= m.rows() || w.row_v >= m.rows()) return false;
          double s = 0.0;
          double scale = 1.0;
          for (std::size_t k = 0; k < m.cols(); ++k) {
            if (w.z[k] != 0.0 && std::abs(w.z[k]) != 1.0) return false;
            s += (m(w.row_u, k) - m(w.row_v, k)) * w.z[k];
            scale += std::abs(m(w.row_u, k)) + std::abs(m(w.row_v, k));
          }
          return std::abs(0.5 * s - cert.value) <= 1e-12 * scale;
        }
      },
      cert.witness);
}

/// Contraction in the metric inf-seminorm, decided by strict feasibility of
/// (11' - 2[[S]]) y < 0 and cross-checked against the LP value of the seminorm.
inline ContractionCertificate certify_metric_inf(const StochasticMatrix& s) {
  if (!s.matrix().square()) throw validation_error("metric-inf certification needs a square matrix");
  const Matrix a = lp::contraction_system(pattern(s.matrix()));
  const auto feas = lp::strict_feasibility(a);
  ContractionCertificate cert;
  cert.seminorm = SeminormChoice::metric_inf;
  cert.value = metric_pinf(s.matrix()).value;
  cert.contractive = feas.feasible();
  if (cert.contractive != (cert.value < 1.0 - cert.tolerance)) {
    throw solver_error("strict feasibility verdict disagrees with metric inf-seminorm value " +
                       std::to_string(cert.value));
  }
  if (feas.feasible()) {
    cert.witness = FeasibleVectorWitness{feas.witness_y(), feas.margin()};
  } else {
    cert.witness = FarkasWitness{feas.farkas_x()};
  }
  return cert;
}

/// Contraction in the induced inf-seminorm (the ergodicity coefficient).
inline ContractionCertificate certify_induced_inf(const EqualRowSumMatrix& m) {
  const ErgodicityResult r = induced_pinf(m);
  ContractionCertificate cert;
  cert.seminorm = SeminormChoice::induced_inf;
  cert.value = r.value.value;
  cert.contractive = cert.value < 1.0 - cert.tolerance;
  cert.witness = SignVectorWitness{r.row_u, r.row_v, r.sign_vector};
  return cert;
}

// ---------------------------------------------------------------------------
// The 6x6 scrambling matrix whose metric inf-seminorm exceeds its ergodicity coefficient.

inline Matrix counterexample_pattern() {
  return {{1, 0, 0, 1, 0, 1}, {1, 1, 1, 0, 0, 0}, {0, 0, 1, 0, 1, 1},
          {0, 1, 0, 1, 0, 1}, {1, 0, 0, 1, 1, 0}, {0, 1, 0, 0, 1, 1}};
}

inline Matrix counterexample_matrix() {
  Matrix s = counterexample_pattern();
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (double& v : s.row(i)) v = v / 3.0;
  return s;
}

inline Vector counterexample_farkas() { return {0, 1, 1, 1, 1, 0}; }

struct CounterexampleOptions {
  /// Added to every zero entry before renormalizing rows; 0 keeps the matrix unchanged.
  double perturb = 0.0;
  /// Step 3 requires tau(S) below this.
  double tau_threshold = 1.0;
};

struct CounterexampleStep {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CounterexampleReport {
  Matrix matrix = counterexample_matrix();
  std::vector<CounterexampleStep> steps;
  std::optional<int> failed_step;
  std::optional<double> tau;
  std::optional<double> metric_inf;
  std::optional<bool> strictly_feasible;
  Vector farkas_x;
  Vector witness_y;

  bool passed() const noexcept { return !failed_step.has_value(); }
};

/// Checks, in order: stochastic, scrambling, tau < threshold, the contraction system is
/// infeasible with the reference Farkas vector valid, and |S|_inf = 1. Stops at the first
/// failing step.
inline CounterexampleReport verify_counterexample(const CounterexampleOptions& opt = {}) {
  CounterexampleReport rep;
  Matrix s = counterexample_matrix();
  if (opt.perturb != 0.0) {
    for (std::size_t i = 0; i < s.rows(); ++i) {
      auto r = s.row(i);
      double sum = 0.0;
      for (double& v : r) {
        if (v == 0.0) v = opt.perturb;
        sum += v;
      }
      for (double& v : r) v /= sum;
    }
  }
  rep.matrix = s;

  auto record = [&](int index, std::string name, bool ok, std::string detail) {
    rep.steps.push_back({index, std::move(name), ok, std::move(detail)});
    if (!ok) rep.failed_step = index;
    return ok;
  };
  auto fmt = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
  };

  std::optional<StochasticMatrix> st;
  try {
    st.emplace(validate_stochastic(s));
  } catch (const validation_error& e) {
    record(1, "stochastic", false, e.what());
    return rep;
  }
  if (!record(1, "stochastic", true, "nonnegative with unit row sums")) return rep;

  const auto cls = classify(*st);
  if (!record(2, "scrambling", cls.scrambling,
              cls.scrambling ? "every row pair shares a positive column" : "some row pair is orthogonal"))
    return rep;

  const double tau = ergodicity_coefficient(s).value;
  rep.tau = tau;
  if (!record(3, "tau_below_threshold", tau < opt.tau_threshold,
              "tau = " + fmt(tau) + ", threshold " + fmt(opt.tau_threshold)))
    return rep;

  const Matrix a = lp::contraction_system(pattern(s));
  const auto feas = lp::strict_feasibility(a);
  rep.strictly_feasible = feas.feasible();
  bool reference_valid = true;
  try {
    (void)lp::StrictFeasibilityResult::infeasible_with(a, counterexample_farkas());
  } catch (const solver_error&) {
    reference_valid = false;
  }
  if (feas.feasible()) {
    rep.witness_y = feas.witness_y();
    record(4, "contraction_system_infeasible", false,
           "system is strictly feasible (margin " + fmt(feas.margin()) + ")" +
               (reference_valid ? "" : "; reference Farkas vector is not a valid witness"));
    return rep;
  }
  rep.farkas_x = feas.farkas_x();
  if (!record(4, "contraction_system_infeasible", reference_valid,
              reference_valid ? "no y >= 0 with (11' - 2[[S]])y < 0; x = [0,1,1,1,1,0] certifies"
                              : "reference Farkas vector is not a valid witness"))
    return rep;

  const double metric = metric_pinf(s).value;
  rep.metric_inf = metric;
  record(5, "metric_inf_equals_one", std::abs(metric - 1.0) <= 1e-7, "|S|_inf = " + fmt(metric));
  return rep;
}

}  // namespace consensus
