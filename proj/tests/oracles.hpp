#pragma once

// Independent reference computations used only by tests. Nothing here calls into the
// seminorm implementations; matrix storage is the only shared piece.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "consensus/matrix.hpp"

namespace oracle {

using consensus::Matrix;
using consensus::Vector;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::VectorXd singular_values(const Matrix& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(to_eigen(m)).singularValues();
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd g = m.rows() < m.cols() ? Eigen::MatrixXd(m * m.transpose()) : Eigen::MatrixXd(m.transpose() * m);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

/// Golden-section minimization of a convex function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min({f(a), f(b), fc, fd});
}

/// min_c sum_i |x_i - c| by golden section over [min x, max x].
inline double vector_l1_seminorm(const Vector& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  auto f = [&](double c) {
    double s = 0.0;
    for (double v : x) s += std::abs(v - c);
    return s;
  };
  return golden_min(f, *lo, *hi);
}

inline double median(Vector v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// The 1-norm is the largest column sum, so the fit decouples by column and each column
/// is minimized at its median.
inline double metric_p1(const Matrix& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const Vector col = m.column(j);
    const double med = median(col);
    double s = 0.0;
    for (double v : col) s += std::abs(v - med);
    best = std::max(best, s);
  }
  return best;
}

/// Nelder-Mead on f: R^k -> R with restarts.
inline double nelder_mead(const std::function<double(const Vector&)>& f, Vector start, double step,
                          int restarts = 4, int max_evals = 40000) {
  const std::size_t k = start.size();
  double best_val = f(start);
  Vector best = start;
  for (int r = 0; r < restarts; ++r) {
    std::vector<Vector> simplex(k + 1, best);
    std::vector<double> val(k + 1);
    for (std::size_t i = 0; i < k; ++i) simplex[i + 1][i] += step;
    for (std::size_t i = 0; i <= k; ++i) val[i] = f(simplex[i]);
    int evals = static_cast<int>(k + 1);
    while (evals < max_evals) {
      std::vector<std::size_t> idx(k + 1);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
      std::vector<Vector> s2;
      std::vector<double> v2;
      for (auto i : idx) {
        s2.push_back(simplex[i]);
        v2.push_back(val[i]);
      }
      simplex = s2;
      val = v2;
      double size = 0.0;
      for (std::size_t i = 1; i <= k; ++i)
        for (std::size_t j = 0; j < k; ++j) size = std::max(size, std::abs(simplex[i][j] - simplex[0][j]));
      if (size < 1e-11 && val[k] - val[0] < 1e-13) break;
      Vector centroid(k, 0.0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) centroid[j] += simplex[i][j] / static_cast<double>(k);
      auto along = [&](double t) {
        Vector p(k);
        for (std::size_t j = 0; j < k; ++j) p[j] = centroid[j] + t * (simplex[k][j] - centroid[j]);
        return p;
      };
      const Vector xr = along(-1.0);
      const double fr = f(xr);
      ++evals;
      if (fr < val[0]) {
        const Vector xe = along(-2.0);
        const double fe = f(xe);
        ++evals;
        if (fe < fr) {
          simplex[k] = xe;
          val[k] = fe;
        } else {
          simplex[k] = xr;
          val[k] = fr;
        }
      } else if (fr < val[k - 1]) {
        simplex[k] = xr;
        val[k] = fr;
      } else {
        const bool outside = fr < val[k];
        const Vector xc = along(outside ? -0.5 : 0.5);
        const double fc = f(xc);
        ++evals;
        if (fc < (outside ? fr : val[k])) {
          simplex[k] = xc;
          val[k] = fc;
        } else {
          for (std::size_t i = 1; i <= k; ++i) {
            for (std::size_t j = 0; j < k; ++j) simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
            val[i] = f(simplex[i]);
            ++evals;
          }
        }
      }
    }
    const auto it = std::min_element(val.begin(), val.end());
    if (*it < best_val) {
      best_val = *it;
      best = simplex[static_cast<std::size_t>(it - val.begin())];
    }
    step *= 0.1;
  }
  return best_val;
}

/// min_c ||M - 1c||_2 by derivative-free descent from the column medians, with the
/// spectral norm taken from Eigen's SVD.
inline double metric_p2(const Matrix& m) {
  const Eigen::MatrixXd e = to_eigen(m);
  auto f = [&](const Vector& c) {
    Eigen::MatrixXd d = e;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = 0; j < d.cols(); ++j) d(i, j) -= c[static_cast<std::size_t>(j)];
    return spectral_norm(d);
  };
  Vector start(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) start[j] = median(m.column(j));
  return nelder_mead(f, start, 0.5);
}

/// min_c max_i sum_j |m_ij - c_j| by coarse-to-fine grid search over the column ranges.
/// Intended for 2 or 3 columns.
inline double metric_pinf_grid(const Matrix& m, int points = 33, int levels = 9) {
  const std::size_t k = m.cols();
  Vector lo(k), hi(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Vector col = m.column(j);
    lo[j] = *std::min_element(col.begin(), col.end());
    hi[j] = *std::max_element(col.begin(), col.end());
  }
  auto f = [&](const Vector& c) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += std::abs(m(i, j) - c[j]);
      worst = std::max(worst, s);
    }
    return worst;
  };
  Vector center(k), half(k);
  for (std::size_t j = 0; j < k; ++j) {
    center[j] = 0.5 * (lo[j] + hi[j]);
    half[j] = 0.5 * (hi[j] - lo[j]);
  }
  double best = f(center);
  Vector best_c = center;
  for (int level = 0; level < levels; ++level) {
    std::size_t total = 1;
    for (std::size_t j = 0; j < k; ++j) total *= static_cast<std::size_t>(points);
    for (std::size_t code = 0; code < total; ++code) {
      Vector c(k);
      std::size_t rest = code;
      for (std::size_t j = 0; j < k; ++j) {
        const auto t = static_cast<double>(rest % static_cast<std::size_t>(points));
        rest /= static_cast<std::size_t>(points);
        c[j] = center[j] - half[j] + 2.0 * half[j] * t / (points - 1);
      }
      const double v = f(c);
      if (v < best) {
        best = v;
        best_c = c;
      }
    }
    center = best_c;
    for (double& h : half) h *= 4.0 / (points - 1);
  }
  return best;
}

/// Direct evaluation of half the largest row-pair l1 distance.
inline double ergodicity(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m.cols(); ++k) s += std::abs(m(i, k) - m(j, k));
      best = std::max(best, 0.5 * s);
    }
  return best;
}

/// Second largest singular value.
inline double sigma2(const Matrix& m) { return oracle::singular_values(m)(1); }

}  // namespace oracle
