#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "consensus/error.hpp"
#include "consensus/matrix.hpp"

namespace consensus {

struct EigenOptions {
  double relative_tol = 1e-10;
  std::size_t max_rotations = 100000;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted descending.
/// Only the lower triangle's symmetric counterpart is assumed; asymmetry is not checked.
inline Vector symmetric_eigenvalues(Matrix a, const EigenOptions& opt = {}) {
  if (!a.square()) throw validation_error("eigenvalues need a square matrix, got " + a.shape_string());
  const std::size_t n = a.rows();
  double frob = 0.0;
  for (double v : a.entries()) frob += v * v;
  frob = std::sqrt(frob);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  // Jacobi converges quadratically; stopping well below the requested tolerance costs
  // at most one extra sweep and makes eigenvalues accurate to rounding level.
  const double stop = std::min(opt.relative_tol, 1e-14) * frob;
  std::size_t rotations = 0;
  while (frob > 0.0 && off_norm() > stop) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq)) ) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (++rotations > opt.max_rotations) {
          throw solver_error("symmetric eigensolver did not converge within " + std::to_string(opt.max_rotations) +
                             " rotations");
        }
        rotated = true;
        const double theta = (aqq - app) / (2.0 * apq);
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
        a(p, q) = a(q, p) = 0.0;
      }
    }
    if (!rotated) break;
  }

  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// Gram matrix of the thinner side: a'a when cols <= rows, otherwise aa'.
inline Matrix smaller_gram(const Matrix& a) {
  const bool use_cols = a.cols() <= a.rows();
  const std::size_t k = use_cols ? a.cols() : a.rows();
  Matrix g(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      double s = 0.0;
      if (use_cols) {
        for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
      } else {
        for (std::size_t c = 0; c < a.cols(); ++c) s += a(i, c) * a(j, c);
      }
      g(i, j) = g(j, i) = s;
    }
  return g;
}

/// Largest singular value, sqrt of the top eigenvalue of the Gram matrix.
inline double spectral_norm(const Matrix& a, const EigenOptions& opt = {}) {
  const Vector ev = symmetric_eigenvalues(smaller_gram(a), opt);
  return std::sqrt(std::max(ev.front(), 0.0));
}

/// All min(rows, cols) singular values, descending.
inline Vector singular_values(const Matrix& a, const EigenOptions& opt = {}) {
  Vector ev = symmetric_eigenvalues(smaller_gram(a), opt);
  for (double& v : ev) v = std::sqrt(std::max(v, 0.0));
  return ev;
}

}  // namespace consensus
