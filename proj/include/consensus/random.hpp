#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "consensus/matrix.hpp"

namespace consensus::random {

using Engine = std::mt19937_64;

/// Nonnegative rows normalized to sum 1. Each entry is zero with probability `zero_prob`
/// (at least one entry per row stays positive); positive entries are exponential.
inline Matrix stochastic(std::size_t rows, std::size_t cols, Engine& gen, double zero_prob = 0.0) {
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution drop(zero_prob);
  std::uniform_int_distribution<std::size_t> pick(0, cols - 1);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = drop(gen) ? 0.0 : expo(gen) + 1e-3;
      m(i, j) = v;
      sum += v;
    }
    if (sum == 0.0) {
      m(i, pick(gen)) = 1.0;
      sum = 1.0;
    }
    for (double& v : m.row(i)) v /= sum;
  }
  return m;
}

/// Gaussian matrix shifted row-wise so that every row sums to `sigma`.
inline Matrix equal_row_sum(std::size_t rows, std::size_t cols, Engine& gen, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (double& v : m.row(i)) {
      v = normal(gen);
      sum += v;
    }
    const double fix = (sigma - sum) / static_cast<double>(cols);
    for (double& v : m.row(i)) v += fix;
  }
  return m;
}

/// Convex combination of `terms` random permutation matrices.
inline Matrix doubly_stochastic(std::size_t n, Engine& gen, std::size_t terms = 4) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(terms);
  for (double& v : w) v = expo(gen) + 1e-3;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  Matrix m(n, n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t t = 0; t < terms; ++t) {
    std::shuffle(perm.begin(), perm.end(), gen);
    for (std::size_t i = 0; i < n; ++i) m(i, perm[i]) += w[t] / total;
  }
  return m;
}

/// Random row vector with Gaussian entries.
inline Vector gaussian(std::size_t n, Engine& gen, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (double& x : v) x = normal(gen);
  return v;
}

}  // namespace consensus::random
