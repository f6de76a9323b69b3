// Copyright 2026 The mtd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent oracles and instance builders shared by the unit and
// acceptance tests. Nothing here calls the library's rank, Jordan or
// filtering code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mtd/core.hpp"
#include "mtd/system_model.hpp"

namespace mtd::testing {

using IMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

/// Exact rank of an integer matrix by fraction-free (Bareiss) elimination.
inline Index exact_rank(const IMatrix& input) {
  using Wide = __int128;
  std::vector<std::vector<Wide>> a(static_cast<std::size_t>(input.rows()),
                                   std::vector<Wide>(static_cast<std::size_t>(input.cols())));
  for (Index i = 0; i < input.rows(); ++i) {
    for (Index j = 0; j < input.cols(); ++j) {
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = input(i, j);
    }
  }
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  std::size_t rank = 0;
  Wide prev = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c) {
        a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
      }
      a[r][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return static_cast<Index>(rank);
}

/// Exact observability of (A, C restricted to `rows`) for integer matrices.
inline bool exact_observable(const IMatrix& a, const IMatrix& c, const std::vector<Index>& rows) {
  const Index n = a.rows();
  if (rows.empty()) return n == 0;
  IMatrix obs(static_cast<Index>(rows.size()) * n, n);
  IMatrix block(static_cast<Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) block.row(static_cast<Index>(i)) = c.row(rows[i]);
  for (Index k = 0; k < n; ++k) {
    obs.middleRows(k * block.rows(), block.rows()) = block;
    block = block * a;
  }
  return exact_rank(obs) == n;
}

/// Unimodular integer matrix with small entries and its exact inverse.
inline std::pair<IMatrix, IMatrix> unimodular(std::mt19937_64& rng, Index n, int mixes = 4) {
  IMatrix s = IMatrix::Identity(n, n);
  IMatrix inv = IMatrix::Identity(n, n);
  if (n < 2) return {s, inv};
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_int_distribution<int> coef(-1, 1);
  for (int t = 0; t < mixes; ++t) {
    const Index i = pick(rng);
    Index j = pick(rng);
    if (i == j) j = (i + 1) % n;
    const int k = coef(rng) == 0 ? 1 : coef(rng);
    // S <- S (I + k e_i e_j'), inverse <- (I - k e_i e_j') inverse.
    s.col(j) += k * s.col(i);
    inv.row(i) -= k * inv.row(j);
  }
  return {s, inv};
}

/// Integer block-diagonal Jordan form built from real Jordan blocks with
/// eigenvalues drawn from `reals` and rotation pairs a +- bi from `pairs`.
struct JordanSpec {
  std::vector<long long> reals = {-2, -1, 1, 2, 3};
  std::vector<std::pair<long long, long long>> pairs = {{0, 1}, {1, 1}, {2, 1}};
  Index max_block = 3;
};

inline IMatrix random_jordan_form(std::mt19937_64& rng, Index n, const JordanSpec& spec) {
  IMatrix j = IMatrix::Zero(n, n);
  Index at = 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (at < n) {
    const Index left = n - at;
    if (left >= 2 && u(rng) < 0.25) {
      const auto& p = spec.pairs[static_cast<std::size_t>(u(rng) * spec.pairs.size())];
      j(at, at) = p.first;
      j(at + 1, at + 1) = p.first;
      j(at, at + 1) = -p.second;
      j(at + 1, at) = p.second;
      at += 2;
      continue;
    }
    const long long lambda = spec.reals[static_cast<std::size_t>(u(rng) * spec.reals.size())];
    const Index size = 1 + static_cast<Index>(u(rng) * static_cast<double>(
                                                           std::min(spec.max_block, left)));
    for (Index i = 0; i < size; ++i) {
      j(at + i, at + i) = lambda;
      if (i + 1 < size) j(at + i, at + i + 1) = 1;
    }
    at += size;
  }
  return j;
}

inline IMatrix random_integer(std::mt19937_64& rng, Index rows, Index cols, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) m(i, c) = d(rng);
  }
  return m;
}

inline Matrix to_real(const IMatrix& m) { return m.cast<double>(); }

/// Steady-state prior covariance of a fixed pair by iterating the Riccati map.
inline Matrix riccati_steady_state(const Matrix& a, const Matrix& c, const Matrix& q,
                                   const Matrix& r, int max_iter = 100000) {
  Matrix p = Matrix::Identity(a.rows(), a.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Matrix s = c * p * c.transpose() + r;
    const Matrix gain = p * c.transpose() * s.inverse();
    Matrix next = a * (p - gain * c * p) * a.transpose() + q;
    next = 0.5 * (next + next.transpose());
    const double change = (next - p).norm();
    p = next;
    if (change <= 1e-13 * std::max(1.0, p.norm())) break;
  }
  return p;
}

/// Real matrix with the given real eigenvalues, A = S diag(eig) S^-1 with a
/// random well-conditioned S.
inline Matrix with_eigenvalues(std::mt19937_64& rng, const std::vector<double>& eig) {
  const auto n = static_cast<Index>(eig.size());
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix s(n, n);
  do {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) s(i, j) = g(rng);
    }
    s += 2.0 * Matrix::Identity(n, n);
  } while (Eigen::JacobiSVD<Matrix>(s).singularValues()(n - 1) < 0.3);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = eig[static_cast<std::size_t>(i)];
  return s * d.asDiagonal() * s.inverse();
}

inline Vector gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

/// Sample mean and unbiased variance.
inline std::pair<double, double> mean_var(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, var / static_cast<double>(xs.size() - 1)};
}

}  // namespace mtd::testing
