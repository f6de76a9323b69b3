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

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtd/core.hpp"

namespace mtd::linalg {

/// Singular values plus the tolerance used to count them.
struct RankInfo {
  Index rank = 0;
  Index cols = 0;
  double tolerance = 0.0;
  double sigma_max = 0.0;

  Index nullity() const { return cols - rank; }
};

/// max(rows, cols) * eps * sigma_max, the usual SVD rank convention.
inline double default_rank_tolerance(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

/// Rank via SVD. A negative `tol` selects the default convention; `floor`
/// is an absolute lower bound on the tolerance (useful when the matrix is
/// expected to be numerically zero and sigma_max alone is meaningless).
template <typename Derived>
RankInfo rank_info(const Eigen::MatrixBase<Derived>& m, double tol = -1.0,
                   double floor = 0.0) {
  RankInfo info;
  info.cols = m.cols();
  if (m.rows() == 0 || m.cols() == 0) {
    info.tolerance = std::max(tol, floor);
    return info;
  }
  using PlainMatrix = typename Derived::PlainObject;
  Eigen::JacobiSVD<PlainMatrix> svd(m.derived());
  const auto& sv = svd.singularValues();
  info.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  info.tolerance =
      tol >= 0.0 ? tol : default_rank_tolerance(m.rows(), m.cols(), info.sigma_max);
  info.tolerance = std::max(info.tolerance, floor);
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > info.tolerance) ++info.rank;
  }
  return info;
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m, double tol = -1.0) {
  return rank_info(m, tol).rank;
}

template <typename Derived>
Index nullity(const Eigen::MatrixBase<Derived>& m, double tol = -1.0) {
  return rank_info(m, tol).nullity();
}

/// Orthonormal basis of the kernel (columns). Returns cols x 0 when trivial.
template <typename Derived>
typename Derived::PlainObject null_space(const Eigen::MatrixBase<Derived>& m,
                                         double tol = -1.0, double floor = 0.0) {
  using PlainMatrix = typename Derived::PlainObject;
  const Index n = m.cols();
  if (m.rows() == 0) return PlainMatrix::Identity(n, n);
  Eigen::JacobiSVD<PlainMatrix> svd(m.derived(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  double t = tol >= 0.0 ? tol : default_rank_tolerance(m.rows(), n, smax);
  t = std::max(t, floor);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > t) ++r;
  }
  return svd.matrixV().rightCols(n - r);
}

/// Orthonormal basis of the image (columns).
template <typename Derived>
typename Derived::PlainObject range_space(const Eigen::MatrixBase<Derived>& m,
                                          double tol = -1.0) {
  using PlainMatrix = typename Derived::PlainObject;
  if (m.cols() == 0) return PlainMatrix::Zero(m.rows(), 0);
  Eigen::JacobiSVD<PlainMatrix> svd(m.derived(), Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double t = tol >= 0.0 ? tol : default_rank_tolerance(m.rows(), m.cols(), smax);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > t) ++r;
  }
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of the orthogonal complement of span(basis) in R^n
/// (or C^n). `basis` must have orthonormal columns.
template <typename Derived>
typename Derived::PlainObject orthogonal_complement(
    const Eigen::MatrixBase<Derived>& basis) {
  using PlainMatrix = typename Derived::PlainObject;
  const Index n = basis.rows();
  if (basis.cols() == 0) return PlainMatrix::Identity(n, n);
  PlainMatrix projector = PlainMatrix::Identity(n, n) - basis * basis.adjoint();
  return range_space(projector, 1e-8);
}

/// dim(Im a ∩ Im b) = rank a + rank b - rank [a b], all at one tolerance.
Index image_intersection_dim(const Matrix& a, const Matrix& b, double tol = -1.0);

/// True when `s` is symmetric (to 1e-9 relative) with eigenvalues >= -tol.
bool is_symmetric_psd(const Matrix& s, double tol);
bool is_symmetric_pd(const Matrix& s);

/// F with F F^T = S. Cholesky when S is positive definite, otherwise a
/// symmetric eigendecomposition with negative eigenvalues clamped to zero.
Matrix psd_factor(const Matrix& s);

/// Symmetric inverse square root via eigendecomposition, eigenvalues floored.
Matrix inverse_sqrt_spd(const Matrix& s, double floor = 1e-12);

/// Largest absolute deviation from symmetry, relative to max |entry|.
double asymmetry(const Matrix& s);

}  // namespace mtd::linalg
