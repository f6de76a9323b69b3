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

#include "mtd/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace mtd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Dimension: return "dimension-mismatch";
    case ErrorKind::InvalidAttackSet: return "invalid-attack-set";
    case ErrorKind::Model: return "model-error";
    case ErrorKind::Conditioning: return "conditioning-error";
    case ErrorKind::Filter: return "filter-error";
    case ErrorKind::Decomposition: return "decomposition-error";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::DegenerateWitness: return "degenerate-witness";
    case ErrorKind::Config: return "config-error";
  }
  return "unknown";
}

namespace linalg {

Index image_intersection_dim(const Matrix& a, const Matrix& b, double tol) {
  require(a.rows() == b.rows(), ErrorKind::Dimension,
          "image_intersection_dim: row counts differ");
  Matrix joint(a.rows(), a.cols() + b.cols());
  joint << a, b;
  // One tolerance for all three ranks so the identity is consistent.
  const RankInfo ji = rank_info(joint, tol);
  const double t = ji.tolerance;
  return numerical_rank(a, t) + numerical_rank(b, t) - ji.rank;
}

double asymmetry(const Matrix& s) {
  if (s.size() == 0) return 0.0;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return (s - s.transpose()).cwiseAbs().maxCoeff() / scale;
}

bool is_symmetric_psd(const Matrix& s, double tol) {
  if (s.rows() != s.cols()) return false;
  if (s.size() == 0) return true;
  if (asymmetry(s) > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_symmetric_pd(const Matrix& s) {
  if (s.rows() != s.cols() || s.size() == 0) return false;
  if (asymmetry(s) > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

Matrix psd_factor(const Matrix& s) {
  const Index n = s.rows();
  if (n == 0) return Matrix(0, 0);
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Matrix inverse_sqrt_spd(const Matrix& s, double floor) {
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    fail(ErrorKind::Filter, "inverse_sqrt_spd: eigendecomposition failed");
  }
  const Vector inv_root = es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace linalg
}  // namespace mtd
