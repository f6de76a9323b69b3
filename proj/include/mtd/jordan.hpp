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

#include <optional>
#include <vector>

#include "mtd/core.hpp"

namespace mtd {

/// Tolerances for the eigenstructure computation. Negative values select
/// defaults scaled by s = 1 + max |lambda| (eigenvalue tolerances) or by
/// ||A|| (chain tolerance).
struct JordanOptions {
  double tau_eig = -1.0;       // default 1e-8 * s; clusters distinct eigenvalues
  double merge_radius = -1.0;  // default 1e-3 * s; candidate groups for defective splits
  double tau_chain = -1.0;     // default 1e-7 * ||A||
  double kernel_tol = 1e-9;    // relative singular-value cutoff for ker (A - lambda I)^k
};

/// Generalized eigenvectors v_1..v_r with (A - lambda I) v_1 = 0 and
/// (A - lambda I) v_{k+1} = v_k.
struct JordanChain {
  std::vector<CVector> vectors;
  Index length() const { return static_cast<Index>(vectors.size()); }
};

struct EigenBlock {
  Complex lambda;
  Index multiplicity = 0;
  std::vector<JordanChain> chains;  // longest first

  Index max_chain_length() const;
};

struct JordanStructure {
  std::vector<EigenBlock> blocks;
  double tau_eig = 0.0;
  double tau_chain = 0.0;
  double max_chain_residual = 0.0;
  /// Set when some chain residual exceeds 10 * tau_chain.
  bool conditioning_warning = false;

  /// Block whose eigenvalue lies within `tol` of lambda (nearest), if any.
  const EigenBlock* find(Complex lambda, double tol) const;
  /// All chain vectors as columns.
  CMatrix all_vectors() const;
};

/// Clusters the spectrum and builds a maximal set of Jordan chains per
/// distinct eigenvalue from nested kernels of (A - lambda I)^k.
/// Throws Conditioning when clusters cannot be made consistent with the
/// kernel dimensions.
JordanStructure jordan_chains(const Matrix& a, const JordanOptions& opts = {});

/// Residual max over chain relations of one structure.
double chain_residual(const Matrix& a, const JordanStructure& js);

/// Upper-shift block for one chain: entry (p, q) = c * v_{q-p+1} for q >= p,
/// zero elsewhere, padded with zero rows to `rows`.
CMatrix chain_block(const JordanChain& chain, const Eigen::RowVectorXd& c, Index rows);

struct VStackPair {
  CMatrix first;
  CMatrix second;
  Index rows = 0;  // r(lambda)
  const EigenBlock* block1 = nullptr;
  const EigenBlock* block2 = nullptr;
};

/// Horizontal concatenation of chain blocks for both models at a shared
/// eigenvalue, padded to r(lambda) = longest chain across both models.
VStackPair build_v_stack(const JordanStructure& js1, const JordanStructure& js2,
                         const Eigen::RowVectorXd& c1, const Eigen::RowVectorXd& c2,
                         Complex lambda, std::optional<double> tau_eig = std::nullopt);

}  // namespace mtd
