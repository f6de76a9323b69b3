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

#include "mtd/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mtd/linalg.hpp"

namespace mtd {
namespace {

using Cluster = std::vector<Complex>;

/// Single-linkage grouping of eigenvalues within `radius`.
std::vector<Cluster> link(const std::vector<Complex>& values, double radius) {
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) <= radius) parent[root(i)] = root(j);
    }
  }
  std::vector<Cluster> out;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = root(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[r])].push_back(values[i]);
  }
  return out;
}

Complex mean(const Cluster& c) {
  Complex s = 0.0;
  for (const auto& v : c) s += v;
  return s / static_cast<double>(c.size());
}

CMatrix shifted(const Matrix& a, Complex mu) {
  CMatrix n = a.cast<Complex>();
  n.diagonal().array() -= mu;
  return n;
}

CMatrix power(const CMatrix& m, Index p) {
  CMatrix out = CMatrix::Identity(m.rows(), m.cols());
  for (Index i = 0; i < p; ++i) out = out * m;
  return out;
}

/// Kernel basis of m with the singular-value count clamped to [lo, hi].
CMatrix kernel(const CMatrix& m, double rel_tol, Index lo, Index hi, Index* count) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = rel_tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Index small = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= tol) ++small;
  }
  small += m.cols() - sv.size();
  const Index d = std::clamp(small, lo, hi);
  if (count != nullptr) *count = small;
  return svd.matrixV().rightCols(d);
}

Index kernel_dim(const Matrix& a, Complex mu, Index p, double rel_tol) {
  Index count = 0;
  kernel(power(shifted(a, mu), p), rel_tol, 0, a.rows(), &count);
  return count;
}

EigenBlock chains_at(const Matrix& a, Complex mu, Index multiplicity, double rel_tol) {
  const Index n = a.rows();
  const CMatrix nmat = shifted(a, mu);

  // Nested kernels K_1 ⊂ K_2 ⊂ ... until the dimension reaches the
  // algebraic multiplicity. Dimensions are forced strictly increasing.
  std::vector<CMatrix> kernels{CMatrix(n, 0)};
  std::vector<Index> dims{0};
  CMatrix npow = CMatrix::Identity(n, n);
  while (dims.back() < multiplicity) {
    npow = npow * nmat;
    const Index lo = std::min(multiplicity, dims.back() + 1);
    kernels.push_back(kernel(npow, rel_tol, lo, multiplicity, nullptr));
    dims.push_back(kernels.back().cols());
  }
  const Index levels = static_cast<Index>(dims.size()) - 1;

  auto dim = [&](Index k) { return k > levels ? dims.back() : dims[static_cast<std::size_t>(k)]; };

  struct Top {
    CVector u;
    Index level;
  };
  std::vector<Top> tops;
  for (Index k = levels; k >= 1; --k) {
    const Index count = (dim(k) - dim(k - 1)) - (dim(k + 1) - dim(k));
    if (count <= 0) continue;
    // Exclude K_{k-1} and the level-k images of longer chains.
    CMatrix exclude = kernels[static_cast<std::size_t>(k - 1)];
    for (const auto& t : tops) {
      CVector img = t.u;
      for (Index i = 0; i < t.level - k; ++i) img = nmat * img;
      exclude.conservativeResize(n, exclude.cols() + 1);
      exclude.col(exclude.cols() - 1) = img;
    }
    const CMatrix& kk = kernels[static_cast<std::size_t>(k)];
    CMatrix proj = kk;
    if (exclude.cols() > 0) {
      const CMatrix q = linalg::range_space(exclude, 1e-10 * std::max(1.0, exclude.norm()));
      proj = kk - q * (q.adjoint() * kk);
    }
    Eigen::JacobiSVD<CMatrix> svd(proj, Eigen::ComputeFullV);
    for (Index i = 0; i < count && i < kk.cols(); ++i) {
      CVector u = kk * svd.matrixV().col(i);
      u.normalize();
      tops.push_back({u, k});
    }
  }

  EigenBlock block;
  block.lambda = mu;
  block.multiplicity = multiplicity;
  for (const auto& t : tops) {
    JordanChain chain;
    chain.vectors.resize(static_cast<std::size_t>(t.level));
    CVector v = t.u;
    for (Index i = t.level - 1; i >= 0; --i) {
      chain.vectors[static_cast<std::size_t>(i)] = v;
      v = nmat * v;
    }
    block.chains.push_back(std::move(chain));
  }
  std::stable_sort(block.chains.begin(), block.chains.end(),
                   [](const JordanChain& x, const JordanChain& y) {
                     return x.length() > y.length();
                   });
  return block;
}

}  // namespace

Index EigenBlock::max_chain_length() const {
  Index r = 0;
  for (const auto& c : chains) r = std::max(r, c.length());
  return r;
}

const EigenBlock* JordanStructure::find(Complex lambda, double tol) const {
  const EigenBlock* best = nullptr;
  double best_d = tol;
  for (const auto& b : blocks) {
    const double d = std::abs(b.lambda - lambda);
    if (d <= best_d) {
      best = &b;
      best_d = d;
    }
  }
  return best;
}

CMatrix JordanStructure::all_vectors() const {
  Index total = 0;
  Index n = 0;
  for (const auto& b : blocks) {
    for (const auto& c : b.chains) {
      total += c.length();
      if (!c.vectors.empty()) n = c.vectors.front().size();
    }
  }
  CMatrix out(n, total);
  Index col = 0;
  for (const auto& b : blocks) {
    for (const auto& c : b.chains) {
      for (const auto& v : c.vectors) out.col(col++) = v;
    }
  }
  return out;
}

double chain_residual(const Matrix& a, const JordanStructure& js) {
  double worst = 0.0;
  const CMatrix ac = a.cast<Complex>();
  for (const auto& b : js.blocks) {
    for (const auto& c : b.chains) {
      for (std::size_t k = 0; k < c.vectors.size(); ++k) {
        CVector r = ac * c.vectors[k] - b.lambda * c.vectors[k];
        if (k > 0) r -= c.vectors[k - 1];
        worst = std::max(worst, r.norm());
      }
    }
  }
  return worst;
}

JordanStructure jordan_chains(const Matrix& a, const JordanOptions& opts) {
  require(a.rows() == a.cols(), ErrorKind::Dimension, "jordan_chains: matrix must be square");
  JordanStructure js;
  const Index n = a.rows();
  if (n == 0) return js;

  Eigen::ComplexEigenSolver<CMatrix> es(a.cast<Complex>(), false);
  const CVector ev = es.eigenvalues();
  std::vector<Complex> values(ev.data(), ev.data() + ev.size());
  const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
  js.tau_eig = opts.tau_eig >= 0.0 ? opts.tau_eig : 1e-8 * scale;
  const double radius = std::max(js.tau_eig, opts.merge_radius >= 0.0 ? opts.merge_radius
                                                                      : 1e-3 * scale);
  js.tau_chain = opts.tau_chain >= 0.0 ? opts.tau_chain : 1e-7 * std::max(1.0, a.norm());

  // Defective eigenvalues split into a ring of radius ~ eps^(1/r); a group
  // is one eigenvalue when the kernel of (A - mu I)^|group| has full size.
  std::vector<Cluster> clusters;
  for (const auto& group : link(values, radius)) {
    const Index size = static_cast<Index>(group.size());
    if (kernel_dim(a, mean(group), size, opts.kernel_tol) == size) {
      clusters.push_back(group);
      continue;
    }
    for (const auto& sub : link(group, js.tau_eig)) {
      const Index sub_size = static_cast<Index>(sub.size());
      const Index d = kernel_dim(a, mean(sub), sub_size, opts.kernel_tol);
      if (d != sub_size) {
        std::ostringstream msg;
        msg << "jordan_chains: eigenvalue cluster near " << mean(sub) << " of size " << sub_size
            << " has generalized kernel dimension " << d
            << "; adjust tau_eig or merge_radius";
        fail(ErrorKind::Conditioning, msg.str());
      }
      clusters.push_back(sub);
    }
  }

  for (const auto& c : clusters) {
    js.blocks.push_back(chains_at(a, mean(c), static_cast<Index>(c.size()), opts.kernel_tol));
  }

  js.max_chain_residual = chain_residual(a, js);
  js.conditioning_warning = js.max_chain_residual > 10.0 * js.tau_chain;
  return js;
}

CMatrix chain_block(const JordanChain& chain, const Eigen::RowVectorXd& c, Index rows) {
  const Index len = chain.length();
  require(rows >= len, ErrorKind::Dimension, "chain_block: rows below chain length");
  CMatrix block = CMatrix::Zero(rows, len);
  const Eigen::RowVectorXcd cc = c.cast<Complex>();
  for (Index q = 0; q < len; ++q) {
    for (Index p = 0; p <= q; ++p) {
      block(p, q) = (cc * chain.vectors[static_cast<std::size_t>(q - p)]).value();
    }
  }
  return block;
}

VStackPair build_v_stack(const JordanStructure& js1, const JordanStructure& js2,
                         const Eigen::RowVectorXd& c1, const Eigen::RowVectorXd& c2,
                         Complex lambda, std::optional<double> tau_eig) {
  const double tol = tau_eig.value_or(std::max(js1.tau_eig, js2.tau_eig));
  const EigenBlock* b1 = js1.find(lambda, tol);
  const EigenBlock* b2 = js2.find(lambda, tol);
  if (b1 == nullptr || b2 == nullptr) {
    std::ostringstream msg;
    msg << "build_v_stack: " << lambda << " is not an eigenvalue of both matrices";
    fail(ErrorKind::NotApplicable, msg.str());
  }
  VStackPair out;
  out.block1 = b1;
  out.block2 = b2;
  out.rows = std::max(b1->max_chain_length(), b2->max_chain_length());
  auto assemble = [&](const EigenBlock& b, const Eigen::RowVectorXd& c) {
    CMatrix v(out.rows, b.multiplicity);
    Index col = 0;
    for (const auto& chain : b.chains) {
      v.middleCols(col, chain.length()) = chain_block(chain, c, out.rows);
      col += chain.length();
    }
    return v;
  };
  out.first = assemble(*b1, c1);
  out.second = assemble(*b2, c2);
  return out;
}

}  // namespace mtd
