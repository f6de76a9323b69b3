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

#include <string>

#include <Eigen/Eigenvalues>

#include "mtd/scenario.hpp"

namespace mtd {
namespace {

constexpr Index kBlocks = 5;
constexpr Index kBanks = 2;

Matrix uniform_matrix(RandomStream& rs, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rs.uniform(-1.0, 1.0);
  }
  return m;
}

double spectral_radius(const Matrix& a) {
  return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

GeneratedSystem draw(const GeneratorSpec& spec, RandomStream& rs) {
  const Index n = spec.n;
  const Index b = n / kBlocks;
  const Index m = kBanks * kBlocks;
  GeneratedSystem sys;
  for (Index j = 0; j < spec.l; ++j) {
    Matrix a = Matrix::Zero(n, n);
    for (const auto& [r, c] : example_block_pattern()) {
      Matrix blk = uniform_matrix(rs, b, b);
      if (r == c) {
        const double target = rs.uniform(spec.radius_min, spec.radius_max);
        const double rho = spectral_radius(blk);
        require(rho > 0.0, ErrorKind::Model, "generator: nilpotent diagonal block drawn");
        blk *= target / rho;
      } else {
        blk *= spec.coupling_scale;
      }
      a.block(r * b, c * b, b, b) = blk;
    }
    Matrix c = Matrix::Zero(m, n);
    for (Index bank = 0; bank < kBanks; ++bank) {
      for (Index q = 0; q < kBlocks; ++q) {
        c.block(bank * kBlocks + q, q * b, 1, b) = uniform_matrix(rs, 1, b);
      }
    }
    sys.pairs.emplace_back(std::move(a), std::move(c));
  }
  const Matrix mq = uniform_matrix(rs, n, n);
  const Matrix mr = uniform_matrix(rs, m, m);
  sys.noise.Q = mq * mq.transpose() * (spec.q_scale / static_cast<double>(n));
  sys.noise.R = mr * mr.transpose() * (spec.r_scale / static_cast<double>(m)) +
                spec.r_floor * Matrix::Identity(m, m);
  sys.noise.x0_mean = Vector::Zero(n);
  sys.noise.P0 = Matrix::Identity(n, n);
  return sys;
}

bool structurally_sound(const GeneratedSystem& sys) {
  for (const auto& p : sys.pairs) {
    if (!is_observable(p)) return false;
  }
  const TargetSet ts(sys.pairs, 1);
  try {
    const auto decomps = decompose_all(ts, sys.noise);
    std::vector<Index> all;
    for (Index s = 0; s < ts.m(); ++s) all.push_back(s);
    return FusionModel::well_defined(decomps, all);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Decomposition) return false;
    throw;
  }
}

}  // namespace

const std::vector<std::pair<Index, Index>>& example_block_pattern() {
  static const std::vector<std::pair<Index, Index>> pattern = {
      {0, 0}, {0, 1}, {1, 1}, {1, 3}, {2, 2}, {2, 4}, {3, 3}, {3, 4}, {4, 4}};
  return pattern;
}

GeneratedSystem generate_example_system(const GeneratorSpec& spec) {
  require(spec.n >= kBlocks && spec.n % kBlocks == 0, ErrorKind::InvalidArgument,
          "generator: n must be a positive multiple of 5");
  require(spec.l >= 1, ErrorKind::InvalidArgument, "generator: l must be >= 1");
  require(spec.radius_min > 0.0 && spec.radius_min <= spec.radius_max, ErrorKind::InvalidArgument,
          "generator: need 0 < radius_min <= radius_max");
  require(spec.q_scale >= 0.0 && spec.r_scale >= 0.0 && spec.r_floor > 0.0,
          ErrorKind::InvalidArgument, "generator: noise scales must be nonnegative, r_floor > 0");
  require(spec.max_attempts >= 1, ErrorKind::InvalidArgument, "generator: max_attempts >= 1");
  for (Index attempt = 0; attempt < spec.max_attempts; ++attempt) {
    RandomStream rs = RandomStream::derive(
        spec.seed, {stream_tag::kSystem, static_cast<std::uint64_t>(attempt)});
    GeneratedSystem sys = draw(spec, rs);
    if (structurally_sound(sys)) {
      sys.attempts = attempt + 1;
      return sys;
    }
  }
  fail(ErrorKind::Model, "generator: no structurally sound system after " +
                             std::to_string(spec.max_attempts) + " draws");
}

}  // namespace mtd
