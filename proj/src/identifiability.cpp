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

#include "mtd/identifiability.hpp"

#include <algorithm>
#include <cmath>

#include "mtd/linalg.hpp"

namespace mtd {
namespace {

Matrix sensor_rows(const Matrix& c, const std::vector<Index>& sensors) {
  Matrix out(static_cast<Index>(sensors.size()), c.cols());
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    require(sensors[i] >= 0 && sensors[i] < c.rows(), ErrorKind::InvalidArgument,
            "sensor index out of range");
    out.row(static_cast<Index>(i)) = c.row(sensors[i]);
  }
  return out;
}

ObservabilityStack sequence_stack(const TargetSet& ts, const Schedule& seq, Index sensor, Index t,
                                  StackKind kind) {
  require(t >= 0, ErrorKind::InvalidArgument, "observability stack: t must be >= 0");
  require(static_cast<Index>(seq.size()) >= t + 1, ErrorKind::InvalidArgument,
          "observability stack: sequence shorter than t + 1");
  require(sensor >= 0 && sensor < ts.m(), ErrorKind::InvalidArgument, "sensor index out of range");
  ObservabilityStack st;
  st.kind = kind;
  st.sensors = {sensor};
  st.horizon = t + 1;
  st.rows.resize(t + 1, ts.n());
  Matrix phi = Matrix::Identity(ts.n(), ts.n());
  for (Index k = 0; k <= t; ++k) {
    const LtiPair& p = ts.pair(seq[static_cast<std::size_t>(k)]);
    st.rows.row(k) = p.C.row(sensor) * phi;
    phi = p.A * phi;
  }
  return st;
}

bool observable_without(const LtiPair& pair, const std::vector<bool>& removed) {
  std::vector<Index> kept;
  for (Index s = 0; s < pair.m(); ++s) {
    if (!removed[static_cast<std::size_t>(s)]) kept.push_back(s);
  }
  if (kept.empty()) return pair.n() == 0;
  const Matrix obs = observability_matrix(pair, kept, pair.n()).rows;
  return linalg::numerical_rank(obs) == pair.n();
}

bool consistent_prefix(const Matrix& obs, const Vector& y, Index rows, double tau_rel,
                       Vector* witness, double* residual, double* tolerance) {
  const Matrix o = obs.topRows(rows);
  const Vector yy = y.head(rows);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(o);
  const Vector x = cod.solve(yy);
  const double res = (o * x - yy).cwiseAbs().maxCoeff();
  const double tol = tau_rel * (1.0 + yy.cwiseAbs().maxCoeff());
  if (witness != nullptr) *witness = x;
  if (residual != nullptr) *residual = res;
  if (tolerance != nullptr) *tolerance = tol;
  return res <= tol;
}

double max_chain_norm(const EigenBlock& b) {
  double m = 0.0;
  for (const auto& c : b.chains) {
    for (const auto& v : c.vectors) m = std::max(m, v.norm());
  }
  return m;
}

CVector combine_chains(const EigenBlock& b, const CVector& alpha) {
  CVector x = CVector::Zero(b.chains.front().vectors.front().size());
  Index col = 0;
  for (const auto& c : b.chains) {
    for (const auto& v : c.vectors) x += alpha(col++) * v;
  }
  return x;
}

}  // namespace

ObservabilityStack observability_matrix(const LtiPair& pair, const std::vector<Index>& sensors,
                                        Index t) {
  require(t >= 1, ErrorKind::InvalidArgument, "observability_matrix: t must be >= 1");
  require(!sensors.empty(), ErrorKind::InvalidArgument,
          "observability_matrix: sensor set must be nonempty");
  const Matrix cs = sensor_rows(pair.C, sensors);
  const Index rows = cs.rows();
  ObservabilityStack st;
  st.kind = StackKind::FixedPair;
  st.sensors = sensors;
  st.horizon = t;
  st.rows.resize(rows * t, pair.n());
  Matrix block = cs;
  for (Index k = 0; k < t; ++k) {
    st.rows.middleRows(k * rows, rows) = block;
    block = block * pair.A;
  }
  return st;
}

ObservabilityStack time_varying_observability(const TargetSet& ts, const Schedule& schedule,
                                              Index sensor, Index t) {
  return sequence_stack(ts, schedule, sensor, t, StackKind::Schedule);
}

ObservabilityStack guessed_observability(const TargetSet& ts, const Schedule& guessed,
                                         Index sensor, Index t) {
  return sequence_stack(ts, guessed, sensor, t, StackKind::GuessedSequence);
}

bool is_sparse_observable(const LtiPair& pair, Index removed) {
  const Index m = pair.m();
  require(removed >= 0 && removed < m, ErrorKind::InvalidArgument,
          "is_sparse_observable: removal count must satisfy 0 <= r < m");
  std::vector<bool> mask(static_cast<std::size_t>(m), false);
  std::fill(mask.begin(), mask.begin() + removed, true);
  do {
    if (!observable_without(pair, mask)) return false;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return true;
}

Index sparse_observability_margin(const LtiPair& pair) {
  Index best = -1;
  for (Index r = 0; r < pair.m(); ++r) {
    if (!is_sparse_observable(pair, r)) break;
    best = r;
  }
  return best;
}

IdentVerdict sensor_consistency_check(const Vector& y, const TargetSet& ts,
                                      const Schedule& schedule, Index sensor, double tau_rel) {
  require(y.size() >= 1, ErrorKind::InvalidArgument, "consistency check: empty output stream");
  const Index t = y.size() - 1;
  const Matrix obs = time_varying_observability(ts, schedule, sensor, t).rows;

  IdentVerdict v;
  v.sensor = sensor;
  Vector x;
  if (consistent_prefix(obs, y, t + 1, tau_rel, &x, &v.residual, &v.tolerance)) {
    v.status = VerdictStatus::Consistent;
    v.witness = x;
    return v;
  }
  v.status = VerdictStatus::UnambiguouslyIdentified;
  // Consistency is inherited by prefixes, so the first failing prefix is the
  // detection time.
  for (Index tp = 0; tp <= t; ++tp) {
    if (!consistent_prefix(obs, y, tp + 1, tau_rel, nullptr, nullptr, nullptr)) {
      v.first_detection_time = tp;
      break;
    }
  }
  return v;
}

bool guess_attack_feasibility(const TargetSet& ts, const Schedule& guessed,
                              const Schedule& truth, Index sensor, Index t, double tau_rank) {
  const Matrix og = guessed_observability(ts, guessed, sensor, t).rows;
  const Matrix ot = time_varying_observability(ts, truth, sensor, t).rows;
  Matrix joint(og.rows(), og.cols() + ot.cols());
  joint << og, ot;
  const linalg::RankInfo ji = linalg::rank_info(joint, tau_rank);
  const double tol = ji.tolerance;
  return ji.nullity() > linalg::nullity(og, tol) + linalg::nullity(ot, tol);
}

bool brute_force_unidentifiability_oracle(const LtiPair& first, const LtiPair& second,
                                          Index sensor, Index t) {
  require(first.n() == second.n(), ErrorKind::Dimension, "oracle: state dimensions differ");
  const Matrix o1 = observability_matrix(first, {sensor}, t + 1).rows;
  const Matrix o2 = observability_matrix(second, {sensor}, t + 1).rows;
  return linalg::image_intersection_dim(o1, o2) > 0;
}

CrossModelResult cross_model_unidentifiability(const LtiPair& first, const LtiPair& second,
                                               Index sensor, const CrossModelOptions& opts) {
  require(first.n() == second.n(), ErrorKind::Dimension, "cross-model test: n differs");
  require(sensor >= 0 && sensor < first.m() && sensor < second.m(), ErrorKind::InvalidArgument,
          "cross-model test: sensor index out of range");
  const JordanStructure js1 = jordan_chains(first.A, opts.jordan);
  const JordanStructure js2 = jordan_chains(second.A, opts.jordan);
  const double tau = std::max(js1.tau_eig, js2.tau_eig);
  const Eigen::RowVectorXd c1 = first.C.row(sensor);
  const Eigen::RowVectorXd c2 = second.C.row(sensor);

  CrossModelResult result;
  for (const auto& b1 : js1.blocks) {
    if (js2.find(b1.lambda, tau) == nullptr) continue;
    result.shared_eigenvalues.push_back(b1.lambda);
    if (result.exists) continue;

    const VStackPair vs = build_v_stack(js1, js2, c1, c2, b1.lambda, tau);
    const double scale = std::max(
        {linalg::rank_info(vs.first).sigma_max, linalg::rank_info(vs.second).sigma_max,
         c1.norm() * max_chain_norm(*vs.block1), c2.norm() * max_chain_norm(*vs.block2)});
    const double tol = opts.v_rank_tol * scale;
    CMatrix joint(vs.rows, vs.first.cols() + vs.second.cols());
    joint << vs.first, vs.second;
    const Index inter = linalg::numerical_rank(vs.first, tol) +
                        linalg::numerical_rank(vs.second, tol) -
                        linalg::numerical_rank(joint, tol);
    if (inter <= 0) continue;

    // Pick the null vector of [V1 V2] whose common image is largest.
    const CMatrix basis = linalg::null_space(joint, tol);
    const Index a1 = vs.first.cols();
    const CMatrix top = basis.topRows(a1);
    const CMatrix bottom = basis.bottomRows(vs.second.cols());
    Eigen::JacobiSVD<CMatrix> svd(vs.first * top, Eigen::ComputeFullV);
    const CVector coeff = svd.matrixV().col(0);
    CVector alpha1 = top * coeff;
    CVector alpha2 = -(bottom * coeff);
    const CVector image = vs.first * alpha1;
    Index pivot = 0;
    image.cwiseAbs().maxCoeff(&pivot);
    const Complex norm = image(pivot);
    alpha1 /= norm;
    alpha2 /= norm;

    CrossModelWitness w;
    w.sensor = sensor;
    w.lambda = b1.lambda;
    w.alpha1 = alpha1;
    w.alpha2 = alpha2;
    w.x0_first = combine_chains(*vs.block1, alpha1);
    w.x0_second = combine_chains(*vs.block2, alpha2);
    result.exists = true;
    result.witness = std::move(w);
  }
  return result;
}

CrossModelAttack construct_cross_model_attack(const CrossModelWitness& witness,
                                              const LtiPair& first, const LtiPair& second,
                                              Index horizon) {
  require(horizon >= 1, ErrorKind::InvalidArgument, "cross-model attack: horizon must be >= 1");
  const Index s = witness.sensor;
  auto sequence = [&](const LtiPair& p, const CVector& x0) {
    CVector seq(horizon);
    CVector x = x0;
    const CMatrix a = p.A.cast<Complex>();
    const Eigen::RowVectorXcd c = p.C.row(s).cast<Complex>();
    for (Index k = 0; k < horizon; ++k) {
      seq(k) = (c * x).value();
      x = a * x;
    }
    return seq;
  };
  const CVector s1 = sequence(first, witness.x0_first);
  const CVector s2 = sequence(second, witness.x0_second);

  auto is_real = [](const CVector& v) {
    return v.imag().norm() <= 1e-10 * std::max(1.0, v.norm());
  };
  const bool real = is_real(witness.x0_first) && is_real(witness.x0_second);

  CrossModelAttack out;
  out.values = real ? Vector(s1.real()) : Vector(2.0 * s1.real());
  out.model_mismatch = (s1 - s2).cwiseAbs().maxCoeff();
  const double peak = s1.cwiseAbs().maxCoeff();
  if (peak == 0.0 || out.values.cwiseAbs().maxCoeff() <= 1e-10 * peak) {
    fail(ErrorKind::DegenerateWitness,
         "cross-model attack: realified sequence is identically zero; rotate the witness");
  }
  return out;
}

}  // namespace mtd
