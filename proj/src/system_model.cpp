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

#include "mtd/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "mtd/linalg.hpp"

namespace mtd {

LtiPair::LtiPair(Matrix a, Matrix c) : A(std::move(a)), C(std::move(c)) {
  require(A.rows() == A.cols(), ErrorKind::Dimension, "LtiPair: A must be square");
  require(C.cols() == A.cols(), ErrorKind::Dimension,
          "LtiPair: C must have as many columns as A");
}

TargetSet::TargetSet(std::vector<LtiPair> pairs, Index period, ScheduleKey key)
    : pairs_(std::move(pairs)), period_(period), key_(key) {
  require(!pairs_.empty(), ErrorKind::InvalidArgument, "TargetSet: need at least one pair");
  require(period_ >= 1, ErrorKind::InvalidArgument, "TargetSet: period must be >= 1");
  const Index n = pairs_.front().n();
  const Index m = pairs_.front().m();
  for (const auto& p : pairs_) {
    require(p.n() == n && p.m() == m, ErrorKind::Dimension,
            "TargetSet: all pairs must share (n, m)");
  }
}

void NoiseModel::validate(Index n, Index m) const {
  require(Q.rows() == n && Q.cols() == n, ErrorKind::Dimension, "NoiseModel: Q must be n x n");
  require(R.rows() == m && R.cols() == m, ErrorKind::Dimension, "NoiseModel: R must be m x m");
  require(P0.rows() == n && P0.cols() == n, ErrorKind::Dimension,
          "NoiseModel: P0 must be n x n");
  require(x0_mean.size() == n, ErrorKind::Dimension, "NoiseModel: x0_mean must have n entries");
  const double q_tol = 1e-10 * std::max(Q.norm(), std::numeric_limits<double>::min());
  require(linalg::is_symmetric_psd(Q, q_tol), ErrorKind::Model,
          "NoiseModel: Q is not symmetric positive semidefinite");
  require(linalg::is_symmetric_pd(R), ErrorKind::Model,
          "NoiseModel: R is not symmetric positive definite");
  const double p_tol = 1e-10 * std::max(P0.norm(), std::numeric_limits<double>::min());
  require(linalg::is_symmetric_psd(P0, p_tol), ErrorKind::Model,
          "NoiseModel: P0 is not symmetric positive semidefinite");
}

bool AttackSet::contains(Index s) const {
  return std::find(sensors.begin(), sensors.end(), s) != sensors.end();
}

AttackSet build_attack_matrix(const std::vector<Index>& sensors, Index m) {
  std::set<Index> seen;
  AttackSet out;
  out.sensors = sensors;
  out.D = Matrix::Zero(m, static_cast<Index>(sensors.size()));
  for (std::size_t v = 0; v < sensors.size(); ++v) {
    const Index s = sensors[v];
    require(s >= 0 && s < m, ErrorKind::InvalidAttackSet,
            "attack set: sensor index " + std::to_string(s + 1) + " out of range 1.." +
                std::to_string(m));
    require(seen.insert(s).second, ErrorKind::InvalidAttackSet,
            "attack set: duplicate sensor index " + std::to_string(s + 1));
    out.D(s, static_cast<Index>(v)) = 1.0;
  }
  return out;
}

Schedule sample_schedule(const TargetSet& ts, Index horizon) {
  require(horizon >= 1, ErrorKind::InvalidArgument, "sample_schedule: horizon must be >= 1");
  Schedule out(static_cast<std::size_t>(horizon));
  const auto l = static_cast<std::uint32_t>(ts.size());
  const Index period = ts.period();
  for (Index block = 0; block * period < horizon; ++block) {
    const Index j = keyed_uniform(ts.key(), static_cast<std::uint64_t>(block), l);
    const Index end = std::min(horizon, (block + 1) * period);
    for (Index k = block * period; k < end; ++k) out[static_cast<std::size_t>(k)] = j;
  }
  return out;
}

AttackSource no_attack(Index attacked_count) {
  return [attacked_count](Index) { return Vector::Zero(attacked_count).eval(); };
}

AttackSource attack_from_sequence(std::vector<Vector> values) {
  return [values = std::move(values)](Index k) {
    require(k >= 0 && k < static_cast<Index>(values.size()), ErrorKind::Dimension,
            "attack sequence shorter than horizon");
    return values[static_cast<std::size_t>(k)];
  };
}

namespace {

void check_schedule(const TargetSet& ts, const Schedule& schedule) {
  for (Index j : schedule) {
    require(j >= 0 && j < ts.size(), ErrorKind::InvalidArgument,
            "schedule index out of range");
  }
}

Vector attack_at(const AttackSet& attack, const AttackSource& d, Index k) {
  const Vector dk = d(k);
  require(dk.size() == attack.size(), ErrorKind::Dimension,
          "attack value length differs from |K| at step " + std::to_string(k));
  return attack.inject(dk);
}

}  // namespace

Trajectory simulate_deterministic(const TargetSet& ts, const Schedule& schedule,
                                  const Vector& x0, const AttackSet& attack,
                                  const AttackSource& d) {
  require(x0.size() == ts.n(), ErrorKind::Dimension, "simulate: x0 must have n entries");
  require(attack.D.rows() == ts.m(), ErrorKind::Dimension, "simulate: D must have m rows");
  check_schedule(ts, schedule);
  Trajectory tr;
  tr.schedule = schedule;
  Vector x = x0;
  for (Index k = 0; k < static_cast<Index>(schedule.size()); ++k) {
    const LtiPair& p = ts.pair(schedule[static_cast<std::size_t>(k)]);
    const Vector a = attack_at(attack, d, k);
    tr.states.push_back(x);
    tr.attacks.push_back(a);
    tr.outputs.push_back(p.C * x + a);
    x = p.A * x;
  }
  return tr;
}

NoiseSampler::NoiseSampler(const NoiseModel& noise, RandomStream& stream)
    : q_factor_(linalg::psd_factor(noise.Q)),
      r_factor_(linalg::psd_factor(noise.R)),
      p0_factor_(linalg::psd_factor(noise.P0)),
      stream_(&stream) {}

Vector NoiseSampler::initial_deviation() {
  return p0_factor_ * stream_->normal_vector(p0_factor_.cols());
}

Vector NoiseSampler::sensor() { return r_factor_ * stream_->normal_vector(r_factor_.cols()); }

Vector NoiseSampler::process() { return q_factor_ * stream_->normal_vector(q_factor_.cols()); }

Trajectory simulate_stochastic(const TargetSet& ts, const Schedule& schedule,
                               const NoiseModel& noise, const AttackSet& attack,
                               const AttackSource& d, RandomStream& stream) {
  noise.validate(ts.n(), ts.m());
  require(attack.D.rows() == ts.m(), ErrorKind::Dimension, "simulate: D must have m rows");
  check_schedule(ts, schedule);
  NoiseSampler sampler(noise, stream);
  Trajectory tr;
  tr.schedule = schedule;
  Vector x = noise.x0_mean + sampler.initial_deviation();
  for (Index k = 0; k < static_cast<Index>(schedule.size()); ++k) {
    const LtiPair& p = ts.pair(schedule[static_cast<std::size_t>(k)]);
    const Vector a = attack_at(attack, d, k);
    const Vector v = sampler.sensor();
    const Vector w = sampler.process();
    tr.states.push_back(x);
    tr.attacks.push_back(a);
    tr.outputs.push_back(p.C * x + a + v);
    x = p.A * x + w;
  }
  return tr;
}

CVector eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return CVector(0);
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues();
}

bool is_observable(const LtiPair& pair) {
  const Index n = pair.n();
  Matrix obs(n * pair.m(), n);
  Matrix block = pair.C;
  for (Index k = 0; k < n; ++k) {
    obs.middleRows(k * pair.m(), pair.m()) = block;
    block = block * pair.A;
  }
  return linalg::numerical_rank(obs) == n;
}

RecommendationReport validate_design_recommendations(const TargetSet& ts, double tau_eig) {
  RecommendationReport rep;
  std::vector<CVector> spectra;
  double max_abs = 0.0;
  for (const auto& p : ts.pairs()) {
    spectra.push_back(eigenvalues(p.A));
    if (spectra.back().size() > 0) {
      max_abs = std::max(max_abs, spectra.back().cwiseAbs().maxCoeff());
    }
  }
  const double tau = tau_eig >= 0.0 ? tau_eig : 1e-8 * (1.0 + max_abs);

  rep.min_cross_eig_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    for (std::size_t j = i + 1; j < spectra.size(); ++j) {
      for (Index a = 0; a < spectra[i].size(); ++a) {
        for (Index b = 0; b < spectra[j].size(); ++b) {
          rep.min_cross_eig_distance =
              std::min(rep.min_cross_eig_distance, std::abs(spectra[i](a) - spectra[j](b)));
        }
      }
    }
  }
  rep.disjoint_spectra = rep.min_cross_eig_distance > tau;
  rep.period_long_enough = ts.period() >= 2 * ts.n();
  // Sampling is uniform per block by construction; only l matters.
  rep.schedule_nondegenerate = ts.size() >= 2;

  rep.min_abs_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const bool obs = is_observable(ts.pairs()[j]);
    rep.observable.push_back(obs);
    rep.all_observable = rep.all_observable && obs;
    if (spectra[j].size() > 0) {
      rep.min_abs_eigenvalue = std::min(rep.min_abs_eigenvalue, spectra[j].cwiseAbs().minCoeff());
    }
  }
  rep.no_zero_eigenvalue = rep.min_abs_eigenvalue > tau;
  return rep;
}

}  // namespace mtd
