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

#include "mtd/adversary.hpp"

#include <Eigen/Eigenvalues>

namespace mtd {
namespace {

void check_sensors(const std::vector<Index>& sensors, Index m) {
  for (Index s : sensors) {
    require(s >= 0 && s < m, ErrorKind::InvalidAttackSet, "attacked sensor out of range");
  }
}

Vector read_out(const LtiPair& p, const std::vector<Index>& sensors, const Vector& x) {
  Vector d(static_cast<Index>(sensors.size()));
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    d(static_cast<Index>(i)) = p.C.row(sensors[i]).dot(x);
  }
  return d;
}

}  // namespace

AttackerInfo AttackerInfo::from(const TargetSet& ts) {
  return AttackerInfo{ts.pairs(), ts.period()};
}

AttackValues omniscient_attack(const TargetSet& ts, const Schedule& schedule,
                               const std::vector<Index>& sensors, const Vector& x0_star) {
  check_sensors(sensors, ts.m());
  require(x0_star.size() == ts.n(), ErrorKind::Dimension, "x0* must have n entries");
  AttackValues out;
  out.reserve(schedule.size());
  Vector x = x0_star;
  for (Index j : schedule) {
    const LtiPair& p = ts.pair(j);
    out.push_back(read_out(p, sensors, x));
    x = p.A * x;
  }
  return out;
}

AttackValues guessing_attack(const AttackerInfo& info, const std::vector<Index>& sensors,
                             const Vector& x0_star, RandomStream& guesses, Index horizon,
                             bool restart_each_period) {
  require(!info.models.empty(), ErrorKind::InvalidArgument, "attacker knows no models");
  require(info.period >= 1, ErrorKind::InvalidArgument, "period must be >= 1");
  check_sensors(sensors, info.models.front().m());
  require(x0_star.size() == info.models.front().n(), ErrorKind::Dimension,
          "x0* must have n entries");
  const auto l = static_cast<std::uint32_t>(info.models.size());
  AttackValues out;
  out.reserve(static_cast<std::size_t>(horizon));
  Vector x = x0_star;
  std::size_t guess = 0;
  for (Index k = 0; k < horizon; ++k) {
    if (k % info.period == 0) {
      guess = guesses.uniform_index(l);
      if (restart_each_period) x = x0_star;
    }
    const LtiPair& p = info.models[guess];
    out.push_back(read_out(p, sensors, x));
    x = p.A * x;
  }
  return out;
}

AttackValues persistent_bias_attack(const std::vector<Index>& sensors, const BiasProfile& profile,
                                    Index horizon) {
  AttackValues out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (Index k = 0; k < horizon; ++k) {
    out.push_back(Vector::Constant(static_cast<Index>(sensors.size()),
                                   profile.constant + profile.ramp * static_cast<double>(k)));
  }
  return out;
}

AttackValues cross_model_attack(const std::vector<CrossModelWitness>& witnesses,
                                const LtiPair& first, const LtiPair& second, Index horizon) {
  require(!witnesses.empty(), ErrorKind::InvalidArgument,
          "cross_model_attack: no witnesses supplied");
  std::vector<Vector> per_sensor;
  for (const auto& w : witnesses) {
    try {
      per_sensor.push_back(construct_cross_model_attack(w, first, second, horizon).values);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateWitness) throw;
      CrossModelWitness rotated = w;
      const Complex i(0.0, 1.0);
      rotated.alpha1 *= i;
      rotated.alpha2 *= i;
      rotated.x0_first *= i;
      rotated.x0_second *= i;
      per_sensor.push_back(construct_cross_model_attack(rotated, first, second, horizon).values);
    }
  }
  AttackValues out(static_cast<std::size_t>(horizon), Vector(static_cast<Index>(witnesses.size())));
  for (Index k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < per_sensor.size(); ++i) {
      out[static_cast<std::size_t>(k)](static_cast<Index>(i)) = per_sensor[i](k);
    }
  }
  return out;
}

Vector dominant_mode(const Matrix& a) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::Dimension,
          "dominant_mode: A must be square and nonempty");
  Eigen::EigenSolver<Matrix> es(a);
  Index best = 0;
  es.eigenvalues().cwiseAbs().maxCoeff(&best);
  const CVector v = es.eigenvectors().col(best);
  Vector out = v.real();
  if (out.norm() < 1e-8 * v.norm()) out = v.imag();
  return out.normalized();
}

}  // namespace mtd
