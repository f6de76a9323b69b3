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

#include <functional>
#include <optional>
#include <vector>

#include "mtd/core.hpp"
#include "mtd/rng.hpp"

namespace mtd {

/// One (A, C) configuration of the moving target.
struct LtiPair {
  Matrix A;  // n x n
  Matrix C;  // m x n

  LtiPair() = default;
  LtiPair(Matrix a, Matrix c);

  Index n() const { return A.rows(); }
  Index m() const { return C.rows(); }
};

/// The configuration set plus its switching period and secret schedule key.
class TargetSet {
 public:
  TargetSet(std::vector<LtiPair> pairs, Index period, ScheduleKey key = {});

  const std::vector<LtiPair>& pairs() const { return pairs_; }
  const LtiPair& pair(Index j) const { return pairs_.at(static_cast<std::size_t>(j)); }
  Index size() const { return static_cast<Index>(pairs_.size()); }
  Index period() const { return period_; }
  const ScheduleKey& key() const { return key_; }
  Index n() const { return pairs_.front().n(); }
  Index m() const { return pairs_.front().m(); }

  TargetSet with_key(const ScheduleKey& key) const { return {pairs_, period_, key}; }

 private:
  std::vector<LtiPair> pairs_;
  Index period_;
  ScheduleKey key_;
};

struct NoiseModel {
  Matrix Q;        // n x n, symmetric PSD
  Matrix R;        // m x m, symmetric PD
  Vector x0_mean;  // n
  Matrix P0;       // n x n, symmetric PSD

  /// Throws Model errors for shape or definiteness violations.
  void validate(Index n, Index m) const;
};

/// Attacked sensor set K (ordered, zero-based) and its injection matrix D.
struct AttackSet {
  std::vector<Index> sensors;
  Matrix D;  // m x |K|

  Index size() const { return static_cast<Index>(sensors.size()); }
  bool contains(Index s) const;
  /// D * d for an attack value vector d of length |K|.
  Vector inject(const Vector& d) const { return D * d; }
};

AttackSet build_attack_matrix(const std::vector<Index>& sensors, Index m);

/// Configuration index (zero-based) per time step.
using Schedule = std::vector<Index>;

/// Draws one configuration per period block from the keyed stream.
Schedule sample_schedule(const TargetSet& ts, Index horizon);

/// Attack value d_k (length |K|) for step k.
using AttackSource = std::function<Vector(Index)>;

AttackSource no_attack(Index attacked_count);
AttackSource attack_from_sequence(std::vector<Vector> values);

struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> outputs;
  std::vector<Vector> attacks;  // D d_k, length m
  Schedule schedule;

  Index length() const { return static_cast<Index>(states.size()); }
};

Trajectory simulate_deterministic(const TargetSet& ts, const Schedule& schedule,
                                  const Vector& x0, const AttackSet& attack,
                                  const AttackSource& d);

/// Gaussian draws for the stochastic plant. Each step consumes the sensor
/// noise v_k (m normals) and then the process noise w_k (n normals); the
/// initial state consumes n normals up front.
class NoiseSampler {
 public:
  NoiseSampler(const NoiseModel& noise, RandomStream& stream);

  Vector initial_deviation();  // x0 - x0_mean
  Vector sensor();
  Vector process();

 private:
  Matrix q_factor_, r_factor_, p0_factor_;
  RandomStream* stream_;
};

Trajectory simulate_stochastic(const TargetSet& ts, const Schedule& schedule,
                               const NoiseModel& noise, const AttackSet& attack,
                               const AttackSource& d, RandomStream& stream);

struct RecommendationReport {
  bool disjoint_spectra = true;       // 1
  double min_cross_eig_distance = 0;  // inf when l = 1
  bool period_long_enough = true;     // 2
  bool schedule_nondegenerate = true; // 3
  bool all_observable = true;         // 4
  std::vector<bool> observable;
  bool no_zero_eigenvalue = true;     // 5
  double min_abs_eigenvalue = 0;

  bool all_pass() const {
    return disjoint_spectra && period_long_enough && schedule_nondegenerate &&
           all_observable && no_zero_eigenvalue;
  }
};

/// Diagnostic check of the five design recommendations. `tau_eig` < 0 uses
/// 1e-8 * (1 + max |lambda|).
RecommendationReport validate_design_recommendations(const TargetSet& ts,
                                                     double tau_eig = -1.0);

/// Eigenvalues of a real matrix as complex numbers.
CVector eigenvalues(const Matrix& a);

bool is_observable(const LtiPair& pair);

}  // namespace mtd
