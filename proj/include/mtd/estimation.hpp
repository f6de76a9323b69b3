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

#include <vector>

#include "mtd/rng.hpp"
#include "mtd/system_model.hpp"

namespace mtd {

/// Serial execution is the reference; parallel must agree bit for bit.
enum class Exec { Serial, Parallel };

// ---------------------------------------------------------------------------
// Central filter

struct CentralFilterState {
  Vector x_prior;  // x_k^-
  Matrix P_prior;  // P_{k|k-1}
  Vector x_post;   // x_k after the last update
  Matrix P_post;
  Matrix K;               // n x |rows|
  Matrix innovation_cov;  // C P C' + R over the active rows
  Matrix innovation_isqrt;
  Vector z;                 // normalized residue over the active rows
  std::vector<Index> rows;  // sensor rows used by the last update
};

CentralFilterState central_filter_init(const NoiseModel& noise, const Vector& x0_prior);

/// Measurement update at step k using the sensor rows in `rows` (all rows
/// when empty). `y` is the full m-vector.
void central_update(CentralFilterState& st, const LtiPair& pair, const Vector& y,
                    const Matrix& R, const std::vector<Index>& rows = {});

/// x_{k+1}^- = A_k x_k - shift, P_{k+1|k} = A_k P_k A_k' + Q. `shift` is the
/// process-noise draw when the filter runs relative to the true state, or
/// empty otherwise.
void central_predict(CentralFilterState& st, const LtiPair& pair, const Matrix& Q,
                     const Vector& shift = Vector());

/// Update with every sensor row followed by the prediction through A_k.
void central_filter_step(CentralFilterState& st, const LtiPair& pair, const Vector& y,
                         const NoiseModel& noise);

// ---------------------------------------------------------------------------
// Attack bias

struct BiasState {
  Vector delta_e;  // bias on the a posteriori error x_k - x_hat_k
  Vector delta_z;  // bias on the normalized residue
};

/// Linear response of the central filter to injected values D d_k (m-vectors),
/// starting from zero bias before the first measurement.
std::vector<BiasState> bias_recursion(const TargetSet& ts, const Schedule& schedule,
                                      const NoiseModel& noise,
                                      const std::vector<Vector>& injected);

// ---------------------------------------------------------------------------
// Per-sensor Kalman decomposition

struct SensorDecomposition {
  Index sensor = 0;
  Matrix T_uo;  // n x (n - n_s), orthonormal basis of the unobservable subspace
  Matrix T_o;   // n x n_s, orthonormal complement
  std::vector<LtiPair> reduced;
  double condition = 1.0;  // of [T_uo T_o]
  double R_ss = 0.0;

  Index observable_dim() const { return T_o.cols(); }
};

/// Orthonormal basis of NS of the n-step observability matrix of one sensor.
Matrix unobservable_basis(const LtiPair& pair, Index sensor, double tau_rank = -1.0);

/// True iff every pair in the set shares the same unobservable subspace for
/// `sensor`.
bool check_common_nullspace(const TargetSet& ts, Index sensor, double tau_rank = -1.0);

/// Throws Decomposition when the null spaces differ (naming the model) or a
/// reduced pair is not observable.
SensorDecomposition kalman_decomposition(const TargetSet& ts, Index sensor,
                                         const NoiseModel& noise);

std::vector<SensorDecomposition> decompose_all(const TargetSet& ts, const NoiseModel& noise);

// ---------------------------------------------------------------------------
// Local filter bank

struct LocalFilter {
  Vector zeta_prior;
  Vector zeta_post;
  Matrix K;  // n_s x 1
  double innovation_var = 0.0;
  double z = 0.0;
  bool active = true;
};

class FilterBank {
 public:
  FilterBank(const NoiseModel& noise, std::vector<SensorDecomposition> decomps,
             const Vector& x0_prior);

  /// Local updates for every active sensor at schedule index `j`, followed by
  /// the cross-covariance recursions for every active pair.
  void update(Index j, const Vector& y, Exec exec = Exec::Serial);

  /// Propagates the local estimates through A_s(j). `shift` as in
  /// central_predict.
  void predict(const Vector& shift = Vector());

  /// One local update for sensor s (gain, estimate, residue).
  void local_filter_step(Index s, Index j, double y_s);

  /// Posterior cross covariance and the next prior for the pair (s1, s2).
  /// Requires both local filters to have been updated at the current step.
  void cross_covariance_step(Index s1, Index s2);

  void deactivate(Index s);

  Index sensors() const { return static_cast<Index>(decomps_.size()); }
  bool active(Index s) const { return locals_[static_cast<std::size_t>(s)].active; }
  std::vector<Index> active_sensors() const;
  const LocalFilter& local(Index s) const { return locals_[static_cast<std::size_t>(s)]; }
  const SensorDecomposition& decomposition(Index s) const {
    return decomps_[static_cast<std::size_t>(s)];
  }
  const std::vector<SensorDecomposition>& decompositions() const { return decomps_; }
  const Matrix& cross_post(Index s1, Index s2) const { return post_[slot(s1, s2)]; }
  const Matrix& cross_prior(Index s1, Index s2) const { return prior_[slot(s1, s2)]; }

 private:
  std::size_t slot(Index s1, Index s2) const {
    return static_cast<std::size_t>(s1 * sensors() + s2);
  }

  std::vector<SensorDecomposition> decomps_;
  std::vector<LocalFilter> locals_;
  std::vector<Matrix> q_blocks_;  // Q_{s1,s2}
  Matrix R_;
  std::vector<Matrix> prior_;  // P_{k|k-1}^{s1,s2}
  std::vector<Matrix> post_;   // P_k^{s1,s2}
  Index current_ = -1;         // schedule index of the last update
};

// ---------------------------------------------------------------------------
// Fusion

struct FusionResult {
  Vector x_star;  // trailing n entries of the MVUB solution
  Matrix cov;     // trailing n x n block of (W' Q^-1 W)^-1
  Matrix q_cal;   // the stacked covariance used for this step
};

class FusionModel {
 public:
  /// Throws Filter when NS(W) != {0} for the given active set.
  FusionModel(const std::vector<SensorDecomposition>& decomps, std::vector<Index> active,
              double epsilon);

  /// True iff W built from these sensors has full column rank.
  static bool well_defined(const std::vector<SensorDecomposition>& decomps,
                           const std::vector<Index>& active);

  /// Draws eta_{k,s} ~ N(0, epsilon I) from `eta` in active-sensor order.
  FusionResult fuse(const FilterBank& bank, RandomStream& eta, Exec exec = Exec::Serial) const;

  const Matrix& W() const { return W_; }
  const std::vector<Index>& active() const { return active_; }
  double epsilon() const { return epsilon_; }

 private:
  Matrix stacked_covariance(const FilterBank& bank, Exec exec) const;

  std::vector<Index> active_;
  Matrix W_;
  std::vector<Matrix> T_o_;
  Index n_ = 0;
  double epsilon_;
};

}  // namespace mtd
