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

#include "mtd/jordan.hpp"
#include "mtd/system_model.hpp"

namespace mtd {

enum class StackKind {
  FixedPair,        // [C^S; C^S A; ...; C^S A^(t-1)]
  Schedule,         // rows C_k^s Phi_k along the true schedule
  GuessedSequence,  // rows C^s(l_k) prod A(l_j) along a guessed sequence
};

struct ObservabilityStack {
  Matrix rows;
  StackKind kind = StackKind::FixedPair;
  std::vector<Index> sensors;
  Index horizon = 0;  // number of block rows
};

/// Fixed-pair stack with `t` block rows (k = 0..t-1).
ObservabilityStack observability_matrix(const LtiPair& pair, const std::vector<Index>& sensors,
                                        Index t);

/// Schedule-dependent stack for one sensor with rows k = 0..t.
ObservabilityStack time_varying_observability(const TargetSet& ts, const Schedule& schedule,
                                              Index sensor, Index t);

/// Same construction along an attacker's guessed configuration sequence.
ObservabilityStack guessed_observability(const TargetSet& ts, const Schedule& guessed,
                                         Index sensor, Index t);

/// True iff (A, C) stays observable after removing every subset of r rows.
bool is_sparse_observable(const LtiPair& pair, Index removed);

/// Largest r for which the pair is r-sparse observable, or -1 when the pair
/// is not observable at all.
Index sparse_observability_margin(const LtiPair& pair);

enum class VerdictStatus { Consistent, UnambiguouslyIdentified };

struct IdentVerdict {
  Index sensor = 0;
  VerdictStatus status = VerdictStatus::Consistent;
  std::optional<Vector> witness;               // x0* for consistent verdicts
  std::optional<Index> first_detection_time;   // for identified verdicts
  double residual = 0.0;                       // max-abs least-squares residual at t
  double tolerance = 0.0;
};

/// Least-squares consistency of one sensor stream y_0..y_t with the clean
/// time-varying system. Tolerance tau_rel * (1 + ||y||_inf).
IdentVerdict sensor_consistency_check(const Vector& y, const TargetSet& ts,
                                      const Schedule& schedule, Index sensor,
                                      double tau_rel = 1e-8);

/// null([O_guess O_true]) > null(O_guess) + null(O_true) over rows 0..t.
bool guess_attack_feasibility(const TargetSet& ts, const Schedule& guessed,
                              const Schedule& truth, Index sensor, Index t,
                              double tau_rank = -1.0);

/// Ground truth by image intersection: exists x1, x2 with O1 x1 = O2 x2 != 0,
/// stacks over rows k = 0..t. Intended for small n.
bool brute_force_unidentifiability_oracle(const LtiPair& first, const LtiPair& second,
                                          Index sensor, Index t);

struct CrossModelOptions {
  JordanOptions jordan;
  /// Relative rank cutoff for the V stacks (scaled by max(sigma_max, ||c|| * max ||v||)).
  double v_rank_tol = 1e-6;
};

struct CrossModelWitness {
  Index sensor = 0;
  Complex lambda;
  CVector alpha1;
  CVector alpha2;
  CVector x0_first;   // chain combination for model 1
  CVector x0_second;  // chain combination for model 2
};

struct CrossModelResult {
  bool exists = false;
  std::optional<CrossModelWitness> witness;
  std::vector<Complex> shared_eigenvalues;
};

/// Eigenstructure test for an attack on `sensor` generated with the second
/// model while the first is in force (both constant).
CrossModelResult cross_model_unidentifiability(const LtiPair& first, const LtiPair& second,
                                               Index sensor, const CrossModelOptions& opts = {});

struct CrossModelAttack {
  Vector values;          // d_0..d_{horizon-1}
  double model_mismatch;  // max |model 1 - model 2| before realification
};

/// Realified attack sequence from a witness. Throws DegenerateWitness when
/// the realified sequence is identically zero.
CrossModelAttack construct_cross_model_attack(const CrossModelWitness& witness,
                                              const LtiPair& first, const LtiPair& second,
                                              Index horizon);

}  // namespace mtd
