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

#include "mtd/identifiability.hpp"
#include "mtd/rng.hpp"
#include "mtd/system_model.hpp"

namespace mtd {

/// What an admissible attacker may know: the candidate models, the switching
/// period and that each period draws a model uniformly. The schedule key,
/// states and outputs are deliberately absent.
struct AttackerInfo {
  std::vector<LtiPair> models;
  Index period = 1;

  static AttackerInfo from(const TargetSet& ts);
};

/// Attack values are |K|-vectors, one per step, in the order of K.
using AttackValues = std::vector<Vector>;

/// Worst-case baseline that reads the true schedule (not admissible):
/// d_k^s = C_k^s Phi_k x0*.
AttackValues omniscient_attack(const TargetSet& ts, const Schedule& schedule,
                               const std::vector<Index>& sensors, const Vector& x0_star);

/// Draws a model uniformly at each period boundary and propagates x0* through
/// the guessed models. With `restart_each_period` the guessed state returns
/// to x0* at every boundary; otherwise it continues.
AttackValues guessing_attack(const AttackerInfo& info, const std::vector<Index>& sensors,
                             const Vector& x0_star, RandomStream& guesses, Index horizon,
                             bool restart_each_period = false);

struct BiasProfile {
  double constant = 0.0;
  double ramp = 0.0;  // added per step
};

/// d_k^s = constant + ramp * k on every attacked sensor.
AttackValues persistent_bias_attack(const std::vector<Index>& sensors, const BiasProfile& profile,
                                    Index horizon);

/// Realified cross-model attack, one witness per attacked sensor, with the
/// first model in force. A witness whose realified sequence vanishes is
/// rotated by i once before the error propagates.
AttackValues cross_model_attack(const std::vector<CrossModelWitness>& witnesses,
                                const LtiPair& first, const LtiPair& second, Index horizon);

/// Unit vector along the eigenvector of A with the largest |lambda|
/// (real part, or imaginary part when the real part vanishes).
Vector dominant_mode(const Matrix& a);

}  // namespace mtd
