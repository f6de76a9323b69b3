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

// Attack policies.

#include <cmath>

#include <gtest/gtest.h>

#include "mtd/adversary.hpp"
#include "support.hpp"

using namespace mtd;
namespace t = mtd::testing;

namespace {

TargetSet three_model_set(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LtiPair> pairs;
  const std::vector<std::vector<double>> spectra = {
      {1.1, 0.6, -0.8}, {1.25, -0.5, 0.3}, {-1.15, 0.9, 0.4}};
  for (const auto& eig : spectra) {
    pairs.emplace_back(t::with_eigenvalues(rng, eig),
                       Matrix::NullaryExpr(4, 3, [&] { return t::gaussian(rng, 1)(0); }));
  }
  return TargetSet(pairs, 6, ScheduleKey::from_integer(seed));
}

Vector column(const AttackValues& v, Index i) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Index>(k)) = v[k](i);
  return out;
}

}  // namespace

TEST(Omniscient, ZeroSeedStateGivesZeroAttack) {
  const TargetSet ts = three_model_set(1);
  const auto v = omniscient_attack(ts, sample_schedule(ts, 20), {0, 3}, Vector::Zero(3));
  for (const auto& d : v) EXPECT_EQ(d.norm(), 0.0);
}

TEST(Omniscient, NeverIdentified) {
  const TargetSet ts = three_model_set(2);
  const Schedule sch = sample_schedule(ts, 30);
  Vector xs(3);
  xs << 0.3, -1, 0.5;
  const auto v = omniscient_attack(ts, sch, {1, 2}, xs);
  for (Index i = 0; i < 2; ++i) {
    const Vector y = column(v, i);
    for (Index tt = 0; tt < 30; ++tt) {
      const auto verdict = sensor_consistency_check(y.head(tt + 1), ts, sch, i + 1);
      EXPECT_EQ(verdict.status, VerdictStatus::Consistent) << tt;
    }
  }
}

TEST(Guessing, SingleModelIsOmniscient) {
  const TargetSet full = three_model_set(3);
  const TargetSet ts({full.pair(0)}, 4);
  Vector xs(3);
  xs << 1, 2, 3;
  RandomStream guesses(9);
  const auto g = guessing_attack(AttackerInfo::from(ts), {0, 2}, xs, guesses, 12);
  const auto o = omniscient_attack(ts, Schedule(12, 0), {0, 2}, xs);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_LT((g[k] - o[k]).norm(), 1e-12 * (1 + o[k].norm()));
}

TEST(Guessing, ReplayableAndRestartable) {
  const TargetSet ts = three_model_set(4);
  const AttackerInfo info = AttackerInfo::from(ts);
  Vector xs(3);
  xs << 0.5, 0.5, -1;
  RandomStream a(17), b(17);
  EXPECT_EQ(guessing_attack(info, {1}, xs, a, 30), guessing_attack(info, {1}, xs, b, 30));

  // With restarts every period reads C(j) x0* at its first step.
  RandomStream r(17);
  const auto restarted = guessing_attack(info, {1}, xs, r, 30, true);
  for (Index k = 0; k < 30; k += info.period) {
    bool matches_some_model = false;
    for (const auto& p : info.models) {
      matches_some_model |= std::abs(restarted[k](0) - p.C.row(1).dot(xs)) < 1e-12;
    }
    EXPECT_TRUE(matches_some_model) << k;
  }
}

TEST(Guessing, WrongConstantGuessIsIdentified) {
  // Disjoint spectra: the guessed trajectory cannot stay consistent with the
  // true model for 2n steps.
  const TargetSet ts = three_model_set(5);
  ASSERT_TRUE(validate_design_recommendations(ts).disjoint_spectra);
  Vector xs(3);
  xs << 1, -0.5, 0.25;
  for (Index truth = 0; truth < 3; ++truth) {
    for (Index guess = 0; guess < 3; ++guess) {
      if (guess == truth) continue;
      const Schedule sch(6, truth);
      const auto d = omniscient_attack(ts, Schedule(6, guess), {0}, xs);
      const auto v = sensor_consistency_check(column(d, 0), ts, sch, 0);
      EXPECT_EQ(v.status, VerdictStatus::UnambiguouslyIdentified);
      EXPECT_LE(*v.first_detection_time, 5);
    }
  }
}

TEST(PersistentBias, Profiles) {
  for (const auto& d : persistent_bias_attack({0, 1}, {}, 5)) EXPECT_EQ(d.norm(), 0.0);
  const auto v = persistent_bias_attack({0, 1, 4}, {2.0, 0.5}, 6);
  ASSERT_EQ(v.size(), 6u);
  for (Index k = 0; k < 6; ++k) {
    EXPECT_EQ(v[k].size(), 3);
    EXPECT_EQ(v[k](2), 2.0 + 0.5 * static_cast<double>(k));
  }
}

TEST(PersistentBias, DeterministicallyIdentified) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const TargetSet ts = three_model_set(1000 + seed);
    const Schedule sch = sample_schedule(ts, 3 * ts.period());
    const auto d = persistent_bias_attack({2}, {1.0, 0.0}, 3 * ts.period());
    const auto v = sensor_consistency_check(column(d, 0), ts, sch, 2);
    EXPECT_EQ(v.status, VerdictStatus::UnambiguouslyIdentified) << seed;
  }
}

TEST(CrossModelAttack, GeometricSequenceOnTwoSensors) {
  Matrix a1 = Matrix::Zero(2, 2), a2 = Matrix::Zero(2, 2);
  a1.diagonal() << 2, 3;
  a2.diagonal() << 2, 5;
  Matrix c(2, 2);
  c << 1, 1, 2, 1;
  const LtiPair p1(a1, c), p2(a2, c);
  std::vector<CrossModelWitness> witnesses;
  for (Index s = 0; s < 2; ++s) {
    const auto r = cross_model_unidentifiability(p1, p2, s);
    ASSERT_TRUE(r.exists);
    witnesses.push_back(*r.witness);
  }
  const auto v = cross_model_attack(witnesses, p1, p2, 8);
  for (Index s = 0; s < 2; ++s) {
    const Vector y = column(v, s);
    for (Index k = 1; k < 8; ++k) EXPECT_NEAR(y(k), 2 * y(k - 1), 1e-9 * std::abs(y(k)));
    for (const LtiPair& p : {p1, p2}) {
      const TargetSet ts({p}, 4);
      const auto verdict = sensor_consistency_check(y.head(4), ts, Schedule(4, 0), s);
      EXPECT_EQ(verdict.status, VerdictStatus::Consistent);
    }
  }
  EXPECT_THROW(cross_model_attack({}, p1, p2, 8), Error);
}

TEST(DominantMode, LargestEigenvalue) {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 0.5, -2, 1.5;
  const Vector v = dominant_mode(a);
  EXPECT_NEAR(std::abs(v(1)), 1.0, 1e-12);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
}
