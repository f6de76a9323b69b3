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

// Plant model, schedules, simulation and design recommendations.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mtd/system_model.hpp"
#include "support.hpp"

using namespace mtd;
namespace t = mtd::testing;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

// ===========================================================================
// Attack matrix

TEST(AttackMatrix, SingleSensor) {
  const AttackSet a = build_attack_matrix({1}, 3);
  Matrix expected(3, 1);
  expected << 0, 1, 0;
  EXPECT_EQ(a.D, expected);
}

TEST(AttackMatrix, EmptySet) {
  const AttackSet a = build_attack_matrix({}, 3);
  EXPECT_EQ(a.D.rows(), 3);
  EXPECT_EQ(a.D.cols(), 0);
}

TEST(AttackMatrix, OrderFollowsK) {
  const AttackSet a = build_attack_matrix({2, 0}, 3);
  Matrix expected(3, 2);
  expected << 0, 1, 0, 0, 1, 0;
  EXPECT_EQ(a.D, expected);
  EXPECT_EQ(a.D.transpose() * a.D, Matrix::Identity(2, 2));
  EXPECT_TRUE(a.contains(2));
  EXPECT_FALSE(a.contains(1));
}

TEST(AttackMatrix, RejectsDuplicatesAndRange) {
  try {
    build_attack_matrix({1, 1}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidAttackSet);
  }
  EXPECT_THROW(build_attack_matrix({3}, 3), Error);
  EXPECT_THROW(build_attack_matrix({-1}, 3), Error);
}

// ===========================================================================
// Schedules

TEST(Schedule, SingleConfiguration) {
  const TargetSet ts({LtiPair(scalar(2), scalar(1))}, 1, ScheduleKey::from_integer(5));
  EXPECT_EQ(sample_schedule(ts, 5), Schedule(5, 0));
}

TEST(Schedule, ConstantWithinBlocks) {
  std::vector<LtiPair> pairs(3, LtiPair(scalar(2), scalar(1)));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TargetSet ts(pairs, 2, ScheduleKey::from_integer(seed));
    const Schedule s = sample_schedule(ts, 7);
    EXPECT_EQ(s[0], s[1]);
    EXPECT_EQ(s[2], s[3]);
    EXPECT_EQ(s[4], s[5]);
    for (Index j : s) EXPECT_LT(j, 3);
  }
}

TEST(Schedule, ReproducibleAndKeyDependent) {
  std::vector<LtiPair> pairs(7, LtiPair(scalar(2), scalar(1)));
  const TargetSet a(pairs, 3, ScheduleKey::from_integer(1));
  const TargetSet b(pairs, 3, ScheduleKey::from_integer(2));
  EXPECT_EQ(sample_schedule(a, 90), sample_schedule(a, 90));
  EXPECT_NE(sample_schedule(a, 90), sample_schedule(b, 90));
  // A longer horizon extends the same sequence.
  const Schedule s30 = sample_schedule(a, 30);
  const Schedule s90 = sample_schedule(a, 90);
  EXPECT_TRUE(std::equal(s30.begin(), s30.end(), s90.begin()));
}

TEST(Schedule, BlockFrequenciesAreUniform) {
  // Chi-square goodness of fit over 10^5 re-keyed schedules of four blocks.
  std::vector<LtiPair> pairs(7, LtiPair(scalar(2), scalar(1)));
  const Index period = 3;
  const int draws = 100000;
  std::vector<std::vector<double>> counts(4, std::vector<double>(7, 0.0));
  for (int i = 0; i < draws; ++i) {
    const TargetSet ts(pairs, period, ScheduleKey::from_integer(static_cast<std::uint64_t>(i)));
    const Schedule s = sample_schedule(ts, 4 * period);
    for (int b = 0; b < 4; ++b) counts[b][static_cast<std::size_t>(s[b * period])] += 1.0;
  }
  const double p = 1.0 / 7.0;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int b = 0; b < 4; ++b) {
    for (double c : counts[b]) EXPECT_LT(std::abs(c - draws * p), 3.0 * sigma + 1.0);
  }
}

// ===========================================================================
// Deterministic simulation

TEST(SimulateDeterministic, IdentityDynamics) {
  const TargetSet ts({LtiPair(Matrix::Identity(2, 2), Matrix::Identity(2, 2))}, 1);
  Vector x0(2);
  x0 << 1, 2;
  const AttackSet none = build_attack_matrix({}, 2);
  const Trajectory tr = simulate_deterministic(ts, Schedule(3, 0), x0, none, no_attack(0));
  ASSERT_EQ(tr.length(), 3);
  for (const Vector& y : tr.outputs) EXPECT_EQ(y, x0);
}

TEST(SimulateDeterministic, ScalarGeometric) {
  const TargetSet ts({LtiPair(scalar(2), scalar(1))}, 1);
  const Trajectory tr = simulate_deterministic(ts, Schedule(5, 0), Vector::Ones(1),
                                               build_attack_matrix({}, 1), no_attack(0));
  for (Index k = 0; k < 5; ++k) EXPECT_EQ(tr.outputs[k](0), std::pow(2.0, k));
}

TEST(SimulateDeterministic, ConcealedInitialStateAttack) {
  // d_k = C^s A^k x0* makes sensor s look like the clean run from x0 + x0*.
  std::mt19937_64 rng(17);
  const Matrix a = Matrix::Random(3, 3) * 0.8;
  const Matrix c = Matrix::Random(2, 3);
  const TargetSet ts({LtiPair(a, c)}, 1);
  const Vector x0 = t::gaussian(rng, 3);
  const Vector xs = t::gaussian(rng, 3);
  std::vector<Vector> d;
  Vector phi = xs;
  for (int k = 0; k < 10; ++k) {
    d.push_back((c.row(1) * phi).eval());
    phi = a * phi;
  }
  const Schedule sch(10, 0);
  const auto attacked =
      simulate_deterministic(ts, sch, x0, build_attack_matrix({1}, 2), attack_from_sequence(d));
  const auto shifted =
      simulate_deterministic(ts, sch, x0 + xs, build_attack_matrix({}, 2), no_attack(0));
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(attacked.outputs[k](1), shifted.outputs[k](1), 1e-10);
  }
}

TEST(SimulateDeterministic, Linearity) {
  std::mt19937_64 rng(23);
  std::vector<LtiPair> pairs;
  for (int j = 0; j < 3; ++j) pairs.emplace_back(Matrix::Random(3, 3), Matrix::Random(4, 3));
  const TargetSet ts(pairs, 2, ScheduleKey::from_integer(3));
  const Schedule sch = sample_schedule(ts, 12);
  const AttackSet att = build_attack_matrix({0, 2}, 4);
  std::vector<Vector> d1, d2, d12;
  for (int k = 0; k < 12; ++k) {
    d1.push_back(t::gaussian(rng, 2));
    d2.push_back(t::gaussian(rng, 2));
    d12.push_back(d1.back() + d2.back());
  }
  const Vector x1 = t::gaussian(rng, 3), x2 = t::gaussian(rng, 3);
  const auto r1 = simulate_deterministic(ts, sch, x1, att, attack_from_sequence(d1));
  const auto r2 = simulate_deterministic(ts, sch, x2, att, attack_from_sequence(d2));
  const auto r12 = simulate_deterministic(ts, sch, x1 + x2, att, attack_from_sequence(d12));
  for (int k = 0; k < 12; ++k) {
    const Vector sum = r1.outputs[k] + r2.outputs[k];
    EXPECT_LT((r12.outputs[k] - sum).norm(), 1e-10 * (1 + sum.norm()));
  }
}

TEST(SimulateDeterministic, DimensionMismatch) {
  const TargetSet ts({LtiPair(scalar(2), scalar(1))}, 1);
  EXPECT_THROW(simulate_deterministic(ts, Schedule(3, 0), Vector::Ones(2),
                                      build_attack_matrix({}, 1), no_attack(0)),
               Error);
}

// ===========================================================================
// Stochastic simulation

TEST(SimulateStochastic, VanishingNoiseLimit) {
  const Matrix a = diag({0.9, 1.1});
  const TargetSet ts({LtiPair(a, Matrix::Identity(2, 2))}, 1);
  NoiseModel noise{Matrix::Zero(2, 2), 1e-12 * Matrix::Identity(2, 2), Vector::Ones(2),
                   Matrix::Zero(2, 2)};
  RandomStream stream(5);
  const AttackSet none = build_attack_matrix({}, 2);
  const auto st = simulate_stochastic(ts, Schedule(20, 0), noise, none, no_attack(0), stream);
  const auto det = simulate_deterministic(ts, Schedule(20, 0), Vector::Ones(2), none,
                                          no_attack(0));
  for (int k = 0; k < 20; ++k) EXPECT_LT((st.outputs[k] - det.outputs[k]).norm(), 1e-4);
}

TEST(SimulateStochastic, StationaryVariance) {
  // x_{k+1} = 0.5 x_k + w_k with Q = 0.75 has stationary variance 1.
  const TargetSet ts({LtiPair(scalar(0.5), scalar(1))}, 1);
  NoiseModel noise{scalar(0.75), scalar(1.0), Vector::Zero(1), scalar(1.0)};
  RandomStream stream(99);
  const auto tr = simulate_stochastic(ts, Schedule(100000, 0), noise, build_attack_matrix({}, 1),
                                      no_attack(0), stream);
  std::vector<double> xs;
  for (const Vector& x : tr.states) xs.push_back(x(0));
  EXPECT_NEAR(t::mean_var(xs).second, 1.0, 0.03);
}

TEST(SimulateStochastic, SensorNoiseCovariance) {
  const TargetSet ts({LtiPair(Matrix::Identity(2, 2), Matrix::Identity(2, 2))}, 1);
  const double s2 = 0.25;
  NoiseModel noise{Matrix::Zero(2, 2), s2 * Matrix::Identity(2, 2), Vector::Zero(2),
                   Matrix::Zero(2, 2)};
  RandomStream stream(7);
  const auto tr = simulate_stochastic(ts, Schedule(100000, 0), noise,
                                      build_attack_matrix({}, 2), no_attack(0), stream);
  Matrix cov = Matrix::Zero(2, 2);
  for (Index k = 0; k < tr.length(); ++k) {
    const Vector v = tr.outputs[k] - tr.states[k];
    cov += v * v.transpose();
  }
  cov /= static_cast<double>(tr.length());
  EXPECT_NEAR(cov(0, 0), s2, 0.05 * s2);
  EXPECT_NEAR(cov(1, 1), s2, 0.05 * s2);
  EXPECT_NEAR(cov(0, 1), 0.0, 0.05 * s2);
}

TEST(SimulateStochastic, FixedSeedIsBitIdentical) {
  const TargetSet ts({LtiPair(diag({0.9, 0.5}), Matrix::Ones(1, 2))}, 1);
  NoiseModel noise{Matrix::Identity(2, 2), scalar(1), Vector::Zero(2), Matrix::Identity(2, 2)};
  RandomStream s1(4), s2(4);
  const AttackSet none = build_attack_matrix({}, 1);
  const auto a = simulate_stochastic(ts, Schedule(50, 0), noise, none, no_attack(0), s1);
  const auto b = simulate_stochastic(ts, Schedule(50, 0), noise, none, no_attack(0), s2);
  for (int k = 0; k < 50; ++k) EXPECT_EQ(a.outputs[k], b.outputs[k]);
}

TEST(NoiseModel, RejectsIndefiniteR) {
  NoiseModel noise{Matrix::Zero(1, 1), scalar(0.0), Vector::Zero(1), scalar(1.0)};
  try {
    noise.validate(1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Model);
  }
}

// ===========================================================================
// Design recommendations

TEST(Recommendations, SingletonFailsScheduleCheck) {
  const TargetSet ts({LtiPair(2 * Matrix::Identity(2, 2), Matrix::Identity(2, 2))}, 4);
  const auto r = validate_design_recommendations(ts);
  EXPECT_FALSE(r.schedule_nondegenerate);
  EXPECT_TRUE(r.disjoint_spectra);
}

TEST(Recommendations, SharedEigenvalue) {
  const TargetSet ts({LtiPair(diag({2, 3}), Matrix::Ones(1, 2)),
                      LtiPair(diag({3, 5}), Matrix::Ones(1, 2))},
                     4);
  const auto r = validate_design_recommendations(ts);
  EXPECT_FALSE(r.disjoint_spectra);
  EXPECT_NEAR(r.min_cross_eig_distance, 0.0, 1e-12);
  EXPECT_TRUE(r.all_observable);
}

TEST(Recommendations, ZeroEigenvalueAndShortPeriod) {
  const TargetSet ts({LtiPair(diag({2, 3}), Matrix::Ones(1, 2)),
                      LtiPair(diag({0.5, 0}), Matrix::Ones(1, 2))},
                     3);
  const auto r = validate_design_recommendations(ts);
  EXPECT_FALSE(r.no_zero_eigenvalue);
  EXPECT_FALSE(r.period_long_enough);
  EXPECT_TRUE(r.disjoint_spectra);
}

TEST(Recommendations, UnobservablePair) {
  Matrix c(1, 2);
  c << 1, 0;
  const TargetSet ts({LtiPair(diag({2, 3}), c), LtiPair(diag({4, 5}), Matrix::Ones(1, 2))}, 4);
  const auto r = validate_design_recommendations(ts);
  EXPECT_FALSE(r.all_observable);
  EXPECT_FALSE(r.observable[0]);
  EXPECT_TRUE(r.observable[1]);
  EXPECT_FALSE(r.all_pass());
}
