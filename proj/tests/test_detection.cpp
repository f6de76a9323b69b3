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

// Chi-square thresholds, windowed statistics and the removal loop.

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "mtd/detection.hpp"
#include "mtd/rng.hpp"

using namespace mtd;

// ===========================================================================
// Thresholds

struct QuantileCase {
  Index dof;
  double alpha;
  double gamma;
};

TEST(Threshold, MatchesHighPrecisionQuantiles) {
  // Reference values from a 30-digit evaluation of the inverse regularized
  // incomplete gamma function.
  const QuantileCase cases[] = {
      {1, 0.3173, 1.0000434271174666156},   {5, 6.9e-8, 41.660385776009739432},
      {5, 0.01, 15.086272469388990062},     {30, 4.2e-4, 62.7696241010659601},
      {1, 0.5, 0.45493642311957275194},     {2, 0.05, 5.9914645471079818758},
      {10, 1e-3, 29.588298445074418738},    {3, 4.2e-4, 18.097227635112429126},
      {30, 0.01, 50.892181311517090505},
  };
  for (const auto& c : cases) {
    const double g = threshold_from_alpha(c.dof, 1, c.alpha);
    EXPECT_NEAR(g, c.gamma, 1e-10 * c.gamma) << c.dof << " " << c.alpha;
  }
  // The window and per-step dof enter only through their product.
  EXPECT_EQ(threshold_from_alpha(5, 2, 0.01), threshold_from_alpha(10, 1, 0.01));
}

TEST(Threshold, LimitsAndRange) {
  EXPECT_LT(threshold_from_alpha(3, 1, 1 - 1e-12), 1e-3);
  EXPECT_THROW(threshold_from_alpha(5, 1, 0.0), Error);
  EXPECT_THROW(threshold_from_alpha(5, 1, 1.0), Error);
  EXPECT_THROW(threshold_from_alpha(0, 1, 0.1), Error);
  const auto cfg = DetectorConfig::from_alpha(5, 6.9e-8);
  EXPECT_NEAR(cfg.gamma, 41.660385776009739432, 1e-8);
  EXPECT_EQ(cfg.removal_policy, 2);
}

// ===========================================================================
// Chi-square test

TEST(Chi2Test, ZeroResidues) {
  const auto r = chi2_test(std::vector<double>(5, 0.0), 1e-12);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.alarm);
}

TEST(Chi2Test, ConstantResidue) {
  const double gamma = 10.0;
  for (double c : {1.0, 1.41, 1.42, 2.0}) {
    const auto r = chi2_test(std::vector<double>(5, c), gamma);
    EXPECT_DOUBLE_EQ(r.statistic, 5 * c * c);
    EXPECT_EQ(r.alarm, c * c > gamma / 5);
  }
}

TEST(Chi2Test, MonotoneInResidueAndThreshold) {
  std::vector<double> z = {0.5, -1.0, 0.2};
  const double base = chi2_test(z, 1.0).statistic;
  z[1] = -1.5;
  EXPECT_GT(chi2_test(z, 1.0).statistic, base);
  EXPECT_FALSE(chi2_test(z, 100.0).alarm);
  EXPECT_TRUE(chi2_test(z, 1.0).alarm);
}

TEST(Chi2Test, CalibratedOnDisjointWindows) {
  const double alpha = 0.01;
  const Index window = 5;
  const double gamma = threshold_from_alpha(window, 1, alpha);
  RandomStream stream(2024);
  const int windows = 100000;
  int alarms = 0;
  std::vector<double> z(window);
  for (int w = 0; w < windows; ++w) {
    for (auto& v : z) v = stream.normal();
    alarms += chi2_test(z, gamma).alarm ? 1 : 0;
  }
  const double sigma = std::sqrt(windows * alpha * (1 - alpha));
  EXPECT_LT(std::abs(alarms - windows * alpha), 3 * sigma);
}

// ===========================================================================
// Windows

TEST(WindowedStatistic, FillsThenSlides) {
  WindowedStatistic w(3);
  EXPECT_FALSE(w.push(1.0));
  EXPECT_FALSE(w.push(2.0));
  EXPECT_EQ(*w.push(3.0), 6.0);
  EXPECT_EQ(*w.push(4.0), 9.0);
  EXPECT_EQ(w.dof(), 3);
  w.reset();
  EXPECT_FALSE(w.push(1.0));
  EXPECT_THROW(WindowedStatistic(0), Error);
}

TEST(CentralDetector, DofFollowsActiveRows) {
  auto det = CentralDetector::from_alpha(3, 4.2e-4);
  EXPECT_FALSE(det.push(Vector::Zero(10)));
  EXPECT_FALSE(det.push(Vector::Zero(10)));
  // 30 dof in the window: the threshold is the 62.77 quantile.
  auto r = det.push(Vector::Constant(10, std::sqrt(6.27)));
  ASSERT_TRUE(r);
  EXPECT_FALSE(r->alarm);
  r = det.push(Vector::Constant(10, std::sqrt(6.28)));
  // Window now holds 0 + 62.7 + 62.8 which exceeds the threshold.
  EXPECT_TRUE(r->alarm);

  // After a removal the window holds 10 + 10 + 9 rows.
  auto small = CentralDetector::from_alpha(1, 4.2e-4);
  const auto s = small.push(Vector::Constant(3, std::sqrt(18.0 / 3)));
  EXPECT_FALSE(s->alarm);
  const auto t = small.push(Vector::Constant(3, std::sqrt(18.2 / 3)));
  EXPECT_TRUE(t->alarm);
}

TEST(CentralDetector, GammaMode) {
  auto det = CentralDetector::from_gamma(1, 2.0);
  EXPECT_TRUE(det.push(Vector::Constant(1, 1.5))->alarm);
  EXPECT_FALSE(det.push(Vector::Constant(1, 1.0))->alarm);
  EXPECT_THROW(CentralDetector::from_gamma(1, 0.0), Error);
}

// ===========================================================================
// Identify and remove

namespace {

std::vector<bool> flags(Index m, std::initializer_list<Index> on) {
  std::vector<bool> f(static_cast<std::size_t>(m), false);
  for (Index s : on) f[static_cast<std::size_t>(s)] = true;
  return f;
}

std::vector<Index> all(Index m) {
  std::vector<Index> a;
  for (Index s = 0; s < m; ++s) a.push_back(s);
  return a;
}

}  // namespace

TEST(IdentifyAndRemove, NoAlarms) {
  IdentificationLog log(4);
  auto active = all(4);
  for (Index k = 0; k < 10; ++k) {
    EXPECT_FALSE(identify_and_remove(log, k, flags(4, {}), 2, active, nullptr).changed());
  }
  EXPECT_EQ(active, all(4));
  EXPECT_TRUE(log.events.empty());
}

TEST(IdentifyAndRemove, TwoConsecutiveAlarms) {
  IdentificationLog log(10);
  auto active = all(10);
  identify_and_remove(log, 12, flags(10, {6}), 2, active, nullptr);
  EXPECT_EQ(active.size(), 10u);
  const auto out = identify_and_remove(log, 13, flags(10, {6}), 2, active, nullptr);
  ASSERT_EQ(out.removed, std::vector<Index>{6});
  EXPECT_EQ(active.size(), 9u);
  EXPECT_EQ(*log.sensors[6].first_alarm, 12);
  EXPECT_EQ(*log.sensors[6].removal, 13);
  EXPECT_GE(*log.sensors[6].removal, *log.sensors[6].first_alarm + 1);
  ASSERT_EQ(log.events.size(), 3u);
  EXPECT_EQ(log.events[2].kind, EventKind::Removed);
}

TEST(IdentifyAndRemove, InterruptedAlarmsResetTheCount) {
  IdentificationLog log(3);
  auto active = all(3);
  identify_and_remove(log, 0, flags(3, {1}), 2, active, nullptr);
  identify_and_remove(log, 1, flags(3, {}), 2, active, nullptr);
  identify_and_remove(log, 2, flags(3, {1}), 2, active, nullptr);
  EXPECT_EQ(active.size(), 3u);
  EXPECT_EQ(log.sensors[1].alarms, 2);
  EXPECT_FALSE(log.sensors[0].first_alarm);
}

TEST(IdentifyAndRemove, GuardRefusesOnceAndLogsOnce) {
  IdentificationLog log(3);
  auto active = all(3);
  // Sensor 2 may never leave.
  const ObservabilityGuard guard = [](const std::vector<Index>& set) {
    return std::find(set.begin(), set.end(), 2) != set.end();
  };
  for (Index k = 0; k < 4; ++k) identify_and_remove(log, k, flags(3, {2}), 2, active, guard);
  EXPECT_EQ(active.size(), 3u);
  int refusals = 0;
  for (const auto& e : log.events) refusals += e.kind == EventKind::RemovalRefused ? 1 : 0;
  EXPECT_EQ(refusals, 1);
  EXPECT_FALSE(log.sensors[2].removal);
}

TEST(IdentifyAndRemove, InactiveSensorsIgnored) {
  IdentificationLog log(3);
  std::vector<Index> active = {0, 2};
  identify_and_remove(log, 0, flags(3, {1}), 1, active, nullptr);
  EXPECT_EQ(log.sensors[1].alarms, 0);
  EXPECT_EQ(active.size(), 2u);
}

TEST(IdentificationLog, CentralAlarms) {
  IdentificationLog log(2);
  log.record_central(3, false);
  log.record_central(4, true);
  log.record_central(5, true);
  EXPECT_EQ(*log.first_central_alarm, 4);
  ASSERT_EQ(log.events.size(), 2u);
  EXPECT_EQ(log.events[0].sensor, -1);
  EXPECT_STREQ(to_string(EventKind::CentralAlarm), "central_alarm");
}
