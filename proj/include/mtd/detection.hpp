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

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "mtd/core.hpp"

namespace mtd {

/// Quantile of chi-squared with window * dof_per_step degrees of freedom at
/// 1 - alpha. Throws InvalidArgument unless 0 < alpha < 1.
double threshold_from_alpha(Index window, Index dof_per_step, double alpha);

struct DetectorConfig {
  Index window = 5;
  double gamma = 0.0;
  Index removal_policy = 2;  // consecutive alarms before removal

  static DetectorConfig from_alpha(Index window, double alpha, Index removal_policy = 2);
};

struct Chi2Result {
  bool alarm = false;
  double statistic = 0.0;
};

/// Sum of squares over the given residues compared against gamma.
Chi2Result chi2_test(const std::vector<double>& residues, double gamma);

/// Sliding window of per-step squared residue norms. A statistic exists once
/// `window` steps have been pushed.
class WindowedStatistic {
 public:
  explicit WindowedStatistic(Index window);

  /// Adds one step; returns the windowed sum once the window is full.
  std::optional<double> push(double squared_norm, Index dof = 1);
  /// Degrees of freedom summed over the current window.
  Index dof() const;
  void reset();

 private:
  Index window_;
  std::deque<std::pair<double, Index>> steps_;
};

/// Centralized detector whose dof follows the number of active rows.
/// Thresholds are cached per dof in alpha mode.
class CentralDetector {
 public:
  static CentralDetector from_alpha(Index window, double alpha);
  static CentralDetector from_gamma(Index window, double gamma);

  /// Returns the statistic and alarm once the window is full.
  std::optional<Chi2Result> push(const Vector& z);
  Index window() const { return window_; }

 private:
  CentralDetector(Index window, double alpha, double gamma);
  double threshold(Index dof);

  Index window_;
  double alpha_;  // <= 0 in gamma mode
  double gamma_;
  WindowedStatistic stat_;
  std::map<Index, double> cache_;
};

enum class EventKind { Alarm, Removed, CentralAlarm, RemovalRefused };

const char* to_string(EventKind kind);

struct Event {
  Index step = 0;
  Index sensor = -1;  // -1 for system-level events
  EventKind kind = EventKind::Alarm;
};

struct SensorLog {
  std::optional<Index> first_alarm;
  std::optional<Index> removal;
  Index alarms = 0;
  Index consecutive = 0;
  bool refusal_reported = false;
};

struct IdentificationLog {
  explicit IdentificationLog(Index sensors = 0)
      : sensors(static_cast<std::size_t>(sensors)) {}

  std::vector<SensorLog> sensors;
  std::optional<Index> first_central_alarm;
  std::vector<Event> events;

  void record_central(Index step, bool alarm);
};

/// Predicate deciding whether the given active set still yields NS(W) = {0}.
using ObservabilityGuard = std::function<bool(const std::vector<Index>&)>;

struct RemovalOutcome {
  std::vector<Index> removed;
  std::vector<Index> refused;
  bool changed() const { return !removed.empty(); }
};

/// Records alarms for the active sensors (`alarms[s]` is ignored for inactive
/// ones) and removes every sensor whose consecutive alarm count reaches
/// `removal_policy`, in increasing index order, unless `guard` rejects the
/// reduced set. `active` is updated in place.
RemovalOutcome identify_and_remove(IdentificationLog& log, Index step,
                                   const std::vector<bool>& alarms, Index removal_policy,
                                   std::vector<Index>& active, const ObservabilityGuard& guard);

}  // namespace mtd
