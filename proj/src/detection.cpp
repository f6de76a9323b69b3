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

#include "mtd/detection.hpp"

#include <algorithm>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

namespace mtd {

double threshold_from_alpha(Index window, Index dof_per_step, double alpha) {
  require(window >= 1 && dof_per_step >= 1, ErrorKind::InvalidArgument,
          "threshold_from_alpha: window and dof must be positive");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument,
          "threshold_from_alpha: alpha must lie in (0, 1)");
  const boost::math::chi_squared dist(static_cast<double>(window * dof_per_step));
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

DetectorConfig DetectorConfig::from_alpha(Index window, double alpha, Index removal_policy) {
  DetectorConfig cfg;
  cfg.window = window;
  cfg.gamma = threshold_from_alpha(window, 1, alpha);
  cfg.removal_policy = removal_policy;
  return cfg;
}

Chi2Result chi2_test(const std::vector<double>& residues, double gamma) {
  Chi2Result r;
  for (double z : residues) r.statistic += z * z;
  r.alarm = r.statistic > gamma;
  return r;
}

WindowedStatistic::WindowedStatistic(Index window) : window_(window) {
  require(window >= 1, ErrorKind::InvalidArgument, "window must be positive");
}

std::optional<double> WindowedStatistic::push(double squared_norm, Index dof) {
  steps_.emplace_back(squared_norm, dof);
  if (static_cast<Index>(steps_.size()) > window_) steps_.pop_front();
  if (static_cast<Index>(steps_.size()) < window_) return std::nullopt;
  // Summed afresh each step so the statistic carries no accumulated drift.
  double sum = 0.0;
  for (const auto& s : steps_) sum += s.first;
  return sum;
}

Index WindowedStatistic::dof() const {
  Index d = 0;
  for (const auto& s : steps_) d += s.second;
  return d;
}

void WindowedStatistic::reset() { steps_.clear(); }

CentralDetector::CentralDetector(Index window, double alpha, double gamma)
    : window_(window), alpha_(alpha), gamma_(gamma), stat_(window) {}

CentralDetector CentralDetector::from_alpha(Index window, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidArgument,
          "central detector: alpha must lie in (0, 1)");
  return CentralDetector(window, alpha, 0.0);
}

CentralDetector CentralDetector::from_gamma(Index window, double gamma) {
  require(gamma > 0.0, ErrorKind::InvalidArgument, "central detector: gamma must be positive");
  return CentralDetector(window, 0.0, gamma);
}

double CentralDetector::threshold(Index dof) {
  if (alpha_ <= 0.0) return gamma_;
  auto it = cache_.find(dof);
  if (it == cache_.end()) it = cache_.emplace(dof, threshold_from_alpha(1, dof, alpha_)).first;
  return it->second;
}

std::optional<Chi2Result> CentralDetector::push(const Vector& z) {
  const auto sum = stat_.push(z.squaredNorm(), z.size());
  if (!sum) return std::nullopt;
  Chi2Result r;
  r.statistic = *sum;
  r.alarm = r.statistic > threshold(stat_.dof());
  return r;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Alarm: return "alarm";
    case EventKind::Removed: return "removed";
    case EventKind::CentralAlarm: return "central_alarm";
    case EventKind::RemovalRefused: return "removal_refused";
  }
  return "unknown";
}

void IdentificationLog::record_central(Index step, bool alarm) {
  if (!alarm) return;
  if (!first_central_alarm) first_central_alarm = step;
  events.push_back({step, -1, EventKind::CentralAlarm});
}

RemovalOutcome identify_and_remove(IdentificationLog& log, Index step,
                                   const std::vector<bool>& alarms, Index removal_policy,
                                   std::vector<Index>& active, const ObservabilityGuard& guard) {
  require(removal_policy >= 1, ErrorKind::InvalidArgument, "removal_policy must be >= 1");
  require(alarms.size() == log.sensors.size(), ErrorKind::Dimension,
          "identify_and_remove: one alarm flag per sensor required");
  RemovalOutcome out;
  std::vector<Index> candidates;
  for (Index s : active) {
    SensorLog& sl = log.sensors[static_cast<std::size_t>(s)];
    if (alarms[static_cast<std::size_t>(s)]) {
      ++sl.alarms;
      ++sl.consecutive;
      if (!sl.first_alarm) sl.first_alarm = step;
      log.events.push_back({step, s, EventKind::Alarm});
      if (sl.consecutive >= removal_policy) candidates.push_back(s);
    } else {
      sl.consecutive = 0;
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (Index s : candidates) {
    std::vector<Index> reduced;
    for (Index a : active) {
      if (a != s) reduced.push_back(a);
    }
    SensorLog& sl = log.sensors[static_cast<std::size_t>(s)];
    if (!reduced.empty() && (!guard || guard(reduced))) {
      active = std::move(reduced);
      sl.removal = step;
      log.events.push_back({step, s, EventKind::Removed});
      out.removed.push_back(s);
    } else {
      out.refused.push_back(s);
      if (!sl.refusal_reported) {
        sl.refusal_reported = true;
        log.events.push_back({step, s, EventKind::RemovalRefused});
      }
    }
  }
  return out;
}

}  // namespace mtd
