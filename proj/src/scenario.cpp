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

#include "mtd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

namespace mtd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

AttackValues build_attack(const ScenarioConfig& cfg, const TargetSet& ts,
                          const Schedule& schedule, RandomStream& guesses) {
  const AttackSpec& a = cfg.attack;
  const auto horizon = static_cast<Index>(schedule.size());
  auto x0_star = [&] {
    Vector x = a.x0_star ? *a.x0_star : dominant_mode(ts.pair(0).A);
    require(x.size() == ts.n(), ErrorKind::Config, "attack.x0star: must have n entries");
    return Vector(a.scale * x);
  };
  switch (a.kind) {
    case AttackKind::None:
      return AttackValues(static_cast<std::size_t>(horizon), Vector::Zero(0));
    case AttackKind::Omniscient:
      return omniscient_attack(ts, schedule, a.sensors, x0_star());
    case AttackKind::Guessing:
      return guessing_attack(AttackerInfo::from(ts), a.sensors, x0_star(), guesses, horizon,
                             a.restart_each_period);
    case AttackKind::PersistentBias:
      return persistent_bias_attack(
          a.sensors, BiasProfile{a.scale * a.profile.constant, a.scale * a.profile.ramp},
          horizon);
    case AttackKind::CrossModel: {
      const LtiPair& first = ts.pair(a.model_in_force);
      const LtiPair& second = ts.pair(a.attacker_model);
      std::vector<CrossModelWitness> witnesses;
      for (Index s : a.sensors) {
        const CrossModelResult r = cross_model_unidentifiability(first, second, s);
        require(r.exists, ErrorKind::NotApplicable,
                "cross-model attack: no witness for sensor " + std::to_string(s + 1));
        witnesses.push_back(*r.witness);
      }
      AttackValues v = cross_model_attack(witnesses, first, second, horizon);
      for (auto& d : v) d *= a.scale;
      return v;
    }
  }
  return {};
}

Schedule build_schedule(const ScenarioConfig& cfg, const TargetSet& ts, Index horizon) {
  if (cfg.attack.kind == AttackKind::CrossModel) {
    require(cfg.attack.model_in_force < ts.size() && cfg.attack.attacker_model < ts.size(),
            ErrorKind::Config, "attack.models: index exceeds the number of models");
    return Schedule(static_cast<std::size_t>(horizon), cfg.attack.model_in_force);
  }
  return sample_schedule(ts, horizon);
}

double sensor_gamma(const DetectorSpec& d) {
  return d.gamma ? *d.gamma : threshold_from_alpha(d.window, 1, d.alpha);
}

}  // namespace

Index effective_period(const ScenarioConfig& cfg, Index n) {
  return cfg.schedule.period > 0 ? cfg.schedule.period : 2 * n;
}

Index effective_horizon(const ScenarioConfig& cfg, Index n) {
  return cfg.horizon > 0 ? cfg.horizon : 20 * effective_period(cfg, n);
}

ResolvedSystem resolve_system(const ScenarioConfig& cfg) {
  std::vector<LtiPair> pairs;
  NoiseModel noise;
  if (cfg.system.generated) {
    GeneratedSystem g = generate_example_system(cfg.system.generator);
    pairs = std::move(g.pairs);
    noise = std::move(g.noise);
  } else {
    pairs = cfg.system.pairs;
    noise = cfg.system.noise;
  }
  const Index n = pairs.front().n();
  TargetSet ts(std::move(pairs), effective_period(cfg, n), cfg.schedule.key);
  noise.validate(ts.n(), ts.m());
  for (Index s : cfg.attack.sensors) {
    require(s < ts.m(), ErrorKind::Config,
            "attack.sensors: sensor " + std::to_string(s + 1) + " exceeds m");
  }
  return {std::move(ts), std::move(noise)};
}

bool RunReport::all_attacked_removed() const {
  if (attacked.empty()) return false;
  return std::all_of(attacked.begin(), attacked.end(), [&](Index s) {
    return log.sensors[static_cast<std::size_t>(s)].removal.has_value();
  });
}

Index RunReport::clean_removed() const {
  Index count = 0;
  for (std::size_t s = 0; s < log.sensors.size(); ++s) {
    const bool attacked_s =
        std::find(attacked.begin(), attacked.end(), static_cast<Index>(s)) != attacked.end();
    if (!attacked_s && log.sensors[s].removal) ++count;
  }
  return count;
}

std::optional<Index> RunReport::identification_time() const {
  if (!all_attacked_removed()) return std::nullopt;
  Index latest = 0;
  for (Index s : attacked) {
    latest = std::max(latest, *log.sensors[static_cast<std::size_t>(s)].removal);
  }
  return latest;
}

RunReport run_trial(const ScenarioConfig& cfg, const ResolvedSystem& sys, Index trial,
                    const RunOptions& opts) {
  const auto utrial = static_cast<std::uint64_t>(trial);
  const TargetSet ts = sys.targets.with_key(cfg.schedule.key.derive(utrial));
  const NoiseModel& noise = sys.noise;
  const Index n = ts.n();
  const Index m = ts.m();
  const Index horizon = effective_horizon(cfg, n);
  const bool tracking = cfg.noise.frame == Frame::Tracking;

  RandomStream noise_stream = RandomStream::derive(cfg.noise.seed,
                                                   {stream_tag::kProcessNoise, utrial});
  RandomStream eta = RandomStream::derive(cfg.noise.seed, {stream_tag::kFusionNoise, utrial});
  RandomStream guesses = RandomStream::derive(cfg.attack.seed, {stream_tag::kAttackGuess, utrial});

  const Schedule schedule = build_schedule(cfg, ts, horizon);
  const AttackValues attack_values = build_attack(cfg, ts, schedule, guesses);
  const AttackSet attack = build_attack_matrix(cfg.attack.kind == AttackKind::None
                                                   ? std::vector<Index>{}
                                                   : cfg.attack.sensors,
                                               m);

  const std::vector<SensorDecomposition> decomps = decompose_all(ts, noise);
  NoiseSampler sampler(noise, noise_stream);
  const Vector deviation = sampler.initial_deviation();
  Vector x = noise.x0_mean + deviation;
  const Vector prior = tracking ? Vector(-deviation) : noise.x0_mean;

  CentralFilterState central = central_filter_init(noise, prior);
  FilterBank bank(noise, decomps, prior);
  std::vector<Index> active(static_cast<std::size_t>(m));
  for (Index s = 0; s < m; ++s) active[static_cast<std::size_t>(s)] = s;
  FusionModel fusion(decomps, active, cfg.estimator.epsilon);

  RunReport report;
  report.trial = trial;
  report.attacked = attack.sensors;
  report.log = IdentificationLog(m);
  report.windows.assign(static_cast<std::size_t>(m), 0);
  report.gamma = sensor_gamma(cfg.detector);
  std::vector<WindowedStatistic> local_stats(static_cast<std::size_t>(m),
                                             WindowedStatistic(cfg.detector.window));
  CentralDetector central_detector =
      cfg.detector.central_gamma
          ? CentralDetector::from_gamma(cfg.detector.central_window, *cfg.detector.central_gamma)
          : CentralDetector::from_alpha(cfg.detector.central_window, cfg.detector.central_alpha);
  const Index policy =
      cfg.detector.remove ? cfg.detector.removal_policy : std::numeric_limits<Index>::max();
  const ObservabilityGuard guard = [&](const std::vector<Index>& set) {
    return FusionModel::well_defined(decomps, set);
  };
  const Exec exec = opts.exec;

  double sum_central = 0.0;
  double sum_fused = 0.0;
  report.steps.reserve(static_cast<std::size_t>(horizon));
  for (Index k = 0; k < horizon; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const Index j = schedule[uk];
    const LtiPair& p = ts.pair(j);
    const Vector injected = attack.inject(attack_values[uk]);
    const Vector v = sampler.sensor();
    const Vector w = sampler.process();
    // In the tracking frame every estimate is stored relative to the true
    // state, so the measurement reduces to noise plus injection.
    const Vector y = tracking ? Vector(v + injected) : Vector(p.C * x + v + injected);

    StepMetrics sm;
    sm.step = k;
    sm.schedule_index = j;
    sm.trace_P = central.P_prior.trace();

    central_update(central, p, y, noise.R, active);
    const Vector e_central = tracking ? Vector(-central.x_post) : Vector(x - central.x_post);
    if (const auto r = central_detector.push(central.z)) {
      sm.central_stat = r->statistic;
      report.log.record_central(k, r->alarm);
    }

    bank.update(j, y, exec);
    const FusionResult fused = fusion.fuse(bank, eta, exec);
    const Vector e_fused = tracking ? Vector(-fused.x_star) : Vector(x - fused.x_star);
    sm.err_central = e_central.norm();
    sm.err_fused = e_fused.norm();
    sm.trace_fused = fused.cov.trace();
    sum_central += e_central.squaredNorm();
    sum_fused += e_fused.squaredNorm();

    sm.z = Vector::Constant(m, kNaN);
    sm.stat = Vector::Constant(m, kNaN);
    std::vector<bool> alarms(static_cast<std::size_t>(m), false);
    for (Index s : active) {
      const auto us = static_cast<std::size_t>(s);
      const double z = bank.local(s).z;
      sm.z(s) = z;
      if (const auto stat = local_stats[us].push(z * z)) {
        sm.stat(s) = *stat;
        ++report.windows[us];
        alarms[us] = *stat > report.gamma;
      }
    }
    const RemovalOutcome outcome =
        identify_and_remove(report.log, k, alarms, policy, active, guard);
    if (outcome.changed()) {
      for (Index s : outcome.removed) bank.deactivate(s);
      fusion = FusionModel(decomps, active, cfg.estimator.epsilon);
    }

    if (opts.keep_vectors) {
      report.central_errors.push_back(e_central);
      report.fused_errors.push_back(e_fused);
      report.central_residues.push_back(central.z);
    }
    report.steps.push_back(std::move(sm));

    central_predict(central, p, noise.Q, tracking ? w : Vector());
    bank.predict(tracking ? w : Vector());
    if (!tracking) x = p.A * x + w;
  }
  report.mse_central = sum_central / static_cast<double>(horizon);
  report.mse_fused = sum_fused / static_cast<double>(horizon);
  return report;
}

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  return run_trial(cfg, resolve_system(cfg), 0, opts);
}

MonteCarloReport monte_carlo(const ScenarioConfig& cfg, Index trials, Exec exec,
                             bool keep_steps) {
  require(trials >= 1, ErrorKind::InvalidArgument, "monte_carlo: trials must be >= 1");
  const ResolvedSystem sys = resolve_system(cfg);
  MonteCarloReport mc;
  mc.runs.resize(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  const auto count = static_cast<long>(trials);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (long t = 0; t < count; ++t) {
    try {
      mc.runs[static_cast<std::size_t>(t)] = run_trial(cfg, sys, t);
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::size_t horizon = mc.runs.front().steps.size();
  mc.mse_central.assign(horizon, 0.0);
  mc.mse_fused.assign(horizon, 0.0);
  Index identified = 0;
  Index clean = 0;
  for (const auto& r : mc.runs) {
    for (std::size_t k = 0; k < horizon; ++k) {
      mc.mse_central[k] += r.steps[k].err_central * r.steps[k].err_central;
      mc.mse_fused[k] += r.steps[k].err_fused * r.steps[k].err_fused;
    }
    if (r.all_attacked_removed()) ++identified;
    if (r.clean_removed() == 0) ++clean;
  }
  const auto dt = static_cast<double>(trials);
  for (std::size_t k = 0; k < horizon; ++k) {
    mc.mse_central[k] /= dt;
    mc.mse_fused[k] /= dt;
  }
  mc.identification_rate = static_cast<double>(identified) / dt;
  mc.clean_removal_free_rate = static_cast<double>(clean) / dt;
  double tail_c = 0.0;
  double tail_f = 0.0;
  for (std::size_t k = horizon / 2; k < horizon; ++k) {
    tail_c += mc.mse_central[k];
    tail_f += mc.mse_fused[k];
  }
  mc.tail_ratio = tail_c > 0.0 ? tail_f / tail_c : kNaN;
  if (!keep_steps) {
    for (auto& r : mc.runs) r.steps.clear();
  }
  return mc;
}

}  // namespace mtd
