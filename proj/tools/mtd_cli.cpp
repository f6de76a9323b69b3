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

// Command-line front end: analyze, simulate, montecarlo, gen-system.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtd/identifiability.hpp"
#include "mtd/matrix_io.hpp"
#include "mtd/scenario.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalOptions {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::string format;
};

mtd::ScenarioConfig load(const GlobalOptions& g) {
  mtd::ScenarioConfig cfg = g.config.empty() ? mtd::ScenarioConfig{} : mtd::load_config(g.config);
  if (g.seed_override) {
    // Reseeds every run stream; the system itself stays fixed.
    cfg.schedule.key = mtd::ScheduleKey::from_integer(*g.seed_override);
    cfg.noise.seed = *g.seed_override;
    cfg.attack.seed = *g.seed_override;
  }
  if (!g.out_dir.empty()) cfg.output.dir = g.out_dir;
  if (g.format == "csv") cfg.output.format = mtd::OutputFormat::Csv;
  if (g.format == "jsonl") cfg.output.format = mtd::OutputFormat::Jsonl;
  return cfg;
}

void emit_json(const json& j, const std::string& dir, const std::string& name) {
  if (dir.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  fs::create_directories(dir);
  std::ofstream(fs::path(dir) / name) << j.dump(2) << '\n';
}

json complex_json(mtd::Complex c) { return json::array({c.real(), c.imag()}); }

int analyze(const GlobalOptions& g) {
  const mtd::ScenarioConfig cfg = load(g);
  const mtd::ResolvedSystem sys = mtd::resolve_system(cfg);
  const mtd::TargetSet& ts = sys.targets;
  const mtd::RecommendationReport rec = mtd::validate_design_recommendations(ts);

  json recommendations = {{"disjoint_spectra", rec.disjoint_spectra},
                          {"min_cross_eig_distance", std::isfinite(rec.min_cross_eig_distance)
                                                         ? json(rec.min_cross_eig_distance)
                                                         : json(nullptr)},
                          {"period_long_enough", rec.period_long_enough},
                          {"schedule_nondegenerate", rec.schedule_nondegenerate},
                          {"all_observable", rec.all_observable},
                          {"no_zero_eigenvalue", rec.no_zero_eigenvalue},
                          {"min_abs_eigenvalue", rec.min_abs_eigenvalue},
                          {"all_pass", rec.all_pass()}};

  json margins = json::array();
  for (const auto& p : ts.pairs()) margins.push_back(mtd::sparse_observability_margin(p));

  json sensors = json::array();
  for (mtd::Index s = 0; s < ts.m(); ++s) {
    const bool common = mtd::check_common_nullspace(ts, s);
    json entry = {{"sensor", s + 1}, {"common_nullspace", common}};
    if (common) {
      entry["observable_dim"] = mtd::kalman_decomposition(ts, s, sys.noise).observable_dim();
    }
    sensors.push_back(entry);
  }

  json cross = json::array();
  for (mtd::Index a = 0; a < ts.size(); ++a) {
    for (mtd::Index b = 0; b < ts.size(); ++b) {
      if (a == b) continue;
      for (mtd::Index s = 0; s < ts.m(); ++s) {
        const auto r = mtd::cross_model_unidentifiability(ts.pair(a), ts.pair(b), s);
        if (r.shared_eigenvalues.empty()) continue;
        json shared = json::array();
        for (const auto& l : r.shared_eigenvalues) shared.push_back(complex_json(l));
        cross.push_back({{"model_in_force", a + 1},
                         {"attacker_model", b + 1},
                         {"sensor", s + 1},
                         {"unidentifiable", r.exists},
                         {"shared_eigenvalues", shared}});
      }
    }
  }

  const json out = {{"schema", "mtd-analysis v1"},
                    {"n", ts.n()},
                    {"m", ts.m()},
                    {"l", ts.size()},
                    {"period", ts.period()},
                    {"recommendations", recommendations},
                    {"sparse_observability_margin", margins},
                    {"sensors", sensors},
                    {"cross_model", cross}};
  emit_json(out, cfg.output.dir, "analysis.json");
  return 0;
}

int simulate(const GlobalOptions& g, std::optional<long long> trials) {
  mtd::ScenarioConfig cfg = load(g);
  if (trials) cfg.trials = *trials;
  const mtd::MonteCarloReport mc =
      mtd::monte_carlo(cfg, cfg.trials, cfg.parallel ? mtd::Exec::Parallel : mtd::Exec::Serial);
  if (cfg.output.dir.empty()) {
    if (mc.runs.size() == 1) {
      mtd::write_metrics(std::cout, mc.runs.front(), cfg.output.format);
    } else {
      mtd::write_summary(std::cout, mc);
    }
    return 0;
  }
  mtd::write_outputs(cfg.output.dir, mc, cfg.output.format);
  return 0;
}

int gen_system(const GlobalOptions& g) {
  const mtd::ScenarioConfig cfg = load(g);
  if (!cfg.system.generated) mtd::fail(mtd::ErrorKind::Config, "gen-system: config is explicit");
  const std::string dir = cfg.output.dir.empty() ? "system" : cfg.output.dir;
  fs::create_directories(dir);
  const mtd::GeneratedSystem sys = mtd::generate_example_system(cfg.system.generator);
  json pairs = json::array();
  for (std::size_t j = 0; j < sys.pairs.size(); ++j) {
    const std::string a = "A_" + std::to_string(j + 1) + ".txt";
    const std::string c = "C_" + std::to_string(j + 1) + ".txt";
    mtd::io::write_matrix_file((fs::path(dir) / a).string(), sys.pairs[j].A);
    mtd::io::write_matrix_file((fs::path(dir) / c).string(), sys.pairs[j].C);
    pairs.push_back({{"A", a}, {"C", c}});
  }
  mtd::io::write_matrix_file((fs::path(dir) / "Q.txt").string(), sys.noise.Q);
  mtd::io::write_matrix_file((fs::path(dir) / "R.txt").string(), sys.noise.R);
  mtd::io::write_matrix_file((fs::path(dir) / "P0.txt").string(), sys.noise.P0);
  json x0 = json::array();
  for (mtd::Index i = 0; i < sys.noise.x0_mean.size(); ++i) x0.push_back(sys.noise.x0_mean(i));
  const json system = {{"system",
                        {{"source", "explicit"},
                         {"pairs", pairs},
                         {"Q", "Q.txt"},
                         {"R", "R.txt"},
                         {"P0", "P0.txt"},
                         {"x0_mean", x0}}}};
  std::ofstream(fs::path(dir) / "system.json") << system.dump(2) << '\n';
  std::cerr << "wrote " << sys.pairs.size() << " pairs to " << dir << " (" << sys.attempts
            << " draw" << (sys.attempts == 1 ? "" : "s") << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-target sensor attack identification toolkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "JSON scenario config")->check(CLI::ExistingFile);
    sub->add_option("--out-dir", g.out_dir, "output directory (stdout when omitted)");
    sub->add_option("--seed-override", seed, "reseed schedule, noise and attacker streams");
    sub->add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "jsonl"}));
  };
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "identifiability and design checks");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run one trial");
  CLI::App* mc_cmd = app.add_subcommand("montecarlo", "run independent trials");
  CLI::App* gen_cmd = app.add_subcommand("gen-system", "write a generated system to files");
  long long trials = 0;
  for (CLI::App* sub : {analyze_cmd, simulate_cmd, mc_cmd, gen_cmd}) add_globals(sub);
  mc_cmd->add_option("--trials", trials, "number of trials (overrides config)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  for (CLI::App* sub : {analyze_cmd, simulate_cmd, mc_cmd, gen_cmd}) {
    if (sub->count("--seed-override") > 0) g.seed_override = seed;
  }

  try {
    if (*analyze_cmd) return analyze(g);
    if (*simulate_cmd) return simulate(g, 1);
    if (*mc_cmd) return simulate(g, trials > 0 ? std::optional<long long>(trials) : std::nullopt);
    if (*gen_cmd) return gen_system(g);
  } catch (const mtd::Error& e) {
    std::cerr << "error (" << mtd::to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == mtd::ErrorKind::Config ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
