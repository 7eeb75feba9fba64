// SPDX-License-Identifier: Apache-2.0
//
// gpursm analyze <config> [options]
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gpursm/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Resource significance analysis of GPU performance-counter profiles"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Run the tasks and comparisons of a configuration");
  std::string config;
  std::string out_dir, render_only;
  std::uint64_t seed = 0;
  std::size_t draws = 0, tau = 0;
  double kappa = 0.0, gamma = 0.0;
  unsigned threads = 0;

  analyze->add_option("config", config, "Task configuration file");
  auto* o_out = analyze->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* o_seed = analyze->add_option("--seed", seed, "RNG seed");
  auto* o_draws = analyze->add_option("--draws", draws, "Ensemble draws R");
  auto* o_kappa = analyze->add_option("--kappa", kappa, "Sparsity fraction in (0, 1]");
  auto* o_tau = analyze->add_option("--tau", tau, "Candidates sampled per step");
  auto* o_gamma = analyze->add_option("--gamma", gamma, "Belief scale");
  auto* o_threads = analyze->add_option("--threads", threads, "Worker threads (0 = all cores)");
  auto* o_render = analyze->add_option("--render-only", render_only,
                                       "Regenerate the SVG views of an existing report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (config.empty() && o_render->count() == 0) {
    std::cerr << "error: analyze needs a configuration file or --render-only REPORT\n";
    return 2;
  }

  gpursm::RunOverrides overrides;
  if (o_out->count()) overrides.out_dir = out_dir;
  if (o_seed->count()) overrides.seed = seed;
  if (o_draws->count()) overrides.draws = draws;
  if (o_kappa->count()) overrides.kappa = kappa;
  if (o_tau->count()) overrides.tau = tau;
  if (o_gamma->count()) overrides.gamma = gamma;
  if (o_threads->count()) overrides.threads = threads;
  std::optional<std::filesystem::path> render;
  if (o_render->count()) render = render_only;

  return gpursm::analyze_command(config, overrides, render, std::cerr, std::cerr);
}
