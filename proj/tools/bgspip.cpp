// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

// bgspip: run kappa-plot sweeps, validate configs, run the acceptance suite.
//
//   bgspip run <config> [--out dir] [--jobs n] [--seed u64] [--timing]
//   bgspip check <config>
//   bgspip acceptance
//
// Exit status: 0 success, 1 invalid config or input, 2 acceptance failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "bgspip/acceptance.hpp"
#include "bgspip/bgspip.hpp"

namespace
{

constexpr int exit_invalid = 1;
constexpr int exit_acceptance = 2;

bgspip::harness::SweepConfig load(const std::string& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw bgspip::harness::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << is.rdbuf();
  return bgspip::harness::parse_config(text.str());
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Block Gram-Schmidt (BCGS-PIP family) stability experiments"};
  app.require_subcommand(1);

  std::string run_config, out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  bool timing = false;
  CLI::App* run = app.add_subcommand("run", "Run a sweep and write results.csv, SVG plots and report.md");
  run->add_option("config,--config", run_config, "Sweep configuration (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (default: the config's output_dir)");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Override the config's matrix seed");
  run->add_flag("--timing", timing, "Write measured wall times to the CSV (output is then not byte-stable)");

  std::string check_config;
  CLI::App* check = app.add_subcommand("check", "Validate a sweep configuration");
  check->add_option("config,--config", check_config, "Sweep configuration (JSON)")->required();

  CLI::App* acc = app.add_subcommand("acceptance", "Run the built-in acceptance suite");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_invalid;
  }

  try
  {
    if (*check)
    {
      const auto cfg = load(check_config);
      std::cout << "ok: " << cfg.knob_sweep.size() << " sweep points x " << cfg.algorithms.size()
                << " algorithms x " << cfg.ios.size() << " ios\n";
      return 0;
    }
    if (*run)
    {
      auto cfg = load(run_config);
      if (*seed_opt)
        cfg.seed = seed;
      bgspip::harness::RunOptions opt;
      opt.out_dir = out_dir;
      opt.jobs = jobs;
      opt.timing = timing;
      const auto records = bgspip::harness::run_and_emit(cfg, opt);
      std::cout << records.size() << " records written to "
                << (out_dir.empty() ? cfg.output_dir : out_dir) << '\n';
      return 0;
    }
    if (*acc)
    {
      bgspip::AcceptanceSuite suite;
      const auto results = suite.run_all(&std::cout);
      std::size_t passed = 0;
      for (const auto& r : results)
        passed += r.passed ? 1 : 0;
      std::cout << passed << "/" << results.size() << " criteria passed\n";
      return passed == results.size() ? 0 : exit_acceptance;
    }
  }
  catch (const bgspip::harness::ConfigError& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  catch (const bgspip::contract_error& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  return exit_invalid;
}
