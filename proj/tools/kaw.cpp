#include "kaw/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Kawahara boundary-feedback laboratory"};
  app.require_subcommand(1);

  kaw::CliOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--workers", opts.workers, "Worker threads (KAW_WORKERS overrides)");
  };
  CLI::App* check = app.add_subcommand("check", "Evaluate the closed-form certificates");
  CLI::App* run = app.add_subcommand("run", "Simulate and write series.csv and report.json");
  CLI::App* sweep = app.add_subcommand("sweep", "Run one configuration per axis value");
  CLI::App* verify = app.add_subcommand("verify", "Run the verification suites");
  for (CLI::App* sub : {check, run, sweep, verify}) add_common(sub);
  sweep->add_option("--axis", opts.axis, "Config field, e.g. model.L")->required();
  sweep->add_option("--values", opts.values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kaw::kExitConfig;
  }

  if (*check) return kaw::cmd_check(opts, std::cout, std::cerr);
  if (*run) return kaw::cmd_run(opts, std::cout, std::cerr);
  if (*sweep) return kaw::cmd_sweep(opts, std::cout, std::cerr);
  return kaw::cmd_verify(opts, std::cout, std::cerr);
}
