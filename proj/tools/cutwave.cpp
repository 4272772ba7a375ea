// Copyright The cutwave Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cutwave/experiments.hpp"

namespace
{

struct CommonArgs
{
  std::string config_file;
  std::string out_dir;
  bool fast = false;
  bool dump_field = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
  cmd->add_option("--config", args.config_file, "key = value configuration file");
  cmd->add_option("--out", args.out_dir, "output directory for CSV files");
  cmd->add_flag("--fast", args.fast, "reduced step counts; MS transient cells report dt_crit only");
  cmd->add_flag("--dump-field", args.dump_field, "write the final field of every cell");
  cmd->add_option("overrides", args.overrides, "key=value overrides applied after the file");
}

int run_study(cutwave::Experiment experiment, const CommonArgs& args)
{
  cutwave::ExperimentConfig config;
  try
  {
    cutwave::KeyValueConfig values;
    if (!args.config_file.empty())
      values = cutwave::KeyValueConfig::from_file(args.config_file);
    for (const auto& o : args.overrides)
      values.parse_assignment(o);
    if (!args.out_dir.empty())
      values.set("out", args.out_dir);
    if (args.fast)
      values.set("fast", "true");
    if (args.dump_field)
      values.set("dump_field", "true");
    config = cutwave::ExperimentConfig::defaults(experiment);
    config.apply(values);
    config.validate();
  }
  catch (const cutwave::ConfigError& e)
  {
    std::cerr << "cutwave: " << e.what() << "\n";
    return 1;
  }

  try
  {
    return cutwave::execute(config, std::cout);
  }
  catch (const std::exception& e)
  {
    std::cerr << "cutwave: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Immersed spectral element wave solver with cut element stabilization"};
  app.require_subcommand(1);

  struct Study
  {
    cutwave::Experiment experiment;
    const char* help;
  };
  const std::vector<Study> studies{
      {cutwave::Experiment::RodSpectrum, "eigenfrequency ratios of the immersed rod"},
      {cutwave::Experiment::RodConvergence, "h-convergence and dt_crit of the immersed rod"},
      {cutwave::Experiment::RodCutSweep, "dt_crit and error against the cut fraction"},
      {cutwave::Experiment::ArcConvergence, "h-convergence and dt_crit of the immersed arc"},
  };

  std::vector<CommonArgs> args(studies.size());
  std::vector<CLI::App*> commands;
  for (std::size_t i = 0; i < studies.size(); ++i)
  {
    auto* cmd = app.add_subcommand(cutwave::to_string(studies[i].experiment), studies[i].help);
    add_common(cmd, args[i]);
    commands.push_back(cmd);
  }

  std::uint64_t seed = 20240917;
  auto* self = app.add_subcommand("selftest", "quick internal consistency checks");
  self->add_option("--seed", seed, "seed of the random pencils");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (self->parsed())
    return cutwave::selftest(seed, std::cout);
  for (std::size_t i = 0; i < studies.size(); ++i)
    if (commands[i]->parsed())
      return run_study(studies[i].experiment, args[i]);
  return 1;
}
