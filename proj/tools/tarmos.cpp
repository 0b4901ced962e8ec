#include <CLI11.hpp>

#include <string>

#include "tarmos/pipeline.hpp"

// tarmos <command> --plan plan.json [--seed N] [--m N] [--out DIR] [--threads N]
//
// Commands follow the framework stages: explore the missing data, impute,
// run the pre-planned analyses, run the delta-grid sensitivity analysis,
// produce strategy advice, run the synthetic-data experiment, or assemble
// the full report.
int main(int argc, char** argv) {
  CLI::App app{"tarmos - treatment and reporting of missing data in observational studies"};
  app.require_subcommand(1);

  tarmos::CliOptions opts;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::string out;

  const std::vector<std::string> commands = {"explore", "impute",   "analyze", "sensitivity",
                                             "advise",  "simulate", "report"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--plan", opts.plan_path, "analysis plan (JSON)")->required();
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--m", m, "imputation count override");
    sub->add_option("--out", out, "output directory override");
    sub->add_option("--threads", opts.threads, "worker threads (default: TARMOS_THREADS or 1)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--m")) opts.m = m;
  if (sub->count("--out")) opts.out_dir = out;

  return tarmos::run_command(sub->get_name(), opts);
}
