// Command-line front end: tune / compare / heatmap / oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coat/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Safe constrained auto-tuning toolkit"};
  app.require_subcommand(1);

  coat::TuneOptions tune;
  std::uint64_t seed_flag = 0;
  std::string algo_flag;
  CLI::App* t = app.add_subcommand("tune", "Run a configured tuning experiment");
  t->add_option("--config", tune.config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  t->add_option("--out", tune.out_dir, "Output directory (overrides the config's out_dir)");
  CLI::Option* seed_opt = t->add_option("--seed", seed_flag, "Base RNG seed override");
  CLI::Option* algo_opt =
      t->add_option("--algorithm", algo_flag, "Algorithm override: coat, gp_ucb, or safe_opt");
  t->add_flag("--quiet", tune.quiet, "Suppress progress output");

  coat::CompareOptions compare;
  CLI::App* c = app.add_subcommand("compare", "Merge completed run directories into a table");
  c->add_option("dirs", compare.run_dirs, "Run directories (>= 2)")->required()->expected(-2);
  c->add_option("--out", compare.out_dir, "Directory for compare.csv / compare_regret.svg");
  c->add_flag("--quiet", compare.quiet, "Suppress the stdout table");

  coat::HeatmapOptions heatmap;
  CLI::App* h = app.add_subcommand("heatmap", "Render the GP posterior of a logged 2-D run");
  h->add_option("dir", heatmap.run_dir, "Completed run directory")->required();
  h->add_option("--out", heatmap.out_path, "Output SVG path (default <dir>/heatmap.svg)");
  h->add_option("--rep", heatmap.repetition, "Repetition to render (default 0)");
  h->add_flag("--quiet", heatmap.quiet, "Suppress output path message");

  coat::OracleOptions oracle;
  CLI::App* o = app.add_subcommand("oracle", "Exact reachability/max references for a synthetic");
  o->add_option("--config", oracle.config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  o->add_option("--out", oracle.out_path, "Optional JSON output path");
  o->add_flag("--quiet", oracle.quiet, "Suppress stdout report");

  CLI11_PARSE(app, argc, argv);

  if (t->parsed()) {
    if (seed_opt->count() > 0) tune.seed_override = seed_flag;
    if (algo_opt->count() > 0) tune.algorithm_override = algo_flag;
    return coat::cmd_tune(tune);
  }
  if (c->parsed()) return coat::cmd_compare(compare);
  if (h->parsed()) return coat::cmd_heatmap(heatmap);
  return coat::cmd_oracle(oracle);
}
