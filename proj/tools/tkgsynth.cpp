#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tkg/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Temporal knowledge-graph workload synthesis"};
  app.require_subcommand(1);

  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  unsigned threads = tkg::default_threads();
  std::string out;

  auto common = [&](CLI::App* sub, bool out_required = true) {
    sub->add_option("--config", config, "Configuration file (key = value)");
    sub->add_option("--seed", seed, "Overrides master_seed");
    sub->add_option("--threads", threads, "Worker cap; output does not depend on it")
        ->check(CLI::PositiveNumber);
    auto* o = sub->add_option("--out", out, "Output file or directory");
    if (out_required) o->required();
  };

  std::string tubelets, graph, dataset, predictions;

  auto* gen = app.add_subcommand("gen-scene", "Write a random scene script and its tubelets");
  common(gen);
  auto* build = app.add_subcommand("build-graph", "Build the temporal knowledge graph");
  common(build);
  build->add_option("tubelets", tubelets, "Tubelet JSON Lines file")->required();
  auto* synth = app.add_subcommand("synth", "Synthesize a multi-hop QA dataset");
  common(synth);
  synth->add_option("graph", graph, "Graph file")->required();
  auto* validate = app.add_subcommand("validate", "Audit a dataset and verify reasoning depths");
  common(validate);
  validate->add_option("graph", graph, "Graph file")->required();
  validate->add_option("dataset", dataset, "Dataset JSON Lines file")->required();
  auto* profile = app.add_subcommand("profile", "Dataset statistics");
  common(profile);
  profile->add_option("dataset", dataset, "Dataset JSON Lines file")->required();
  auto* eval = app.add_subcommand("eval", "Score predicted spans against the dataset");
  common(eval);
  eval->add_option("dataset", dataset, "Dataset JSON Lines file")->required();
  eval->add_option("predictions", predictions, "Predictions JSON Lines file")->required();
  auto* run = app.add_subcommand("run", "Full pipeline with a hash manifest");
  common(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tkg::cli::kInputError;
  }

  tkg::cli::Context ctx{std::cout, std::cerr, config, seed, threads};
  if (*gen) return tkg::cli::cmd_gen_scene(ctx, out);
  if (*build) return tkg::cli::cmd_build_graph(ctx, tubelets, out);
  if (*synth) return tkg::cli::cmd_synth(ctx, graph, out);
  if (*validate) return tkg::cli::cmd_validate(ctx, graph, dataset, out);
  if (*profile) return tkg::cli::cmd_profile(ctx, dataset, out);
  if (*eval) return tkg::cli::cmd_eval(ctx, dataset, predictions, out);
  if (*run) return tkg::cli::cmd_run(ctx, out);
  return tkg::cli::kInputError;
}
