#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgqa/errors.hpp"
#include "sgqa/pipeline.hpp"

#ifndef SGQA_DEFAULT_DATA_DIR
#define SGQA_DEFAULT_DATA_DIR "data"
#endif

namespace {

using sgqa::Command;
using sgqa::PipelineConfig;

struct Flags {
  std::string config, input, output, data_dir, attributes, contradictions, taxonomy, inverses, templates;
  std::string program, graph, image_id, csv;
  double iou = 0, containment = 0, perturb = 0, cap = 0, tolerance = 0;
  std::size_t max_features = 0, jobs = 0, count = 0;
  std::uint64_t seed = 0;
  bool no_dedupe = false;
  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> setters;

  template <typename T>
  void bind(CLI::App* app, const std::string& name, T& var, const std::string& help,
            std::function<void(PipelineConfig&)> apply) {
    setters.emplace_back(app->add_option(name, var, help), std::move(apply));
  }

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    bind(app, "-i,--input", input, "input file or directory", [this](auto& c) { c.input = input; });
    bind(app, "-o,--output", output, "output file (directory for pipeline)", [this](auto& c) { c.output = output; });
    bind(app, "--data-dir", data_dir, "directory with lexicons and templates", [this](auto& c) { c.data_dir = data_dir; });
    bind(app, "--attributes", attributes, "attribute lexicon", [this](auto& c) { c.attributes = attributes; });
    bind(app, "--contradictions", contradictions, "contradiction pairs", [this](auto& c) { c.contradictions = contradictions; });
    bind(app, "--taxonomy", taxonomy, "hypernym taxonomy", [this](auto& c) { c.taxonomy = taxonomy; });
    bind(app, "--relation-inverses", inverses, "relation inverse table", [this](auto& c) { c.relation_inverses = inverses; });
    bind(app, "--templates", templates, "template file or directory", [this](auto& c) { c.templates = templates; });
    bind(app, "--program", program, "program file (execute)", [this](auto& c) { c.program = program; });
    bind(app, "--graph", graph, "scene graph file (execute)", [this](auto& c) { c.graph = graph; });
    bind(app, "--image-id", image_id, "graph to pick from --graph", [this](auto& c) { c.image_id = image_id; });
    bind(app, "--csv", csv, "histogram CSV (stats)", [this](auto& c) { c.csv = csv; });
    bind(app, "--iou-threshold", iou, "merge threshold", [this](auto& c) { c.iou_threshold = iou; });
    bind(app, "--containment-threshold", containment, "container threshold",
         [this](auto& c) { c.containment_threshold = containment; });
    bind(app, "--max-features", max_features, "cluster feature cap", [this](auto& c) { c.max_features = max_features; });
    bind(app, "--perturb-ratio", perturb, "chance of a perturbed twin", [this](auto& c) { c.perturb_ratio = perturb; });
    bind(app, "--max-answer-share", cap, "answer cap per cell", [this](auto& c) { c.balance.max_answer_share = cap; });
    bind(app, "--marginal-tolerance", tolerance, "marginal tolerance",
         [this](auto& c) { c.balance.marginal_tolerance = tolerance; });
    bind(app, "--seed", seed, "64-bit seed", [this](auto& c) { c.seed = seed; });
    bind(app, "-j,--jobs", jobs, "worker threads", [this](auto& c) { c.jobs = jobs; });
    bind(app, "--count", count, "graphs to synthesize", [this](auto& c) { c.synth_count = count; });
    setters.emplace_back(app->add_flag("--no-dedupe", no_dedupe, "skip object-overlap dedupe"),
                         [](auto& c) { c.dedupe = false; });
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene-graph question generation engine"};
  app.require_subcommand(1, 1);
  Flags flags;
  const std::vector<std::pair<Command, std::string>> commands{
      {Command::preprocess, "clean scene graphs"},
      {Command::cluster, "list clusters per image"},
      {Command::generate, "generate raw question records"},
      {Command::balance, "dedupe and balance question records"},
      {Command::stats, "corpus statistics"},
      {Command::execute, "run one program against one graph and print the trace"},
      {Command::parse_semantic, "convert semantic strings to pseudocode"},
      {Command::synth, "write synthetic scene graphs"},
      {Command::pipeline, "preprocess, generate, balance and stats in one run"},
  };
  for (const auto& [cmd, help] : commands) flags.add_to(app.add_subcommand(std::string(sgqa::to_string(cmd)), help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const Command cmd = *sgqa::parse_command(sub->get_name());

  PipelineConfig cfg;
  cfg.data_dir = SGQA_DEFAULT_DATA_DIR;
  std::vector<std::string> errors;
  if (!flags.config.empty()) {
    try {
      std::ifstream in(flags.config);
      if (!in) throw std::runtime_error("cannot open " + flags.config);
      sgqa::apply_config_json(cfg, nlohmann::json::parse(in), errors);
    } catch (const std::exception& e) {
      errors.push_back("config: " + std::string(e.what()));
    }
  }
  sgqa::apply_env(cfg, [](const char* name) { return std::getenv(name); });
  for (const auto& [opt, apply] : flags.setters) {
    if (opt->count() > 0) apply(cfg);
  }
  for (auto& e : sgqa::validate(cfg, cmd)) errors.push_back(std::move(e));
  if (!errors.empty()) {
    std::cerr << nlohmann::json{{"errors", errors}}.dump() << '\n';
    return 1;
  }
  return sgqa::run_command(cmd, cfg, std::cout, std::cerr);
}
