#include <fstream>

#include "doctest.h"
#include "sgqa/executor.hpp"
#include "sgqa/pipeline.hpp"
#include "sgqa/synth.hpp"
#include "support.hpp"

using namespace sgqa;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PipelineConfig base_config() {
  PipelineConfig cfg;
  cfg.data_dir = test::data_dir();
  return cfg;
}

fs::path write_graphs(const fs::path& dir, const std::vector<SceneGraph>& graphs) {
  const fs::path p = dir / "graphs.jsonl";
  std::ofstream out(p);
  write_scene_graphs_jsonl(out, graphs);
  return p;
}

int run(Command cmd, const PipelineConfig& cfg) {
  std::ostringstream out, err;
  const int rc = run_command(cmd, cfg, out, err);
  if (rc != 0) MESSAGE(err.str());
  return rc;
}

}  // namespace

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config problems are all reported") {
  PipelineConfig cfg = base_config();
  std::vector<std::string> errors;
  apply_config_json(cfg, nlohmann::json::parse(R"({"iou_threshold": "high", "colour": 1, "seed": -3, "jobs": 2})"),
                    errors);
  CHECK(errors.size() == 3);
  CHECK(cfg.jobs == 2);
  cfg.containment_threshold = 0;
  cfg.perturb_ratio = 2;
  const auto problems = validate(cfg, Command::generate);
  CHECK(problems.size() >= 4);  // containment, perturb ratio, input, output
}

TEST_CASE("environment overrides config paths") {
  PipelineConfig cfg = base_config();
  std::vector<std::string> errors;
  apply_config_json(cfg, nlohmann::json::parse(R"({"input": "from-config", "seed": "0xff"})"), errors);
  CHECK(errors.empty());
  CHECK(cfg.seed == 255);
  apply_env(cfg, [](const char* name) -> const char* { return std::string(name) == "SGQA_INPUT" ? "from-env" : nullptr; });
  CHECK(cfg.input == "from-env");
}

TEST_CASE("generate on the kitchen fixture") {
  const fs::path dir = test::scratch_dir("kitchen");
  PipelineConfig cfg = base_config();
  cfg.input = write_graphs(dir, {kitchen_fixture()});
  cfg.output = dir / "q.jsonl";
  REQUIRE(run(Command::generate, cfg) == 0);
  const auto recs = read_records(cfg.output);
  CHECK_FALSE(recs.empty());
  const SceneGraph g = preprocess(kitchen_fixture(), test::lexicons(), {});
  for (const auto& r : recs) CHECK(execute(r.program, g).answer == r.answer);
  const auto manifest = nlohmann::json::parse(slurp(manifest_path(cfg.output)));
  CHECK(manifest["counts"]["records"] == recs.size());
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["config_sha256"].get<std::string>().size() == 64);
}

TEST_CASE("worker count does not change any output byte") {
  const fs::path dir = test::scratch_dir("jobs");
  PipelineConfig cfg = base_config();
  cfg.input = write_graphs(dir, test::synth_graphs(5, 40));
  cfg.output = dir / "one";
  cfg.jobs = 1;
  REQUIRE(run(Command::pipeline, cfg) == 0);
  cfg.output = dir / "three";
  cfg.jobs = 3;
  REQUIRE(run(Command::pipeline, cfg) == 0);
  for (const auto& e : fs::directory_iterator(dir / "one")) {
    CHECK_MESSAGE(slurp(e.path()) == slurp(dir / "three" / e.path().filename()), e.path().filename().string());
  }
}

TEST_CASE("staged runs equal the single-shot pipeline") {
  const fs::path dir = test::scratch_dir("stages");
  PipelineConfig cfg = base_config();
  cfg.input = write_graphs(dir, test::synth_graphs(6, 25));
  cfg.output = dir / "all";
  REQUIRE(run(Command::pipeline, cfg) == 0);

  PipelineConfig s = cfg;
  s.output = dir / "clean.jsonl";
  REQUIRE(run(Command::preprocess, s) == 0);
  s.input = s.output;
  s.output = dir / "raw.jsonl";
  REQUIRE(run(Command::generate, s) == 0);
  s.input = s.output;
  s.output = dir / "balanced.jsonl";
  REQUIRE(run(Command::balance, s) == 0);
  s.input = s.output;
  s.output = dir / "stats.json";
  REQUIRE(run(Command::stats, s) == 0);

  CHECK(slurp(dir / "clean.jsonl") == slurp(dir / "all" / "graphs.clean.jsonl"));
  CHECK(slurp(dir / "raw.jsonl") == slurp(dir / "all" / "questions.raw.jsonl"));
  CHECK(slurp(dir / "balanced.jsonl") == slurp(dir / "all" / "questions.balanced.jsonl"));
  CHECK(slurp(dir / "stats.json") == slurp(dir / "all" / "stats.json"));
}

TEST_CASE("execute prints one line per step and the answer") {
  const fs::path dir = test::scratch_dir("execute");
  PipelineConfig cfg = base_config();
  cfg.graph = write_graphs(dir, {kitchen_fixture()});
  cfg.program = dir / "p.txt";
  std::ofstream(cfg.program) << "select: table -> relate: on, subject, apple -> exist: ?\n";
  std::ostringstream out, err;
  REQUIRE(run_command(Command::execute, cfg, out, err) == 0);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("answer: yes") != std::string::npos);
}

TEST_CASE("parse-semantic converts each line") {
  const fs::path dir = test::scratch_dir("semantic");
  PipelineConfig cfg = base_config();
  cfg.input = dir / "in.txt";
  std::ofstream(cfg.input) << "select: table -> exist: ?\n\nselect: apple -> count: ?\n";
  cfg.output = dir / "out.txt";
  REQUIRE(run(Command::parse_semantic, cfg) == 0);
  CHECK(slurp(cfg.output) == "r0 = select(table)\nr1 = exist(r0)\n\nr0 = select(apple)\nr1 = count(r0)\n");
}

TEST_CASE("failures are reported as JSON with exit status 1") {
  PipelineConfig cfg = base_config();
  cfg.input = "/nonexistent/graphs.jsonl";
  std::ostringstream out, err;
  CHECK(run_command(Command::generate, cfg, out, err) == 1);
  const auto j = nlohmann::json::parse(err.str());
  CHECK(j["errors"].size() == 2);  // input missing, output missing
}
