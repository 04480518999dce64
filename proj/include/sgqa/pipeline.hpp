#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgqa/balancer.hpp"
#include "sgqa/lexicon.hpp"
#include "sgqa/preprocess.hpp"
#include "sgqa/question_engine.hpp"
#include "sgqa/record_io.hpp"
#include "sgqa/scene_graph.hpp"
#include "sgqa/stats.hpp"
#include "sgqa/templates.hpp"

namespace sgqa {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Command { preprocess, cluster, generate, balance, stats, execute, parse_semantic, synth, pipeline };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view s);

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output;
  /// Directory holding the default lexicon and template files.
  std::filesystem::path data_dir;
  /// Individual overrides; empty means "<data_dir>/<default name>".
  std::filesystem::path attributes, contradictions, taxonomy, relation_inverses, templates;
  /// execute: program file and graph file.
  std::filesystem::path program, graph;
  /// stats: optional CSV histogram output.
  std::filesystem::path csv;
  std::string image_id;

  double iou_threshold = 0.7;
  double containment_threshold = 0.8;
  std::size_t max_features = kDefaultMaxFeatures;
  double perturb_ratio = 1.0 / 3.0;
  BalanceConfig balance;
  bool dedupe = true;
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  std::size_t synth_count = 100;

  std::filesystem::path attributes_path() const;
  std::filesystem::path contradictions_path() const;
  std::filesystem::path taxonomy_path() const;
  std::filesystem::path inverses_path() const;
  std::filesystem::path templates_path() const;

  PreprocessConfig preprocess_config() const { return {iou_threshold, containment_threshold}; }
  EngineConfig engine_config() const;
};

/// Applies the keys of a JSON config object. Unknown keys and wrong types
/// are collected into `errors` rather than thrown.
void apply_config_json(PipelineConfig& cfg, const nlohmann::json& j, std::vector<std::string>& errors);

/// Applies SGQA_* path variables read through `getenv`.
void apply_env(PipelineConfig& cfg, const std::function<const char*(const char*)>& getenv);

/// Every problem with `cfg` for `cmd`; empty when the run may start.
std::vector<std::string> validate(const PipelineConfig& cfg, Command cmd);

/// Settings that influence output content. Worker count and output paths
/// are left out so they never change the manifest.
nlohmann::json canonical_config(const PipelineConfig& cfg, Command cmd);

std::string sha256_hex(const std::string& data);

/// Written to "<output>.manifest.json".
nlohmann::json make_manifest(const PipelineConfig& cfg, Command cmd, const nlohmann::json& counts);
std::filesystem::path manifest_path(const std::filesystem::path& output);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

Lexicons load_lexicons(const PipelineConfig& cfg);

/// Runs `fn(i)` for i in [0, n) on `jobs` threads. The first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

std::vector<SceneGraph> preprocess_all(std::vector<SceneGraph> graphs, const Lexicons& lex,
                                       const PreprocessConfig& cfg, std::size_t jobs,
                                       PreprocessReport* report = nullptr);

/// Generates records image by image in chunks and hands them to `sink` in
/// canonical order (graphs sorted by image_id, then generation order).
/// Graphs not yet preprocessed are cleaned first. Returns the record count.
std::size_t generate_stream(const std::vector<SceneGraph>& graphs, const QuestionEngine& engine, const Lexicons& lex,
                            const PipelineConfig& cfg, const std::function<void(const QuestionRecord&)>& sink);

std::vector<QuestionRecord> generate_all(const std::vector<SceneGraph>& graphs, const QuestionEngine& engine,
                                         const Lexicons& lex, const PipelineConfig& cfg);

/// Optional dedupe, then balance; the stage used by `balance` and `pipeline`.
std::vector<QuestionRecord> balance_stage(std::vector<QuestionRecord> records, const PipelineConfig& cfg,
                                          BalanceReport* report, std::size_t* deduped_away = nullptr);

/// Command runners. Each validates first, writes its outputs and manifest,
/// and returns the process exit status. Errors are reported as one JSON
/// object on `err`.
int run_command(Command cmd, const PipelineConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace sgqa
