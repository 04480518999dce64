#include "sgqa/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <mutex>
#include <ostream>
#include <thread>

#include "json_io.hpp"
#include "sgqa/clustering.hpp"
#include "sgqa/errors.hpp"
#include "sgqa/executor.hpp"
#include "sgqa/semantic.hpp"
#include "sgqa/synth.hpp"

namespace sgqa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::preprocess, "preprocess"}, {Command::cluster, "cluster"},
    {Command::generate, "generate"},     {Command::balance, "balance"},
    {Command::stats, "stats"},           {Command::execute, "execute"},
    {Command::parse_semantic, "parse-semantic"}, {Command::synth, "synth"},
    {Command::pipeline, "pipeline"},
};

fs::path or_default(const fs::path& p, const fs::path& dir, const char* name) { return p.empty() ? dir / name : p; }

bool needs_lexicons(Command c) {
  return c == Command::preprocess || c == Command::cluster || c == Command::generate || c == Command::synth ||
         c == Command::pipeline || c == Command::execute;
}

bool needs_templates(Command c) { return c == Command::generate || c == Command::pipeline; }

// Content hash of a file, or of every regular file below a directory.
std::string content_hash(const fs::path& p) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(p)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += fs::relative(f, p).generic_string() + '\0' + sha256_hex(detail::read_file(f));
    return sha256_hex(all);
  }
  return sha256_hex(detail::read_file(p));
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void report_error(std::ostream& err, const std::string& type, const std::string& message, json extra = json::object()) {
  json e{{"type", type}, {"message", message}};
  e.update(extra);
  err << json{{"error", e}}.dump() << '\n';
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "pipeline";
}

std::optional<Command> parse_command(std::string_view s) {
  for (const auto& [cmd, name] : kCommands) {
    if (name == s) return cmd;
  }
  return std::nullopt;
}

fs::path PipelineConfig::attributes_path() const { return or_default(attributes, data_dir, "attributes.json"); }
fs::path PipelineConfig::contradictions_path() const {
  return or_default(contradictions, data_dir, "contradictions.json");
}
fs::path PipelineConfig::taxonomy_path() const { return or_default(taxonomy, data_dir, "taxonomy.json"); }
fs::path PipelineConfig::inverses_path() const {
  return or_default(relation_inverses, data_dir, "relation_inverses.json");
}
fs::path PipelineConfig::templates_path() const { return or_default(templates, data_dir, "templates.json"); }

EngineConfig PipelineConfig::engine_config() const {
  EngineConfig e;
  e.max_features = max_features;
  e.perturb_ratio = perturb_ratio;
  return e;
}

void apply_config_json(PipelineConfig& cfg, const json& j, std::vector<std::string>& errors) {
  if (!j.is_object()) {
    errors.push_back("config: top level must be a JSON object");
    return;
  }
  const auto path_key = [&](const std::string& key, const json& v, fs::path& dst) {
    if (v.is_string()) dst = v.get<std::string>();
    else errors.push_back("config: '" + key + "' must be a string");
  };
  const auto number_key = [&](const std::string& key, const json& v, double& dst) {
    if (v.is_number()) dst = v.get<double>();
    else errors.push_back("config: '" + key + "' must be a number");
  };
  const auto count_key = [&](const std::string& key, const json& v, std::size_t& dst) {
    if (v.is_number_unsigned()) dst = v.get<std::size_t>();
    else errors.push_back("config: '" + key + "' must be a non-negative integer");
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "input") path_key(key, v, cfg.input);
    else if (key == "output") path_key(key, v, cfg.output);
    else if (key == "data_dir") path_key(key, v, cfg.data_dir);
    else if (key == "attributes") path_key(key, v, cfg.attributes);
    else if (key == "contradictions") path_key(key, v, cfg.contradictions);
    else if (key == "taxonomy") path_key(key, v, cfg.taxonomy);
    else if (key == "relation_inverses") path_key(key, v, cfg.relation_inverses);
    else if (key == "templates") path_key(key, v, cfg.templates);
    else if (key == "program") path_key(key, v, cfg.program);
    else if (key == "graph") path_key(key, v, cfg.graph);
    else if (key == "csv") path_key(key, v, cfg.csv);
    else if (key == "image_id") {
      if (v.is_string()) cfg.image_id = v.get<std::string>();
      else errors.push_back("config: 'image_id' must be a string");
    } else if (key == "iou_threshold") number_key(key, v, cfg.iou_threshold);
    else if (key == "containment_threshold") number_key(key, v, cfg.containment_threshold);
    else if (key == "perturb_ratio") number_key(key, v, cfg.perturb_ratio);
    else if (key == "max_answer_share") number_key(key, v, cfg.balance.max_answer_share);
    else if (key == "marginal_tolerance") number_key(key, v, cfg.balance.marginal_tolerance);
    else if (key == "max_features") count_key(key, v, cfg.max_features);
    else if (key == "jobs") count_key(key, v, cfg.jobs);
    else if (key == "synth_count") count_key(key, v, cfg.synth_count);
    else if (key == "max_iterations") count_key(key, v, cfg.balance.max_iterations);
    else if (key == "dedupe") {
      if (v.is_boolean()) cfg.dedupe = v.get<bool>();
      else errors.push_back("config: 'dedupe' must be a boolean");
    } else if (key == "seed") {
      if (v.is_number_unsigned()) {
        cfg.seed = v.get<std::uint64_t>();
      } else if (v.is_string()) {
        try {
          std::size_t used = 0;
          cfg.seed = std::stoull(v.get<std::string>(), &used, 0);
          if (used != v.get<std::string>().size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          errors.push_back("config: 'seed' string is not a 64-bit integer");
        }
      } else {
        errors.push_back("config: 'seed' must be a non-negative integer");
      }
    } else {
      errors.push_back("config: unknown key '" + key + "'");
    }
  }
}

void apply_env(PipelineConfig& cfg, const std::function<const char*(const char*)>& getenv) {
  const std::pair<const char*, fs::path*> vars[] = {
      {"SGQA_INPUT", &cfg.input},           {"SGQA_OUTPUT", &cfg.output},
      {"SGQA_DATA_DIR", &cfg.data_dir},     {"SGQA_ATTRIBUTES", &cfg.attributes},
      {"SGQA_CONTRADICTIONS", &cfg.contradictions}, {"SGQA_TAXONOMY", &cfg.taxonomy},
      {"SGQA_RELATION_INVERSES", &cfg.relation_inverses}, {"SGQA_TEMPLATES", &cfg.templates},
  };
  for (const auto& [name, dst] : vars) {
    if (const char* v = getenv(name); v && *v) *dst = v;
  }
}

std::vector<std::string> validate(const PipelineConfig& cfg, Command cmd) {
  std::vector<std::string> errors;
  const auto unit = [&](const char* name, double v) {
    if (!(v > 0.0 && v <= 1.0)) errors.push_back(std::string(name) + " must be in (0, 1]");
  };
  unit("iou_threshold", cfg.iou_threshold);
  unit("containment_threshold", cfg.containment_threshold);
  if (!(cfg.perturb_ratio >= 0.0 && cfg.perturb_ratio <= 1.0)) errors.push_back("perturb_ratio must be in [0, 1]");
  if (cfg.max_features == 0) errors.push_back("max_features must be at least 1");
  if (cfg.jobs == 0 || cfg.jobs > 1024) errors.push_back("jobs must be in [1, 1024]");
  if (cmd == Command::synth && cfg.synth_count == 0) errors.push_back("synth_count must be at least 1");
  for (const auto& m : validate(cfg.balance)) errors.push_back(m);

  const auto must_exist = [&](const char* what, const fs::path& p) {
    std::error_code ec;
    if (p.empty()) errors.push_back(std::string(what) + " is required");
    else if (!fs::exists(p, ec)) errors.push_back(std::string(what) + " not found: " + p.string());
  };
  if (cmd == Command::execute) {
    must_exist("program", cfg.program);
    must_exist("graph", cfg.graph);
  } else if (cmd != Command::synth) {
    must_exist("input", cfg.input);
  }
  const bool output_required = cmd != Command::execute && cmd != Command::parse_semantic;
  if (output_required && cfg.output.empty()) errors.push_back("output is required");
  if (needs_lexicons(cmd)) {
    must_exist("attributes", cfg.attributes_path());
    if (cmd != Command::execute) {
      must_exist("contradictions", cfg.contradictions_path());
      must_exist("taxonomy", cfg.taxonomy_path());
      must_exist("relation_inverses", cfg.inverses_path());
    }
  }
  if (needs_templates(cmd)) must_exist("templates", cfg.templates_path());
  return errors;
}

json canonical_config(const PipelineConfig& cfg, Command cmd) {
  json j{{"command", to_string(cmd)}, {"seed", cfg.seed}};
  if (cmd != Command::synth && cmd != Command::execute) j["input_sha256"] = content_hash(cfg.input);
  if (needs_lexicons(cmd) && cmd != Command::execute) {
    j["lexicons"] = {{"attributes", content_hash(cfg.attributes_path())},
                     {"contradictions", content_hash(cfg.contradictions_path())},
                     {"taxonomy", content_hash(cfg.taxonomy_path())},
                     {"relation_inverses", content_hash(cfg.inverses_path())}};
  }
  if (needs_templates(cmd)) j["templates_sha256"] = content_hash(cfg.templates_path());
  j["iou_threshold"] = cfg.iou_threshold;
  j["containment_threshold"] = cfg.containment_threshold;
  j["max_features"] = cfg.max_features;
  j["perturb_ratio"] = cfg.perturb_ratio;
  j["max_answer_share"] = cfg.balance.max_answer_share;
  j["marginal_tolerance"] = cfg.balance.marginal_tolerance;
  j["max_iterations"] = cfg.balance.max_iterations;
  j["dedupe"] = cfg.dedupe;
  if (cmd == Command::synth) j["synth_count"] = cfg.synth_count;
  return j;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

json make_manifest(const PipelineConfig& cfg, Command cmd, const json& counts) {
  const json config = canonical_config(cfg, cmd);
  return {{"tool", "sgqa"},
          {"tool_version", kToolVersion},
          {"record_schema_version", kRecordSchemaVersion},
          {"command", to_string(cmd)},
          {"seed", cfg.seed},
          {"config", config},
          {"config_sha256", sha256_hex(config.dump())},
          {"counts", counts}};
}

fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

void write_json_file(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

Lexicons load_lexicons(const PipelineConfig& cfg) {
  Lexicons lex;
  lex.attributes = AttributeLexicon::load(cfg.attributes_path());
  if (fs::exists(cfg.contradictions_path())) lex.contradictions = ContradictionLexicon::load(cfg.contradictions_path());
  if (fs::exists(cfg.taxonomy_path())) lex.taxonomy = FlatTaxonomy::load(cfg.taxonomy_path());
  if (fs::exists(cfg.inverses_path())) lex.inverses = RelationInverses::load(cfg.inverses_path());
  return lex;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<SceneGraph> preprocess_all(std::vector<SceneGraph> graphs, const Lexicons& lex,
                                       const PreprocessConfig& cfg, std::size_t jobs, PreprocessReport* report) {
  std::vector<PreprocessReport> reports(graphs.size());
  parallel_for(graphs.size(), jobs,
               [&](std::size_t i) { graphs[i] = preprocess(std::move(graphs[i]), lex, cfg, &reports[i]); });
  if (report) {
    for (const auto& r : reports) *report += r;
  }
  return graphs;
}

std::size_t generate_stream(const std::vector<SceneGraph>& graphs, const QuestionEngine& engine, const Lexicons& lex,
                            const PipelineConfig& cfg, const std::function<void(const QuestionRecord&)>& sink) {
  std::vector<std::size_t> order(graphs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return graphs[a].image_id < graphs[b].image_id; });

  const Rng root(cfg.seed);
  const std::size_t chunk = std::max<std::size_t>(64, cfg.jobs * 16);
  std::size_t total = 0;
  for (std::size_t start = 0; start < order.size(); start += chunk) {
    const std::size_t n = std::min(chunk, order.size() - start);
    std::vector<std::vector<QuestionRecord>> results(n);
    parallel_for(n, cfg.jobs, [&](std::size_t k) {
      const SceneGraph& g = graphs[order[start + k]];
      if (g.preprocessed) {
        results[k] = engine.generate(g, root);
      } else {
        results[k] = engine.generate(preprocess(g, lex, cfg.preprocess_config()), root);
      }
    });
    for (const auto& batch : results) {
      for (const auto& r : batch) sink(r);
      total += batch.size();
    }
  }
  return total;
}

std::vector<QuestionRecord> generate_all(const std::vector<SceneGraph>& graphs, const QuestionEngine& engine,
                                         const Lexicons& lex, const PipelineConfig& cfg) {
  std::vector<QuestionRecord> out;
  generate_stream(graphs, engine, lex, cfg, [&](const QuestionRecord& r) {
    out.push_back(r);
    out.back().binding.reset();
  });
  return out;
}

std::vector<QuestionRecord> balance_stage(std::vector<QuestionRecord> records, const PipelineConfig& cfg,
                                          BalanceReport* report, std::size_t* deduped_away) {
  const std::size_t before = records.size();
  if (cfg.dedupe) records = dedupe_by_object_overlap(std::move(records));
  if (deduped_away) *deduped_away = before - records.size();
  return balance(std::move(records), cfg.balance, Rng(cfg.seed).split("balance"), report);
}

namespace {

struct Outputs {
  const PipelineConfig& cfg;
  Command cmd;

  void manifest(const fs::path& output, const json& counts) const {
    write_json_file(manifest_path(output), make_manifest(cfg, cmd, counts));
  }
};

json preprocess_counts(const LoadReport& load, const PreprocessReport& pre, std::size_t objects_out) {
  return {{"graphs", load.graphs},
          {"objects_in", load.objects},
          {"objects_out", objects_out},
          {"dangling_edges_dropped", load.dangling_edges},
          {"unknown_attributes_dropped", load.unknown_attributes},
          {"contradictory_values_removed", pre.contradictory_values_removed},
          {"objects_merged", pre.objects_merged},
          {"containers_removed", pre.containers_removed},
          {"taxonomy_misses", pre.taxonomy_misses}};
}

std::size_t object_count(const std::vector<SceneGraph>& graphs) {
  std::size_t n = 0;
  for (const auto& g : graphs) n += g.objects.size();
  return n;
}

Program load_program_file(const fs::path& path) {
  const std::string text = detail::read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    return program_from_json(detail::parse_json(text, path.string()));
  }
  if (text.find("->") != std::string::npos || text.find("\xE2\x86\x92") != std::string::npos) {
    return parse_semantic_string(text);
  }
  return parse_pseudocode(text);
}

int run_preprocess(const PipelineConfig& cfg, Outputs& io) {
  const Lexicons lex = load_lexicons(cfg);
  LoadReport load;
  auto graphs = load_scene_graphs(cfg.input, lex.attributes, &load);
  PreprocessReport pre;
  graphs = preprocess_all(std::move(graphs), lex, cfg.preprocess_config(), cfg.jobs, &pre);
  auto out = open_output(cfg.output);
  write_scene_graphs_jsonl(out, graphs);
  out.close();
  io.manifest(cfg.output, preprocess_counts(load, pre, object_count(graphs)));
  return 0;
}

int run_cluster(const PipelineConfig& cfg, Outputs& io) {
  const Lexicons lex = load_lexicons(cfg);
  auto graphs = load_scene_graphs(cfg.input, lex.attributes);
  std::vector<std::string> lines(graphs.size());
  std::vector<std::size_t> sizes(graphs.size());
  parallel_for(graphs.size(), cfg.jobs, [&](std::size_t i) {
    if (!graphs[i].preprocessed) graphs[i] = preprocess(std::move(graphs[i]), lex, cfg.preprocess_config());
    const auto clusters = merge_clusters(build_base_clusters(graphs[i]), cfg.max_features);
    json list = json::array();
    for (const auto& c : clusters) list.push_back(to_json(c));
    sizes[i] = clusters.size();
    lines[i] = json{{"image_id", graphs[i].image_id}, {"clusters", std::move(list)}}.dump();
  });
  auto out = open_output(cfg.output);
  std::size_t total = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out << lines[i] << '\n';
    total += sizes[i];
  }
  out.close();
  io.manifest(cfg.output, {{"graphs", graphs.size()}, {"clusters", total}});
  return 0;
}

std::pair<std::size_t, std::size_t> generate_to(const fs::path& output, const std::vector<SceneGraph>& graphs,
                                                const Lexicons& lex, const PipelineConfig& cfg) {
  const QuestionEngine engine(load_templates(cfg.templates_path()), lex, cfg.engine_config());
  auto out = open_output(output);
  std::size_t problematic = 0;
  const std::size_t n = generate_stream(graphs, engine, lex, cfg, [&](const QuestionRecord& r) {
    write_record(out, r);
    problematic += r.is_problematic ? 1 : 0;
  });
  out.close();
  return {n, problematic};
}

int run_generate(const PipelineConfig& cfg, Outputs& io) {
  const Lexicons lex = load_lexicons(cfg);
  const auto graphs = load_scene_graphs(cfg.input, lex.attributes);
  const auto [n, problematic] = generate_to(cfg.output, graphs, lex, cfg);
  io.manifest(cfg.output, {{"graphs", graphs.size()}, {"records", n}, {"problematic", problematic}});
  return 0;
}

// Balancing reads only labels and object names, so records are held without
// program and trace, and survivors are copied line by line from the input.
json balance_file(const fs::path& input, const fs::path& output, const PipelineConfig& cfg) {
  std::vector<QuestionRecord> records;
  {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + input.string());
    for_each_record(in, input.string(), [&](QuestionRecord&& r) {
      r.program.steps.clear();
      r.program.steps.shrink_to_fit();
      r.trace.clear();
      r.trace.shrink_to_fit();
      records.push_back(std::move(r));
    });
  }
  const std::size_t n_input = records.size();
  std::unordered_map<std::string, std::size_t> ordinal;
  ordinal.reserve(n_input);
  for (std::size_t i = 0; i < n_input; ++i) {
    if (!ordinal.emplace(records[i].question_id, i).second) {
      throw SchemaError("duplicate question_id '" + records[i].question_id + "' in " + input.string());
    }
  }
  BalanceReport report;
  std::size_t deduped = 0;
  const auto balanced = balance_stage(std::move(records), cfg, &report, &deduped);
  std::vector<bool> keep(n_input, false);
  for (const auto& r : balanced) keep[ordinal.at(r.question_id)] = true;
  ordinal.clear();
  {
    std::ifstream in(input, std::ios::binary);
    auto out = open_output(output);
    std::size_t i = 0;
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (keep[i++]) out << line << '\n';
    }
  }
  fs::path report_path = output;
  report_path += ".report.json";
  json rep = report.to_json();
  rep["deduped_away"] = deduped;
  write_json_file(report_path, rep);
  return {{"input", n_input},
          {"deduped_away", deduped},
          {"length_rejected", report.length_rejected},
          {"output", balanced.size()},
          {"warnings", report.warnings.size()}};
}

int run_balance(const PipelineConfig& cfg, Outputs& io) {
  io.manifest(cfg.output, balance_file(cfg.input, cfg.output, cfg));
  return 0;
}

CorpusStats stats_of_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CorpusStats stats;
  for_each_record(in, path.string(), [&](QuestionRecord&& r) { stats.add(r); });
  return stats;
}

void write_stats(const CorpusStats& stats, const fs::path& output, const fs::path& csv) {
  write_json_file(output, stats.to_json());
  if (!csv.empty()) write_text_file(csv, stats.histograms_csv());
}

int run_stats(const PipelineConfig& cfg, Outputs& io) {
  const CorpusStats stats = stats_of_file(cfg.input);
  write_stats(stats, cfg.output, cfg.csv);
  io.manifest(cfg.output, {{"records", stats.records()}});
  return 0;
}

int run_execute(const PipelineConfig& cfg, std::ostream& out) {
  const AttributeLexicon attrs = AttributeLexicon::load(cfg.attributes_path());
  const auto graphs = load_scene_graphs(cfg.graph, attrs);
  const SceneGraph* g = nullptr;
  for (const auto& cand : graphs) {
    if (cfg.image_id.empty() || cand.image_id == cfg.image_id) {
      g = &cand;
      break;
    }
  }
  if (!g) throw SchemaError("no scene graph with image_id '" + cfg.image_id + "' in " + cfg.graph.string());
  const Program p = load_program_file(cfg.program);
  const Execution ex = execute(p, *g);
  std::istringstream lines(render_program(p));
  std::string line;
  for (std::size_t i = 0; i < p.steps.size() && std::getline(lines, line); ++i) {
    out << line << "  =>  " << to_string(ex.trace[i]) << '\n';
  }
  out << "answer: " << ex.answer.render() << '\n';
  return 0;
}

int run_parse_semantic(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + cfg.input.string());
  std::string text;
  std::vector<std::string> failures;
  std::size_t line_no = 0;
  bool first = true;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Program p = parse_semantic_string(line);
      if (!first) text += '\n';
      text += render_program(p) + '\n';
      first = false;
    } catch (const std::exception& e) {
      failures.push_back(cfg.input.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    err << json{{"errors", failures}}.dump() << '\n';
    return 1;
  }
  if (cfg.output.empty()) out << text;
  else write_text_file(cfg.output, text);
  return 0;
}

int run_synth(const PipelineConfig& cfg, Outputs& io) {
  const Lexicons lex = load_lexicons(cfg);
  const auto graphs = synth_scene_graphs(lex, cfg.seed, cfg.synth_count);
  auto out = open_output(cfg.output);
  write_scene_graphs_jsonl(out, graphs);
  out.close();
  io.manifest(cfg.output, {{"graphs", graphs.size()}, {"objects", object_count(graphs)}});
  return 0;
}

int run_pipeline(const PipelineConfig& cfg, Outputs& io) {
  const Lexicons lex = load_lexicons(cfg);
  fs::create_directories(cfg.output);
  LoadReport load;
  auto graphs = load_scene_graphs(cfg.input, lex.attributes, &load);
  PreprocessReport pre;
  graphs = preprocess_all(std::move(graphs), lex, cfg.preprocess_config(), cfg.jobs, &pre);

  const fs::path clean = cfg.output / "graphs.clean.jsonl";
  {
    auto out = open_output(clean);
    write_scene_graphs_jsonl(out, graphs);
  }
  io.manifest(clean, preprocess_counts(load, pre, object_count(graphs)));

  const fs::path raw = cfg.output / "questions.raw.jsonl";
  const auto [n, problematic] = generate_to(raw, graphs, lex, cfg);
  io.manifest(raw, {{"graphs", graphs.size()}, {"records", n}, {"problematic", problematic}});

  const fs::path balanced = cfg.output / "questions.balanced.jsonl";
  io.manifest(balanced, balance_file(raw, balanced, cfg));

  const fs::path stats = cfg.output / "stats.json";
  const CorpusStats s = stats_of_file(balanced);
  write_stats(s, stats, cfg.output / "stats.csv");
  io.manifest(stats, {{"records", s.records()}});
  return 0;
}

}  // namespace

int run_command(Command cmd, const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  if (const auto problems = validate(cfg, cmd); !problems.empty()) {
    err << json{{"errors", problems}}.dump() << '\n';
    return 1;
  }
  Outputs io{cfg, cmd};
  try {
    switch (cmd) {
      case Command::preprocess: return run_preprocess(cfg, io);
      case Command::cluster: return run_cluster(cfg, io);
      case Command::generate: return run_generate(cfg, io);
      case Command::balance: return run_balance(cfg, io);
      case Command::stats: return run_stats(cfg, io);
      case Command::execute: return run_execute(cfg, out);
      case Command::parse_semantic: return run_parse_semantic(cfg, out, err);
      case Command::synth: return run_synth(cfg, io);
      case Command::pipeline: return run_pipeline(cfg, io);
    }
  } catch (const ParseError& e) {
    report_error(err, "parse", e.what(), {{"position", e.position()}});
  } catch (const ProgramError& e) {
    report_error(err, "program", e.what(), {{"step", e.step()}});
  } catch (const SchemaError& e) {
    report_error(err, "schema", e.what());
  } catch (const ConfigError& e) {
    report_error(err, "config", e.what());
  } catch (const std::exception& e) {
    report_error(err, "runtime", e.what());
  }
  return 1;
}

}  // namespace sgqa
