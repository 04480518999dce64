#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "sgqa/lexicon.hpp"
#include "sgqa/question_engine.hpp"
#include "sgqa/scene_graph.hpp"
#include "sgqa/synth.hpp"
#include "sgqa/templates.hpp"

namespace sgqa::test {

inline std::filesystem::path data_dir() { return SGQA_TEST_DATA_DIR; }

inline const Lexicons& lexicons() {
  static const Lexicons lex = Lexicons::load_dir(data_dir());
  return lex;
}

inline const std::vector<Template>& templates() {
  static const std::vector<Template> t = load_templates(data_dir() / "templates.json");
  return t;
}

inline const QuestionEngine& engine() {
  static const QuestionEngine e(templates(), lexicons());
  return e;
}

/// Fresh directory under the system temp dir, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sgqa_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<SceneGraph> synth_graphs(std::uint64_t seed, std::size_t n, const SynthConfig& cfg = {}) {
  return synth_scene_graphs(lexicons(), seed, n, cfg);
}

}  // namespace sgqa::test
