#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgqa/lexicon.hpp"
#include "sgqa/rng.hpp"
#include "sgqa/scene_graph.hpp"

namespace sgqa {

/// Random scene graphs for tests and benchmarks. Names come from the
/// taxonomy leaves and attribute values from the lexicon, so everything
/// loads cleanly. A few graphs carry near-duplicate boxes or a hypernym box
/// around a member to exercise preprocessing.
struct SynthConfig {
  std::size_t min_objects = 4;
  std::size_t max_objects = 12;
  std::size_t names_per_image = 4;
  std::size_t categories_per_image = 3;
  std::size_t values_per_category = 2;
  double attribute_chance = 0.6;
  double edges_per_object = 2.0;
  double duplicate_chance = 0.15;
  double container_chance = 0.1;
  std::vector<std::string> predicates{"on", "near", "left of", "right of", "behind", "in front of", "under", "holding"};
};

SceneGraph synth_scene_graph(const Lexicons& lex, const std::string& image_id, Rng& rng, const SynthConfig& cfg = {});

/// `count` graphs with ids "synth-000000", ...; graph i uses rng.split(id).
std::vector<SceneGraph> synth_scene_graphs(const Lexicons& lex, std::uint64_t seed, std::size_t count,
                                           const SynthConfig& cfg = {});

/// Four objects: a table with an apple, a knife and a plate on it.
SceneGraph kitchen_fixture();

}  // namespace sgqa
