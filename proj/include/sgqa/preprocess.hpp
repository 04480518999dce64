#pragma once

#include <cstddef>

#include "sgqa/lexicon.hpp"
#include "sgqa/scene_graph.hpp"

namespace sgqa {

struct PreprocessConfig {
  /// Same-name boxes merge when IoU is strictly above this.
  double iou_threshold = 0.7;
  /// A container is dropped when intersection / smaller-area reaches this.
  double containment_threshold = 0.8;
};

struct PreprocessReport {
  std::size_t contradictory_values_removed = 0;
  std::size_t objects_merged = 0;
  std::size_t containers_removed = 0;
  std::size_t taxonomy_misses = 0;

  PreprocessReport& operator+=(const PreprocessReport& o);
};

/// Drops both members of every contradictory value pair, per category.
SceneGraph remove_contradictory_attributes(SceneGraph g, const ContradictionLexicon& lexicon,
                                           PreprocessReport* report = nullptr);

/// Union-find merge of same-name objects whose IoU exceeds the threshold.
/// Repeats until no same-name pair exceeds it, since a merged box can start
/// overlapping a box that neither original did. The smallest id survives.
SceneGraph merge_duplicate_objects(SceneGraph g, double iou_threshold, const ContradictionLexicon& lexicon,
                                   PreprocessReport* report = nullptr);

/// Removes larger boxes that mostly contain a smaller box whose name the
/// taxonomy places under the larger one's name ("fruits" over "apple").
/// Decisions are taken against the input graph, then applied together.
SceneGraph remove_superclass_containers(SceneGraph g, const HypernymProvider& taxonomy,
                                        double containment_threshold, PreprocessReport* report = nullptr);

/// Full cleaning pass; idempotent. Sets `preprocessed`.
SceneGraph preprocess(SceneGraph g, const Lexicons& lexicons, const PreprocessConfig& config,
                      PreprocessReport* report = nullptr);

}  // namespace sgqa
