#include "sgqa/preprocess.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace sgqa {

PreprocessReport& PreprocessReport::operator+=(const PreprocessReport& o) {
  contradictory_values_removed += o.contradictory_values_removed;
  objects_merged += o.objects_merged;
  containers_removed += o.containers_removed;
  taxonomy_misses += o.taxonomy_misses;
  return *this;
}

namespace {

std::size_t strip_contradictions(AttributeMap& attributes, const ContradictionLexicon& lexicon) {
  std::size_t removed = 0;
  for (auto& [cat, values] : attributes) {
    std::set<std::string> doomed;
    for (auto a = values.begin(); a != values.end(); ++a) {
      for (auto b = std::next(a); b != values.end(); ++b) {
        if (lexicon.contradicts(cat, *a, *b)) {
          doomed.insert(*a);
          doomed.insert(*b);
        }
      }
    }
    for (const auto& v : doomed) removed += values.erase(v);
  }
  std::erase_if(attributes, [](const auto& kv) { return kv.second.empty(); });
  return removed;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // Lower index wins so the root is always the group's smallest object id.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

void drop_edges_to_missing(SceneGraph& g) {
  for (auto& [id, obj] : g.objects) {
    std::erase_if(obj.relations, [&](const Relation& r) { return !g.objects.contains(r.target); });
  }
}

// One round of merging; returns the number of objects folded away.
std::size_t merge_round(SceneGraph& g, const Ratio& threshold, const ContradictionLexicon& lexicon,
                        PreprocessReport* report) {
  std::vector<ObjectId> ids;
  ids.reserve(g.objects.size());
  for (const auto& [id, obj] : g.objects) ids.push_back(id);

  DisjointSets sets(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const ObjectNode& a = g.objects.at(ids[i]);
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const ObjectNode& b = g.objects.at(ids[j]);
      if (a.name == b.name && iou(a.bbox, b.bbox) > threshold) sets.unite(i, j);
    }
  }

  std::map<ObjectId, ObjectId> survivor;
  for (std::size_t i = 0; i < ids.size(); ++i) survivor[ids[i]] = ids[sets.find(i)];

  std::size_t folded = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const ObjectId keep = survivor[ids[i]];
    if (keep == ids[i]) continue;
    ObjectNode gone = std::move(g.objects.at(ids[i]));
    g.objects.erase(ids[i]);
    ObjectNode& dst = g.objects.at(keep);
    dst.bbox = union_rect(dst.bbox, gone.bbox);
    for (auto& [cat, values] : gone.attributes) dst.attributes[cat].insert(values.begin(), values.end());
    if (!dst.hypernym_key) dst.hypernym_key = gone.hypernym_key;
    dst.relations.insert(dst.relations.end(), gone.relations.begin(), gone.relations.end());
    ++folded;
  }
  if (folded == 0) return 0;

  for (auto& [id, obj] : g.objects) {
    for (auto& r : obj.relations) r.target = survivor.at(r.target);
    std::erase_if(obj.relations, [&](const Relation& r) { return r.target == id; });
    const std::size_t removed = strip_contradictions(obj.attributes, lexicon);
    if (report) report->contradictory_values_removed += removed;
  }
  normalize_relations(g);
  return folded;
}

}  // namespace

SceneGraph remove_contradictory_attributes(SceneGraph g, const ContradictionLexicon& lexicon,
                                           PreprocessReport* report) {
  for (auto& [id, obj] : g.objects) {
    const std::size_t removed = strip_contradictions(obj.attributes, lexicon);
    if (report) report->contradictory_values_removed += removed;
  }
  return g;
}

SceneGraph merge_duplicate_objects(SceneGraph g, double iou_threshold, const ContradictionLexicon& lexicon,
                                   PreprocessReport* report) {
  const Ratio threshold = Ratio::from_decimal(iou_threshold);
  drop_edges_to_missing(g);
  while (const std::size_t folded = merge_round(g, threshold, lexicon, report)) {
    if (report) report->objects_merged += folded;
  }
  return g;
}

SceneGraph remove_superclass_containers(SceneGraph g, const HypernymProvider& taxonomy,
                                        double containment_threshold, PreprocessReport* report) {
  const Ratio threshold = Ratio::from_decimal(containment_threshold);
  std::set<ObjectId> doomed;
  for (const auto& [big_id, big] : g.objects) {
    for (const auto& [small_id, small] : g.objects) {
      if (big_id == small_id || big.bbox.area() <= small.bbox.area()) continue;
      if (containment(big.bbox, small.bbox) < threshold) continue;
      const auto verdict = taxonomy.is_hypernym(big.taxonomy_key(), small.taxonomy_key());
      if (!verdict) {
        if (report) ++report->taxonomy_misses;
        continue;
      }
      if (*verdict) {
        doomed.insert(big_id);
        break;
      }
    }
  }
  for (ObjectId id : doomed) g.objects.erase(id);
  drop_edges_to_missing(g);
  if (report) report->containers_removed += doomed.size();
  return g;
}

SceneGraph preprocess(SceneGraph g, const Lexicons& lexicons, const PreprocessConfig& config,
                      PreprocessReport* report) {
  g = remove_contradictory_attributes(std::move(g), lexicons.contradictions, report);
  g = merge_duplicate_objects(std::move(g), config.iou_threshold, lexicons.contradictions, report);
  g = remove_superclass_containers(std::move(g), lexicons.taxonomy, config.containment_threshold, report);
  normalize_relations(g);
  g.preprocessed = true;
  return g;
}

}  // namespace sgqa
