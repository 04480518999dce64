#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgqa/attributes.hpp"
#include "sgqa/bbox.hpp"
#include "sgqa/lexicon.hpp"

namespace sgqa {

using ObjectId = std::int64_t;

/// Directed edge owned by its subject: subject --predicate--> target.
struct Relation {
  std::string predicate;
  ObjectId target = 0;

  friend auto operator<=>(const Relation&, const Relation&) = default;
};

using AttributeMap = std::map<AttributeCategory, std::set<std::string>>;

struct ObjectNode {
  ObjectId id = 0;
  std::string name;
  std::optional<std::string> hypernym_key;
  BoundingBox bbox;
  AttributeMap attributes;
  /// Outgoing edges, kept sorted and unique.
  std::vector<Relation> relations;

  bool has_attribute(AttributeCategory c, const std::string& value) const;
  const std::set<std::string>& values(AttributeCategory c) const;
  /// Key used for taxonomy lookups: the synset if present, else the name.
  const std::string& taxonomy_key() const { return hypernym_key ? *hypernym_key : name; }

  friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

struct SceneGraph {
  std::string image_id;
  std::map<ObjectId, ObjectNode> objects;
  bool preprocessed = false;

  const ObjectNode* find(ObjectId id) const;
  /// Number of objects carrying `name`.
  std::size_t count_named(const std::string& name) const;

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

/// Sorts and deduplicates every object's edge list.
void normalize_relations(SceneGraph& g);

struct LoadReport {
  std::size_t graphs = 0;
  std::size_t objects = 0;
  std::size_t dangling_edges = 0;
  std::size_t unknown_attributes = 0;
};

/// Reads scene graphs from a JSON array file, a JSONL file, or a directory
/// of such files (taken in filename order). Output is stably sorted by
/// image_id. Dangling edges and attribute values missing from the lexicon
/// are dropped and counted in `report`.
std::vector<SceneGraph> load_scene_graphs(const std::filesystem::path& path, const AttributeLexicon& lexicon,
                                          LoadReport* report = nullptr);

/// Same as load_scene_graphs but from in-memory text.
std::vector<SceneGraph> parse_scene_graphs(const std::string& text, const AttributeLexicon& lexicon,
                                           LoadReport* report = nullptr, const std::string& origin = "<input>");

SceneGraph scene_graph_from_json(const nlohmann::json& record, const AttributeLexicon& lexicon,
                                 LoadReport* report = nullptr);
nlohmann::json to_json(const SceneGraph& g);

/// One graph per line, canonical field order.
void write_scene_graphs_jsonl(std::ostream& out, const std::vector<SceneGraph>& graphs);

}  // namespace sgqa
