#include "sgqa/scene_graph.hpp"

#include <algorithm>
#include <ostream>

#include "json_io.hpp"

namespace sgqa {

using detail::json;

bool ObjectNode::has_attribute(AttributeCategory c, const std::string& value) const {
  const auto it = attributes.find(c);
  return it != attributes.end() && it->second.contains(value);
}

const std::set<std::string>& ObjectNode::values(AttributeCategory c) const {
  static const std::set<std::string> empty;
  const auto it = attributes.find(c);
  return it == attributes.end() ? empty : it->second;
}

const ObjectNode* SceneGraph::find(ObjectId id) const {
  const auto it = objects.find(id);
  return it == objects.end() ? nullptr : &it->second;
}

std::size_t SceneGraph::count_named(const std::string& name) const {
  return static_cast<std::size_t>(
      std::count_if(objects.begin(), objects.end(), [&](const auto& kv) { return kv.second.name == name; }));
}

void normalize_relations(SceneGraph& g) {
  for (auto& [id, obj] : g.objects) {
    std::sort(obj.relations.begin(), obj.relations.end());
    obj.relations.erase(std::unique(obj.relations.begin(), obj.relations.end()), obj.relations.end());
  }
}

namespace {

const json& require(const json& obj, const char* field, const std::string& image_id) {
  const auto it = obj.find(field);
  if (it == obj.end()) {
    throw SchemaError("missing required field '" + std::string(field) + "' in image '" + image_id + "'");
  }
  return *it;
}

template <typename T>
T require_as(const json& obj, const char* field, const std::string& image_id) {
  const json& v = require(obj, field, image_id);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw SchemaError("field '" + std::string(field) + "' has the wrong type in image '" + image_id + "'");
  }
}

}  // namespace

SceneGraph scene_graph_from_json(const json& record, const AttributeLexicon& lexicon, LoadReport* report) {
  if (!record.is_object()) throw SchemaError("scene graph record must be a JSON object");
  SceneGraph g;
  if (!record.contains("image_id")) throw SchemaError("missing required field 'image_id' in image '<unknown>'");
  const json& image_id = record["image_id"];
  g.image_id = image_id.is_string() ? image_id.get<std::string>() : image_id.dump();
  g.preprocessed = record.value("preprocessed", false);

  const json& objects = require(record, "objects", g.image_id);
  if (!objects.is_array()) throw SchemaError("field 'objects' must be an array in image '" + g.image_id + "'");

  std::size_t unknown = 0;
  for (const json& o : objects) {
    if (!o.is_object()) throw SchemaError("object entries must be JSON objects in image '" + g.image_id + "'");
    ObjectNode node;
    node.id = require_as<ObjectId>(o, "object_id", g.image_id);
    node.name = require_as<std::string>(o, "name", g.image_id);
    if (node.name.empty()) throw SchemaError("field 'name' is empty in image '" + g.image_id + "'");
    if (const auto it = o.find("synset"); it != o.end() && it->is_string()) node.hypernym_key = it->get<std::string>();
    node.bbox = {require_as<std::int64_t>(o, "x", g.image_id), require_as<std::int64_t>(o, "y", g.image_id),
                 require_as<std::int64_t>(o, "w", g.image_id), require_as<std::int64_t>(o, "h", g.image_id)};
    if (!node.bbox.valid()) {
      throw SchemaError("field 'w'/'h' must be positive and 'x'/'y' non-negative for object " +
                        std::to_string(node.id) + " in image '" + g.image_id + "'");
    }
    for (const json& a : require(o, "attributes", g.image_id)) {
      if (!a.is_string()) throw SchemaError("attribute values must be strings in image '" + g.image_id + "'");
      const std::string value = a.get<std::string>();
      if (const auto cat = lexicon.category_of(value)) {
        node.attributes[*cat].insert(value);
      } else {
        ++unknown;
      }
    }
    for (const json& r : require(o, "relations", g.image_id)) {
      node.relations.push_back(
          {require_as<std::string>(r, "predicate", g.image_id), require_as<ObjectId>(r, "object_id", g.image_id)});
    }
    const ObjectId id = node.id;
    if (!g.objects.emplace(id, std::move(node)).second) {
      throw SchemaError("duplicate object_id " + std::to_string(id) + " in image '" + g.image_id + "'");
    }
  }

  std::size_t dangling = 0;
  for (auto& [id, obj] : g.objects) {
    const auto before = obj.relations.size();
    std::erase_if(obj.relations, [&](const Relation& r) { return !g.objects.contains(r.target); });
    dangling += before - obj.relations.size();
  }
  normalize_relations(g);

  if (report) {
    report->graphs += 1;
    report->objects += g.objects.size();
    report->dangling_edges += dangling;
    report->unknown_attributes += unknown;
  }
  return g;
}

std::vector<SceneGraph> parse_scene_graphs(const std::string& text, const AttributeLexicon& lexicon,
                                           LoadReport* report, const std::string& origin) {
  std::vector<SceneGraph> graphs;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return graphs;
  if (text[first] == '[') {
    const json doc = detail::parse_json(text, origin);
    for (const json& rec : doc) graphs.push_back(scene_graph_from_json(rec, lexicon, report));
  } else {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      const std::string line = text.substr(start, end - start);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        graphs.push_back(scene_graph_from_json(detail::parse_json(line, origin, start), lexicon, report));
      }
      start = end + 1;
    }
  }
  std::stable_sort(graphs.begin(), graphs.end(),
                   [](const SceneGraph& a, const SceneGraph& b) { return a.image_id < b.image_id; });
  return graphs;
}

std::vector<SceneGraph> load_scene_graphs(const std::filesystem::path& path, const AttributeLexicon& lexicon,
                                          LoadReport* report) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw std::runtime_error("input not found: " + path.string());
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".json" || ext == ".jsonl")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<SceneGraph> all;
  for (const auto& f : files) {
    auto part = parse_scene_graphs(detail::read_file(f), lexicon, report, f.string());
    std::move(part.begin(), part.end(), std::back_inserter(all));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const SceneGraph& a, const SceneGraph& b) { return a.image_id < b.image_id; });
  return all;
}

json to_json(const SceneGraph& g) {
  json objects = json::array();
  for (const auto& [id, obj] : g.objects) {
    json attrs = json::array();
    for (const auto& [cat, values] : obj.attributes) {
      for (const auto& v : values) attrs.push_back(v);
    }
    json rels = json::array();
    for (const auto& r : obj.relations) rels.push_back({{"predicate", r.predicate}, {"object_id", r.target}});
    json o = {{"object_id", id}, {"name", obj.name}};
    if (obj.hypernym_key) o["synset"] = *obj.hypernym_key;
    o["x"] = obj.bbox.x;
    o["y"] = obj.bbox.y;
    o["w"] = obj.bbox.w;
    o["h"] = obj.bbox.h;
    o["attributes"] = std::move(attrs);
    o["relations"] = std::move(rels);
    objects.push_back(std::move(o));
  }
  return {{"image_id", g.image_id}, {"preprocessed", g.preprocessed}, {"objects", std::move(objects)}};
}

void write_scene_graphs_jsonl(std::ostream& out, const std::vector<SceneGraph>& graphs) {
  for (const auto& g : graphs) out << to_json(g).dump() << '\n';
}

}  // namespace sgqa
