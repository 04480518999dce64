#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgqa/scene_graph.hpp"

namespace sgqa {

/// Which end of an edge an object sits on.
enum class Direction { subject, object };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);
inline Direction flip(Direction d) { return d == Direction::subject ? Direction::object : Direction::subject; }

/// A property an object can share with others: an attribute value, or an
/// edge of a given predicate to an object of a given name. For relation
/// features `direction` is the role of the object that owns the feature.
struct Feature {
  enum class Kind { attribute, relation };

  Kind kind = Kind::attribute;
  AttributeCategory category = AttributeCategory::color;
  std::string value;  // attribute value, or the predicate for relations
  Direction direction = Direction::subject;
  std::string target_name;

  static Feature attr(AttributeCategory c, std::string v) {
    return {Kind::attribute, c, std::move(v), Direction::subject, {}};
  }
  static Feature rel(std::string predicate, Direction d, std::string target) {
    return {Kind::relation, AttributeCategory::color, std::move(predicate), d, std::move(target)};
  }

  bool is_attr() const { return kind == Kind::attribute; }
  bool is_rel() const { return kind == Kind::relation; }
  const std::string& predicate() const { return value; }

  std::string to_string() const;
  friend bool operator==(const Feature& a, const Feature& b);
  friend std::strong_ordering operator<=>(const Feature& a, const Feature& b);
};

using FeatureSet = std::vector<Feature>;  // sorted, unique

struct Cluster {
  std::string image_id;
  FeatureSet features;
  std::vector<ObjectId> members;  // sorted, size >= 2

  bool has_relation() const;
  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Sorted by (features, members).
void sort_canonically(std::vector<Cluster>& clusters);

struct HopEdge {
  std::string predicate;
  Direction direction;  // role of the owning object
  ObjectId neighbor;

  friend auto operator<=>(const HopEdge&, const HopEdge&) = default;
};

/// Both directions of every edge, per object, sorted by (predicate, neighbor).
struct HopContext {
  std::map<ObjectId, std::vector<HopEdge>> edges;

  const std::vector<HopEdge>& at(ObjectId id) const;
};

/// Every feature the object carries in graph `g`, sorted.
FeatureSet features_of(const SceneGraph& g, ObjectId id);

bool possesses(const SceneGraph& g, ObjectId id, const Feature& f);

/// One cluster per feature shared by at least two objects.
std::vector<Cluster> build_base_clusters(const SceneGraph& g);

inline constexpr std::size_t kDefaultMaxFeatures = 4;

/// Closure under "two clusters sharing >= 2 members spawn a cluster on the
/// union of their features", keeping feature sets up to `max_features`.
std::vector<Cluster> merge_clusters(const std::vector<Cluster>& base, std::size_t max_features = kDefaultMaxFeatures);

HopContext build_hop_context(const SceneGraph& g);

nlohmann::json to_json(const Feature& f);
nlohmann::json to_json(const Cluster& c);

}  // namespace sgqa
