#include "sgqa/clustering.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <tuple>

namespace sgqa {

std::string_view to_string(Direction d) { return d == Direction::subject ? "subject" : "object"; }

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "subject" || s == "s") return Direction::subject;
  if (s == "object" || s == "o") return Direction::object;
  return std::nullopt;
}

std::string Feature::to_string() const {
  if (is_attr()) return std::string(sgqa::to_string(category)) + "=" + value;
  return value + "/" + std::string(sgqa::to_string(direction)) + "/" + target_name;
}

bool operator==(const Feature& a, const Feature& b) {
  if (a.kind != b.kind) return false;
  if (a.is_attr()) return a.category == b.category && a.value == b.value;
  return a.value == b.value && a.direction == b.direction && a.target_name == b.target_name;
}

std::strong_ordering operator<=>(const Feature& a, const Feature& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (a.is_attr()) {
    if (auto c = a.category <=> b.category; c != 0) return c;
    return a.value <=> b.value;
  }
  if (auto c = a.value <=> b.value; c != 0) return c;
  if (auto c = a.direction <=> b.direction; c != 0) return c;
  return a.target_name <=> b.target_name;
}

bool Cluster::has_relation() const {
  return std::any_of(features.begin(), features.end(), [](const Feature& f) { return f.is_rel(); });
}

void sort_canonically(std::vector<Cluster>& clusters) {
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.features != b.features) {
      return std::lexicographical_compare(a.features.begin(), a.features.end(), b.features.begin(), b.features.end());
    }
    return a.members < b.members;
  });
}

const std::vector<HopEdge>& HopContext::at(ObjectId id) const {
  static const std::vector<HopEdge> empty;
  const auto it = edges.find(id);
  return it == edges.end() ? empty : it->second;
}

FeatureSet features_of(const SceneGraph& g, ObjectId id) {
  std::set<Feature> out;
  const ObjectNode& obj = g.objects.at(id);
  for (const auto& [cat, values] : obj.attributes) {
    for (const auto& v : values) out.insert(Feature::attr(cat, v));
  }
  for (const auto& r : obj.relations) {
    out.insert(Feature::rel(r.predicate, Direction::subject, g.objects.at(r.target).name));
  }
  for (const auto& [other_id, other] : g.objects) {
    for (const auto& r : other.relations) {
      if (r.target == id) out.insert(Feature::rel(r.predicate, Direction::object, other.name));
    }
  }
  return {out.begin(), out.end()};
}

bool possesses(const SceneGraph& g, ObjectId id, const Feature& f) {
  const ObjectNode* obj = g.find(id);
  if (!obj) return false;
  if (f.is_attr()) return obj->has_attribute(f.category, f.value);
  if (f.direction == Direction::subject) {
    return std::any_of(obj->relations.begin(), obj->relations.end(), [&](const Relation& r) {
      return r.predicate == f.predicate() && g.objects.at(r.target).name == f.target_name;
    });
  }
  return std::any_of(g.objects.begin(), g.objects.end(), [&](const auto& kv) {
    if (kv.second.name != f.target_name) return false;
    const auto& rels = kv.second.relations;
    return std::any_of(rels.begin(), rels.end(),
                       [&](const Relation& r) { return r.predicate == f.predicate() && r.target == id; });
  });
}

std::vector<Cluster> build_base_clusters(const SceneGraph& g) {
  std::map<Feature, std::vector<ObjectId>> holders;
  for (const auto& [id, obj] : g.objects) {
    for (auto& f : features_of(g, id)) holders[std::move(f)].push_back(id);
  }
  std::vector<Cluster> clusters;
  for (auto& [feature, members] : holders) {
    if (members.size() < 2) continue;
    clusters.push_back({g.image_id, {feature}, std::move(members)});
  }
  sort_canonically(clusters);
  return clusters;
}

namespace {

std::vector<ObjectId> intersect(const std::vector<ObjectId>& a, const std::vector<ObjectId>& b) {
  std::vector<ObjectId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

FeatureSet unite(const FeatureSet& a, const FeatureSet& b) {
  FeatureSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<Cluster> merge_clusters(const std::vector<Cluster>& base, std::size_t max_features) {
  std::vector<Cluster> all;
  std::set<FeatureSet> seen;
  for (const Cluster& c : base) {
    if (seen.insert(c.features).second) all.push_back(c);
  }

  // Each cluster is paired with everything that exists when it is visited;
  // anything created later visits it in turn, so every pair is tried once.
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (all[i].features.size() + 1 > max_features && all[j].features.size() + 1 > max_features) {
        // union of two distinct sets at the cap is always above it
        continue;
      }
      FeatureSet features = unite(all[i].features, all[j].features);
      if (features.size() > max_features || seen.contains(features)) continue;
      std::vector<ObjectId> members = intersect(all[i].members, all[j].members);
      if (members.size() < 2) continue;
      seen.insert(features);
      all.push_back(Cluster{all[i].image_id, std::move(features), std::move(members)});
    }
  }
  sort_canonically(all);
  return all;
}

HopContext build_hop_context(const SceneGraph& g) {
  HopContext ctx;
  for (const auto& [id, obj] : g.objects) ctx.edges[id];
  for (const auto& [id, obj] : g.objects) {
    for (const auto& r : obj.relations) {
      ctx.edges[id].push_back({r.predicate, Direction::subject, r.target});
      ctx.edges[r.target].push_back({r.predicate, Direction::object, id});
    }
  }
  for (auto& [id, list] : ctx.edges) {
    std::sort(list.begin(), list.end(), [](const HopEdge& a, const HopEdge& b) {
      return std::tie(a.predicate, a.neighbor, a.direction) < std::tie(b.predicate, b.neighbor, b.direction);
    });
  }
  return ctx;
}

nlohmann::json to_json(const Feature& f) {
  if (f.is_attr()) return {{"kind", "attr"}, {"category", to_string(f.category)}, {"value", f.value}};
  return {{"kind", "rel"}, {"predicate", f.value}, {"direction", to_string(f.direction)}, {"target", f.target_name}};
}

nlohmann::json to_json(const Cluster& c) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : c.features) features.push_back(to_json(f));
  return {{"features", std::move(features)}, {"members", c.members}};
}

}  // namespace sgqa
