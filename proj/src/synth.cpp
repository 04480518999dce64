#include "sgqa/synth.hpp"

#include <algorithm>
#include <cstdio>

namespace sgqa {

SceneGraph synth_scene_graph(const Lexicons& lex, const std::string& image_id, Rng& rng, const SynthConfig& cfg) {
  SceneGraph g;
  g.image_id = image_id;

  std::vector<std::string> names = lex.taxonomy.leaves();
  rng.shuffle(names);
  names.resize(std::min(names.size(), std::max<std::size_t>(1, cfg.names_per_image)));

  std::vector<AttributeCategory> cats(kAllAttributeCategories.begin(), kAllAttributeCategories.end());
  std::erase_if(cats, [&](AttributeCategory c) { return lex.attributes.values_of(c).empty(); });
  rng.shuffle(cats);
  cats.resize(std::min(cats.size(), cfg.categories_per_image));
  std::vector<std::pair<AttributeCategory, std::vector<std::string>>> palette;
  for (AttributeCategory c : cats) {
    std::vector<std::string> values = lex.attributes.values_of(c);
    rng.shuffle(values);
    values.resize(std::min(values.size(), cfg.values_per_category));
    palette.emplace_back(c, std::move(values));
  }

  const std::size_t span = cfg.max_objects - cfg.min_objects + 1;
  const std::size_t n = cfg.min_objects + static_cast<std::size_t>(rng.below(span));
  for (std::size_t i = 0; i < n; ++i) {
    ObjectNode o;
    o.id = static_cast<ObjectId>(i);
    o.name = rng.pick(names);
    o.bbox = {static_cast<std::int64_t>(rng.below(400)), static_cast<std::int64_t>(rng.below(400)),
              10 + static_cast<std::int64_t>(rng.below(110)), 10 + static_cast<std::int64_t>(rng.below(110))};
    for (const auto& [cat, values] : palette) {
      if (rng.chance(cfg.attribute_chance)) o.attributes[cat].insert(rng.pick(values));
    }
    g.objects.emplace(o.id, std::move(o));
  }

  const double p = n > 1 ? std::min(0.5, cfg.edges_per_object / static_cast<double>(n - 1)) : 0.0;
  for (auto& [id, o] : g.objects) {
    for (const auto& [other, unused] : g.objects) {
      if (other != id && rng.chance(p)) o.relations.push_back({rng.pick(cfg.predicates), other});
    }
  }

  ObjectId next = static_cast<ObjectId>(n);
  if (rng.chance(cfg.duplicate_chance)) {
    const ObjectNode& src = g.objects.at(static_cast<ObjectId>(rng.below(n)));
    ObjectNode dup;
    dup.id = next++;
    dup.name = src.name;
    dup.bbox = {src.bbox.x + 1, src.bbox.y, src.bbox.w, src.bbox.h};
    dup.attributes = src.attributes;
    g.objects.emplace(dup.id, std::move(dup));
  }
  if (rng.chance(cfg.container_chance)) {
    const ObjectNode& inner = g.objects.at(static_cast<ObjectId>(rng.below(n)));
    const auto& anc = lex.taxonomy.ancestors_of(inner.name);
    if (!anc.empty()) {
      std::vector<std::string> options(anc.begin(), anc.end());
      ObjectNode box;
      box.id = next++;
      box.name = rng.pick(options);
      box.bbox = {inner.bbox.x, inner.bbox.y, inner.bbox.w + 20, inner.bbox.h + 20};
      g.objects.emplace(box.id, std::move(box));
    }
  }
  normalize_relations(g);
  return g;
}

std::vector<SceneGraph> synth_scene_graphs(const Lexicons& lex, std::uint64_t seed, std::size_t count,
                                           const SynthConfig& cfg) {
  const Rng root(seed);
  std::vector<SceneGraph> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "synth-%06zu", i);
    Rng rng = root.split(id);
    out.push_back(synth_scene_graph(lex, id, rng, cfg));
  }
  return out;
}

SceneGraph kitchen_fixture() {
  SceneGraph g;
  g.image_id = "kitchen";
  const auto add = [&](ObjectId id, std::string name, BoundingBox box, AttributeMap attrs) {
    g.objects.emplace(id, ObjectNode{id, std::move(name), std::nullopt, box, std::move(attrs), {}});
  };
  add(0, "table", {0, 200, 400, 150}, {{AttributeCategory::material, {"wood"}}, {AttributeCategory::color, {"brown"}}});
  add(1, "apple", {40, 170, 40, 40}, {{AttributeCategory::color, {"red"}}, {AttributeCategory::size, {"small"}}});
  add(2, "knife", {120, 190, 80, 12}, {{AttributeCategory::color, {"silver"}}, {AttributeCategory::material, {"metal"}}});
  add(3, "plate", {240, 180, 90, 30}, {{AttributeCategory::color, {"white"}}, {AttributeCategory::shape, {"round"}}});
  for (ObjectId id : {1, 2, 3}) g.objects.at(id).relations.push_back({"on", 0});
  g.objects.at(1).relations.push_back({"left of", 2});
  g.objects.at(2).relations.push_back({"left of", 3});
  normalize_relations(g);
  return g;
}

}  // namespace sgqa
