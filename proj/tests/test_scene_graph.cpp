#include <algorithm>

#include "doctest.h"
#include "sgqa/errors.hpp"
#include "support.hpp"

using namespace sgqa;

namespace {

const char* kTwoGraphs = R"([
  {"image_id": "b", "objects": [
    {"object_id": 1, "name": "apple", "x": 0, "y": 0, "w": 10, "h": 10,
     "attributes": ["red", "shiny-unknown"], "relations": [{"predicate": "on", "object_id": 2},
                                                          {"predicate": "near", "object_id": 99}]},
    {"object_id": 2, "name": "table", "x": 0, "y": 5, "w": 50, "h": 20, "attributes": [], "relations": []}
  ]},
  {"image_id": "a", "objects": []}
])";

}  // namespace

TEST_CASE("loads an array, sorts by image and counts drops") {
  LoadReport rep;
  const auto graphs = parse_scene_graphs(kTwoGraphs, test::lexicons().attributes, &rep);
  REQUIRE(graphs.size() == 2);
  CHECK(graphs[0].image_id == "a");
  const SceneGraph& g = graphs[1];
  CHECK(g.objects.size() == 2);
  CHECK(g.objects.at(1).has_attribute(AttributeCategory::color, "red"));
  CHECK(g.objects.at(1).relations.size() == 1);
  CHECK(rep.dangling_edges == 1);
  CHECK(rep.unknown_attributes == 1);
  CHECK(rep.objects == 2);
}

TEST_CASE("JSONL round trip") {
  const auto graphs = parse_scene_graphs(kTwoGraphs, test::lexicons().attributes);
  std::ostringstream out;
  write_scene_graphs_jsonl(out, graphs);
  const auto again = parse_scene_graphs(out.str(), test::lexicons().attributes);
  CHECK(again == graphs);
}

TEST_CASE("schema errors name the field and image") {
  const auto& lex = test::lexicons().attributes;
  const auto fails_with = [&](const std::string& text, const std::string& needle) {
    std::string line = text;
    std::replace(line.begin(), line.end(), '\n', ' ');
    try {
      parse_scene_graphs(line, lex);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  fails_with(R"({"image_id": "x", "objects": [{"object_id": 1, "x": 0, "y": 0, "w": 1, "h": 1,
              "attributes": [], "relations": []}]})",
             "'name'");
  fails_with(R"({"image_id": "x", "objects": [
              {"object_id": 1, "name": "a", "x": 0, "y": 0, "w": 1, "h": 1, "attributes": [], "relations": []},
              {"object_id": 1, "name": "b", "x": 0, "y": 0, "w": 1, "h": 1, "attributes": [], "relations": []}]})",
             "duplicate object_id 1");
  fails_with(R"({"image_id": "x", "objects": [{"object_id": 1, "name": "a", "x": 0, "y": 0, "w": 0, "h": 1,
              "attributes": [], "relations": []}]})",
             "image 'x'");
  fails_with(R"({"objects": []})", "'image_id'");
}

TEST_CASE("malformed JSON reports a position") {
  try {
    parse_scene_graphs("{\"image_id\": \"a\",\n", test::lexicons().attributes);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() > 0);
  }
}
