#include "doctest.h"
#include "support.hpp"

using namespace sgqa;

TEST_CASE("attribute lexicon covers all categories") {
  const auto& lex = test::lexicons();
  for (AttributeCategory c : kAllAttributeCategories) CHECK_FALSE(lex.attributes.values_of(c).empty());
  CHECK(lex.attributes.category_of("red") == AttributeCategory::color);
  CHECK(lex.attributes.category_of("short") == AttributeCategory::height);
  CHECK_FALSE(lex.attributes.category_of("not-a-value").has_value());
}

TEST_CASE("contradictions are symmetric") {
  const auto& c = test::lexicons().contradictions;
  CHECK(c.contradicts(AttributeCategory::color, "red", "green"));
  CHECK(c.contradicts(AttributeCategory::color, "green", "red"));
  CHECK_FALSE(c.contradicts(AttributeCategory::size, "red", "green"));
}

TEST_CASE("taxonomy answers hypernym queries") {
  const auto& t = test::lexicons().taxonomy;
  CHECK(t.is_hypernym("fruit", "apple") == true);
  CHECK(t.is_hypernym("utensil", "knife") == true);
  CHECK(t.is_hypernym("cat", "tail") == false);
  CHECK_FALSE(t.is_hypernym("fruit", "unknown-thing").has_value());
  const auto leaves = t.leaves();
  CHECK(std::find(leaves.begin(), leaves.end(), "apple") != leaves.end());
  CHECK(std::find(leaves.begin(), leaves.end(), "fruit") == leaves.end());
}

TEST_CASE("relation inverses work both ways") {
  const auto& inv = test::lexicons().inverses;
  CHECK(inv.inverse_of("left of") == "right of");
  CHECK(inv.inverse_of("right of") == "left of");
  CHECK(inv.inverse_of("behind") == "in front of");
  CHECK_FALSE(inv.inverse_of("holding").has_value());
}
