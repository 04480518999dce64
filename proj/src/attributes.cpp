#include "sgqa/attributes.hpp"

#include <algorithm>

namespace sgqa {

std::string_view to_string(AttributeCategory c) {
  switch (c) {
    case AttributeCategory::color: return "color";
    case AttributeCategory::cleanliness: return "cleanliness";
    case AttributeCategory::material: return "material";
    case AttributeCategory::size: return "size";
    case AttributeCategory::pose: return "pose";
    case AttributeCategory::height: return "height";
    case AttributeCategory::weather: return "weather";
    case AttributeCategory::length: return "length";
    case AttributeCategory::tone: return "tone";
    case AttributeCategory::shape: return "shape";
    case AttributeCategory::activity: return "activity";
    case AttributeCategory::sport_activity: return "sport_activity";
    case AttributeCategory::age: return "age";
    case AttributeCategory::pattern: return "pattern";
  }
  return "unknown";
}

std::string display_name(AttributeCategory c) {
  std::string s(to_string(c));
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

std::optional<AttributeCategory> parse_category(std::string_view s) {
  for (AttributeCategory c : kAllAttributeCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

}  // namespace sgqa
