#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace sgqa {

enum class AttributeCategory {
  color,
  cleanliness,
  material,
  size,
  pose,
  height,
  weather,
  length,
  tone,
  shape,
  activity,
  sport_activity,
  age,
  pattern,
};

inline constexpr std::size_t kAttributeCategoryCount = 14;

inline constexpr std::array<AttributeCategory, kAttributeCategoryCount> kAllAttributeCategories = {
    AttributeCategory::color,    AttributeCategory::cleanliness, AttributeCategory::material,
    AttributeCategory::size,     AttributeCategory::pose,        AttributeCategory::height,
    AttributeCategory::weather,  AttributeCategory::length,      AttributeCategory::tone,
    AttributeCategory::shape,    AttributeCategory::activity,    AttributeCategory::sport_activity,
    AttributeCategory::age,      AttributeCategory::pattern,
};

std::string_view to_string(AttributeCategory c);

/// Human-readable form used in question text ("sport activity").
std::string display_name(AttributeCategory c);

std::optional<AttributeCategory> parse_category(std::string_view s);

}  // namespace sgqa
