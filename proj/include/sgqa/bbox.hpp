#pragma once

#include <cstdint>
#include <string>

namespace sgqa {

/// Exact non-negative fraction. Used for overlap ratios so that threshold
/// comparisons on integer boxes never depend on floating-point rounding.
__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Parses a decimal threshold such as 0.7 into 7/10. Accepts up to nine
  /// fractional digits; anything finer is rounded to the nearest 1e-9.
  static Ratio from_decimal(double value);

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator<(const Ratio& a, const Ratio& b);
  friend bool operator==(const Ratio& a, const Ratio& b);
  friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
  friend bool operator>=(const Ratio& a, const Ratio& b) { return !(a < b); }
  friend bool operator<=(const Ratio& a, const Ratio& b) { return !(b < a); }
};

struct BoundingBox {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;
  std::int64_t h = 0;

  std::int64_t area() const { return w * h; }
  std::int64_t right() const { return x + w; }
  std::int64_t bottom() const { return y + h; }
  bool valid() const { return x >= 0 && y >= 0 && w > 0 && h > 0; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Smallest rectangle covering both boxes.
BoundingBox union_rect(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union as an exact fraction (0/1 for disjoint boxes).
Ratio iou(const BoundingBox& a, const BoundingBox& b);

/// intersection / area(inner); how much of `inner` lies inside `outer`.
Ratio containment(const BoundingBox& outer, const BoundingBox& inner);

std::string to_string(const BoundingBox& b);

}  // namespace sgqa
