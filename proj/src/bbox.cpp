#include "sgqa/bbox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sgqa {

namespace {

Ratio reduced(std::int64_t num, std::int64_t den) {
  if (den == 0) return {0, 1};
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Ratio{0, 1} : Ratio{num / g, den / g};
}

}  // namespace

Ratio Ratio::from_decimal(double value) {
  if (!std::isfinite(value) || value < 0) {
    throw std::invalid_argument("ratio must be a finite non-negative number");
  }
  std::int64_t den = 1;
  for (int digits = 0; digits <= 9; ++digits, den *= 10) {
    const double scaled = value * static_cast<double>(den);
    const double rounded = std::round(scaled);
    if (static_cast<double>(static_cast<std::int64_t>(rounded)) / static_cast<double>(den) == value) {
      return reduced(static_cast<std::int64_t>(rounded), den);
    }
  }
  den /= 10;
  return reduced(static_cast<std::int64_t>(std::llround(value * static_cast<double>(den))), den);
}

bool operator<(const Ratio& a, const Ratio& b) {
  return static_cast<Int128>(a.num) * b.den < static_cast<Int128>(b.num) * a.den;
}

bool operator==(const Ratio& a, const Ratio& b) {
  return static_cast<Int128>(a.num) * b.den == static_cast<Int128>(b.num) * a.den;
}

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const std::int64_t ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0 || ih <= 0) return 0;
  return iw * ih;
}

BoundingBox union_rect(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t x0 = std::min(a.x, b.x);
  const std::int64_t y0 = std::min(a.y, b.y);
  return {x0, y0, std::max(a.right(), b.right()) - x0, std::max(a.bottom(), b.bottom()) - y0};
}

Ratio iou(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t inter = intersection_area(a, b);
  const std::int64_t uni = a.area() + b.area() - inter;
  if (uni <= 0) return {0, 1};
  return {inter, uni};
}

Ratio containment(const BoundingBox& outer, const BoundingBox& inner) {
  const std::int64_t area = inner.area();
  if (area <= 0) return {0, 1};
  return {intersection_area(outer, inner), area};
}

std::string to_string(const BoundingBox& b) {
  return "(" + std::to_string(b.x) + "," + std::to_string(b.y) + "," + std::to_string(b.w) + "," +
         std::to_string(b.h) + ")";
}

}  // namespace sgqa
