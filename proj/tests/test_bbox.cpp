#include "doctest.h"
#include "oracles.hpp"
#include "sgqa/bbox.hpp"
#include "sgqa/rng.hpp"

using namespace sgqa;

TEST_CASE("ratio from decimal is exact") {
  const Ratio r = Ratio::from_decimal(0.7);
  CHECK(r == Ratio{7, 10});
  CHECK(Ratio{70, 100} == r);
  CHECK(Ratio{71, 100} > r);
  CHECK(Ratio{69, 100} < r);
  CHECK(Ratio::from_decimal(1.0) == Ratio{1, 1});
}

TEST_CASE("iou of simple boxes") {
  const BoundingBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == Ratio{1, 1});
  CHECK(iou(a, {20, 20, 5, 5}) == Ratio{0, 1});
  // half overlap: 50 / 150
  CHECK(iou(a, {5, 0, 10, 10}) == Ratio{1, 3});
  // touching edges do not overlap
  CHECK(intersection_area(a, {10, 0, 10, 10}) == 0);
}

TEST_CASE("containment and union rectangle") {
  const BoundingBox outer{0, 0, 100, 100};
  const BoundingBox inner{10, 10, 20, 20};
  CHECK(containment(outer, inner) == Ratio{1, 1});
  CHECK(containment(inner, outer) == Ratio{400, 10000});
  CHECK(union_rect({0, 0, 5, 5}, {10, 10, 5, 5}) == BoundingBox{0, 0, 15, 15});
}

TEST_CASE("iou agrees with the pixel grid") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto box = [&] {
      return BoundingBox{static_cast<std::int64_t>(rng.below(30)), static_cast<std::int64_t>(rng.below(30)),
                         1 + static_cast<std::int64_t>(rng.below(20)), 1 + static_cast<std::int64_t>(rng.below(20))};
    };
    const BoundingBox a = box(), b = box();
    const auto px = oracle::pixel_iou(a, b);
    CHECK(iou(a, b) == Ratio{px.inter, px.uni});
  }
}

TEST_CASE("validity") {
  CHECK(BoundingBox{0, 0, 1, 1}.valid());
  CHECK_FALSE(BoundingBox{0, 0, 0, 1}.valid());
  CHECK_FALSE(BoundingBox{-1, 0, 1, 1}.valid());
}
