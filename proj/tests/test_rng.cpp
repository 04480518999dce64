#include "doctest.h"
#include "sgqa/rng.hpp"

using namespace sgqa;

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("split is stable and independent of draws on the parent") {
  Rng a(42);
  const Rng s1 = a.split("img-1");
  a.next();
  Rng s2 = a.split("img-1");
  Rng s1c = s1;
  CHECK(s1c.next() == s2.next());
  CHECK(Rng(42).split("img-1").next() != Rng(42).split("img-2").next());
}

TEST_CASE("below stays in range and hits every value") {
  Rng r(1);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = r.below(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  for (int c : seen) CHECK(c > 800);
}

TEST_CASE("shuffle is a permutation") {
  Rng r(2);
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  auto w = v;
  r.shuffle(w);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}

TEST_CASE("stable hash is fixed") {
  CHECK(stable_hash("") == 0xcbf29ce484222325ull);
  CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cull);
}
