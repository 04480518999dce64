#include <cmath>

#include "doctest.h"
#include "sgqa/stats.hpp"

using namespace sgqa;

namespace {

QuestionRecord rec(std::size_t hops, std::size_t objects = 2, std::size_t length = 8,
                   ReasoningType t = ReasoningType::query) {
  QuestionRecord r;
  r.n_hops = hops;
  r.n_objects = objects;
  r.length_tokens = length;
  r.reasoning_type = t;
  r.attribute = AttributeCategory::color;
  return r;
}

}  // namespace

TEST_CASE("three records with hops 1, 1, 2") {
  const auto s = compute_stats({rec(1), rec(1), rec(2)});
  CHECK(s.records() == 3);
  CHECK(s.hops().mean() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(s.hop_histogram() == Histogram{{1, 2}, {2, 1}});
  const MeanCI ci = mean_ci(s.hops());
  CHECK(ci.status == MeanCI::Status::ok);
  const double sd = std::sqrt(1.0 / 3.0);
  CHECK(std::abs(ci.sd - sd) < 1e-12);
  CHECK(std::abs((ci.upper - ci.lower) / 2 - 1.96 * sd / std::sqrt(3.0)) < 1e-12);
}

TEST_CASE("a single record is degenerate, none is undefined") {
  const MeanCI one = mean_ci(compute_stats({rec(2)}).hops());
  CHECK(one.status == MeanCI::Status::degenerate);
  CHECK(one.lower == one.upper);
  const auto empty = compute_stats({});
  CHECK(mean_ci(empty.hops()).status == MeanCI::Status::undefined);
  CHECK(empty.to_json()["hops"]["ci95"].is_null());
}

TEST_CASE("merging shards equals one pass, in any order") {
  std::vector<QuestionRecord> all;
  for (std::size_t i = 0; i < 200; ++i) {
    all.push_back(rec(i % 3, 1 + i % 5, 5 + i % 11, static_cast<ReasoningType>(i % 5)));
  }
  const CorpusStats whole = compute_stats(all);
  CorpusStats merged = compute_stats({all.begin(), all.begin() + 70});
  merged.merge(compute_stats({all.begin() + 70, all.end()}));
  CHECK(merged == whole);
  std::reverse(all.begin(), all.end());
  CHECK(compute_stats(all) == whole);
  CHECK(whole.to_json().dump() == merged.to_json().dump());
}

TEST_CASE("histogram totals equal the record count") {
  std::vector<QuestionRecord> all;
  for (std::size_t i = 0; i < 50; ++i) all.push_back(rec(i % 4, i % 6, i % 9, static_cast<ReasoningType>(i % 5)));
  const auto s = compute_stats(all);
  const auto total = [](const Histogram& h) {
    std::uint64_t n = 0;
    for (const auto& [k, v] : h) n += v;
    return n;
  };
  CHECK(total(s.hop_histogram()) == 50);
  CHECK(total(s.object_histogram()) == 50);
  std::uint64_t lengths = 0;
  for (const auto& [t, h] : s.length_histograms()) lengths += total(h);
  CHECK(lengths == 50);
  CHECK(s.histograms_csv().rfind("histogram,group,value,count\n", 0) == 0);
}
