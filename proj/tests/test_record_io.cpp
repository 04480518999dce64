#include "doctest.h"
#include "sgqa/errors.hpp"
#include "sgqa/preprocess.hpp"
#include "sgqa/record_io.hpp"
#include "support.hpp"

using namespace sgqa;

namespace {

void same(const QuestionRecord& a, const QuestionRecord& b) {
  CHECK(a.question_id == b.question_id);
  CHECK(a.image_id == b.image_id);
  CHECK(a.template_id == b.template_id);
  CHECK(a.text == b.text);
  CHECK(a.program == b.program);
  CHECK(a.trace == b.trace);
  CHECK(a.answer == b.answer);
  CHECK(a.labels.attr_rel_type == b.labels.attr_rel_type);
  CHECK(a.labels.res_type == b.labels.res_type);
  CHECK(a.labels.answer_key == b.labels.answer_key);
  CHECK(a.reasoning_type == b.reasoning_type);
  CHECK(a.attribute == b.attribute);
  CHECK(a.n_hops == b.n_hops);
  CHECK(a.n_objects == b.n_objects);
  CHECK(a.objects == b.objects);
  CHECK(a.length_tokens == b.length_tokens);
  CHECK(a.is_problematic == b.is_problematic);
  CHECK(a.perturbation.has_value() == b.perturbation.has_value());
}

}  // namespace

TEST_CASE("records round trip through JSONL") {
  const SceneGraph g = preprocess(test::synth_graphs(41, 1)[0], test::lexicons(), {});
  const auto recs = test::engine().generate(g, Rng(42));
  REQUIRE_FALSE(recs.empty());
  std::stringstream buf;
  write_records(buf, recs);
  std::vector<QuestionRecord> back;
  for_each_record(buf, "mem", [&](QuestionRecord&& r) { back.push_back(std::move(r)); });
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) same(recs[i], back[i]);
}

TEST_CASE("bad lines name their line number") {
  std::stringstream buf("\n{\"question_id\": 3}\n");
  try {
    for_each_record(buf, "mem", [](QuestionRecord&&) {});
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
  }
  std::stringstream broken("{oops\n");
  CHECK_THROWS_AS(for_each_record(broken, "mem", [](QuestionRecord&&) {}), ParseError);
}
