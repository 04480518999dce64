#include "sgqa/record_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json_io.hpp"
#include "sgqa/errors.hpp"

namespace sgqa {

using nlohmann::json;

namespace {

std::string_view kind_name(Answer::Kind k) {
  switch (k) {
    case Answer::Kind::value: return "value";
    case Answer::Kind::value_list: return "value_list";
    case Answer::Kind::number: return "number";
    case Answer::Kind::yes_no: return "yes_no";
    case Answer::Kind::problematic: return "problematic";
  }
  return "problematic";
}

Answer::Kind parse_kind(const std::string& s) {
  for (auto k : {Answer::Kind::value, Answer::Kind::value_list, Answer::Kind::number, Answer::Kind::yes_no,
                 Answer::Kind::problematic}) {
    if (kind_name(k) == s) return k;
  }
  throw SchemaError("unknown answer kind '" + s + "'");
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw SchemaError(std::string("record is missing '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("record field '") + name + "' has the wrong type");
  }
}

}  // namespace

json to_json(const Answer& a) {
  json j{{"kind", kind_name(a.kind)}, {"text", a.render()}};
  switch (a.kind) {
    case Answer::Kind::value:
    case Answer::Kind::value_list: j["values"] = a.values; break;
    case Answer::Kind::number: j["number"] = a.number; break;
    case Answer::Kind::yes_no: j["yes"] = a.yes; break;
    case Answer::Kind::problematic: break;
  }
  return j;
}

Answer answer_from_json(const json& j) {
  Answer a;
  a.kind = parse_kind(field<std::string>(j, "kind"));
  switch (a.kind) {
    case Answer::Kind::value:
    case Answer::Kind::value_list: a.values = field<std::vector<std::string>>(j, "values"); break;
    case Answer::Kind::number: a.number = field<std::uint64_t>(j, "number"); break;
    case Answer::Kind::yes_no: a.yes = field<bool>(j, "yes"); break;
    case Answer::Kind::problematic: break;
  }
  if ((a.kind == Answer::Kind::value && a.values.size() != 1) ||
      (a.kind == Answer::Kind::value_list && a.values.empty())) {
    throw SchemaError("answer values do not match kind");
  }
  return a;
}

json to_json(const QuestionRecord& r) {
  json trace = json::array();
  for (const auto& s : r.trace) trace.push_back(to_json(s));
  json j{
      {"question_id", r.question_id},
      {"image_id", r.image_id},
      {"template_id", r.template_id},
      {"text", r.text},
      {"program", to_json(r.program)},
      {"trace", std::move(trace)},
      {"answer", to_json(r.answer)},
      {"labels",
       {{"attr_rel_type", r.labels.attr_rel_type},
        {"res_type", r.labels.res_type},
        {"answer_key", r.labels.answer_key}}},
      {"reasoning_type", to_string(r.reasoning_type)},
      {"attribute", r.attribute ? json(to_string(*r.attribute)) : json(nullptr)},
      {"n_hops", r.n_hops},
      {"n_objects", r.n_objects},
      {"objects", r.objects},
      {"length_tokens", r.length_tokens},
      {"is_problematic", r.is_problematic},
      {"perturbation", nullptr},
  };
  if (r.perturbation) {
    j["perturbation"] = {{"kind", to_string(r.perturbation->kind)}, {"detail", r.perturbation->detail}};
  }
  return j;
}

QuestionRecord record_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("record is not a JSON object");
  QuestionRecord r;
  r.question_id = field<std::string>(j, "question_id");
  r.image_id = field<std::string>(j, "image_id");
  r.template_id = field<std::string>(j, "template_id");
  r.text = field<std::string>(j, "text");
  r.program = program_from_json(field<json>(j, "program"));
  for (const auto& s : field<json>(j, "trace")) r.trace.push_back(step_result_from_json(s));
  r.answer = answer_from_json(field<json>(j, "answer"));
  const json labels = field<json>(j, "labels");
  r.labels.attr_rel_type = field<std::string>(labels, "attr_rel_type");
  r.labels.res_type = field<std::string>(labels, "res_type");
  r.labels.answer_key = field<std::string>(labels, "answer_key");
  const auto rt = parse_reasoning_type(field<std::string>(j, "reasoning_type"));
  if (!rt) throw SchemaError("unknown reasoning_type in record " + r.question_id);
  r.reasoning_type = *rt;
  if (j.contains("attribute") && !j.at("attribute").is_null()) {
    const auto cat = parse_category(field<std::string>(j, "attribute"));
    if (!cat) throw SchemaError("unknown attribute in record " + r.question_id);
    r.attribute = *cat;
  }
  r.n_hops = field<std::size_t>(j, "n_hops");
  r.n_objects = field<std::size_t>(j, "n_objects");
  r.objects = field<std::vector<std::string>>(j, "objects");
  r.length_tokens = field<std::size_t>(j, "length_tokens");
  r.is_problematic = field<bool>(j, "is_problematic");
  if (j.contains("perturbation") && !j.at("perturbation").is_null()) {
    const json& p = j.at("perturbation");
    const auto kind = parse_perturbation_kind(field<std::string>(p, "kind"));
    if (!kind) throw SchemaError("unknown perturbation kind in record " + r.question_id);
    r.perturbation = Perturbation{*kind, field<std::string>(p, "detail")};
  }
  return r;
}

void write_record(std::ostream& out, const QuestionRecord& r) { out << to_json(r).dump() << '\n'; }

void write_records(std::ostream& out, const std::vector<QuestionRecord>& records) {
  for (const auto& r : records) write_record(out, r);
}

void write_records(const std::filesystem::path& path, const std::vector<QuestionRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_records(out, records);
}

void for_each_record(std::istream& in, const std::string& origin, const std::function<void(QuestionRecord&&)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t start = offset;
    offset += line.size() + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    const json j = detail::parse_json(line, where, start);
    try {
      fn(record_from_json(j));
    } catch (const SchemaError& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }
}

std::vector<QuestionRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<QuestionRecord> out;
  for_each_record(in, path.string(), [&](QuestionRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

}  // namespace sgqa
