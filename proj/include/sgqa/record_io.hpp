#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "sgqa/question_engine.hpp"

namespace sgqa {

/// Version of the QuestionRecord JSONL layout, recorded in manifests.
inline constexpr int kRecordSchemaVersion = 1;

nlohmann::json to_json(const Answer& a);
Answer answer_from_json(const nlohmann::json& j);

/// One record as a JSON object. The in-memory binding is not serialized.
nlohmann::json to_json(const QuestionRecord& r);
QuestionRecord record_from_json(const nlohmann::json& j);

void write_record(std::ostream& out, const QuestionRecord& r);
void write_records(std::ostream& out, const std::vector<QuestionRecord>& records);
void write_records(const std::filesystem::path& path, const std::vector<QuestionRecord>& records);

/// Streams records line by line. Blank lines are skipped; malformed lines
/// throw ParseError naming the line.
void for_each_record(std::istream& in, const std::string& origin, const std::function<void(QuestionRecord&&)>& fn);
std::vector<QuestionRecord> read_records(const std::filesystem::path& path);

}  // namespace sgqa
