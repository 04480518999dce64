#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sgqa/clustering.hpp"
#include "sgqa/program.hpp"
#include "sgqa/scene_graph.hpp"

namespace sgqa {

inline constexpr std::string_view kProblematicAnswer = "the question itself is problematic";

struct NoneResult {
  friend bool operator==(const NoneResult&, const NoneResult&) = default;
};
struct ObjectSet {
  std::vector<ObjectId> ids;  // sorted, non-empty
  friend bool operator==(const ObjectSet&, const ObjectSet&) = default;
};
struct ValueSet {
  std::vector<std::string> values;  // sorted, non-empty
  friend bool operator==(const ValueSet&, const ValueSet&) = default;
};
struct Number {
  std::uint64_t value = 0;
  friend bool operator==(const Number&, const Number&) = default;
};
struct Truth {
  bool value = false;
  friend bool operator==(const Truth&, const Truth&) = default;
};

/// Output of one step. NONE absorbs: once produced, every later step is NONE.
using StepResult = std::variant<NoneResult, ObjectSet, ValueSet, Number, Truth>;

inline bool is_none(const StepResult& r) { return std::holds_alternative<NoneResult>(r); }

struct Answer {
  enum class Kind { value, value_list, number, yes_no, problematic };

  Kind kind = Kind::problematic;
  std::vector<std::string> values;  // one entry for `value`, sorted for `value_list`
  std::uint64_t number = 0;
  bool yes = false;

  static Answer problematic() { return {}; }
  bool is_problematic() const { return kind == Kind::problematic; }
  std::string render() const;
  friend bool operator==(const Answer&, const Answer&) = default;
};

struct Execution {
  std::vector<StepResult> trace;  // same length as the program
  Answer answer;
};

/// Runs a validated program; throws ProgramError for ill-formed programs and
/// never fails on graph content.
Execution execute(const Program& p, const SceneGraph& g);
Execution execute(const Program& p, const SceneGraph& g, const HopContext& ctx);

/// Maps the final step's result to an answer. Object sets answer with the
/// sorted distinct names of their members.
Answer answer_from(const StepResult& last, const SceneGraph& g);

nlohmann::json to_json(const StepResult& r);
StepResult step_result_from_json(const nlohmann::json& j);
std::string to_string(const StepResult& r);

}  // namespace sgqa
