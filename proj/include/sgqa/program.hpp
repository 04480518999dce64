#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace sgqa {

enum class OpCode {
  select,
  filter_attr,
  relate,
  query_attr,
  common_attr,
  verify_attr,
  verify_rel,
  exist,
  count,
  compare_attr,
  choose_attr,
  logical_and,
  logical_or,
};

std::string_view to_string(OpCode op);
std::optional<OpCode> parse_opcode(std::string_view s);

/// What an operand position accepts.
enum class OperandKind {
  objects,    // register holding an object set
  boolean,    // register holding a truth value
  name,       // object name, or "*" for any object
  category,   // attribute category
  value,      // attribute value
  predicate,
  direction,  // "subject" | "object": role of the register's objects
};

/// What a step produces.
enum class ResultKind { objects, values, number, boolean };

std::span<const OperandKind> signature(OpCode op);
ResultKind result_kind(OpCode op);

inline constexpr std::string_view kAnyObject = "*";

struct Register {
  std::size_t index = 0;
  friend auto operator<=>(const Register&, const Register&) = default;
};

std::string register_name(Register r);

using Arg = std::variant<Register, std::string>;

struct Step {
  OpCode op = OpCode::select;
  std::vector<Arg> args;
  Register out;

  friend bool operator==(const Step&, const Step&) = default;
};

/// Straight-line program; step i writes register ri, the last register is
/// the answer.
struct Program {
  std::vector<Step> steps;

  const Step& answer_step() const { return steps.back(); }
  friend bool operator==(const Program&, const Program&) = default;
};

/// Throws ProgramError naming the offending step.
void validate(const Program& p);

/// One `rK = op(args)` line per step. Literals that would not survive
/// re-reading (commas, parentheses, quotes, outer blanks, empty, or a
/// register-like token) are written as JSON string literals.
std::string render_program(const Program& p);

/// Inverse of render_program. Throws ParseError with the line index.
Program parse_pseudocode(std::string_view text);

nlohmann::json to_json(const Program& p);
Program program_from_json(const nlohmann::json& j);

/// Convenience builder used by the question engine and tests.
class ProgramBuilder {
 public:
  Register add(OpCode op, std::vector<Arg> args);
  Program build() &&;
  std::size_t size() const { return program_.steps.size(); }

 private:
  Program program_;
};

}  // namespace sgqa
