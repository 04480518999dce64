#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgqa {

/// Malformed input text (JSON, semantic strings, pseudocode).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  /// Byte offset for JSON input, clause/line index for program text.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Well-formed JSON that does not match the expected record layout.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid program (arity, operand kinds, undefined registers).
class ProgramError : public std::runtime_error {
 public:
  ProgramError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgqa
