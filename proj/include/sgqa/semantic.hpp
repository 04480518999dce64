#pragma once

#include <string>
#include <string_view>

#include "sgqa/program.hpp"

namespace sgqa {

/// Parses an arrow-separated semantic string such as
///   "select: table -> relate: on, subject, apple -> exist: ?"
/// into a program. Clauses are separated by "->" or the Unicode arrow.
///
/// Each single-input clause reads the previous clause's register unless its
/// first argument is an explicit reference "[k]". compare/and/or take two
/// references (and/or default to the two previous clauses).
///
/// Direction arguments follow the semantic-string convention: they name the
/// role of the object being looked up ("relate: on, subject, apple" from a
/// table finds apples that are on the table). The program IR stores the role
/// of the register's objects, so the direction is flipped on the way in.
///
/// Throws ParseError whose position() is the failing clause index.
Program parse_semantic_string(std::string_view s);

/// Inverse of parse_semantic_string for programs it can express.
std::string render_semantic_string(const Program& p);

}  // namespace sgqa
