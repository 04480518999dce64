#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sgqa/attributes.hpp"
#include "sgqa/program.hpp"

namespace sgqa {

enum class ReasoningType { query, count, compare, verify, choose };
enum class Subtype { attr, rel };
enum class Traversal { none, star, chain };

std::string_view to_string(ReasoningType t);
std::string_view to_string(Subtype t);
std::string_view to_string(Traversal t);
std::optional<ReasoningType> parse_reasoning_type(std::string_view s);

inline constexpr std::size_t kReasoningTypeCount = 5;

/// Which object reference a fragment line expands.
enum class Fragment { set, obj, obj2 };

/// Operand of a skeleton line.
struct SkeletonRef {
  std::string name;  // earlier line's register name
};
struct SkeletonSlot {
  std::string slot;  // cat | value | choice1 | choice2 | pred | target
};
using SkeletonArg = std::variant<SkeletonRef, SkeletonSlot, std::string>;

/// Either "name = @fragment" or "name = op(args)".
struct SkeletonLine {
  std::string name;
  std::optional<Fragment> fragment;
  OpCode op = OpCode::select;
  std::vector<SkeletonArg> args;
};

/// A question pattern. Surface slots:
///   {set}      cluster members described by the features not singled out
///   {obj}      one member ({obj2}: a second one), by name or relations
///   {value}    a member attribute of the focus category, singled out
///   {choice1}, {choice2}  that value and a distractor, in random order
///   {cat}      the focus category itself
///   {rel}      a relation feature of the cluster, singled out
struct Template {
  std::string template_id;
  ReasoningType reasoning_type = ReasoningType::query;
  Subtype subtype = Subtype::attr;
  std::optional<AttributeCategory> attribute_focus;
  std::string surface;
  std::vector<SkeletonLine> skeleton;
  std::size_t min_cluster_size = 2;
  Traversal traversal = Traversal::none;

  std::set<std::string> surface_slots;

  bool uses(const std::string& slot) const { return surface_slots.contains(slot); }
  bool uses_value() const { return uses("value") || uses("choice1"); }
  std::string res_type() const;
};

/// Parses one skeleton line; throws ConfigError.
SkeletonLine parse_skeleton_line(const std::string& line);

/// Builds templates from a template-file entry. A focus of "*" expands to
/// one template per attribute category, suffixing the id with the category.
std::vector<Template> templates_from_json(const nlohmann::json& entry);

/// Loads a template file, or every *.json file in a directory. Result is
/// sorted by template_id; duplicate ids are an error.
std::vector<Template> load_templates(const std::filesystem::path& path);

}  // namespace sgqa
