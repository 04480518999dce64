#include "sgqa/templates.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "json_io.hpp"

namespace sgqa {

std::string_view to_string(ReasoningType t) {
  switch (t) {
    case ReasoningType::query: return "query";
    case ReasoningType::count: return "count";
    case ReasoningType::compare: return "compare";
    case ReasoningType::verify: return "verify";
    case ReasoningType::choose: return "choose";
  }
  return "query";
}

std::string_view to_string(Subtype t) { return t == Subtype::attr ? "attr" : "rel"; }

std::string_view to_string(Traversal t) {
  switch (t) {
    case Traversal::none: return "none";
    case Traversal::star: return "star";
    case Traversal::chain: return "chain";
  }
  return "none";
}

std::optional<ReasoningType> parse_reasoning_type(std::string_view s) {
  for (auto t : {ReasoningType::query, ReasoningType::count, ReasoningType::compare, ReasoningType::verify,
                 ReasoningType::choose}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string Template::res_type() const { return std::string(to_string(reasoning_type)) + "." + std::string(to_string(subtype)); }

namespace {

const std::set<std::string> kSurfaceSlots{"set", "obj", "obj2", "value", "choice1", "choice2", "cat", "rel"};
const std::set<std::string> kSkeletonSlots{"cat", "value", "choice1", "choice2", "pred", "target"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::set<std::string> surface_slots(const std::string& surface) {
  static const std::regex slot(R"(\{([a-z0-9_]+)\})");
  std::set<std::string> out;
  for (auto it = std::sregex_iterator(surface.begin(), surface.end(), slot); it != std::sregex_iterator(); ++it) {
    out.insert((*it)[1].str());
  }
  return out;
}

void check(bool ok, const std::string& id, const std::string& msg) {
  if (!ok) throw ConfigError("template '" + id + "': " + msg);
}

void validate_template(const Template& t) {
  const std::string& id = t.template_id;
  for (const auto& s : t.surface_slots) check(kSurfaceSlots.contains(s), id, "unknown surface slot {" + s + "}");

  std::set<std::string> fragments, slots, names;
  for (std::size_t i = 0; i < t.skeleton.size(); ++i) {
    const SkeletonLine& line = t.skeleton[i];
    check(!names.contains(line.name), id, "register '" + line.name + "' assigned twice");
    if (line.fragment) {
      fragments.insert(*line.fragment == Fragment::set ? "set" : *line.fragment == Fragment::obj ? "obj" : "obj2");
    } else {
      const auto sig = signature(line.op);
      check(line.args.size() == sig.size(), id, "line " + std::to_string(i) + " has the wrong number of arguments");
      for (std::size_t a = 0; a < sig.size(); ++a) {
        const bool wants_register = sig[a] == OperandKind::objects || sig[a] == OperandKind::boolean;
        if (const auto* ref = std::get_if<SkeletonRef>(&line.args[a])) {
          check(wants_register, id, "line " + std::to_string(i) + " passes a register where a literal belongs");
          check(names.contains(ref->name), id, "register '" + ref->name + "' used before assignment");
        } else {
          check(!wants_register, id, "line " + std::to_string(i) + " passes a literal where a register belongs");
          if (const auto* slot = std::get_if<SkeletonSlot>(&line.args[a])) slots.insert(slot->slot);
        }
      }
    }
    names.insert(line.name);
  }
  check(!t.skeleton.empty(), id, "empty program skeleton");
  check(!t.skeleton.back().fragment, id, "the last line must be an operation");

  // Surface and skeleton slots must correspond one to one.
  for (const char* f : {"set", "obj", "obj2"}) {
    check(t.uses(f) == fragments.contains(f), id, std::string("{") + f + "} and @" + f + " must appear together");
  }
  check(t.uses("rel") == (slots.contains("pred") && slots.contains("target")), id,
        "{rel} needs {pred} and {target} in the program and vice versa");
  check(slots.contains("pred") == slots.contains("target"), id, "{pred} and {target} must appear together");
  check(!t.uses("choice2") || t.uses("choice1"), id, "{choice2} needs {choice1}");
  for (const char* s : {"value", "choice1", "choice2"}) {
    check(t.uses(s) == slots.contains(s), id, std::string("{") + s + "} must appear in both surface and program");
  }
  check(!t.uses("cat") || slots.contains("cat"), id, "{cat} in the surface must be used by the program");
  check(!slots.contains("cat") || t.uses("cat") || t.uses_value(), id, "{cat} in the program has no surface slot");
  check(!(t.uses("value") && t.uses("choice1")), id, "{value} and {choice*} are exclusive");
  check(!(t.uses("cat") || t.uses_value()) || t.attribute_focus.has_value(), id,
        "attribute slots need an attribute focus");
  check(!t.uses("obj2") || t.uses("obj"), id, "{obj2} needs {obj}");
  check(t.traversal != Traversal::star || t.uses("obj2"), id, "star traversal needs {obj} and {obj2}");
  check(t.traversal != Traversal::chain || t.uses("obj"), id, "chain traversal needs {obj}");
  check(t.min_cluster_size >= 2, id, "min_cluster_size must be at least 2");
}

}  // namespace

SkeletonLine parse_skeleton_line(const std::string& raw) {
  const std::string text = trim(raw);
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("skeleton line '" + raw + "' needs 'name = ...'");
  SkeletonLine line;
  line.name = trim(text.substr(0, eq));
  const std::string rhs = trim(text.substr(eq + 1));
  if (line.name.empty()) throw ConfigError("skeleton line '" + raw + "' has no register name");
  if (!rhs.empty() && rhs.front() == '@') {
    const std::string frag = rhs.substr(1);
    if (frag == "set") line.fragment = Fragment::set;
    else if (frag == "obj") line.fragment = Fragment::obj;
    else if (frag == "obj2") line.fragment = Fragment::obj2;
    else throw ConfigError("unknown fragment '" + rhs + "'");
    return line;
  }
  const auto open = rhs.find('(');
  if (open == std::string::npos || rhs.back() != ')') throw ConfigError("skeleton line '" + raw + "' is not name = op(args)");
  const auto op = parse_opcode(trim(rhs.substr(0, open)));
  if (!op) throw ConfigError("skeleton line '" + raw + "' uses an unknown operator");
  line.op = *op;
  const std::string body = rhs.substr(open + 1, rhs.size() - open - 2);
  const auto sig = signature(*op);
  std::size_t start = 0, index = 0;
  while (start <= body.size()) {
    auto comma = body.find(',', start);
    if (comma == std::string::npos) comma = body.size();
    const std::string tok = trim(body.substr(start, comma - start));
    if (tok.size() > 2 && tok.front() == '{' && tok.back() == '}') {
      const std::string slot = tok.substr(1, tok.size() - 2);
      if (!kSkeletonSlots.contains(slot)) throw ConfigError("skeleton line '" + raw + "' uses unknown slot " + tok);
      line.args.emplace_back(SkeletonSlot{slot});
    } else if (index < sig.size() && (sig[index] == OperandKind::objects || sig[index] == OperandKind::boolean)) {
      line.args.emplace_back(SkeletonRef{tok});
    } else {
      line.args.emplace_back(tok);
    }
    ++index;
    start = comma + 1;
  }
  return line;
}

std::vector<Template> templates_from_json(const nlohmann::json& entry) {
  Template base;
  try {
    base.template_id = entry.at("template_id").get<std::string>();
    const auto rt = parse_reasoning_type(entry.at("reasoning_type").get<std::string>());
    if (!rt) throw ConfigError("template '" + base.template_id + "': unknown reasoning_type");
    base.reasoning_type = *rt;
    const std::string st = entry.at("subtype").get<std::string>();
    if (st != "attr" && st != "rel") throw ConfigError("template '" + base.template_id + "': subtype must be attr or rel");
    base.subtype = st == "attr" ? Subtype::attr : Subtype::rel;
    base.surface = entry.at("surface").get<std::string>();
    for (const auto& line : entry.at("program")) base.skeleton.push_back(parse_skeleton_line(line.get<std::string>()));
    base.min_cluster_size = entry.value("min_cluster_size", std::size_t{2});
    const std::string trav = entry.value("traversal", std::string("none"));
    if (trav == "none") base.traversal = Traversal::none;
    else if (trav == "star") base.traversal = Traversal::star;
    else if (trav == "chain") base.traversal = Traversal::chain;
    else throw ConfigError("template '" + base.template_id + "': unknown traversal '" + trav + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("template entry " + entry.dump() + ": " + e.what());
  }
  base.surface_slots = surface_slots(base.surface);

  std::vector<Template> out;
  const auto focus = entry.find("attribute_focus");
  if (focus == entry.end() || focus->is_null()) {
    out.push_back(base);
  } else if (focus->get<std::string>() == "*") {
    for (AttributeCategory c : kAllAttributeCategories) {
      Template t = base;
      t.template_id += "." + std::string(to_string(c));
      t.attribute_focus = c;
      out.push_back(std::move(t));
    }
  } else {
    const auto c = parse_category(focus->get<std::string>());
    if (!c) throw ConfigError("template '" + base.template_id + "': unknown attribute_focus");
    base.attribute_focus = c;
    out.push_back(base);
  }
  for (const auto& t : out) validate_template(t);
  return out;
}

std::vector<Template> load_templates(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<Template> all;
  for (const auto& f : files) {
    const auto doc = detail::parse_json_file(f);
    const auto& list = doc.is_array() ? doc : doc.at("templates");
    for (const auto& entry : list) {
      auto ts = templates_from_json(entry);
      std::move(ts.begin(), ts.end(), std::back_inserter(all));
    }
  }
  std::sort(all.begin(), all.end(), [](const Template& a, const Template& b) { return a.template_id < b.template_id; });
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].template_id == all[i - 1].template_id) {
      throw ConfigError("duplicate template id '" + all[i].template_id + "'");
    }
  }
  return all;
}

}  // namespace sgqa
