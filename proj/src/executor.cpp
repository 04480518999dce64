#include "sgqa/executor.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#include "sgqa/errors.hpp"

namespace sgqa {

namespace {

const std::string& literal(const Step& s, std::size_t i) { return std::get<std::string>(s.args[i]); }
std::size_t reg(const Step& s, std::size_t i) { return std::get<Register>(s.args[i]).index; }

bool name_matches(const ObjectNode& o, const std::string& name) { return name == kAnyObject || o.name == name; }

StepResult objects_or_none(std::vector<ObjectId> ids) {
  if (ids.empty()) return NoneResult{};
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ObjectSet{std::move(ids)};
}

StepResult values_or_none(const std::set<std::string>& values) {
  if (values.empty()) return NoneResult{};
  return ValueSet{{values.begin(), values.end()}};
}

// Neighbors of `id` reached through `predicate` with `id` in role `dir`.
template <typename Fn>
void for_each_neighbor(const HopContext& ctx, ObjectId id, const std::string& predicate, Direction dir, Fn&& fn) {
  for (const HopEdge& e : ctx.at(id)) {
    if (e.predicate == predicate && e.direction == dir) fn(e.neighbor);
  }
}

StepResult run_step(const Step& s, const std::vector<StepResult>& regs, const SceneGraph& g, const HopContext& ctx) {
  const auto objects = [&](std::size_t arg) -> const std::vector<ObjectId>& {
    return std::get<ObjectSet>(regs[reg(s, arg)]).ids;
  };
  switch (s.op) {
    case OpCode::select: {
      std::vector<ObjectId> ids;
      for (const auto& [id, o] : g.objects) {
        if (name_matches(o, literal(s, 0))) ids.push_back(id);
      }
      return objects_or_none(std::move(ids));
    }
    case OpCode::filter_attr: {
      const auto cat = *parse_category(literal(s, 1));
      std::vector<ObjectId> ids;
      for (ObjectId id : objects(0)) {
        if (g.objects.at(id).has_attribute(cat, literal(s, 2))) ids.push_back(id);
      }
      return objects_or_none(std::move(ids));
    }
    case OpCode::relate: {
      const Direction dir = *parse_direction(literal(s, 2));
      std::vector<ObjectId> ids;
      for (ObjectId id : objects(0)) {
        for_each_neighbor(ctx, id, literal(s, 1), dir, [&](ObjectId n) {
          if (name_matches(g.objects.at(n), literal(s, 3))) ids.push_back(n);
        });
      }
      return objects_or_none(std::move(ids));
    }
    case OpCode::query_attr: {
      const auto cat = *parse_category(literal(s, 1));
      std::set<std::string> values;
      for (ObjectId id : objects(0)) {
        const auto& v = g.objects.at(id).values(cat);
        values.insert(v.begin(), v.end());
      }
      return values_or_none(values);
    }
    case OpCode::common_attr: {
      const auto cat = *parse_category(literal(s, 1));
      const auto& ids = objects(0);
      std::set<std::string> common = g.objects.at(ids.front()).values(cat);
      for (ObjectId id : ids) {
        const auto& v = g.objects.at(id).values(cat);
        std::set<std::string> next;
        std::set_intersection(common.begin(), common.end(), v.begin(), v.end(), std::inserter(next, next.end()));
        common = std::move(next);
      }
      return values_or_none(common);
    }
    case OpCode::verify_attr: {
      const auto cat = *parse_category(literal(s, 1));
      const auto& ids = objects(0);
      return Truth{std::all_of(ids.begin(), ids.end(),
                               [&](ObjectId id) { return g.objects.at(id).has_attribute(cat, literal(s, 2)); })};
    }
    case OpCode::verify_rel: {
      const Direction dir = *parse_direction(literal(s, 2));
      const auto& ids = objects(0);
      return Truth{std::all_of(ids.begin(), ids.end(), [&](ObjectId id) {
        bool found = false;
        for_each_neighbor(ctx, id, literal(s, 1), dir,
                          [&](ObjectId n) { found = found || name_matches(g.objects.at(n), literal(s, 3)); });
        return found;
      })};
    }
    case OpCode::exist:
      return Truth{!objects(0).empty()};
    case OpCode::count:
      return Number{objects(0).size()};
    case OpCode::compare_attr: {
      const auto cat = *parse_category(literal(s, 2));
      const auto gather = [&](std::size_t arg) {
        std::set<std::string> values;
        for (ObjectId id : objects(arg)) {
          const auto& v = g.objects.at(id).values(cat);
          values.insert(v.begin(), v.end());
        }
        return values;
      };
      return Truth{gather(0) == gather(1)};
    }
    case OpCode::choose_attr: {
      const auto cat = *parse_category(literal(s, 1));
      const auto& ids = objects(0);
      const auto all_have = [&](const std::string& v) {
        return std::all_of(ids.begin(), ids.end(), [&](ObjectId id) { return g.objects.at(id).has_attribute(cat, v); });
      };
      const bool first = all_have(literal(s, 2));
      const bool second = all_have(literal(s, 3));
      if (first == second) return NoneResult{};
      return ValueSet{{first ? literal(s, 2) : literal(s, 3)}};
    }
    case OpCode::logical_and:
      return Truth{std::get<Truth>(regs[reg(s, 0)]).value && std::get<Truth>(regs[reg(s, 1)]).value};
    case OpCode::logical_or:
      return Truth{std::get<Truth>(regs[reg(s, 0)]).value || std::get<Truth>(regs[reg(s, 1)]).value};
  }
  return NoneResult{};
}

}  // namespace

std::string Answer::render() const {
  switch (kind) {
    case Kind::value: return values.front();
    case Kind::value_list: {
      std::string out;
      for (const auto& v : values) {
        if (!out.empty()) out += ", ";
        out += v;
      }
      return out;
    }
    case Kind::number: return std::to_string(number);
    case Kind::yes_no: return yes ? "yes" : "no";
    case Kind::problematic: return std::string(kProblematicAnswer);
  }
  return std::string(kProblematicAnswer);
}

Answer answer_from(const StepResult& last, const SceneGraph& g) {
  Answer a;
  const auto from_values = [&](std::vector<std::string> values) {
    a.kind = values.size() == 1 ? Answer::Kind::value : Answer::Kind::value_list;
    a.values = std::move(values);
  };
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, NoneResult>) {
          a = Answer::problematic();
        } else if constexpr (std::is_same_v<T, ObjectSet>) {
          std::set<std::string> names;
          for (ObjectId id : r.ids) names.insert(g.objects.at(id).name);
          from_values({names.begin(), names.end()});
        } else if constexpr (std::is_same_v<T, ValueSet>) {
          from_values(r.values);
        } else if constexpr (std::is_same_v<T, Number>) {
          a.kind = Answer::Kind::number;
          a.number = r.value;
        } else {
          a.kind = Answer::Kind::yes_no;
          a.yes = r.value;
        }
      },
      last);
  return a;
}

Execution execute(const Program& p, const SceneGraph& g) { return execute(p, g, build_hop_context(g)); }

Execution execute(const Program& p, const SceneGraph& g, const HopContext& ctx) {
  validate(p);
  Execution ex;
  ex.trace.reserve(p.steps.size());
  bool absorbed = false;
  for (const Step& s : p.steps) {
    if (absorbed) {
      ex.trace.emplace_back(NoneResult{});
      continue;
    }
    ex.trace.push_back(run_step(s, ex.trace, g, ctx));
    absorbed = is_none(ex.trace.back());
  }
  ex.answer = absorbed ? Answer::problematic() : answer_from(ex.trace.back(), g);
  return ex;
}

nlohmann::json to_json(const StepResult& r) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NoneResult>) return "NONE";
        else if constexpr (std::is_same_v<T, ObjectSet>) return {{"objects", v.ids}};
        else if constexpr (std::is_same_v<T, ValueSet>) return {{"values", v.values}};
        else if constexpr (std::is_same_v<T, Number>) return {{"number", v.value}};
        else return {{"bool", v.value}};
      },
      r);
}

StepResult step_result_from_json(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "NONE") return NoneResult{};
  if (j.is_object()) {
    if (j.contains("objects")) return ObjectSet{j["objects"].get<std::vector<ObjectId>>()};
    if (j.contains("values")) return ValueSet{j["values"].get<std::vector<std::string>>()};
    if (j.contains("number")) return Number{j["number"].get<std::uint64_t>()};
    if (j.contains("bool")) return Truth{j["bool"].get<bool>()};
  }
  throw SchemaError("unrecognized step result: " + j.dump());
}

std::string to_string(const StepResult& r) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NoneResult>) {
          return "NONE";
        } else if constexpr (std::is_same_v<T, ObjectSet>) {
          std::string s = "objects{";
          for (std::size_t i = 0; i < v.ids.size(); ++i) s += (i ? "," : "") + std::to_string(v.ids[i]);
          return s + "}";
        } else if constexpr (std::is_same_v<T, ValueSet>) {
          std::string s = "values{";
          for (std::size_t i = 0; i < v.values.size(); ++i) s += (i ? "," : "") + v.values[i];
          return s + "}";
        } else if constexpr (std::is_same_v<T, Number>) {
          return "number " + std::to_string(v.value);
        } else {
          return v.value ? "true" : "false";
        }
      },
      r);
}

}  // namespace sgqa
