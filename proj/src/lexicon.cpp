#include "sgqa/lexicon.hpp"

#include "json_io.hpp"

namespace sgqa {

using detail::json;

AttributeLexicon::AttributeLexicon(std::map<std::string, AttributeCategory> entries)
    : entries_(std::move(entries)) {
  for (const auto& [value, cat] : entries_) by_category_[cat].push_back(value);
}

AttributeLexicon AttributeLexicon::load(const std::filesystem::path& path) {
  const json doc = detail::parse_json_file(path);
  if (!doc.is_object()) throw SchemaError(path.string() + ": attribute lexicon must be a JSON object");
  std::map<std::string, AttributeCategory> entries;
  for (const auto& [value, cat] : doc.items()) {
    if (!cat.is_string()) throw SchemaError(path.string() + ": category of '" + value + "' must be a string");
    const auto parsed = parse_category(cat.get<std::string>());
    if (!parsed) throw SchemaError(path.string() + ": unknown attribute category '" + cat.get<std::string>() + "'");
    entries.emplace(value, *parsed);
  }
  return AttributeLexicon(std::move(entries));
}

std::optional<AttributeCategory> AttributeLexicon::category_of(const std::string& value) const {
  const auto it = entries_.find(value);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& AttributeLexicon::values_of(AttributeCategory c) const {
  static const std::vector<std::string> empty;
  const auto it = by_category_.find(c);
  return it == by_category_.end() ? empty : it->second;
}

ContradictionLexicon ContradictionLexicon::load(const std::filesystem::path& path) {
  const json doc = detail::parse_json_file(path);
  if (!doc.is_array()) throw SchemaError(path.string() + ": contradiction lexicon must be a JSON array");
  ContradictionLexicon lex;
  for (const auto& entry : doc) {
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_string() || !entry[1].is_string() ||
        !entry[2].is_string()) {
      throw SchemaError(path.string() + ": contradiction entries must be [category, value, value]");
    }
    const auto cat = parse_category(entry[0].get<std::string>());
    if (!cat) throw SchemaError(path.string() + ": unknown attribute category '" + entry[0].get<std::string>() + "'");
    lex.add(*cat, entry[1].get<std::string>(), entry[2].get<std::string>());
  }
  return lex;
}

void ContradictionLexicon::add(AttributeCategory c, std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  pairs_.emplace(c, std::move(a), std::move(b));
}

bool ContradictionLexicon::contradicts(AttributeCategory c, const std::string& a, const std::string& b) const {
  return a < b ? pairs_.contains({c, a, b}) : pairs_.contains({c, b, a});
}

FlatTaxonomy::FlatTaxonomy(std::map<std::string, std::set<std::string>> ancestors)
    : ancestors_(std::move(ancestors)) {}

FlatTaxonomy FlatTaxonomy::load(const std::filesystem::path& path) {
  const json doc = detail::parse_json_file(path);
  if (!doc.is_object()) throw SchemaError(path.string() + ": taxonomy must be a JSON object");
  std::map<std::string, std::set<std::string>> ancestors;
  for (const auto& [name, list] : doc.items()) {
    if (!list.is_array()) throw SchemaError(path.string() + ": ancestors of '" + name + "' must be an array");
    auto& dst = ancestors[name];
    for (const auto& a : list) dst.insert(a.get<std::string>());
  }
  return FlatTaxonomy(std::move(ancestors));
}

std::optional<bool> FlatTaxonomy::is_hypernym(const std::string& bigger, const std::string& smaller) const {
  const auto it = ancestors_.find(smaller);
  if (it == ancestors_.end()) return std::nullopt;
  return it->second.contains(bigger);
}

std::vector<std::string> FlatTaxonomy::vocabulary() const {
  std::set<std::string> names;
  for (const auto& [name, anc] : ancestors_) {
    names.insert(name);
    names.insert(anc.begin(), anc.end());
  }
  return {names.begin(), names.end()};
}

std::vector<std::string> FlatTaxonomy::leaves() const {
  std::set<std::string> inner;
  for (const auto& [name, anc] : ancestors_) inner.insert(anc.begin(), anc.end());
  std::vector<std::string> out;
  for (const auto& [name, anc] : ancestors_) {
    if (!anc.empty() && !inner.contains(name)) out.push_back(name);
  }
  return out;
}

const std::set<std::string>& FlatTaxonomy::ancestors_of(const std::string& name) const {
  static const std::set<std::string> kEmpty;
  const auto it = ancestors_.find(name);
  return it == ancestors_.end() ? kEmpty : it->second;
}

RelationInverses::RelationInverses(const std::map<std::string, std::string>& pairs) {
  for (const auto& [a, b] : pairs) {
    inverse_[a] = b;
    inverse_.try_emplace(b, a);
  }
}

RelationInverses RelationInverses::load(const std::filesystem::path& path) {
  const json doc = detail::parse_json_file(path);
  if (!doc.is_object()) throw SchemaError(path.string() + ": relation inverse table must be a JSON object");
  std::map<std::string, std::string> pairs;
  for (const auto& [a, b] : doc.items()) pairs.emplace(a, b.get<std::string>());
  return RelationInverses(pairs);
}

std::optional<std::string> RelationInverses::inverse_of(const std::string& predicate) const {
  const auto it = inverse_.find(predicate);
  if (it == inverse_.end()) return std::nullopt;
  return it->second;
}

Lexicons Lexicons::load_dir(const std::filesystem::path& dir) {
  Lexicons lex;
  lex.attributes = AttributeLexicon::load(dir / "attributes.json");
  lex.contradictions = ContradictionLexicon::load(dir / "contradictions.json");
  lex.taxonomy = FlatTaxonomy::load(dir / "taxonomy.json");
  lex.inverses = RelationInverses::load(dir / "relation_inverses.json");
  return lex;
}

}  // namespace sgqa
