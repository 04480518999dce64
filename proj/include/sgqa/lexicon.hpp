#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "sgqa/attributes.hpp"

namespace sgqa {

/// Maps attribute value strings to their category.
class AttributeLexicon {
 public:
  AttributeLexicon() = default;
  explicit AttributeLexicon(std::map<std::string, AttributeCategory> entries);

  static AttributeLexicon load(const std::filesystem::path& path);

  std::optional<AttributeCategory> category_of(const std::string& value) const;
  /// All values of a category, sorted.
  const std::vector<std::string>& values_of(AttributeCategory c) const;
  const std::map<std::string, AttributeCategory>& entries() const { return entries_; }

 private:
  std::map<std::string, AttributeCategory> entries_;
  std::map<AttributeCategory, std::vector<std::string>> by_category_;
};

/// Unordered value pairs within a category that cannot hold together.
class ContradictionLexicon {
 public:
  ContradictionLexicon() = default;

  static ContradictionLexicon load(const std::filesystem::path& path);

  void add(AttributeCategory c, std::string a, std::string b);
  bool contradicts(AttributeCategory c, const std::string& a, const std::string& b) const;
  std::size_t size() const { return pairs_.size(); }

 private:
  std::set<std::tuple<AttributeCategory, std::string, std::string>> pairs_;
};

/// Answers whether one object name is a superclass of another.
class HypernymProvider {
 public:
  virtual ~HypernymProvider() = default;
  /// nullopt when either name is unknown to the provider.
  virtual std::optional<bool> is_hypernym(const std::string& bigger, const std::string& smaller) const = 0;
};

/// name -> ancestor list, loaded from a flat JSON object.
class FlatTaxonomy final : public HypernymProvider {
 public:
  FlatTaxonomy() = default;
  explicit FlatTaxonomy(std::map<std::string, std::set<std::string>> ancestors);

  static FlatTaxonomy load(const std::filesystem::path& path);

  std::optional<bool> is_hypernym(const std::string& bigger, const std::string& smaller) const override;
  /// Every name that appears as a key or an ancestor, sorted.
  std::vector<std::string> vocabulary() const;
  /// Names that are nobody's ancestor, sorted.
  std::vector<std::string> leaves() const;
  const std::set<std::string>& ancestors_of(const std::string& name) const;

 private:
  std::map<std::string, std::set<std::string>> ancestors_;
};

/// Symmetric predicate inverse table ("left of" <-> "right of").
class RelationInverses {
 public:
  RelationInverses() = default;
  explicit RelationInverses(const std::map<std::string, std::string>& pairs);

  static RelationInverses load(const std::filesystem::path& path);

  std::optional<std::string> inverse_of(const std::string& predicate) const;

 private:
  std::map<std::string, std::string> inverse_;
};

/// Everything the cleaning and generation stages read from disk.
struct Lexicons {
  AttributeLexicon attributes;
  ContradictionLexicon contradictions;
  FlatTaxonomy taxonomy;
  RelationInverses inverses;

  /// Loads attributes.json, contradictions.json, taxonomy.json and
  /// relation_inverses.json from one directory.
  static Lexicons load_dir(const std::filesystem::path& dir);
};

}  // namespace sgqa
