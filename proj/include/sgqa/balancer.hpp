#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgqa/question_engine.hpp"
#include "sgqa/rng.hpp"

namespace sgqa {

struct BalanceKey {
  std::string attr_rel_type;
  std::string res_type;
  std::string answer_key;

  friend auto operator<=>(const BalanceKey&, const BalanceKey&) = default;
};

BalanceKey balance_key(const QuestionRecord& r);

struct BalanceConfig {
  /// Largest share any answer may hold within an (attr_rel_type, res_type) cell.
  double max_answer_share = 0.5;
  /// Allowed relative deviation of attribute and reasoning-type counts from their mean.
  double marginal_tolerance = 0.2;
  std::size_t max_iterations = 64;
};

/// Validation messages for a config; empty when usable.
std::vector<std::string> validate(const BalanceConfig& cfg);

struct CellReport {
  std::string attr_rel_type;
  std::string res_type;
  std::map<std::string, std::size_t> before;  // answer_key -> count
  std::map<std::string, std::size_t> after;
  bool emptied = false;     // every answer was capped away
  bool infeasible = false;  // the cap still fails, only when not converged
};

struct BalanceReport {
  std::size_t input = 0;
  std::size_t length_rejected = 0;
  std::size_t output = 0;
  std::size_t iterations = 0;
  bool converged = true;
  std::vector<CellReport> cells;
  std::map<std::string, std::size_t> attributes_before, attributes_after;
  std::map<std::string, std::size_t> reasoning_before, reasoning_after;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

/// Within each (image, attr_rel_type, res_type, problematic) group, drops
/// records whose object-name set is a subset of a record kept earlier in
/// priority order: more objects, more hops, shorter text, smaller id.
/// Survivors keep their input order.
std::vector<QuestionRecord> dedupe_by_object_overlap(std::vector<QuestionRecord> records);

/// Downsamples until every cell meets the answer cap and the attribute and
/// reasoning-type marginals sit within tolerance of their means. Records with
/// length_tokens >= kMaxQuestionTokens are rejected first. A cell holding a
/// single answer cannot meet a cap below 1 and is emptied with a warning.
/// Survivors keep input order.
std::vector<QuestionRecord> balance(std::vector<QuestionRecord> records, const BalanceConfig& cfg, const Rng& rng,
                                    BalanceReport* report = nullptr);

}  // namespace sgqa
