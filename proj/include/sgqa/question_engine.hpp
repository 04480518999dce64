#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sgqa/clustering.hpp"
#include "sgqa/executor.hpp"
#include "sgqa/lexicon.hpp"
#include "sgqa/program.hpp"
#include "sgqa/rng.hpp"
#include "sgqa/scene_graph.hpp"
#include "sgqa/templates.hpp"

namespace sgqa {

/// Questions with this many whitespace tokens or more are never emitted.
inline constexpr std::size_t kMaxQuestionTokens = 25;

enum class PerturbationKind { outlier_external, outlier_internal, relation_flip, attribute_flip };

std::string_view to_string(PerturbationKind k);
std::optional<PerturbationKind> parse_perturbation_kind(std::string_view s);

struct Perturbation {
  PerturbationKind kind;
  std::string detail;
};

/// Edge from an anchor set to the described objects. `direction` is the
/// role of the anchor's objects, matching the relate operator.
struct AnchoredRelation {
  std::string anchor;
  std::string predicate;
  Direction direction = Direction::object;
};

/// "red wooden things on the table": optional anchored relation, a noun
/// (object name or "*"), then attribute filters.
struct SetRef {
  std::optional<AnchoredRelation> relation;
  std::string noun{kAnyObject};
  std::vector<std::pair<AttributeCategory, std::string>> filters;
};

struct Hop {
  std::string predicate;
  Direction direction = Direction::object;  // role of the previous object
  std::string name;
};

/// "apple on the table near the window": anchor name plus relation hops.
struct ObjectRef {
  std::string anchor;
  std::vector<Hop> hops;

  const std::string& head_name() const { return hops.empty() ? anchor : hops.back().name; }
};

/// Slot values for one template instance.
struct Binding {
  FeatureSet cluster_features;
  std::vector<ObjectId> cluster_members;
  std::optional<SetRef> set;
  std::optional<ObjectRef> obj;
  std::optional<ObjectRef> obj2;
  ObjectId obj_id = 0;
  ObjectId obj2_id = 0;
  std::optional<std::string> value;
  std::optional<std::string> option;
  bool option_first = false;
  std::optional<std::pair<std::string, std::string>> rel;  // predicate, target name
  /// Label value for templates keyed on an attribute without singling it out.
  std::optional<std::string> focus_value;
};

struct QuestionLabels {
  std::string attr_rel_type;
  std::string res_type;
  std::string answer_key;
};

struct QuestionRecord {
  std::string question_id;
  std::string image_id;
  std::string template_id;
  std::string text;
  Program program;
  std::vector<StepResult> trace;
  Answer answer;
  QuestionLabels labels;
  ReasoningType reasoning_type = ReasoningType::query;
  std::optional<AttributeCategory> attribute;
  std::size_t n_hops = 0;
  std::size_t n_objects = 0;
  std::vector<std::string> objects;  // distinct names the question touches
  std::size_t length_tokens = 0;
  bool is_problematic = false;
  std::optional<Perturbation> perturbation;
  /// In-memory only; needed to perturb the record.
  std::optional<Binding> binding;
};

/// Longest chain of relate steps, taking the maximum over star arms.
std::size_t count_hops(const Program& p);

std::size_t count_tokens(const std::string& text);

struct EngineConfig {
  std::size_t max_features = kDefaultMaxFeatures;
  /// Chance that an answerable record also spawns a perturbed twin; 1/3
  /// gives one unanswerable question per three answerable ones.
  double perturb_ratio = 1.0 / 3.0;
  std::size_t max_perturb_attempts = 32;
};

class QuestionEngine {
 public:
  QuestionEngine(std::vector<Template> templates, const Lexicons& lexicons, EngineConfig config = {});

  const std::vector<Template>& templates() const { return templates_; }
  const Template* find_template(const std::string& id) const;
  const EngineConfig& config() const { return config_; }

  /// Enumerates every valid binding of `t` over `c`, in canonical order.
  /// Records come back without question ids.
  std::vector<QuestionRecord> instantiate(const Template& t, const Cluster& c, const HopContext& ctx,
                                          const SceneGraph& g, Rng& rng) const;

  /// Edits one slot of `q` so that it no longer fits the image. Returns
  /// nullopt when no candidate edit of this kind makes the program
  /// problematic.
  std::optional<QuestionRecord> perturb(const QuestionRecord& q, const SceneGraph& g, PerturbationKind kind,
                                        Rng& rng) const;

  /// All questions for one preprocessed graph: every template over every
  /// cluster, duplicates removed, ids assigned, perturbed twins appended
  /// after their source record. Uses the substream rng.split(image_id).
  std::vector<QuestionRecord> generate(const SceneGraph& g, const Rng& root) const;

  /// Rebuilds text and program for `t` from a binding.
  std::pair<std::string, Program> compile(const Template& t, const Binding& b) const;

 private:
  std::optional<QuestionRecord> finish(const Template& t, Binding b, const SceneGraph& g, const HopContext& ctx) const;

  std::vector<Template> templates_;
  const Lexicons* lexicons_;
  EngineConfig config_;
  std::vector<std::string> outlier_names_;
};

}  // namespace sgqa
