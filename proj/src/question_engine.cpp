#include "sgqa/question_engine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sgqa {

std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::outlier_external: return "outlier_external";
    case PerturbationKind::outlier_internal: return "outlier_internal";
    case PerturbationKind::relation_flip: return "relation_flip";
    case PerturbationKind::attribute_flip: return "attribute_flip";
  }
  return "outlier_external";
}

std::optional<PerturbationKind> parse_perturbation_kind(std::string_view s) {
  for (auto k : {PerturbationKind::outlier_external, PerturbationKind::outlier_internal,
                 PerturbationKind::relation_flip, PerturbationKind::attribute_flip}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::size_t count_hops(const Program& p) {
  std::vector<std::size_t> depth(p.steps.size(), 0);
  std::size_t longest = 0;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    std::size_t d = 0;
    for (const Arg& a : s.args) {
      if (const auto* r = std::get_if<Register>(&a)) d = std::max(d, depth[r->index]);
    }
    if (s.op == OpCode::relate) ++d;
    depth[i] = d;
    longest = std::max(longest, d);
  }
  return longest;
}

std::size_t count_tokens(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string tok; in >> tok;) ++n;
  return n;
}

namespace {

std::string pluralize(const std::string& noun) {
  static const std::map<std::string, std::string> irregular{
      {"man", "men"},         {"woman", "women"},   {"person", "people"}, {"child", "children"},
      {"people", "people"},   {"foot", "feet"},     {"mouse", "mice"},    {"sheep", "sheep"},
      {"tooth", "teeth"},     {"glasses", "glasses"}, {"fruits", "fruits"}, {"utensils", "utensils"},
  };
  const auto sp = noun.rfind(' ');
  const std::string head = sp == std::string::npos ? "" : noun.substr(0, sp + 1);
  const std::string last = sp == std::string::npos ? noun : noun.substr(sp + 1);
  if (const auto it = irregular.find(last); it != irregular.end()) return head + it->second;
  const auto ends = [&](std::string_view suffix) {
    return last.size() >= suffix.size() && last.compare(last.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) return head + last + "es";
  if (ends("y") && last.size() > 1 && std::string_view("aeiou").find(last[last.size() - 2]) == std::string_view::npos) {
    return head + last.substr(0, last.size() - 1) + "ies";
  }
  return head + last + "s";
}

// Phrase for "found object related to `prev_np`", where `prev_role` is the
// role the previously described object plays in the edge.
std::string rel_phrase(const std::string& predicate, Direction prev_role, const std::string& prev_np) {
  if (prev_role == Direction::object) return predicate + " " + prev_np;
  return "that " + prev_np + " is " + predicate;
}

std::string object_phrase(const ObjectRef& r) {
  std::string np = r.anchor;
  for (const Hop& h : r.hops) np = h.name + " " + rel_phrase(h.predicate, h.direction, "the " + np);
  return np;
}

std::string set_phrase(const SetRef& s) {
  std::string out;
  for (const auto& f : s.filters) out += f.second + " ";
  out += s.noun == kAnyObject ? std::string("things") : pluralize(s.noun);
  if (s.relation) {
    out += " " + rel_phrase(s.relation->predicate, s.relation->direction, "the " + s.relation->anchor);
  }
  return out;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

Register emit_set(ProgramBuilder& pb, const SetRef& s) {
  Register r;
  if (s.relation) {
    r = pb.add(OpCode::select, {s.relation->anchor});
    r = pb.add(OpCode::relate, {r, s.relation->predicate, std::string(to_string(s.relation->direction)), s.noun});
  } else {
    r = pb.add(OpCode::select, {s.noun});
  }
  for (const auto& [cat, value] : s.filters) r = pb.add(OpCode::filter_attr, {r, std::string(to_string(cat)), value});
  return r;
}

Register emit_object(ProgramBuilder& pb, const ObjectRef& o) {
  Register r = pb.add(OpCode::select, {o.anchor});
  for (const Hop& h : o.hops) r = pb.add(OpCode::relate, {r, h.predicate, std::string(to_string(h.direction)), h.name});
  return r;
}

struct Compiled {
  std::string text;
  Program program;
  std::optional<Register> set_reg, obj_reg, obj2_reg;
};

// Objects reached from `from` through one hop.
std::vector<ObjectId> follow(const SceneGraph& g, const HopContext& ctx, const std::vector<ObjectId>& from,
                             const Hop& hop) {
  std::set<ObjectId> out;
  for (ObjectId id : from) {
    for (const HopEdge& e : ctx.at(id)) {
      if (e.predicate == hop.predicate && e.direction == hop.direction && g.objects.at(e.neighbor).name == hop.name) {
        out.insert(e.neighbor);
      }
    }
  }
  return {out.begin(), out.end()};
}

// A relational description is usable when its anchor name is unique and
// every hop lands on exactly one object, the last being `target`.
bool resolves_exactly(const SceneGraph& g, const HopContext& ctx, const ObjectRef& ref, ObjectId target) {
  if (g.count_named(ref.anchor) != 1) return false;
  std::vector<ObjectId> cur;
  for (const auto& [id, o] : g.objects) {
    if (o.name == ref.anchor) cur.push_back(id);
  }
  for (const Hop& h : ref.hops) {
    cur = follow(g, ctx, cur, h);
    if (cur.size() != 1) return false;
  }
  return cur.size() == 1 && cur.front() == target;
}

std::vector<ObjectRef> relational_refs(const SceneGraph& g, const HopContext& ctx, ObjectId target, std::size_t hops) {
  std::vector<ObjectRef> out;
  const std::string& target_name = g.objects.at(target).name;
  for (const HopEdge& e1 : ctx.at(target)) {
    const ObjectId mid = e1.neighbor;
    const Hop last{e1.predicate, flip(e1.direction), target_name};
    if (hops == 1) {
      ObjectRef ref{g.objects.at(mid).name, {last}};
      if (ref.anchor != target_name && resolves_exactly(g, ctx, ref, target)) out.push_back(std::move(ref));
      continue;
    }
    for (const HopEdge& e2 : ctx.at(mid)) {
      const ObjectId anchor = e2.neighbor;
      if (anchor == target || anchor == mid) continue;
      ObjectRef ref{g.objects.at(anchor).name, {Hop{e2.predicate, flip(e2.direction), g.objects.at(mid).name}, last}};
      if (ref.anchor == target_name || ref.anchor == ref.hops[0].name) continue;
      if (resolves_exactly(g, ctx, ref, target)) out.push_back(std::move(ref));
    }
  }
  return out;
}

bool mirrors_relation(const ObjectRef& ref, const std::optional<std::pair<std::string, std::string>>& rel) {
  if (!rel || ref.hops.empty()) return false;
  const Hop& last = ref.hops.back();
  const std::string& prev = ref.hops.size() == 1 ? ref.anchor : ref.hops[ref.hops.size() - 2].name;
  return last.direction == Direction::object && last.predicate == rel->first && prev == rel->second;
}

std::optional<ObjectRef> describe_object(const SceneGraph& g, const HopContext& ctx, ObjectId id, Traversal traversal,
                                         const Binding& b, Rng& rng) {
  if (traversal == Traversal::none) {
    const std::string& name = g.objects.at(id).name;
    if (g.count_named(name) != 1) return std::nullopt;
    return ObjectRef{name, {}};
  }
  const auto usable = [&](std::vector<ObjectRef> refs) {
    std::erase_if(refs, [&](const ObjectRef& r) { return mirrors_relation(r, b.rel); });
    return refs;
  };
  std::vector<ObjectRef> refs;
  if (traversal == Traversal::chain) refs = usable(relational_refs(g, ctx, id, 2));
  if (refs.empty()) refs = usable(relational_refs(g, ctx, id, 1));
  if (refs.empty()) return std::nullopt;
  return rng.pick(refs);
}

std::vector<std::string> names_touched(const Program& p, const std::vector<StepResult>& trace, const SceneGraph& g) {
  std::set<std::string> names;
  for (const Step& s : p.steps) {
    std::size_t pos = SIZE_MAX;
    if (s.op == OpCode::select) pos = 0;
    if (s.op == OpCode::relate || s.op == OpCode::verify_rel) pos = 3;
    if (pos != SIZE_MAX) {
      const auto& name = std::get<std::string>(s.args[pos]);
      if (name != kAnyObject) names.insert(name);
    }
  }
  for (const auto& r : trace) {
    if (const auto* objs = std::get_if<ObjectSet>(&r)) {
      for (ObjectId id : objs->ids) names.insert(g.objects.at(id).name);
    }
  }
  return {names.begin(), names.end()};
}

Compiled compile_impl(const Template& t, const Binding& b) {
  Compiled out;
  const std::string cat = t.attribute_focus ? std::string(to_string(*t.attribute_focus)) : std::string();
  const std::string choice1 = b.option ? (b.option_first ? *b.option : b.value.value_or("")) : std::string();
  const std::string choice2 = b.option ? (b.option_first ? b.value.value_or("") : *b.option) : std::string();

  out.text = t.surface;
  if (b.set) replace_all(out.text, "{set}", set_phrase(*b.set));
  if (b.obj) replace_all(out.text, "{obj}", object_phrase(*b.obj));
  if (b.obj2) replace_all(out.text, "{obj2}", object_phrase(*b.obj2));
  if (b.rel) replace_all(out.text, "{rel}", b.rel->first + " the " + b.rel->second);
  if (t.attribute_focus) replace_all(out.text, "{cat}", display_name(*t.attribute_focus));
  if (b.value) replace_all(out.text, "{value}", *b.value);
  if (b.option) {
    replace_all(out.text, "{choice1}", choice1);
    replace_all(out.text, "{choice2}", choice2);
  }

  const auto slot_value = [&](const std::string& slot) -> std::string {
    if (slot == "cat") return cat;
    if (slot == "value") return b.value.value_or("");
    if (slot == "choice1") return choice1;
    if (slot == "choice2") return choice2;
    if (slot == "pred") return b.rel ? b.rel->first : "";
    if (slot == "target") return b.rel ? b.rel->second : "";
    return "";
  };

  ProgramBuilder pb;
  std::map<std::string, Register> names;
  for (const SkeletonLine& line : t.skeleton) {
    if (line.fragment) {
      Register r;
      switch (*line.fragment) {
        case Fragment::set: r = emit_set(pb, *b.set); out.set_reg = r; break;
        case Fragment::obj: r = emit_object(pb, *b.obj); out.obj_reg = r; break;
        case Fragment::obj2: r = emit_object(pb, *b.obj2); out.obj2_reg = r; break;
      }
      names[line.name] = r;
      continue;
    }
    std::vector<Arg> args;
    for (const SkeletonArg& a : line.args) {
      if (const auto* ref = std::get_if<SkeletonRef>(&a)) args.emplace_back(names.at(ref->name));
      else if (const auto* slot = std::get_if<SkeletonSlot>(&a)) args.emplace_back(slot_value(slot->slot));
      else args.emplace_back(std::get<std::string>(a));
    }
    names[line.name] = pb.add(line.op, std::move(args));
  }
  out.program = std::move(pb).build();
  return out;
}

QuestionRecord make_record(const Template& t, Binding b, Compiled c, Execution ex, const SceneGraph& g) {
  QuestionRecord r;
  r.image_id = g.image_id;
  r.template_id = t.template_id;
  r.text = std::move(c.text);
  r.length_tokens = count_tokens(r.text);
  r.n_hops = count_hops(c.program);
  r.objects = names_touched(c.program, ex.trace, g);
  r.n_objects = r.objects.size();
  r.program = std::move(c.program);
  r.trace = std::move(ex.trace);
  r.answer = std::move(ex.answer);
  r.is_problematic = r.answer.kind == Answer::Kind::problematic;
  r.reasoning_type = t.reasoning_type;
  r.attribute = t.attribute_focus;
  if (b.value) r.labels.attr_rel_type = *b.value;
  else if (b.rel) r.labels.attr_rel_type = b.rel->first;
  else if (t.uses("cat")) r.labels.attr_rel_type = std::string(to_string(*t.attribute_focus));
  else if (b.focus_value) r.labels.attr_rel_type = *b.focus_value;
  else if (b.set && b.set->relation) r.labels.attr_rel_type = b.set->relation->predicate;
  else r.labels.attr_rel_type = "none";
  r.labels.res_type = t.res_type();
  r.labels.answer_key = r.answer.render();
  r.binding = std::move(b);
  return r;
}

}  // namespace

QuestionEngine::QuestionEngine(std::vector<Template> templates, const Lexicons& lexicons, EngineConfig config)
    : templates_(std::move(templates)), lexicons_(&lexicons), config_(config) {
  std::sort(templates_.begin(), templates_.end(),
            [](const Template& a, const Template& b) { return a.template_id < b.template_id; });
  outlier_names_ = lexicons.taxonomy.vocabulary();
}

const Template* QuestionEngine::find_template(const std::string& id) const {
  const auto it = std::lower_bound(templates_.begin(), templates_.end(), id,
                                   [](const Template& t, const std::string& key) { return t.template_id < key; });
  return it != templates_.end() && it->template_id == id ? &*it : nullptr;
}

std::pair<std::string, Program> QuestionEngine::compile(const Template& t, const Binding& b) const {
  auto c = compile_impl(t, b);
  return {std::move(c.text), std::move(c.program)};
}

std::optional<QuestionRecord> QuestionEngine::finish(const Template& t, Binding b, const SceneGraph& g,
                                                     const HopContext& ctx) const {
  Compiled c = compile_impl(t, b);
  if (count_tokens(c.text) >= kMaxQuestionTokens) return std::nullopt;
  Execution ex = execute(c.program, g, ctx);
  if (std::any_of(ex.trace.begin(), ex.trace.end(), [](const StepResult& r) { return is_none(r); })) {
    return std::nullopt;
  }
  const auto is_exactly = [&](const std::optional<Register>& reg, const std::vector<ObjectId>& want) {
    return !reg || std::get<ObjectSet>(ex.trace[reg->index]).ids == want;
  };
  // A set described by every cluster feature must name exactly the members.
  if (b.set && !b.value && !b.rel && !is_exactly(c.set_reg, b.cluster_members)) return std::nullopt;
  if (b.obj && !is_exactly(c.obj_reg, {b.obj_id})) return std::nullopt;
  if (b.obj2 && !is_exactly(c.obj2_reg, {b.obj2_id})) return std::nullopt;
  return make_record(t, std::move(b), std::move(c), std::move(ex), g);
}

std::vector<QuestionRecord> QuestionEngine::instantiate(const Template& t, const Cluster& c, const HopContext& ctx,
                                                        const SceneGraph& g, Rng& rng) const {
  std::vector<QuestionRecord> out;
  if (c.members.size() < t.min_cluster_size) return out;
  if ((t.subtype == Subtype::rel) != c.has_relation()) return out;

  std::vector<const Feature*> singled_values{nullptr};
  std::optional<std::string> focus_value;
  if (t.uses_value()) {
    singled_values.clear();
    for (const Feature& f : c.features) {
      if (f.is_attr() && f.category == *t.attribute_focus) singled_values.push_back(&f);
    }
  } else if (t.uses("cat")) {
    for (const Feature& f : c.features) {
      if (f.is_attr() && f.category == *t.attribute_focus) return out;
    }
  } else if (t.attribute_focus) {
    const auto first = std::find_if(c.features.begin(), c.features.end(), [](const Feature& f) { return f.is_attr(); });
    if (first == c.features.end() || first->category != *t.attribute_focus) return out;
    focus_value = first->value;
  }

  std::vector<const Feature*> singled_rels{nullptr};
  if (t.uses("rel")) {
    singled_rels.clear();
    for (const Feature& f : c.features) {
      if (f.is_rel() && f.direction == Direction::subject) singled_rels.push_back(&f);
    }
  }

  // Common member name, used as the noun of set descriptions.
  std::string noun(kAnyObject);
  {
    std::set<std::string> member_names;
    for (ObjectId id : c.members) member_names.insert(g.objects.at(id).name);
    if (member_names.size() == 1) noun = *member_names.begin();
  }

  for (const Feature* value : singled_values) {
    for (const Feature* rel : singled_rels) {
      Binding base;
      base.cluster_features = c.features;
      base.cluster_members = c.members;
      base.focus_value = focus_value;
      if (value) base.value = value->value;
      if (rel) base.rel = std::make_pair(rel->predicate(), rel->target_name);

      if (t.uses("set")) {
        SetRef set;
        set.noun = noun;
        std::size_t relations = 0;
        for (const Feature& f : c.features) {
          if (&f == value || &f == rel) continue;
          if (f.is_attr()) {
            set.filters.emplace_back(f.category, f.value);
          } else if (relations++ == 0) {
            set.relation = AnchoredRelation{f.target_name, f.predicate(), flip(f.direction)};
          }
        }
        if (relations > 1) continue;
        if (set.noun == kAnyObject && set.filters.empty() && !set.relation) continue;
        base.set = std::move(set);
      }

      std::vector<Binding> bindings;
      if (t.uses("obj")) {
        for (std::size_t i = 0; i < c.members.size(); ++i) {
          Binding b = base;
          b.obj_id = c.members[i];
          const auto ref = describe_object(g, ctx, b.obj_id, t.traversal, b, rng);
          if (!ref) continue;
          b.obj = *ref;
          if (!t.uses("obj2")) {
            bindings.push_back(std::move(b));
            continue;
          }
          for (std::size_t j = i + 1; j < c.members.size(); ++j) {
            Binding b2 = b;
            b2.obj2_id = c.members[j];
            const auto ref2 = describe_object(g, ctx, b2.obj2_id, t.traversal, b2, rng);
            if (!ref2) continue;
            b2.obj2 = *ref2;
            bindings.push_back(std::move(b2));
          }
        }
      } else {
        bindings.push_back(std::move(base));
      }

      for (Binding& b : bindings) {
        if (t.uses("choice1")) {
          std::set<std::string> held;
          for (ObjectId id : c.members) {
            const auto& v = g.objects.at(id).values(*t.attribute_focus);
            held.insert(v.begin(), v.end());
          }
          std::vector<std::string> options;
          for (const auto& v : lexicons_->attributes.values_of(*t.attribute_focus)) {
            if (!held.contains(v)) options.push_back(v);
          }
          if (options.empty()) continue;
          b.option = rng.pick(options);
          b.option_first = rng.chance(0.5);
        }
        if (auto rec = finish(t, std::move(b), g, ctx)) out.push_back(std::move(*rec));
      }
    }
  }
  return out;
}

std::optional<QuestionRecord> QuestionEngine::perturb(const QuestionRecord& q, const SceneGraph& g,
                                                      PerturbationKind kind, Rng& rng) const {
  if (!q.binding || q.is_problematic) return std::nullopt;
  const Template* t = find_template(q.template_id);
  if (!t) return std::nullopt;
  const Binding& src = *q.binding;

  // An edit site reads and writes one string slot of a binding.
  struct Site {
    std::string label;
    std::function<std::string&(Binding&)> slot;
  };
  std::vector<Site> sites;
  const auto add_object_sites = [&](const char* label, std::optional<ObjectRef> Binding::*field, bool names) {
    if (!(src.*field)) return;
    if (names) sites.push_back({std::string(label) + ".anchor", [field](Binding& b) -> std::string& { return (b.*field)->anchor; }});
    for (std::size_t i = 0; i < (src.*field)->hops.size(); ++i) {
      if (names) {
        sites.push_back({std::string(label) + ".hop" + std::to_string(i),
                         [field, i](Binding& b) -> std::string& { return (b.*field)->hops[i].name; }});
      } else {
        sites.push_back({std::string(label) + ".hop" + std::to_string(i),
                         [field, i](Binding& b) -> std::string& { return (b.*field)->hops[i].predicate; }});
      }
    }
  };

  std::vector<std::string> replacements_pool;
  std::set<std::string> present;
  for (const auto& [id, o] : g.objects) present.insert(o.name);

  switch (kind) {
    case PerturbationKind::outlier_external:
    case PerturbationKind::outlier_internal: {
      if (src.set && src.set->noun != kAnyObject) {
        sites.push_back({"set.noun", [](Binding& b) -> std::string& { return b.set->noun; }});
      }
      if (kind == PerturbationKind::outlier_external) {
        if (src.set && src.set->relation) {
          sites.push_back({"set.anchor", [](Binding& b) -> std::string& { return b.set->relation->anchor; }});
        }
        add_object_sites("obj", &Binding::obj, true);
        add_object_sites("obj2", &Binding::obj2, true);
        for (const auto& name : outlier_names_) {
          if (!present.contains(name)) replacements_pool.push_back(name);
        }
      } else {
        // Whole-reference swaps: the outsider is named directly.
        if (src.obj) sites.push_back({"obj", [](Binding& b) -> std::string& { b.obj->hops.clear(); return b.obj->anchor; }});
        if (src.obj2) sites.push_back({"obj2", [](Binding& b) -> std::string& { b.obj2->hops.clear(); return b.obj2->anchor; }});
        const std::set<Feature> cluster(src.cluster_features.begin(), src.cluster_features.end());
        for (const auto& [id, o] : g.objects) {
          if (std::binary_search(src.cluster_members.begin(), src.cluster_members.end(), id)) continue;
          if (g.count_named(o.name) != 1) continue;
          const auto own = features_of(g, id);
          if (std::any_of(own.begin(), own.end(), [&](const Feature& f) { return cluster.contains(f); })) continue;
          replacements_pool.push_back(o.name);
        }
      }
      break;
    }
    case PerturbationKind::relation_flip: {
      if (src.set && src.set->relation) {
        sites.push_back({"set.predicate", [](Binding& b) -> std::string& { return b.set->relation->predicate; }});
      }
      add_object_sites("obj", &Binding::obj, false);
      add_object_sites("obj2", &Binding::obj2, false);
      if (src.rel) sites.push_back({"rel.predicate", [](Binding& b) -> std::string& { return b.rel->first; }});
      std::set<std::string> predicates;
      for (const auto& [id, o] : g.objects) {
        for (const auto& r : o.relations) predicates.insert(r.predicate);
      }
      replacements_pool.assign(predicates.begin(), predicates.end());
      break;
    }
    case PerturbationKind::attribute_flip: {
      if (src.set) {
        for (std::size_t i = 0; i < src.set->filters.size(); ++i) {
          sites.push_back({"set.filter" + std::to_string(i),
                           [i](Binding& b) -> std::string& { return b.set->filters[i].second; }});
        }
      }
      if (src.value) sites.push_back({"value", [](Binding& b) -> std::string& { return *b.value; }});
      break;
    }
  }
  if (sites.empty()) return std::nullopt;

  // Candidate edits: (site, replacement). Inverse predicates go first.
  std::vector<std::pair<std::size_t, std::string>> preferred, candidates;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    Binding probe = src;
    const std::string current = sites[s].slot(probe);
    std::vector<std::string> pool = replacements_pool;
    if (kind == PerturbationKind::attribute_flip) {
      const auto cat = lexicons_->attributes.category_of(current);
      if (cat) pool = lexicons_->attributes.values_of(*cat);
    }
    if (kind == PerturbationKind::relation_flip) {
      if (const auto inv = lexicons_->inverses.inverse_of(current); inv && *inv != current) {
        preferred.emplace_back(s, *inv);
      }
    }
    for (const auto& r : pool) {
      if (r != current) candidates.emplace_back(s, r);
    }
  }
  rng.shuffle(preferred);
  rng.shuffle(candidates);
  preferred.insert(preferred.end(), candidates.begin(), candidates.end());

  const HopContext ctx = build_hop_context(g);
  std::size_t attempts = 0;
  for (const auto& [site, replacement] : preferred) {
    if (attempts++ >= config_.max_perturb_attempts) break;
    Binding b = src;
    std::string& slot = sites[site].slot(b);
    const std::string before = slot;
    slot = replacement;
    Compiled c = compile_impl(*t, b);
    if (count_tokens(c.text) >= kMaxQuestionTokens) continue;
    Execution ex = execute(c.program, g, ctx);
    if (ex.answer.kind != Answer::Kind::problematic) continue;
    QuestionRecord r = make_record(*t, std::move(b), std::move(c), std::move(ex), g);
    r.question_id = q.question_id + "/" + std::string(to_string(kind));
    r.perturbation = Perturbation{kind, sites[site].label + ": " + before + " -> " + replacement};
    return r;
  }
  return std::nullopt;
}

std::vector<QuestionRecord> QuestionEngine::generate(const SceneGraph& g, const Rng& root) const {
  if (!g.preprocessed) throw std::invalid_argument("generate needs a preprocessed scene graph: " + g.image_id);
  Rng rng = root.split(g.image_id);
  const auto clusters = merge_clusters(build_base_clusters(g), config_.max_features);
  const HopContext ctx = build_hop_context(g);

  std::set<std::string> seen;
  const auto fresh = [&](const QuestionRecord& r) {
    return seen.insert(r.template_id + '\x1f' + r.text + '\x1f' + render_program(r.program)).second;
  };

  std::vector<QuestionRecord> base;
  for (const Template& t : templates_) {
    std::size_t n = 0;
    for (const Cluster& c : clusters) {
      for (auto& r : instantiate(t, c, ctx, g, rng)) {
        if (!fresh(r)) continue;
        r.question_id = g.image_id + "/" + t.template_id + "/" + std::to_string(n++);
        base.push_back(std::move(r));
      }
    }
  }

  std::vector<QuestionRecord> out;
  out.reserve(base.size() + base.size() / 2);
  std::vector<PerturbationKind> kinds{PerturbationKind::outlier_external, PerturbationKind::outlier_internal,
                                      PerturbationKind::relation_flip, PerturbationKind::attribute_flip};
  for (auto& r : base) {
    const bool twin = rng.chance(config_.perturb_ratio);
    std::optional<QuestionRecord> perturbed;
    if (twin) {
      auto order = kinds;
      rng.shuffle(order);
      for (PerturbationKind k : order) {
        perturbed = perturb(r, g, k, rng);
        if (perturbed && fresh(*perturbed)) break;
        perturbed.reset();
      }
    }
    out.push_back(std::move(r));
    if (perturbed) out.push_back(std::move(*perturbed));
  }
  return out;
}

}  // namespace sgqa
