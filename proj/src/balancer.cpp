#include "sgqa/balancer.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "sgqa/bbox.hpp"

namespace sgqa {

using nlohmann::json;

BalanceKey balance_key(const QuestionRecord& r) {
  return {r.labels.attr_rel_type, r.labels.res_type, r.labels.answer_key};
}

std::vector<std::string> validate(const BalanceConfig& cfg) {
  std::vector<std::string> out;
  if (!(cfg.max_answer_share > 0.0 && cfg.max_answer_share <= 1.0)) out.push_back("max_answer_share must be in (0,1]");
  if (!(cfg.marginal_tolerance >= 0.0 && cfg.marginal_tolerance <= 1.0)) {
    out.push_back("marginal_tolerance must be in [0,1]");
  }
  if (cfg.max_iterations == 0) out.push_back("max_iterations must be positive");
  return out;
}

json BalanceReport::to_json() const {
  json cell_list = json::array();
  for (const auto& c : cells) {
    cell_list.push_back({{"attr_rel_type", c.attr_rel_type},
                         {"res_type", c.res_type},
                         {"before", c.before},
                         {"after", c.after},
                         {"emptied", c.emptied},
                         {"infeasible", c.infeasible}});
  }
  return {{"input", input},
          {"length_rejected", length_rejected},
          {"output", output},
          {"iterations", iterations},
          {"converged", converged},
          {"cells", std::move(cell_list)},
          {"attributes", {{"before", attributes_before}, {"after", attributes_after}}},
          {"reasoning_types", {{"before", reasoning_before}, {"after", reasoning_after}}},
          {"warnings", warnings}};
}

std::vector<QuestionRecord> dedupe_by_object_overlap(std::vector<QuestionRecord> records) {
  using GroupKey = std::tuple<std::string, std::string, std::string, bool>;
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    groups[{r.image_id, r.labels.attr_rel_type, r.labels.res_type, r.is_problematic}].push_back(i);
  }
  std::vector<bool> keep(records.size(), false);
  for (auto& [key, idx] : groups) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = records[a];
      const auto& y = records[b];
      if (x.objects.size() != y.objects.size()) return x.objects.size() > y.objects.size();
      if (x.n_hops != y.n_hops) return x.n_hops > y.n_hops;
      if (x.text.size() != y.text.size()) return x.text.size() < y.text.size();
      return x.question_id < y.question_id;
    });
    std::vector<std::size_t> kept;
    for (std::size_t i : idx) {
      const auto& objs = records[i].objects;  // sorted
      const bool covered = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
        const auto& big = records[k].objects;
        return std::includes(big.begin(), big.end(), objs.begin(), objs.end());
      });
      if (!covered) {
        kept.push_back(i);
        keep[i] = true;
      }
    }
  }
  std::vector<QuestionRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(std::move(records[i]));
  }
  return out;
}

namespace {

using Cell = std::pair<std::string, std::string>;

struct Counts {
  std::map<Cell, std::map<std::string, std::size_t>> cells;
  std::map<std::string, std::size_t> attributes, reasoning;
};

Counts tally(const std::vector<QuestionRecord>& records, const std::vector<bool>& alive) {
  Counts c;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!alive[i]) continue;
    const auto& r = records[i];
    ++c.cells[{r.labels.attr_rel_type, r.labels.res_type}][r.labels.answer_key];
    if (r.attribute) ++c.attributes[std::string(to_string(*r.attribute))];
    ++c.reasoning[std::string(to_string(r.reasoning_type))];
  }
  return c;
}

// Answer-count targets for one cell. A cell with a single answer empties.
std::map<std::string, std::size_t> cap_targets(std::map<std::string, std::size_t> counts, const Ratio& cap) {
  if (cap.num >= cap.den) return counts;
  const auto p = static_cast<UInt128>(cap.num);
  const auto q = static_cast<UInt128>(cap.den);
  for (;;) {
    const auto top = std::max_element(counts.begin(), counts.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
    std::size_t total = 0;
    for (const auto& [k, n] : counts) total += n;
    const std::size_t others = total - top->second;
    if (static_cast<UInt128>(top->second) * (q - p) <= p * others) return counts;
    top->second = static_cast<std::size_t>(p * others / (q - p));
  }
}

// Largest per-group ceiling that brings every count within tolerance of the
// mean of the clamped counts.
std::optional<std::size_t> marginal_ceiling(const std::map<std::string, std::size_t>& counts, const Ratio& tol) {
  if (counts.size() < 2) return std::nullopt;
  const auto within = [&](std::size_t ceiling) {
    UInt128 sum = 0;
    for (const auto& [k, n] : counts) sum += std::min(n, ceiling);
    const auto k = static_cast<UInt128>(counts.size());
    for (const auto& [name, n] : counts) {
      const auto scaled = k * std::min(n, ceiling);
      const auto dev = scaled > sum ? scaled - sum : sum - scaled;
      if (dev * static_cast<UInt128>(tol.den) > static_cast<UInt128>(tol.num) * sum) return false;
    }
    return true;
  };
  std::size_t hi = 0, lo = SIZE_MAX;
  for (const auto& [k, n] : counts) {
    hi = std::max(hi, n);
    lo = std::min(lo, n);
  }
  if (within(hi)) return std::nullopt;
  // At the smallest count everything is equal, so the scan always ends.
  for (std::size_t t = hi; t > lo; --t) {
    if (within(t)) return t;
  }
  return lo;
}

// Keeps `target` of the alive records selected by `member`, sampled uniformly.
bool downsample(const std::vector<QuestionRecord>& records, std::vector<bool>& alive, std::size_t target, Rng rng,
                const std::function<bool(const QuestionRecord&)>& member) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (alive[i] && member(records[i])) idx.push_back(i);
  }
  if (idx.size() <= target) return false;
  rng.shuffle(idx);
  for (std::size_t i = target; i < idx.size(); ++i) alive[idx[i]] = false;
  return true;
}

}  // namespace

std::vector<QuestionRecord> balance(std::vector<QuestionRecord> records, const BalanceConfig& cfg, const Rng& rng,
                                    BalanceReport* report) {
  BalanceReport rep;
  rep.input = records.size();
  const Ratio cap = Ratio::from_decimal(cfg.max_answer_share);
  const Ratio tol = Ratio::from_decimal(cfg.marginal_tolerance);

  std::vector<bool> alive(records.size(), true);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].length_tokens >= kMaxQuestionTokens) {
      alive[i] = false;
      ++rep.length_rejected;
    }
  }

  const Counts initial = tally(records, alive);
  rep.attributes_before = initial.attributes;
  rep.reasoning_before = initial.reasoning;

  bool changed = true;
  std::size_t iteration = 0;
  while (changed) {
    if (iteration == cfg.max_iterations) {
      rep.converged = false;
      rep.warnings.push_back("balancing stopped after " + std::to_string(iteration) + " iterations");
      break;
    }
    changed = false;
    const std::string tag = std::to_string(iteration) + "/";

    // Answer cap per cell.
    for (const auto& [cell, answers] : tally(records, alive).cells) {
      for (const auto& [answer, n] : cap_targets(answers, cap)) {
        if (n == answers.at(answer)) continue;
        const Rng sub = rng.split(tag + "answer/" + cell.first + "/" + cell.second + "/" + answer);
        changed |= downsample(records, alive, n, sub, [&, a = answer](const QuestionRecord& r) {
          return r.labels.attr_rel_type == cell.first && r.labels.res_type == cell.second && r.labels.answer_key == a;
        });
      }
    }

    // Attribute marginals over the categories present.
    const Counts mid = tally(records, alive);
    if (const auto ceiling = marginal_ceiling(mid.attributes, tol)) {
      for (const auto& [name, n] : mid.attributes) {
        if (n <= *ceiling) continue;
        const Rng sub = rng.split(tag + "attribute/" + name);
        changed |= downsample(records, alive, *ceiling, sub, [&, a = name](const QuestionRecord& r) {
          return r.attribute && to_string(*r.attribute) == a;
        });
      }
    }

    // Reasoning-type marginals.
    const Counts late = tally(records, alive);
    if (const auto ceiling = marginal_ceiling(late.reasoning, tol)) {
      for (const auto& [name, n] : late.reasoning) {
        if (n <= *ceiling) continue;
        const Rng sub = rng.split(tag + "reasoning/" + name);
        changed |= downsample(records, alive, *ceiling, sub,
                              [&, a = name](const QuestionRecord& r) { return to_string(r.reasoning_type) == a; });
      }
    }
    ++iteration;
  }
  rep.iterations = iteration;

  const Counts final_counts = tally(records, alive);
  rep.attributes_after = final_counts.attributes;
  rep.reasoning_after = final_counts.reasoning;
  std::set<Cell> all_cells;
  for (const auto& [cell, a] : initial.cells) all_cells.insert(cell);
  for (const auto& cell : all_cells) {
    CellReport c{cell.first, cell.second, initial.cells.at(cell), {}, false};
    if (const auto it = final_counts.cells.find(cell); it != final_counts.cells.end()) c.after = it->second;
    std::size_t left = 0;
    for (const auto& [a, n] : c.after) left += n;
    c.emptied = left == 0;
    c.infeasible = cap_targets(c.after, cap) != c.after;
    if (c.emptied) {
      rep.warnings.push_back("cell " + cell.first + " / " + cell.second + " emptied by the answer cap");
    } else if (c.infeasible) {
      rep.warnings.push_back("cell " + cell.first + " / " + cell.second + " still exceeds the answer cap");
    }
    rep.cells.push_back(std::move(c));
  }

  std::vector<QuestionRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (alive[i]) out.push_back(std::move(records[i]));
  }
  rep.output = out.size();
  if (report) *report = std::move(rep);
  return out;
}

}  // namespace sgqa
