// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "generators.hpp"
#include "oracles.hpp"
#include "sgqa/balancer.hpp"
#include "sgqa/clustering.hpp"
#include "sgqa/executor.hpp"
#include "sgqa/pipeline.hpp"
#include "sgqa/preprocess.hpp"
#include "sgqa/semantic.hpp"
#include "sgqa/synth.hpp"
#include "support.hpp"

using namespace sgqa;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << id << "  " << name << "  (" << detail << ")" << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 1) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const PipelineConfig& base_config() {
  static const PipelineConfig cfg = [] {
    PipelineConfig c;
    c.data_dir = test::data_dir();
    return c;
  }();
  return cfg;
}

std::vector<QuestionRecord> generate_from(const std::vector<SceneGraph>& graphs, std::size_t jobs = 1) {
  PipelineConfig cfg = base_config();
  cfg.jobs = jobs;
  return generate_all(graphs, test::engine(), test::lexicons(), cfg);
}

std::map<std::string, SceneGraph> cleaned_by_id(const std::vector<SceneGraph>& graphs) {
  std::map<std::string, SceneGraph> out;
  for (const auto& g : graphs) out.emplace(g.image_id, preprocess(g, test::lexicons(), {}));
  return out;
}

void self_consistency() {
  const auto t0 = Clock::now();
  const auto graphs = test::synth_graphs(1001, 1000);
  const auto records = generate_from(graphs);
  const auto cleaned = cleaned_by_id(graphs);
  std::size_t bad = 0;
  for (const auto& r : records) {
    const auto ex = execute(r.program, cleaned.at(r.image_id));
    bad += !(ex.answer == r.answer && ex.trace == r.trace);
  }
  const double secs = seconds_since(t0);
  report(1, "self-consistency sweep", !records.empty() && bad == 0 && secs < 120,
         std::to_string(records.size()) + " records, " + std::to_string(bad) + " mismatches, " + fmt(secs) + " s");
}

void problematic_soundness() {
  const auto records = generate_from(test::synth_graphs(1002, 400));
  std::size_t perturbed = 0, bad_perturbed = 0, clean = 0, clean_with_none = 0;
  for (const auto& r : records) {
    if (r.perturbation) {
      ++perturbed;
      bad_perturbed += !(r.answer.render() == "the question itself is problematic" && r.is_problematic);
    } else {
      ++clean;
      clean_with_none += std::any_of(r.trace.begin(), r.trace.end(), [](const StepResult& s) { return is_none(s); });
    }
  }
  report(2, "problematic soundness", perturbed > 0 && bad_perturbed == 0 && clean_with_none == 0,
         std::to_string(perturbed) + " perturbed (" + std::to_string(bad_perturbed) + " wrong), " +
             std::to_string(clean) + " unperturbed (" + std::to_string(clean_with_none) + " with NONE)");
}

void iou_merge() {
  Rng rng(1003);
  const auto box = [&] {
    return BoundingBox{static_cast<std::int64_t>(rng.below(51)), static_cast<std::int64_t>(rng.below(51)),
                       1 + static_cast<std::int64_t>(rng.below(50)), 1 + static_cast<std::int64_t>(rng.below(50))};
  };
  std::size_t value_mismatch = 0, threshold_mismatch = 0, merge_mismatch = 0, above = 0;
  const Ratio threshold = Ratio::from_decimal(0.7);
  for (int i = 0; i < 10000; ++i) {
    BoundingBox a = box(), b = box();
    if (i % 4 == 0) {  // near-duplicates, so the threshold is exercised
      b = a;
      b.x += static_cast<std::int64_t>(rng.below(4));
      b.w = std::max<std::int64_t>(1, b.w - static_cast<std::int64_t>(rng.below(4)));
    }
    const auto px = oracle::pixel_iou(a, b);
    const bool oracle_above = oracle::pixel_iou_above(px, 7, 10);
    above += oracle_above;
    value_mismatch += !(iou(a, b) == Ratio{px.inter, px.uni});
    threshold_mismatch += (iou(a, b) > threshold) != oracle_above;

    SceneGraph g;
    g.image_id = "pair";
    g.objects.emplace(1, ObjectNode{1, "cup", std::nullopt, a, {}, {}});
    g.objects.emplace(2, ObjectNode{2, "cup", std::nullopt, b, {}, {}});
    const bool merged = merge_duplicate_objects(g, 0.7, test::lexicons().contradictions).objects.size() == 1;
    merge_mismatch += merged != oracle_above;
  }
  report(3, "IoU merge correctness", value_mismatch == 0 && threshold_mismatch == 0 && merge_mismatch == 0,
         "10000 pairs, " + std::to_string(above) + " above 0.7; mismatches: value " + std::to_string(value_mismatch) +
             ", threshold " + std::to_string(threshold_mismatch) + ", merge " + std::to_string(merge_mismatch));
}

std::set<oracle::RawCluster> as_raw(const std::vector<Cluster>& clusters) {
  std::set<oracle::RawCluster> out;
  for (const auto& c : clusters) {
    oracle::RawCluster r;
    for (const auto& f : c.features) {
      if (f.is_attr()) r.features.insert({0, std::to_string(static_cast<int>(f.category)), f.value, ""});
      else r.features.insert({1, f.predicate(), std::string(to_string(f.direction)), f.target_name});
    }
    r.members = c.members;
    out.insert(r);
  }
  return out;
}

void clustering_oracle() {
  std::vector<SceneGraph> suite;
  SynthConfig small;
  small.max_objects = 10;
  for (const auto& g : test::synth_graphs(1004, 300, small)) suite.push_back(preprocess(g, test::lexicons(), {}));
  Rng rng(1004);
  for (int i = 0; i < 300; ++i) suite.push_back(gen::small_graph(rng, 10));
  std::size_t checked = 0, discrepancies = 0;
  for (const auto& g : suite) {
    if (g.objects.size() > 10) continue;
    ++checked;
    const auto base = build_base_clusters(g);
    discrepancies += as_raw(base) != oracle::brute_clusters(g, 1);
    discrepancies += as_raw(merge_clusters(base, 4)) != oracle::brute_clusters(g, 4);
  }
  report(4, "clustering oracle equivalence", checked > 0 && discrepancies == 0,
         std::to_string(checked) + " graphs, " + std::to_string(discrepancies) + " discrepancies");
}

void executor_oracle() {
  Rng rng(1005);
  std::size_t disagreements = 0, absorption = 0, with_none = 0;
  for (int i = 0; i < 10000; ++i) {
    const SceneGraph g = gen::small_graph(rng);
    const Program p = gen::random_program(rng);
    const auto ex = execute(p, g);
    const auto ref = oracle::interpret(p, g);
    bool agree = ex.trace.size() == ref.size();
    for (std::size_t k = 0; agree && k < ref.size(); ++k) agree = gen::to_oracle(ex.trace[k], g) == ref[k];
    disagreements += !agree;
    const auto first = std::find_if(ex.trace.begin(), ex.trace.end(), [](const StepResult& s) { return is_none(s); });
    if (first != ex.trace.end()) {
      ++with_none;
      absorption += !std::all_of(first, ex.trace.end(), [](const StepResult& s) { return is_none(s); });
      absorption += !ex.answer.is_problematic();
    }
  }
  report(5, "executor oracle equivalence", disagreements == 0 && absorption == 0,
         "10000 pairs, " + std::to_string(disagreements) + " disagreements, " + std::to_string(with_none) +
             " traces with NONE, " + std::to_string(absorption) + " absorption violations");
}

void semantic_round_trip() {
  bool example_ok = false;
  try {
    const Program p = parse_semantic_string("select: table \xE2\x86\x92 relate: on, subject, apple \xE2\x86\x92 exist: ?");
    example_ok = p.steps.size() == 3 && parse_semantic_string(render_semantic_string(p)) == p &&
                 parse_pseudocode(render_program(p)) == p;
  } catch (const std::exception&) {
  }
  Rng rng(1006);
  std::size_t failed = 0;
  for (int i = 0; i < 200; ++i) {
    const Program p = gen::random_program(rng);
    try {
      failed += !(parse_semantic_string(render_semantic_string(p)) == p);
    } catch (const std::exception&) {
      ++failed;
    }
  }
  report(6, "semantic-string round trip", example_ok && failed == 0,
         std::string("example ") + (example_ok ? "ok" : "failed") + ", 200 strings, " + std::to_string(failed) +
             " failures");
}

void balancer_bounds() {
  auto records = generate_from(test::synth_graphs(1007, 300));
  // Skew: every "yes" appears five more times, plus a block of overlong questions.
  std::vector<QuestionRecord> skewed;
  for (const auto& r : records) {
    skewed.push_back(r);
    if (r.labels.answer_key == "yes") {
      for (int k = 0; k < 5; ++k) {
        QuestionRecord copy = r;
        copy.question_id += "/copy" + std::to_string(k);
        skewed.push_back(std::move(copy));
      }
    }
  }
  for (std::size_t i = 0; i < 200 && i < records.size(); ++i) {
    QuestionRecord r = records[i];
    r.question_id += "/long";
    r.length_tokens = 25 + i % 10;
    skewed.push_back(std::move(r));
  }
  const BalanceConfig cfg;
  const Rng rng = Rng(42).split("balance");
  BalanceReport rep;
  const auto out = balance(skewed, cfg, rng, &rep);

  std::map<std::pair<std::string, std::string>, std::map<std::string, std::size_t>> cells;
  std::size_t too_long = 0;
  for (const auto& r : out) {
    ++cells[{r.labels.attr_rel_type, r.labels.res_type}][r.labels.answer_key];
    too_long += r.length_tokens >= 25;
  }
  const Ratio cap = Ratio::from_decimal(cfg.max_answer_share);
  std::size_t over_cap = 0;
  for (const auto& [cell, answers] : cells) {
    std::size_t total = 0, top = 0;
    for (const auto& [a, n] : answers) {
      total += n;
      top = std::max(top, n);
    }
    over_cap += static_cast<UInt128>(top) * static_cast<UInt128>(cap.den) >
                static_cast<UInt128>(cap.num) * static_cast<UInt128>(total);
  }
  const auto again = balance(out, cfg, rng);
  bool identity = again.size() == out.size();
  for (std::size_t i = 0; identity && i < out.size(); ++i) identity = again[i].question_id == out[i].question_id;
  report(7, "balancer bounds", !out.empty() && over_cap == 0 && too_long == 0 && identity,
         std::to_string(skewed.size()) + " in, " + std::to_string(out.size()) + " out, " + std::to_string(cells.size()) +
             " cells, " + std::to_string(over_cap) + " over cap, " + std::to_string(too_long) + " too long, rebalance " +
             (identity ? "identity" : "changed"));
}

void determinism() {
  const fs::path dir = test::scratch_dir("acceptance_determinism");
  {
    std::ofstream out(dir / "graphs.jsonl");
    write_scene_graphs_jsonl(out, test::synth_graphs(1008, 300));
  }
  std::ostringstream sink_out, sink_err;
  const auto run = [&](const std::string& name, std::size_t jobs) {
    PipelineConfig cfg = base_config();
    cfg.input = dir / "graphs.jsonl";
    cfg.output = dir / name;
    cfg.seed = 42;
    cfg.jobs = jobs;
    return run_command(Command::pipeline, cfg, sink_out, sink_err) == 0;
  };
  bool ok = run("a", 1) && run("b", 1) && run("c", 4);
  std::size_t files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    ++files;
    const std::string ref = slurp(e.path());
    differing += ref != slurp(dir / "b" / e.path().filename());
    differing += ref != slurp(dir / "c" / e.path().filename());
  }
  ok = ok && files > 0 && differing == 0;
  report(8, "determinism", ok,
         std::to_string(files) + " files compared across 2 runs and jobs 1/4, " + std::to_string(differing) +
             " differences" + (sink_err.str().empty() ? "" : "; " + sink_err.str()));
}

long peak_rss_mb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return u.ru_maxrss / 1024;
}

void scale() {
  const auto t0 = Clock::now();
  const auto graphs = test::synth_graphs(1009, 5000);
  PipelineConfig cfg = base_config();
  std::vector<QuestionRecord> held;
  const long rss_before = peak_rss_mb();
  const std::size_t generated = generate_stream(graphs, test::engine(), test::lexicons(), cfg, [&](const QuestionRecord& r) {
    QuestionRecord light = r;
    light.program.steps.clear();
    light.trace.clear();
    light.binding.reset();
    held.push_back(std::move(light));
  });
  const double gen_secs = seconds_since(t0);
  BalanceReport rep;
  const auto balanced = balance_stage(std::move(held), cfg, &rep);
  const double secs = seconds_since(t0);
  report(9, "scale check", generated >= 100000 && secs < 300,
         std::to_string(generated) + " generated from 5000 graphs, " + std::to_string(balanced.size()) + " balanced, " +
             fmt(gen_secs) + " s generating, " + fmt(secs) + " s total, peak RSS " + std::to_string(peak_rss_mb()) +
             " MB (" + std::to_string(rss_before) + " MB before)");
}

struct Closed {
  double mean, sd, lo, hi;
};

Closed closed_form(const std::map<std::size_t, std::size_t>& hist) {
  long double n = 0, sum = 0;
  for (const auto& [v, c] : hist) {
    n += c;
    sum += static_cast<long double>(v) * c;
  }
  const long double mean = sum / n;
  long double ss = 0;
  for (const auto& [v, c] : hist) ss += c * (v - mean) * (v - mean);
  const long double sd = std::sqrt(ss / (n - 1));
  const long double half = 1.96L * sd / std::sqrt(n);
  return {static_cast<double>(mean), static_cast<double>(sd), static_cast<double>(mean - half),
          static_cast<double>(mean + half)};
}

void stats_shape() {
  // Fixture corpus: hops 0..3 in ratio 4:3:2:1, objects 1..5 in ratio 1:2:3:2:1.
  const std::map<std::size_t, std::size_t> hops{{0, 400}, {1, 300}, {2, 200}, {3, 100}};
  const std::map<std::size_t, std::size_t> objects{{1, 100}, {2, 200}, {3, 300}, {4, 200}, {5, 200}};
  std::vector<std::size_t> hop_seq, obj_seq;
  for (const auto& [v, c] : hops) hop_seq.insert(hop_seq.end(), c, v);
  for (const auto& [v, c] : objects) obj_seq.insert(obj_seq.end(), c, v);
  const fs::path dir = test::scratch_dir("acceptance_stats");
  const Program program = parse_pseudocode("r0 = select(thing)\nr1 = exist(r0)");
  {
    std::ofstream out(dir / "corpus.jsonl");
    for (std::size_t i = 0; i < hop_seq.size(); ++i) {
      QuestionRecord r;
      r.question_id = "fixture/" + std::to_string(i);
      r.image_id = "fixture";
      r.template_id = "fixture";
      r.text = "fixture";
      r.program = program;
      r.trace = {NoneResult{}, NoneResult{}};
      r.labels = {"color", "query.attr", "red"};
      r.n_hops = hop_seq[i];
      r.n_objects = obj_seq[(i * 7) % obj_seq.size()];
      r.length_tokens = 5 + i % 7;
      write_record(out, r);
    }
  }
  PipelineConfig cfg = base_config();
  cfg.input = dir / "corpus.jsonl";
  cfg.output = dir / "stats.json";
  std::ostringstream out, err;
  bool ok = run_command(Command::stats, cfg, out, err) == 0;
  double worst = 0;
  if (ok) {
    const auto j = nlohmann::json::parse(slurp(cfg.output));
    for (const auto& [key, hist] : {std::pair{"hops", hops}, std::pair{"objects", objects}}) {
      const Closed c = closed_form(hist);
      const auto& s = j.at(key);
      for (const auto& [got, want] : {std::pair{s.at("mean").get<double>(), c.mean},
                                      std::pair{s.at("sd").get<double>(), c.sd},
                                      std::pair{s.at("ci95")[0].get<double>(), c.lo},
                                      std::pair{s.at("ci95")[1].get<double>(), c.hi}}) {
        worst = std::max(worst, std::abs(got - want));
      }
    }
  }
  ok = ok && worst <= 1e-9;
  std::ostringstream w;
  w << worst;
  report(10, "stats closed-form check", ok, "max deviation " + w.str() + (err.str().empty() ? "" : "; " + err.str()));
}

}  // namespace

int main() {
  const std::vector<void (*)()> criteria{self_consistency, problematic_soundness, iou_merge,  clustering_oracle,
                                         executor_oracle,  semantic_round_trip,   balancer_bounds, determinism,
                                         scale,            stats_shape};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "criterion", false, std::string("exception: ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
